#ifndef FPK_DEFAULTS_HPP
#define FPK_DEFAULTS_HPP

namespace fpk {

// Pinned defaults for every suite. Tests and the CLI share these so that a
// report produced anywhere is comparable.

inline constexpr int kDefaultSamples = 100;

/// validate_fpk, classify, structure_propositions, verify_expansion.
inline constexpr double kDefaultTol = 1e-9;

/// Jacobi/Hamiltonian identity suite; two nested symbolic solves plus
/// differentiation compound roundoff past the 1e-9 regime.
inline constexpr double kHamiltonianTol = 1e-7;

/// Symbolic solve vs independent pointwise numeric solve.
inline constexpr double kOracleAgreementTol = 1e-9;

/// Top-power coefficient match in the symplectization.
inline constexpr double kTopPowerTol = 1e-8;

/// d(omega) and other identities that are exact by construction.
inline constexpr double kClosureTol = 1e-12;

/// |sum c_j alpha^j - 1| bound for an admissible eta choice.
inline constexpr double kEtaChoiceTol = 1e-12;

/// Relative singular-value cutoff for numeric rank.
inline constexpr double kRankRatio = 1e-8;

/// Pointwise floor for the smallest metric eigenvalue.
inline constexpr double kMetricEigenFloor = 1e-10;

/// Pointwise floor for |det| of the symplectization 2-form matrix.
inline constexpr double kDetFloor = 1e-10;

/// The fibre box of a symplectization keeps tau at or above this margin.
inline constexpr double kTauMargin = 0.1;

/// Random fields appended to the coordinate frame when instantiating
/// universally quantified identities.
inline constexpr int kRandomFieldCount = 10;

} // namespace fpk

#endif
