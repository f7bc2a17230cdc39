#ifndef FPK_SYMPLECTIZATION_HPP
#define FPK_SYMPLECTIZATION_HPP

#include "fpk/defaults.hpp"
#include "fpk/fstructure.hpp"

namespace fpk {

/// The trivialized annihilator bundle M x R^k with its tautological-type data.
struct Symplectization {
    ChartPtr chart;   ///< base coordinates followed by t1..tk
    KForm alpha_form; ///< sum_j t_j eta^j, degree 1
    KForm omega;      ///< -d(alpha_form), degree 2
    Expr tau;         ///< sum_j alpha^j t_j
};

/// Extends the chart of `s` by fibre coordinates t1..tk and builds alpha, omega
/// and tau. The t-box is the lexicographically first product of unit intervals
/// [a_j, a_j+1], a_j in {-2..2}, on which tau >= kTauMargin everywhere.
/// Throws AllAlphaZero when every alpha^j vanishes and EmptyPositiveCone when
/// no admissible box exists within those bounds.
Symplectization build_symplectization(const FpkStructure& s);

/// Compares omega componentwise against sum_j eta^j wedge dt_j + tau Phi_g.
CheckReport verify_expansion(const Symplectization& sp, const FpkStructure& s,
                             int samples = kDefaultSamples, double tol = kDefaultTol);

/// Computes omega^(n+k) by repeated wedge and compares it against
/// (n+k)!/n! eta^1 ^ dt_1 ^ ... ^ eta^k ^ dt_k ^ (tau Phi_g)^n. The single
/// report also asserts the top coefficient is nonvanishing at every sample and
/// that d(omega) = 0 to kClosureTol; the note records those sub-results.
CheckReport verify_top_power(const Symplectization& sp, const FpkStructure& s,
                             int samples = kDefaultSamples, double tol = kTopPowerTol);

} // namespace fpk

#endif
