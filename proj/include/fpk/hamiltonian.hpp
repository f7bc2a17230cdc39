#ifndef FPK_HAMILTONIAN_HPP
#define FPK_HAMILTONIAN_HPP

#include <vector>

#include "fpk/fstructure.hpp"

namespace fpk {

/// Constant coefficients c of the reference 1-form eta = sum c_j eta^j,
/// admissible when sum c_j alpha^j = 1 (so that eta(xi) = 1).
struct EtaChoice {
    std::vector<double> c;
};

/// Validates the normalization within kEtaChoiceTol.
EtaChoice make_eta_choice(const FpkStructure& s, std::vector<double> c);

/// The minimal-norm admissible choice c_j = alpha^j / sum(alpha^i)^2.
EtaChoice default_eta_choice(const FpkStructure& s);

/// xi = sum alpha^j xi_j. Throws AllAlphaZero when every constant vanishes.
VectorField reeb_field(const FpkStructure& s);

struct HamiltonianField {
    Expr f;
    VectorField field;
    std::vector<CheckReport> residuals;
};

/// Factors the defining linear system of X_f once per structure and solves it
/// symbolically for many f. Pivot order is fixed by the numeric matrix at the
/// box midpoint; a pivot magnitude below 1e-10 there raises
/// SingularRestriction.
class HamiltonianSolver {
public:
    HamiltonianSolver(const FpkStructure& s, const EtaChoice& c);

    const FpkStructure& structure() const { return s_; }
    const EtaChoice& choice() const { return c_; }
    const VectorField& reeb() const { return xi_; }

    /// X_f: the kernel part is pinned to sum (alpha^j f) xi_j by the eta
    /// equations; the E part solves the restriction of Phi_g against
    /// df - (xi.f) eta.
    VectorField solve(const Expr& f) const;

    /// {f,g} = X_f.g - (xi.f) g, reusing a precomputed X_f.
    Expr bracket_with(const VectorField& xf, const Expr& f, const Expr& g) const;
    Expr bracket(const Expr& f, const Expr& g) const;

    /// Residual reports of the defining equations for a solved field: the eta
    /// equations, the Phi equation on E, and the Phi equation along the
    /// kernel frame (exact for k = 1 or kernel-invariant f; reported honestly
    /// otherwise, since the eta equations already pin the kernel part).
    std::vector<CheckReport> residual_reports(const Expr& f, const VectorField& xf, int samples,
                                              double tol) const;

private:
    FpkStructure s_;
    EtaChoice c_;
    VectorField xi_;
    std::vector<ExprVector> eta_cov_;
    ExprVector eta_choice_cov_;
    ExprMatrix phi_form_;  // matrix of Phi_g
    ExprMatrix l_;         // projector onto E
    ExprMatrix lu_;        // combined LU factors of the solve matrix
    std::vector<int> perm_;
};

/// One-shot convenience around HamiltonianSolver.
HamiltonianField hamiltonian_field(const FpkStructure& s, const EtaChoice& c, const Expr& f,
                                   int samples = kDefaultSamples, double tol = kHamiltonianTol);

/// The derived-formula bracket {f,g} = X_f.g - (xi.f) g.
Expr jacobi_bracket(const FpkStructure& s, const EtaChoice& c, const Expr& f, const Expr& g);

/// Agreement of the bracket with its two alternate routes,
/// iota([X_f,X_g]) eta and X_f.g - X_g.f + Phi_g(X_f,X_g).
std::vector<CheckReport> verify_bracket(const FpkStructure& s, const EtaChoice& c, const Expr& f,
                                        const Expr& g, int samples = kDefaultSamples,
                                        double tol = kHamiltonianTol);

/// The full identity suite over fs: antisymmetry, the Jacobi identity, LL1,
/// LL2, X_{{f,g}} = [X_f,X_g], both Lie-derivative identities, and the
/// support bound |{f,g}|(p) <= K(p) (|g(p)| + |dg(p)|).
std::vector<CheckReport> verify_jacobi_suite(const FpkStructure& s, const EtaChoice& c,
                                             const std::vector<Expr>& fs,
                                             int samples = kDefaultSamples,
                                             double tol = kHamiltonianTol);

} // namespace fpk

#endif
