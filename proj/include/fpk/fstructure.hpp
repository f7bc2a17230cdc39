#ifndef FPK_FSTRUCTURE_HPP
#define FPK_FSTRUCTURE_HPP

#include <vector>

#include "fpk/defaults.hpp"
#include "fpk/report.hpp"
#include "fpk/tensor.hpp"

namespace fpk {

/// A metric f.pk-structure on one chart: an f-structure phi of rank 2n whose
/// kernel is trivialized by the frame xi_1..xi_k with dual coframe eta^1..eta^k,
/// a compatible metric g, and the constants alpha^i of d(eta^i) = -alpha^i Phi_g.
struct FpkStructure {
    ChartPtr chart;
    EndField phi;
    std::vector<VectorField> xi;
    std::vector<KForm> eta; // degree 1
    MetricField g;
    std::vector<double> alpha;
    int n = 0;
    int k = 0;
};

/// Dimension checks only; the axioms themselves are sampled by validate_fpk.
FpkStructure make_fpk_structure(ChartPtr chart, EndField phi, std::vector<VectorField> xi,
                                std::vector<KForm> eta, MetricField g,
                                std::vector<double> alpha, int n, int k);

/// l = -phi^2, the projector onto E = Im phi.
EndField projector_l(const FpkStructure& s);
/// m = phi^2 + Id, the projector onto T = ker phi.
EndField projector_m(const FpkStructure& s);

/// One report per structure axiom: the f-identity phi^3 + phi = 0, frame
/// duality, kernel/cokernel relations, the phi^2 identity, projector
/// complementarity, metric symmetry and positivity, and compatibility.
std::vector<CheckReport> validate_fpk(const FpkStructure& s, int samples = kDefaultSamples,
                                      double tol = kDefaultTol);

/// Phi_g(X,Y) = g(phi X, Y) as a 2-form.
KForm fundamental_form(const FpkStructure& s);

/// Antisymmetry of Phi_g, iota(xi_i)Phi_g = 0, and pointwise rank 2n.
std::vector<CheckReport> verify_fundamental_form(const FpkStructure& s,
                                                 int samples = kDefaultSamples,
                                                 double tol = kDefaultTol);

/// N(X,Y) = [phi,phi](X,Y) + sum d(eta^i)(X,Y) xi_i.
VectorField normality_tensor(const FpkStructure& s, const VectorField& x, const VectorField& y);

struct Classification {
    bool almost_K = false;
    bool almost_S = false;
    std::vector<double> fitted_alpha;
    bool normal = false;
    bool cr_integrable = false;
    std::vector<CheckReport> reports;
};

/// Closure of Phi_g, least-squares fit of the alpha constants over E-frame
/// pairs with the declared values cross-checked, normality on full frame
/// pairs, CR-integrability on E-frame pairs, and involutivity of T.
/// Throws AlphaFitIllPosed when Phi_g samples to zero on every tested pair.
Classification classify(const FpkStructure& s, int samples = kDefaultSamples,
                        double tol = kDefaultTol);

/// Lemma 1 and the three structure propositions. The conditional checks
/// require an almost S-structure; anything else throws PreconditionNotAlmostS.
std::vector<CheckReport> structure_propositions(const FpkStructure& s,
                                                int samples = kDefaultSamples,
                                                double tol = kDefaultTol);

struct RankRange {
    int min_rank = 0;
    int max_rank = 0;
    bool constant_rank() const { return min_rank == max_rank; }
};

/// Pointwise rank by singular values; `threshold` is relative to the largest
/// singular value at each sample.
RankRange numeric_rank(const EndField& e, int samples = kDefaultSamples,
                       double threshold = kRankRatio);

/// The almost complex structure J on the chart extended by k fibre
/// coordinates t1..tk: J = phi on E, J xi_i = d/dt_i, J d/dt_i = -xi_i.
EndField stable_complex_structure(const FpkStructure& s);

} // namespace fpk

#endif
