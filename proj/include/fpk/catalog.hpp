#ifndef FPK_CATALOG_HPP
#define FPK_CATALOG_HPP

#include <string>
#include <utility>
#include <vector>

#include "fpk/fstructure.hpp"

namespace fpk {

/// Seed shared by every catalog chart so reports are reproducible.
inline constexpr std::uint64_t kCatalogSeed = 424242;

/// The standard contact structure on R^{2n+1}, chart (x1..xn, y1..yn, z),
/// with alpha = (1).
FpkStructure standard_contact(int n);

/// Corank-k Heisenberg-type model on R^{2n+k}, chart (x1..xn, y1..yn, z1..zk):
/// eta^i = dz_i - alpha^i sum_j y_j dx_j, xi_i = d/dz_i, phi the horizontal
/// exchange of the x/y frame, g the adapted metric.
FpkStructure generalized_heisenberg(int n, int k, const std::vector<double>& alphas);

/// Almost S-structure over a symplectic base (omega, J, G) on the base chart:
/// the total chart appends fibre coordinates z1..zk, xi_i is the fibre frame,
/// eta^i = dz_i + connection[i], phi is the horizontal lift of J, and
/// g = G + sum eta^i (x) eta^i. The connection forms live on the base chart
/// and must satisfy d(connection[i]) = -alpha^i omega. All stated relations
/// on the inputs are sampled up front; a failure throws PreconditionViolated
/// naming the relation and its residual.
FpkStructure from_symplectic_base(int base_dim_2n, const KForm& omega, const EndField& J,
                                  const MetricField& G, int k,
                                  const std::vector<double>& alphas,
                                  const std::vector<KForm>& connection);

/// Ready-made from_symplectic_base instance over (R^2, dx1^dy1, standard J).
FpkStructure symplectic_base_example(int k, const std::vector<double>& alphas);

/// The regression corpus: every structure the acceptance suites run against.
std::vector<std::pair<std::string, FpkStructure>> catalog_structures();

} // namespace fpk

#endif
