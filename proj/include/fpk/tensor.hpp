#ifndef FPK_TENSOR_HPP
#define FPK_TENSOR_HPP

#include <map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "fpk/chart.hpp"
#include "fpk/expr.hpp"
#include "fpk/report.hpp"

namespace Eigen {

template <>
struct NumTraits<fpk::Expr> {
    using Real = fpk::Expr;
    using NonInteger = fpk::Expr;
    using Literal = fpk::Expr;
    using Nested = fpk::Expr;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 4,
        MulCost = 4
    };
    static inline fpk::Expr epsilon() { return fpk::Expr(0.0); }
    static inline fpk::Expr dummy_precision() { return fpk::Expr(0.0); }
    static inline int digits10() { return 0; }
};

} // namespace Eigen

namespace fpk {

using ExprMatrix = Eigen::Matrix<Expr, Eigen::Dynamic, Eigen::Dynamic>;
using ExprVector = Eigen::Matrix<Expr, Eigen::Dynamic, 1>;

/// X = sum of components[i] * d/dx_i over the chart frame.
struct VectorField {
    ChartPtr chart;
    ExprVector components;
};

/// Antisymmetric covariant tensor stored on strictly increasing index tuples;
/// missing keys mean zero. Degree 0 is a scalar keyed by the empty tuple.
struct KForm {
    ChartPtr chart;
    int degree = 0;
    std::map<std::vector<int>, Expr> coefficients;
};

/// Endomorphism field; column j holds the components of the image of d/dx_j.
struct EndField {
    ChartPtr chart;
    ExprMatrix matrix;
};

/// Symmetric (0,2)-tensor; symmetry is exact at the tree level (m(i,j) and
/// m(j,i) share the same Expr).
struct MetricField {
    ChartPtr chart;
    ExprMatrix matrix;
};

// --- constructors -----------------------------------------------------------

VectorField make_vector_field(ChartPtr chart, ExprVector components);
VectorField zero_field(ChartPtr chart);
VectorField coordinate_field(ChartPtr chart, int i);

KForm make_kform(ChartPtr chart, int degree);
KForm scalar_form(ChartPtr chart, Expr value);
KForm coordinate_form(ChartPtr chart, int i);
EndField make_end_field(ChartPtr chart, ExprMatrix matrix);
EndField identity_end_field(ChartPtr chart);
MetricField make_metric_field(ChartPtr chart, ExprMatrix matrix);

/// Accumulate `coefficient * dx_{indices}` into `form`, sorting the indices and
/// folding the permutation sign; duplicate indices contribute nothing.
void add_term(KForm& form, std::vector<int> indices, const Expr& coefficient);

/// Drop stored coefficients that are the literal zero tree.
void prune(KForm& form);

// --- algebra ----------------------------------------------------------------

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& s, const VectorField& a);

KForm operator+(const KForm& a, const KForm& b);
KForm operator-(const KForm& a, const KForm& b);
KForm operator-(const KForm& a);
KForm operator*(const Expr& s, const KForm& a);

/// phi(X).
VectorField apply(const EndField& phi, const VectorField& x);
/// Endomorphism composition phi after psi.
EndField compose(const EndField& phi, const EndField& psi);

/// g(X, Y).
Expr metric_eval(const MetricField& g, const VectorField& x, const VectorField& y);

/// Evaluate a k-form on exactly k fields (0-form: empty list).
Expr apply_form(const KForm& form, const std::vector<VectorField>& fields);

/// X . f, the directional derivative.
Expr directional_derivative(const VectorField& x, const Expr& f);

/// df as a 1-form on the chart.
KForm differential(const Expr& f, ChartPtr chart);

/// Alternating product with shuffle signs. Throws DegreeOverflow past the
/// chart dimension.
KForm wedge(const KForm& a, const KForm& b);

/// d in coordinates: d(f dx_I) = df wedge dx_I.
KForm exterior_derivative(const KForm& a);

/// Contraction in the first slot; degree drops by one.
KForm interior_product(const VectorField& x, const KForm& a);

/// [X,Y]^i = X . Y^i - Y . X^i.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// Cartan formula: L_X = d iota_X + iota_X d.
KForm lie_derivative(const VectorField& x, const KForm& a);

/// [phi,phi](X,Y) = phi^2[X,Y] + [phiX,phiY] - phi[phiX,Y] - phi[X,phiY].
VectorField nijenhuis_pair(const EndField& phi, const VectorField& x, const VectorField& y);

// --- chart transport --------------------------------------------------------

/// Reinterpret on a bigger chart (same coordinate names must exist there);
/// new components are zero.
VectorField lift_field(const VectorField& x, ChartPtr extended);
KForm lift_form(const KForm& a, ChartPtr extended);

/// Coefficient covector of a 1-form (entry a = coefficient of dx_a).
ExprVector covector(const KForm& one_form);

/// Matrix of a 2-form: entry (a,b) = form(d/dx_a, d/dx_b), antisymmetric.
ExprMatrix two_form_matrix(const KForm& two_form);

// --- numeric bridges --------------------------------------------------------

Eigen::MatrixXd evaluate_matrix(const ExprMatrix& m, const Point& p);
Eigen::VectorXd evaluate_vector(const ExprVector& v, const Point& p);

// --- deterministic random data for property checks --------------------------

/// Dense polynomial with coefficients uniform in [-1,1] on monomials of total
/// degree <= degree.
Expr random_polynomial(const Chart& chart, SplitMix64& rng, int degree);
VectorField random_field(ChartPtr chart, SplitMix64& rng, int degree = 2);
KForm random_form(ChartPtr chart, int form_degree, SplitMix64& rng, int poly_degree = 2);

/// The coordinate frame followed by `extra` random fields: the standard
/// quantifier instantiation for tensor identities.
std::vector<VectorField> frame_and_random_fields(ChartPtr chart, int extra,
                                                 std::string_view label);

} // namespace fpk

#endif
