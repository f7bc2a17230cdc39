#include "fpk/tensor.hpp"

#include <algorithm>

namespace fpk {

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* who) {
    if (!a || !b || !(*a == *b)) throw ChartMismatch(std::string(who) + ": charts differ");
}

void require_degree(const KForm& a, int degree, const char* who) {
    if (a.degree != degree)
        throw DimensionMismatch(std::string(who) + ": expected degree " + std::to_string(degree) +
                                ", got " + std::to_string(a.degree));
}

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeated index.
int sort_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && idx[j - 1] > idx[j]) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
            --j;
        }
        if (j > 0 && idx[j - 1] == idx[j]) return 0;
    }
    return sign;
}

/// Laplace expansion; m is small (form degrees) so factorial growth is fine.
Expr det_expr(const ExprMatrix& m) {
    const int d = static_cast<int>(m.rows());
    if (d == 0) return Expr(1.0);
    if (d == 1) return m(0, 0);
    if (d == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Expr det;
    for (int c = 0; c < d; ++c) {
        ExprMatrix minor(d - 1, d - 1);
        for (int r = 1; r < d; ++r) {
            int cc = 0;
            for (int k = 0; k < d; ++k) {
                if (k == c) continue;
                minor(r - 1, cc++) = m(r, k);
            }
        }
        Expr term = m(0, c) * det_expr(minor);
        det = (c % 2 == 0) ? det + term : det - term;
    }
    return det;
}

} // namespace

// --- constructors -----------------------------------------------------------

VectorField make_vector_field(ChartPtr chart, ExprVector components) {
    if (!chart || components.size() != chart->dimension())
        throw DimensionMismatch("vector field needs one component per coordinate");
    return VectorField{std::move(chart), std::move(components)};
}

VectorField zero_field(ChartPtr chart) {
    ExprVector v(chart->dimension());
    v.setConstant(Expr(0.0));
    return VectorField{std::move(chart), std::move(v)};
}

VectorField coordinate_field(ChartPtr chart, int i) {
    if (i < 0 || i >= chart->dimension())
        throw DimensionMismatch("coordinate_field: index out of range");
    VectorField x = zero_field(std::move(chart));
    x.components(i) = Expr(1.0);
    return x;
}

KForm make_kform(ChartPtr chart, int degree) {
    if (!chart || degree < 0 || degree > chart->dimension())
        throw DegreeOverflow("k-form degree must lie in [0, dimension]");
    return KForm{std::move(chart), degree, {}};
}

KForm scalar_form(ChartPtr chart, Expr value) {
    KForm f = make_kform(std::move(chart), 0);
    if (!value.is_zero()) f.coefficients.emplace(std::vector<int>{}, std::move(value));
    return f;
}

KForm coordinate_form(ChartPtr chart, int i) {
    if (i < 0 || i >= chart->dimension())
        throw DimensionMismatch("coordinate_form: index out of range");
    KForm f = make_kform(std::move(chart), 1);
    f.coefficients.emplace(std::vector<int>{i}, Expr(1.0));
    return f;
}

EndField make_end_field(ChartPtr chart, ExprMatrix matrix) {
    if (!chart || matrix.rows() != chart->dimension() || matrix.cols() != chart->dimension())
        throw DimensionMismatch("endomorphism matrix must be square of the chart dimension");
    return EndField{std::move(chart), std::move(matrix)};
}

EndField identity_end_field(ChartPtr chart) {
    const int d = chart->dimension();
    ExprMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Expr(i == j ? 1.0 : 0.0);
    return EndField{std::move(chart), std::move(m)};
}

MetricField make_metric_field(ChartPtr chart, ExprMatrix matrix) {
    if (!chart || matrix.rows() != chart->dimension() || matrix.cols() != chart->dimension())
        throw DimensionMismatch("metric matrix must be square of the chart dimension");
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = i + 1; j < matrix.cols(); ++j)
            if (!matrix(i, j).same_tree(matrix(j, i)))
                throw DimensionMismatch("metric entries (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") and transpose are not the same tree");
    return MetricField{std::move(chart), std::move(matrix)};
}

void add_term(KForm& form, std::vector<int> indices, const Expr& coefficient) {
    if (static_cast<int>(indices.size()) != form.degree)
        throw DimensionMismatch("add_term: index count must equal the form degree");
    for (int i : indices)
        if (i < 0 || i >= form.chart->dimension())
            throw DimensionMismatch("add_term: index out of range");
    if (coefficient.is_zero()) return;
    int sign = sort_sign(indices);
    if (sign == 0) return;
    Expr signed_coefficient = sign > 0 ? coefficient : -coefficient;
    auto [it, inserted] = form.coefficients.emplace(std::move(indices), signed_coefficient);
    if (!inserted) {
        it->second = it->second + signed_coefficient;
        if (it->second.is_zero()) form.coefficients.erase(it);
    }
}

void prune(KForm& form) {
    for (auto it = form.coefficients.begin(); it != form.coefficients.end();)
        it = it->second.is_zero() ? form.coefficients.erase(it) : std::next(it);
}

// --- algebra ----------------------------------------------------------------

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart, b.chart, "vector field sum");
    return VectorField{a.chart, a.components + b.components};
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart, b.chart, "vector field difference");
    return VectorField{a.chart, a.components - b.components};
}

VectorField operator-(const VectorField& a) {
    ExprVector v(a.components.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = -a.components(i);
    return VectorField{a.chart, std::move(v)};
}

VectorField operator*(const Expr& s, const VectorField& a) {
    ExprVector v(a.components.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = s * a.components(i);
    return VectorField{a.chart, std::move(v)};
}

KForm operator+(const KForm& a, const KForm& b) {
    require_same_chart(a.chart, b.chart, "form sum");
    require_degree(b, a.degree, "form sum");
    KForm out = a;
    for (const auto& [idx, coeff] : b.coefficients) {
        auto [it, inserted] = out.coefficients.emplace(idx, coeff);
        if (!inserted) {
            it->second = it->second + coeff;
            if (it->second.is_zero()) out.coefficients.erase(it);
        }
    }
    return out;
}

KForm operator-(const KForm& a, const KForm& b) { return a + (-b); }

KForm operator-(const KForm& a) {
    KForm out = make_kform(a.chart, a.degree);
    for (const auto& [idx, coeff] : a.coefficients) out.coefficients.emplace(idx, -coeff);
    return out;
}

KForm operator*(const Expr& s, const KForm& a) {
    KForm out = make_kform(a.chart, a.degree);
    if (s.is_zero()) return out;
    for (const auto& [idx, coeff] : a.coefficients) {
        Expr c = s * coeff;
        if (!c.is_zero()) out.coefficients.emplace(idx, std::move(c));
    }
    return out;
}

VectorField apply(const EndField& phi, const VectorField& x) {
    require_same_chart(phi.chart, x.chart, "endomorphism application");
    return VectorField{x.chart, phi.matrix * x.components};
}

EndField compose(const EndField& phi, const EndField& psi) {
    require_same_chart(phi.chart, psi.chart, "endomorphism composition");
    return EndField{phi.chart, phi.matrix * psi.matrix};
}

Expr metric_eval(const MetricField& g, const VectorField& x, const VectorField& y) {
    require_same_chart(g.chart, x.chart, "metric evaluation");
    require_same_chart(g.chart, y.chart, "metric evaluation");
    Expr out;
    for (Eigen::Index i = 0; i < g.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < g.matrix.cols(); ++j)
            out += x.components(i) * g.matrix(i, j) * y.components(j);
    return out;
}

Expr apply_form(const KForm& form, const std::vector<VectorField>& fields) {
    if (static_cast<int>(fields.size()) != form.degree)
        throw DimensionMismatch("apply_form: field count must equal the form degree");
    for (const auto& f : fields) require_same_chart(form.chart, f.chart, "apply_form");
    if (form.degree == 0) {
        auto it = form.coefficients.find({});
        return it == form.coefficients.end() ? Expr(0.0) : it->second;
    }
    Expr out;
    const int m = form.degree;
    ExprMatrix minor(m, m);
    for (const auto& [idx, coeff] : form.coefficients) {
        for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s) minor(r, s) = fields[s].components(idx[r]);
        out += coeff * det_expr(minor);
    }
    return out;
}

Expr directional_derivative(const VectorField& x, const Expr& f) {
    Expr out;
    for (int i = 0; i < x.chart->dimension(); ++i)
        out += x.components(i) * differentiate(f, x.chart->coordinate(i));
    return out;
}

KForm differential(const Expr& f, ChartPtr chart) {
    KForm df = make_kform(chart, 1);
    for (int i = 0; i < chart->dimension(); ++i)
        add_term(df, {i}, differentiate(f, chart->coordinate(i)));
    return df;
}

KForm wedge(const KForm& a, const KForm& b) {
    require_same_chart(a.chart, b.chart, "wedge");
    if (a.degree + b.degree > a.chart->dimension())
        throw DegreeOverflow("wedge: degree " + std::to_string(a.degree + b.degree) +
                             " exceeds chart dimension " +
                             std::to_string(a.chart->dimension()));
    KForm out = make_kform(a.chart, a.degree + b.degree);
    std::vector<int> merged;
    for (const auto& [ia, ca] : a.coefficients) {
        for (const auto& [ib, cb] : b.coefficients) {
            merged.clear();
            merged.insert(merged.end(), ia.begin(), ia.end());
            merged.insert(merged.end(), ib.begin(), ib.end());
            add_term(out, merged, ca * cb);
        }
    }
    return out;
}

KForm exterior_derivative(const KForm& a) {
    if (a.degree >= a.chart->dimension())
        throw DegreeOverflow("exterior_derivative: input already has top degree");
    KForm out = make_kform(a.chart, a.degree + 1);
    std::vector<int> extended;
    for (const auto& [idx, coeff] : a.coefficients) {
        for (int m = 0; m < a.chart->dimension(); ++m) {
            Expr dc = differentiate(coeff, a.chart->coordinate(m));
            if (dc.is_zero()) continue;
            extended.clear();
            extended.push_back(m);
            extended.insert(extended.end(), idx.begin(), idx.end());
            add_term(out, extended, dc);
        }
    }
    return out;
}

KForm interior_product(const VectorField& x, const KForm& a) {
    require_same_chart(x.chart, a.chart, "interior_product");
    if (a.degree < 1) throw DimensionMismatch("interior_product: needs degree >= 1");
    KForm out = make_kform(a.chart, a.degree - 1);
    std::vector<int> reduced;
    for (const auto& [idx, coeff] : a.coefficients) {
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const Expr& comp = x.components(idx[r]);
            if (comp.is_zero()) continue;
            reduced.clear();
            for (std::size_t s = 0; s < idx.size(); ++s)
                if (s != r) reduced.push_back(idx[s]);
            Expr term = comp * coeff;
            add_term(out, reduced, r % 2 == 0 ? term : -term);
        }
    }
    return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    require_same_chart(x.chart, y.chart, "lie_bracket");
    const int d = x.chart->dimension();
    ExprVector v(d);
    for (int i = 0; i < d; ++i)
        v(i) = directional_derivative(x, y.components(i)) -
               directional_derivative(y, x.components(i));
    return VectorField{x.chart, std::move(v)};
}

KForm lie_derivative(const VectorField& x, const KForm& a) {
    require_same_chart(x.chart, a.chart, "lie_derivative");
    if (a.degree == 0) {
        auto it = a.coefficients.find({});
        Expr value = it == a.coefficients.end() ? Expr(0.0) : it->second;
        return scalar_form(a.chart, directional_derivative(x, value));
    }
    KForm out = a.degree < a.chart->dimension() ? interior_product(x, exterior_derivative(a))
                                                : make_kform(a.chart, a.degree);
    out = out + exterior_derivative(interior_product(x, a));
    return out;
}

VectorField nijenhuis_pair(const EndField& phi, const VectorField& x, const VectorField& y) {
    require_same_chart(phi.chart, x.chart, "nijenhuis_pair");
    require_same_chart(phi.chart, y.chart, "nijenhuis_pair");
    VectorField phix = apply(phi, x);
    VectorField phiy = apply(phi, y);
    VectorField bracket = lie_bracket(x, y);
    return apply(phi, apply(phi, bracket)) + lie_bracket(phix, phiy) -
           apply(phi, lie_bracket(phix, y)) - apply(phi, lie_bracket(x, phiy));
}

// --- chart transport --------------------------------------------------------

namespace {

std::vector<int> index_map(const Chart& from, const Chart& to, const char* who) {
    std::vector<int> map(from.dimension());
    for (int i = 0; i < from.dimension(); ++i) {
        int j = to.index_of(from.coordinate(i));
        if (j < 0)
            throw ChartMismatch(std::string(who) + ": coordinate '" + from.coordinate(i) +
                                "' missing from the target chart");
        map[i] = j;
    }
    return map;
}

} // namespace

VectorField lift_field(const VectorField& x, ChartPtr extended) {
    auto map = index_map(*x.chart, *extended, "lift_field");
    VectorField out = zero_field(std::move(extended));
    for (int i = 0; i < x.chart->dimension(); ++i) out.components(map[i]) = x.components(i);
    return out;
}

KForm lift_form(const KForm& a, ChartPtr extended) {
    auto map = index_map(*a.chart, *extended, "lift_form");
    KForm out = make_kform(std::move(extended), a.degree);
    std::vector<int> mapped;
    for (const auto& [idx, coeff] : a.coefficients) {
        mapped.clear();
        for (int i : idx) mapped.push_back(map[i]);
        add_term(out, mapped, coeff);
    }
    return out;
}

ExprVector covector(const KForm& one_form) {
    if (one_form.degree != 1) throw DimensionMismatch("covector: needs a 1-form");
    const int d = one_form.chart->dimension();
    ExprVector v(d);
    v.setConstant(Expr(0.0));
    for (const auto& [idx, coeff] : one_form.coefficients) v(idx[0]) = coeff;
    return v;
}

ExprMatrix two_form_matrix(const KForm& two_form) {
    if (two_form.degree != 2) throw DimensionMismatch("two_form_matrix: needs a 2-form");
    const int d = two_form.chart->dimension();
    ExprMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Expr(0.0);
    for (const auto& [idx, coeff] : two_form.coefficients) {
        m(idx[0], idx[1]) = coeff;
        m(idx[1], idx[0]) = -coeff;
    }
    return m;
}

// --- numeric bridges --------------------------------------------------------

Eigen::MatrixXd evaluate_matrix(const ExprMatrix& m, const Point& p) {
    detail::EvalScratch scratch;
    scratch.bind(p);
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = scratch.eval(m(i, j));
    return out;
}

Eigen::VectorXd evaluate_vector(const ExprVector& v, const Point& p) {
    detail::EvalScratch scratch;
    scratch.bind(p);
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = scratch.eval(v(i));
    return out;
}

// --- deterministic random data ----------------------------------------------

namespace {

void monomials_up_to(const Chart& chart, int degree, int position, std::vector<int>& exponents,
                     SplitMix64& rng, Expr& accum) {
    if (position == chart.dimension()) {
        Expr term(rng.uniform(-1.0, 1.0));
        for (int i = 0; i < chart.dimension(); ++i)
            if (exponents[i] > 0) term = term * pow(Expr::coordinate(chart.coordinate(i)),
                                                    exponents[i]);
        accum += term;
        return;
    }
    for (int e = 0; e <= degree; ++e) {
        exponents[position] = e;
        monomials_up_to(chart, degree - e, position + 1, exponents, rng, accum);
    }
    exponents[position] = 0;
}

} // namespace

Expr random_polynomial(const Chart& chart, SplitMix64& rng, int degree) {
    Expr out;
    std::vector<int> exponents(chart.dimension(), 0);
    monomials_up_to(chart, degree, 0, exponents, rng, out);
    return out;
}

VectorField random_field(ChartPtr chart, SplitMix64& rng, int degree) {
    ExprVector v(chart->dimension());
    for (int i = 0; i < chart->dimension(); ++i) v(i) = random_polynomial(*chart, rng, degree);
    return VectorField{std::move(chart), std::move(v)};
}

KForm random_form(ChartPtr chart, int form_degree, SplitMix64& rng, int poly_degree) {
    KForm out = make_kform(chart, form_degree);
    std::vector<int> idx(form_degree);
    struct Rec {
        static void combos(int next, int dim, std::size_t pos, std::vector<int>& idx,
                           const ChartPtr& chart, SplitMix64& rng, int poly_degree, KForm& out) {
            if (pos == idx.size()) {
                add_term(out, idx, random_polynomial(*chart, rng, poly_degree));
                return;
            }
            for (int i = next; i < dim; ++i) {
                idx[pos] = i;
                combos(i + 1, dim, pos + 1, idx, chart, rng, poly_degree, out);
            }
        }
    };
    if (form_degree == 0)
        add_term(out, {}, random_polynomial(*chart, rng, poly_degree));
    else
        Rec::combos(0, chart->dimension(), 0, idx, chart, rng, poly_degree, out);
    return out;
}

std::vector<VectorField> frame_and_random_fields(ChartPtr chart, int extra,
                                                 std::string_view label) {
    std::vector<VectorField> fields;
    for (int i = 0; i < chart->dimension(); ++i) fields.push_back(coordinate_field(chart, i));
    SplitMix64 rng(sample_seed(*chart, label));
    for (int i = 0; i < extra; ++i) fields.push_back(random_field(chart, rng, 2));
    return fields;
}

} // namespace fpk
