#include "fpk/catalog.hpp"

#include <cmath>

namespace fpk {

namespace {

ExprMatrix zero_matrix(int d) {
    ExprMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Expr(0.0);
    return m;
}

/// Mirror the strict upper triangle onto the lower one with the same trees,
/// keeping MetricField's exact-symmetry invariant.
void mirror_upper(ExprMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
}

FpkStructure heisenberg_on_chart(ChartPtr chart, int n, int k,
                                 const std::vector<double>& alphas) {
    const int d = 2 * n + k;
    auto X = [&](int j) { return j; };
    auto Y = [&](int j) { return n + j; };
    auto Z = [&](int i) { return 2 * n + i; };

    std::vector<KForm> eta;
    for (int i = 0; i < k; ++i) {
        KForm e = coordinate_form(chart, Z(i));
        for (int j = 0; j < n; ++j)
            add_term(e, {X(j)},
                     Expr(-alphas[i]) * Expr::coordinate(chart->coordinate(Y(j))));
        eta.push_back(std::move(e));
    }

    std::vector<VectorField> xi;
    for (int i = 0; i < k; ++i) xi.push_back(coordinate_field(chart, Z(i)));

    ExprMatrix p = zero_matrix(d);
    for (int j = 0; j < n; ++j) {
        p(Y(j), X(j)) = Expr(-1.0);
        p(X(j), Y(j)) = Expr(1.0);
        for (int i = 0; i < k; ++i)
            p(Z(i), Y(j)) = Expr(alphas[i]) * Expr::coordinate(chart->coordinate(Y(j)));
    }

    ExprMatrix g = zero_matrix(d);
    double alpha_sq = 0.0;
    for (int i = 0; i < k; ++i) alpha_sq += alphas[i] * alphas[i];
    for (int j = 0; j < n; ++j) {
        Expr yj = Expr::coordinate(chart->coordinate(Y(j)));
        for (int l = 0; l < n; ++l) {
            Expr yl = Expr::coordinate(chart->coordinate(Y(l)));
            Expr cross = Expr(alpha_sq) * yj * yl;
            g(X(j), X(l)) = j == l ? Expr(1.0) + cross : cross;
        }
        g(Y(j), Y(j)) = Expr(1.0);
        for (int i = 0; i < k; ++i) g(X(j), Z(i)) = Expr(-alphas[i]) * yj;
    }
    for (int i = 0; i < k; ++i) g(Z(i), Z(i)) = Expr(1.0);
    mirror_upper(g);

    return make_fpk_structure(chart, EndField{chart, std::move(p)}, std::move(xi),
                              std::move(eta), MetricField{chart, std::move(g)}, alphas, n, k);
}

} // namespace

FpkStructure generalized_heisenberg(int n, int k, const std::vector<double>& alphas) {
    if (n < 1 || k < 1) throw DimensionMismatch("generalized_heisenberg: needs n >= 1, k >= 1");
    if (static_cast<int>(alphas.size()) != k)
        throw DimensionMismatch("generalized_heisenberg: alphas must have k entries");
    std::vector<std::string> names;
    for (int j = 1; j <= n; ++j) names.push_back("x" + std::to_string(j));
    for (int j = 1; j <= n; ++j) names.push_back("y" + std::to_string(j));
    for (int i = 1; i <= k; ++i) names.push_back("z" + std::to_string(i));
    return heisenberg_on_chart(make_chart(std::move(names), Interval{-1.0, 1.0}, kCatalogSeed),
                               n, k, alphas);
}

FpkStructure standard_contact(int n) {
    if (n < 1) throw DimensionMismatch("standard_contact: needs n >= 1");
    std::vector<std::string> names;
    for (int j = 1; j <= n; ++j) names.push_back("x" + std::to_string(j));
    for (int j = 1; j <= n; ++j) names.push_back("y" + std::to_string(j));
    names.push_back("z");
    return heisenberg_on_chart(make_chart(std::move(names), Interval{-1.0, 1.0}, kCatalogSeed),
                               n, 1, {1.0});
}

FpkStructure from_symplectic_base(int base_dim_2n, const KForm& omega, const EndField& J,
                                  const MetricField& G, int k,
                                  const std::vector<double>& alphas,
                                  const std::vector<KForm>& connection) {
    if (base_dim_2n < 2 || base_dim_2n % 2 != 0)
        throw DimensionMismatch("from_symplectic_base: base dimension must be even and >= 2");
    if (k < 1) throw DimensionMismatch("from_symplectic_base: needs k >= 1");
    if (static_cast<int>(alphas.size()) != k || static_cast<int>(connection.size()) != k)
        throw DimensionMismatch("from_symplectic_base: alphas and connection must have k entries");
    ChartPtr base = omega.chart;
    if (base->dimension() != base_dim_2n)
        throw DimensionMismatch("from_symplectic_base: omega chart does not match base dimension");
    if (!(*J.chart == *base) || !(*G.chart == *base))
        throw ChartMismatch("from_symplectic_base: inputs live on different charts");
    if (omega.degree != 2) throw DimensionMismatch("from_symplectic_base: omega must be a 2-form");
    for (const auto& c : connection) {
        if (!(*c.chart == *base))
            throw ChartMismatch("from_symplectic_base: connection forms must live on the base");
        if (c.degree != 1)
            throw DimensionMismatch("from_symplectic_base: connection entries must be 1-forms");
    }

    const int bd = base_dim_2n;
    auto fail = [](const std::string& relation, double residual) {
        throw PreconditionViolated("from_symplectic_base: " + relation +
                                   " fails with residual " + std::to_string(residual));
    };

    {
        std::vector<Expr> bundle;
        if (omega.degree < bd)
            for (const auto& [idx, c] : exterior_derivative(omega).coefficients)
                bundle.push_back(c);
        if (!bundle.empty()) {
            CheckReport r = exprs_zero(bundle, *base, kDefaultSamples, kDefaultTol,
                                       "symplectic-base:closed");
            if (!r.pass) fail("d(omega) = 0", r.max_residual);
        }
    }
    {
        ExprMatrix om = two_form_matrix(omega);
        CheckReport r = sample_check(*base, kDefaultSamples, 0.0, "symplectic-base:nondegenerate",
                                     [&](const Point& pt) {
                                         double det = evaluate_matrix(om, pt).determinant();
                                         return std::max(0.0, kDetFloor - std::abs(det));
                                     });
        if (!r.pass) fail("nondegeneracy of omega (|det| floor)", r.max_residual);
    }
    {
        std::vector<Expr> bundle;
        ExprMatrix j2 = J.matrix * J.matrix;
        for (int a = 0; a < bd; ++a)
            for (int b = 0; b < bd; ++b)
                bundle.push_back(j2(a, b) + Expr(a == b ? 1.0 : 0.0));
        CheckReport r =
            exprs_zero(bundle, *base, kDefaultSamples, kDefaultTol, "symplectic-base:J-squared");
        if (!r.pass) fail("J^2 = -Id", r.max_residual);
    }
    {
        ExprMatrix om = two_form_matrix(omega);
        ExprMatrix rhs = om * J.matrix;
        std::vector<Expr> bundle;
        for (int a = 0; a < bd; ++a)
            for (int b = 0; b < bd; ++b) bundle.push_back(G.matrix(a, b) - rhs(a, b));
        CheckReport r = exprs_zero(bundle, *base, kDefaultSamples, kDefaultTol,
                                   "symplectic-base:compatibility");
        if (!r.pass) fail("G(X,Y) = omega(X,JY)", r.max_residual);
    }
    for (int i = 0; i < k; ++i) {
        KForm residual = exterior_derivative(connection[i]) + (Expr(alphas[i]) * omega);
        std::vector<Expr> bundle;
        for (const auto& [idx, c] : residual.coefficients) bundle.push_back(c);
        if (bundle.empty()) continue;
        CheckReport r = exprs_zero(bundle, *base, kDefaultSamples, kDefaultTol,
                                   "symplectic-base:connection");
        if (!r.pass)
            fail("d(connection[" + std::to_string(i + 1) + "]) = -alpha omega", r.max_residual);
    }

    ChartPtr total = extend_chart(*base, k, "z", std::vector<Interval>(k, Interval{-1.0, 1.0}));
    const int td = total->dimension();
    const int n = bd / 2;

    std::vector<VectorField> xi;
    for (int i = 0; i < k; ++i) xi.push_back(coordinate_field(total, bd + i));

    std::vector<KForm> eta;
    for (int i = 0; i < k; ++i)
        eta.push_back(coordinate_form(total, bd + i) + lift_form(connection[i], total));

    ExprMatrix p = zero_matrix(td);
    std::vector<ExprVector> theta;
    for (int i = 0; i < k; ++i) theta.push_back(covector(connection[i]));
    for (int a = 0; a < bd; ++a) {
        for (int b = 0; b < bd; ++b) p(b, a) = J.matrix(b, a);
        for (int i = 0; i < k; ++i) {
            Expr entry;
            for (int b = 0; b < bd; ++b) entry -= theta[i](b) * J.matrix(b, a);
            p(bd + i, a) = entry;
        }
    }

    ExprMatrix g = zero_matrix(td);
    std::vector<ExprVector> eta_cov;
    for (int i = 0; i < k; ++i) eta_cov.push_back(covector(eta[i]));
    for (int a = 0; a < td; ++a)
        for (int b = a; b < td; ++b) {
            Expr entry;
            if (a < bd && b < bd) entry = G.matrix(a, b);
            for (int i = 0; i < k; ++i) entry += eta_cov[i](a) * eta_cov[i](b);
            g(a, b) = entry;
        }
    mirror_upper(g);

    return make_fpk_structure(total, EndField{total, std::move(p)}, std::move(xi),
                              std::move(eta), MetricField{total, std::move(g)}, alphas, n, k);
}

FpkStructure symplectic_base_example(int k, const std::vector<double>& alphas) {
    ChartPtr base = make_chart({"x1", "y1"}, Interval{-1.0, 1.0}, kCatalogSeed);
    Expr x = Expr::coordinate("x1");
    Expr y = Expr::coordinate("y1");

    KForm omega = wedge(coordinate_form(base, 0), coordinate_form(base, 1));

    ExprMatrix j(2, 2);
    j(0, 0) = Expr(0.0);
    j(0, 1) = Expr(-1.0);
    j(1, 0) = Expr(1.0);
    j(1, 1) = Expr(0.0);

    ExprMatrix g(2, 2);
    g(0, 0) = Expr(1.0);
    g(0, 1) = Expr(0.0);
    g(1, 0) = Expr(0.0);
    g(1, 1) = Expr(1.0);

    std::vector<KForm> connection;
    for (int i = 0; i < k; ++i) {
        KForm theta = make_kform(base, 1);
        add_term(theta, {0}, Expr(alphas[i] / 2.0) * y);
        add_term(theta, {1}, Expr(-alphas[i] / 2.0) * x);
        connection.push_back(std::move(theta));
    }

    return from_symplectic_base(2, omega, EndField{base, std::move(j)},
                                MetricField{base, std::move(g)}, k, alphas, connection);
}

std::vector<std::pair<std::string, FpkStructure>> catalog_structures() {
    std::vector<std::pair<std::string, FpkStructure>> out;
    out.emplace_back("standard_contact(1)", standard_contact(1));
    out.emplace_back("standard_contact(2)", standard_contact(2));
    out.emplace_back("generalized_heisenberg(1,1,(1))", generalized_heisenberg(1, 1, {1.0}));
    out.emplace_back("generalized_heisenberg(1,2,(1,2))",
                     generalized_heisenberg(1, 2, {1.0, 2.0}));
    out.emplace_back("generalized_heisenberg(2,2,(0,1))",
                     generalized_heisenberg(2, 2, {0.0, 1.0}));
    out.emplace_back("symplectic_base_example(2,(1,1))", symplectic_base_example(2, {1.0, 1.0}));
    return out;
}

} // namespace fpk
