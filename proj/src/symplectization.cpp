#include "fpk/symplectization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace fpk {

namespace {

// Minimum of tau = sum_j alpha^j t_j over the box prod [a_j, a_j+1].
double box_min_tau(const std::vector<double>& alpha, const std::vector<int>& a) {
    double m = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        m += std::min(alpha[j] * a[j], alpha[j] * (a[j] + 1));
    return m;
}

} // namespace

Symplectization build_symplectization(const FpkStructure& s) {
    bool any = false;
    for (double a : s.alpha) any = any || a != 0.0;
    if (!any) throw AllAlphaZero("every alpha constant is zero");

    std::vector<int> offsets(s.k, -2);
    bool found = false;
    while (true) {
        if (box_min_tau(s.alpha, offsets) >= kTauMargin) {
            found = true;
            break;
        }
        int j = s.k - 1;
        while (j >= 0 && offsets[j] == 2) offsets[j--] = -2;
        if (j < 0) break;
        ++offsets[j];
    }
    if (!found)
        throw EmptyPositiveCone("no box prod [a_j, a_j+1] with a_j in {-2..2} keeps tau >= " +
                                std::to_string(kTauMargin));

    std::vector<Interval> t_box;
    for (int j = 0; j < s.k; ++j)
        t_box.push_back({static_cast<double>(offsets[j]), static_cast<double>(offsets[j] + 1)});
    ChartPtr ext = extend_chart(*s.chart, s.k, "t", t_box);

    Symplectization sp;
    sp.chart = ext;
    sp.alpha_form = make_kform(ext, 1);
    sp.tau = Expr(0.0);
    for (int j = 0; j < s.k; ++j) {
        Expr tj = Expr::coordinate(ext->coordinate(s.chart->dimension() + j));
        sp.alpha_form = sp.alpha_form + (tj * lift_form(s.eta[j], ext));
        sp.tau = sp.tau + Expr(s.alpha[j]) * tj;
    }
    sp.omega = -exterior_derivative(sp.alpha_form);
    return sp;
}

CheckReport verify_expansion(const Symplectization& sp, const FpkStructure& s, int samples,
                             double tol) {
    int d = s.chart->dimension();
    KForm rhs = sp.tau * lift_form(fundamental_form(s), sp.chart);
    for (int j = 0; j < s.k; ++j) {
        KForm dtj = coordinate_form(sp.chart, d + j);
        rhs = rhs + wedge(lift_form(s.eta[j], sp.chart), dtj);
    }
    KForm residual = sp.omega - rhs;
    std::vector<Expr> bundle;
    for (const auto& [idx, coeff] : residual.coefficients) bundle.push_back(coeff);
    if (bundle.empty()) return vacuous_report("symplectize:expansion", tol, "exact zero residual");
    return exprs_zero(bundle, *sp.chart, samples, tol, "symplectize:expansion");
}

CheckReport verify_top_power(const Symplectization& sp, const FpkStructure& s, int samples,
                             double tol) {
    int d = s.chart->dimension();
    int top = s.n + s.k;

    KForm lhs = scalar_form(sp.chart, Expr(1.0));
    for (int i = 0; i < top; ++i) lhs = wedge(lhs, sp.omega);

    double factor = 1.0;
    for (int i = s.n + 1; i <= top; ++i) factor *= static_cast<double>(i);

    KForm rhs = scalar_form(sp.chart, Expr(factor));
    for (int j = 0; j < s.k; ++j) {
        rhs = wedge(rhs, lift_form(s.eta[j], sp.chart));
        rhs = wedge(rhs, coordinate_form(sp.chart, d + j));
    }
    KForm tau_phi = sp.tau * lift_form(fundamental_form(s), sp.chart);
    for (int i = 0; i < s.n; ++i) rhs = wedge(rhs, tau_phi);

    KForm residual = lhs - rhs;
    std::vector<Expr> bundle;
    for (const auto& [idx, coeff] : residual.coefficients) bundle.push_back(coeff);
    CheckReport match = bundle.empty()
                            ? vacuous_report("symplectize:top-power", tol, "exact zero residual")
                            : exprs_zero(bundle, *sp.chart, samples, tol,
                                         "symplectize:top-power");

    Expr lhs_coeff = Expr(0.0);
    {
        std::vector<int> all(sp.chart->dimension());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        auto it = lhs.coefficients.find(all);
        if (it != lhs.coefficients.end()) lhs_coeff = it->second;
    }
    double min_abs = std::numeric_limits<double>::infinity();
    CheckReport nonvanish = sample_check(*sp.chart, samples, 0.0, "symplectize:nonvanishing",
                                         [&](const Point& p) {
                                             double v = std::abs(evaluate(lhs_coeff, p));
                                             min_abs = std::min(min_abs, v);
                                             return std::max(0.0, kDetFloor - v);
                                         });

    KForm closure = exterior_derivative(sp.omega);
    std::vector<Expr> closure_bundle;
    for (const auto& [idx, coeff] : closure.coefficients) closure_bundle.push_back(coeff);
    CheckReport closed =
        closure_bundle.empty()
            ? vacuous_report("symplectize:closure", kClosureTol, "exact zero residual")
            : exprs_zero(closure_bundle, *sp.chart, samples, kClosureTol, "symplectize:closure");

    CheckReport report = match;
    report.pass = match.pass && nonvanish.pass && closed.pass;
    std::ostringstream note;
    note << "factor " << factor << "; min |top coefficient| = " << min_abs << " (floor "
         << kDetFloor << "); max d(omega) residual = " << closed.max_residual << " (tol "
         << kClosureTol << ")";
    if (!nonvanish.pass) {
        note << "; top coefficient vanishes";
        report.witness = nonvanish.witness;
    } else if (!closed.pass) {
        note << "; omega is not closed";
        report.witness = closed.witness;
    }
    report.note = note.str();
    return report;
}

} // namespace fpk
