#include "fpk/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace fpk {

namespace {

bool all_alpha_zero(const std::vector<double>& alpha) {
    return std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; });
}

} // namespace

EtaChoice make_eta_choice(const FpkStructure& s, std::vector<double> c) {
    if (static_cast<int>(c.size()) != s.k)
        throw DimensionMismatch("eta choice needs k coefficients");
    double sum = 0.0;
    for (int j = 0; j < s.k; ++j) sum += c[j] * s.alpha[j];
    if (std::abs(sum - 1.0) > kEtaChoiceTol)
        throw PreconditionViolated("eta choice: sum c_j alpha^j = " + std::to_string(sum) +
                                   ", must equal 1");
    return EtaChoice{std::move(c)};
}

EtaChoice default_eta_choice(const FpkStructure& s) {
    if (all_alpha_zero(s.alpha)) throw AllAlphaZero("default eta choice needs a nonzero alpha");
    double sq = 0.0;
    for (double a : s.alpha) sq += a * a;
    std::vector<double> c;
    for (double a : s.alpha) c.push_back(a / sq);
    return EtaChoice{std::move(c)};
}

VectorField reeb_field(const FpkStructure& s) {
    if (all_alpha_zero(s.alpha))
        throw AllAlphaZero("reeb_field: every alpha^j is zero, no Reeb-type section exists");
    VectorField xi = zero_field(s.chart);
    for (int j = 0; j < s.k; ++j) xi = xi + (Expr(s.alpha[j]) * s.xi[j]);
    return xi;
}

HamiltonianSolver::HamiltonianSolver(const FpkStructure& s, const EtaChoice& c)
    : s_(s), c_(c), xi_(reeb_field(s)) {
    if (static_cast<int>(c.c.size()) != s.k)
        throw DimensionMismatch("eta choice needs k coefficients");
    const int d = s_.chart->dimension();

    for (int j = 0; j < s_.k; ++j) eta_cov_.push_back(covector(s_.eta[j]));
    eta_choice_cov_ = ExprVector(d);
    eta_choice_cov_.setConstant(Expr(0.0));
    for (int j = 0; j < s_.k; ++j)
        for (int a = 0; a < d; ++a) eta_choice_cov_(a) += Expr(c_.c[j]) * eta_cov_[j](a);

    phi_form_ = two_form_matrix(fundamental_form(s_));
    l_ = projector_l(s_).matrix;

    // System matrix: row a reads Phi_g(v, l d_a) + sum_j eta^j(d_a) eta^j(v),
    // which pins the E part against the restricted Phi equation and the kernel
    // part against the eta equations simultaneously.
    ExprMatrix m = l_.transpose() * phi_form_.transpose();
    for (int j = 0; j < s_.k; ++j)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) m(a, b) += eta_cov_[j](a) * eta_cov_[j](b);

    Eigen::MatrixXd numeric = evaluate_matrix(m, s_.chart->midpoint());

    lu_ = std::move(m);
    perm_.resize(d);
    for (int i = 0; i < d; ++i) perm_[i] = i;

    for (int r = 0; r < d; ++r) {
        int pivot_row = r;
        double best = std::abs(numeric(r, r));
        for (int i = r + 1; i < d; ++i)
            if (std::abs(numeric(i, r)) > best) {
                best = std::abs(numeric(i, r));
                pivot_row = i;
            }
        if (best < 1e-10)
            throw SingularRestriction(
                "hamiltonian solve: the restricted system is numerically singular at the box "
                "midpoint (pivot " + std::to_string(r) + ")");
        if (pivot_row != r) {
            numeric.row(r).swap(numeric.row(pivot_row));
            lu_.row(r).swap(lu_.row(pivot_row));
            std::swap(perm_[r], perm_[pivot_row]);
        }
        for (int i = r + 1; i < d; ++i) {
            numeric(i, r) /= numeric(r, r);
            Expr factor = lu_(i, r) / lu_(r, r);
            lu_(i, r) = factor;
            for (int j = r + 1; j < d; ++j) {
                numeric(i, j) -= numeric(i, r) * numeric(r, j);
                lu_(i, j) = lu_(i, j) - factor * lu_(r, j);
            }
        }
    }
}

VectorField HamiltonianSolver::solve(const Expr& f) const {
    const int d = s_.chart->dimension();

    Expr xif = directional_derivative(xi_, f);
    ExprVector beta(d);
    for (int a = 0; a < d; ++a)
        beta(a) = differentiate(f, s_.chart->coordinate(a)) - xif * eta_choice_cov_(a);

    ExprVector rhs = l_.transpose() * beta;
    for (int j = 0; j < s_.k; ++j) {
        Expr aj_f = Expr(s_.alpha[j]) * f;
        for (int a = 0; a < d; ++a) rhs(a) += aj_f * eta_cov_[j](a);
    }

    ExprVector y(d);
    for (int r = 0; r < d; ++r) {
        Expr acc = rhs(perm_[r]);
        for (int j = 0; j < r; ++j) acc -= lu_(r, j) * y(j);
        y(r) = acc;
    }
    ExprVector v(d);
    for (int r = d - 1; r >= 0; --r) {
        Expr acc = y(r);
        for (int j = r + 1; j < d; ++j) acc -= lu_(r, j) * v(j);
        v(r) = acc / lu_(r, r);
    }
    return VectorField{s_.chart, std::move(v)};
}

Expr HamiltonianSolver::bracket_with(const VectorField& xf, const Expr& f, const Expr& g) const {
    return directional_derivative(xf, g) - directional_derivative(xi_, f) * g;
}

Expr HamiltonianSolver::bracket(const Expr& f, const Expr& g) const {
    return bracket_with(solve(f), f, g);
}

std::vector<CheckReport> HamiltonianSolver::residual_reports(const Expr& f, const VectorField& xf,
                                                             int samples, double tol) const {
    const int d = s_.chart->dimension();
    std::vector<CheckReport> reports;

    {
        std::vector<Expr> bundle;
        for (int j = 0; j < s_.k; ++j) {
            Expr lhs;
            for (int a = 0; a < d; ++a) lhs += eta_cov_[j](a) * xf.components(a);
            bundle.push_back(lhs - Expr(s_.alpha[j]) * f);
        }
        if (bundle.empty())
            reports.push_back(vacuous_report("hamiltonian:eta-equations", tol, "k = 0"));
        else
            reports.push_back(
                exprs_zero(bundle, *s_.chart, samples, tol, "hamiltonian:eta-equations"));
    }

    Expr xif = directional_derivative(xi_, f);
    ExprVector defect(d);
    for (int b = 0; b < d; ++b) {
        Expr lhs;
        for (int i = 0; i < d; ++i) lhs += xf.components(i) * phi_form_(i, b);
        Expr beta_b = differentiate(f, s_.chart->coordinate(b)) - xif * eta_choice_cov_(b);
        defect(b) = lhs - beta_b;
    }

    {
        ExprVector on_e = l_.transpose() * defect;
        std::vector<Expr> bundle;
        for (int a = 0; a < d; ++a) bundle.push_back(on_e(a));
        reports.push_back(
            exprs_zero(bundle, *s_.chart, samples, tol, "hamiltonian:phi-equation-E"));
    }

    {
        std::vector<Expr> bundle;
        for (int j = 0; j < s_.k; ++j) {
            Expr on_t;
            for (int b = 0; b < d; ++b) on_t += defect(b) * s_.xi[j].components(b);
            bundle.push_back(on_t);
        }
        CheckReport r = bundle.empty()
                            ? vacuous_report("hamiltonian:phi-equation-T", tol, "k = 0")
                            : exprs_zero(bundle, *s_.chart, samples, tol,
                                         "hamiltonian:phi-equation-T");
        if (!r.pass)
            r.note = "f varies along the kernel directions with k >= 2: the eta equations pin "
                     "the kernel part of X_f, so the Phi equation can only hold on E";
        reports.push_back(std::move(r));
    }

    return reports;
}

HamiltonianField hamiltonian_field(const FpkStructure& s, const EtaChoice& c, const Expr& f,
                                   int samples, double tol) {
    HamiltonianSolver solver(s, c);
    VectorField xf = solver.solve(f);
    std::vector<CheckReport> reports = solver.residual_reports(f, xf, samples, tol);
    return HamiltonianField{f, std::move(xf), std::move(reports)};
}

Expr jacobi_bracket(const FpkStructure& s, const EtaChoice& c, const Expr& f, const Expr& g) {
    return HamiltonianSolver(s, c).bracket(f, g);
}

std::vector<CheckReport> verify_bracket(const FpkStructure& s, const EtaChoice& c, const Expr& f,
                                        const Expr& g, int samples, double tol) {
    HamiltonianSolver solver(s, c);
    VectorField xf = solver.solve(f);
    VectorField xg = solver.solve(g);
    Expr fg = solver.bracket_with(xf, f, g);
    KForm phi_g = fundamental_form(s);

    std::vector<CheckReport> reports;
    {
        VectorField commutator = lie_bracket(xf, xg);
        Expr eta_route;
        for (int j = 0; j < s.k; ++j)
            eta_route += Expr(c.c[j]) * apply_form(s.eta[j], {commutator});
        reports.push_back(
            expr_zero(fg - eta_route, *s.chart, samples, tol, "bracket:eta-route"));
    }
    {
        Expr sym_route = directional_derivative(xf, g) - directional_derivative(xg, f) +
                         apply_form(phi_g, {xf, xg});
        reports.push_back(
            expr_zero(fg - sym_route, *s.chart, samples, tol, "bracket:symmetric-route"));
    }
    return reports;
}

std::vector<CheckReport> verify_jacobi_suite(const FpkStructure& s, const EtaChoice& c,
                                             const std::vector<Expr>& fs, int samples,
                                             double tol) {
    if (fs.empty()) throw Error("verify_jacobi_suite: fs must be nonempty");
    if (!(tol > 0.0)) throw Error("verify_jacobi_suite: tolerance must be positive");

    HamiltonianSolver solver(s, c);
    const VectorField& xi = solver.reeb();
    const int nf = static_cast<int>(fs.size());
    const int d = s.chart->dimension();

    std::vector<VectorField> xs;
    for (const Expr& f : fs) xs.push_back(solver.solve(f));

    auto bracket = [&](int i, const Expr& g) { return solver.bracket_with(xs[i], fs[i], g); };

    std::vector<std::vector<Expr>> fg(nf, std::vector<Expr>(nf));
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) fg[i][j] = bracket(i, fs[j]);

    std::vector<CheckReport> reports;

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < nf; ++i)
            for (int j = i; j < nf; ++j) bundle.push_back(fg[i][j] + fg[j][i]);
        reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:antisymmetry"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < nf; ++i)
            for (int j = i + 1; j < nf; ++j)
                for (int l = j + 1; l < nf; ++l)
                    bundle.push_back(bracket(i, fg[j][l]) + bracket(j, fg[l][i]) +
                                     bracket(l, fg[i][j]));
        if (bundle.empty())
            reports.push_back(vacuous_report("jacobi:identity", tol, "fewer than three functions"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:identity"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i)
            for (int q = 0; q < nf; ++q) {
                VectorField lhs = lie_bracket(s.xi[i], xs[q]);
                VectorField rhs = solver.solve(directional_derivative(s.xi[i], fs[q]));
                for (int a = 0; a < d; ++a)
                    bundle.push_back(lhs.components(a) - rhs.components(a));
            }
        if (bundle.empty())
            reports.push_back(vacuous_report("jacobi:LL1", tol, "k = 0"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:LL1"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i) {
            std::vector<Expr> df;
            std::vector<VectorField> x_df;
            for (int q = 0; q < nf; ++q) {
                df.push_back(directional_derivative(s.xi[i], fs[q]));
                x_df.push_back(solver.solve(df.back()));
            }
            for (int q = 0; q < nf; ++q)
                for (int r = q + 1; r < nf; ++r) {
                    Expr lhs = directional_derivative(s.xi[i], fg[q][r]);
                    Expr term1 = solver.bracket_with(x_df[q], df[q], fs[r]);
                    Expr term2 = bracket(q, df[r]);
                    bundle.push_back(lhs - term1 - term2);
                }
        }
        if (bundle.empty())
            reports.push_back(vacuous_report("jacobi:LL2", tol, "k = 0 or a single function"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:LL2"));
    }

    {
        std::vector<Expr> bundle;
        for (int q = 0; q < nf; ++q)
            for (int r = q + 1; r < nf; ++r) {
                VectorField lhs = solver.solve(fg[q][r]);
                VectorField rhs = lie_bracket(xs[q], xs[r]);
                for (int a = 0; a < d; ++a)
                    bundle.push_back(lhs.components(a) - rhs.components(a));
            }
        if (bundle.empty())
            reports.push_back(vacuous_report("jacobi:hamprop", tol, "a single function"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:hamprop"));
    }

    {
        std::vector<Expr> bundle;
        KForm eta_choice = make_kform(s.chart, 1);
        for (int j = 0; j < s.k; ++j) eta_choice = eta_choice + (Expr(c.c[j]) * s.eta[j]);
        for (int q = 0; q < nf; ++q) {
            Expr xif = directional_derivative(xi, fs[q]);
            for (int j = 0; j < s.k; ++j) {
                KForm residual =
                    lie_derivative(xs[q], s.eta[j]) - (Expr(s.alpha[j]) * xif * eta_choice);
                for (const auto& [idx, coeff] : residual.coefficients) bundle.push_back(coeff);
            }
        }
        if (bundle.empty())
            reports.push_back(
                vacuous_report("jacobi:lie-eta", tol, s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "jacobi:lie-eta"));

        std::vector<Expr> bundle2;
        for (int q = 0; q < nf; ++q) {
            Expr xif = directional_derivative(xi, fs[q]);
            KForm residual = lie_derivative(xs[q], eta_choice) - (xif * eta_choice);
            for (const auto& [idx, coeff] : residual.coefficients) bundle2.push_back(coeff);
        }
        if (bundle2.empty())
            reports.push_back(vacuous_report("jacobi:lie-eta-choice", tol,
                                             s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(
                exprs_zero(bundle2, *s.chart, samples, tol, "jacobi:lie-eta-choice"));
    }

    {
        // Support bound: |{f,g}|(p) <= K(p) (|g(p)| + sum |dg(p)|), so a
        // critical zero of g forces the bracket to vanish there.
        std::vector<Expr> brackets;
        for (int q = 0; q < nf; ++q)
            for (int r = 0; r < nf; ++r) {
                if (q == r) continue;
                brackets.push_back(fg[q][r]);
            }
        detail::EvalScratch scratch;
        std::vector<std::vector<Expr>> dg(nf);
        for (int r = 0; r < nf; ++r)
            for (int a = 0; a < d; ++a)
                dg[r].push_back(differentiate(fs[r], s.chart->coordinate(a)));
        std::vector<Expr> xifs;
        for (int q = 0; q < nf; ++q) xifs.push_back(directional_derivative(xi, fs[q]));

        CheckReport r = sample_check(
            *s.chart, samples, tol, "jacobi:support", [&](const Point& pt) {
                scratch.bind(pt);
                double worst = 0.0;
                int slot = 0;
                for (int q = 0; q < nf; ++q)
                    for (int rr = 0; rr < nf; ++rr) {
                        if (q == rr) continue;
                        double bval = std::abs(scratch.eval(brackets[slot]));
                        double k = std::abs(scratch.eval(xifs[q]));
                        for (int a = 0; a < d; ++a)
                            k = std::max(k, std::abs(scratch.eval(xs[q].components(a))));
                        double m = std::abs(scratch.eval(fs[rr]));
                        for (int a = 0; a < d; ++a) m += std::abs(scratch.eval(dg[rr][a]));
                        worst = std::max(worst, std::max(0.0, bval - k * m));
                        ++slot;
                    }
                return worst;
            });
        reports.push_back(std::move(r));
    }

    return reports;
}

} // namespace fpk
