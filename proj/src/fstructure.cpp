#include "fpk/fstructure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpk {

namespace {

void append_matrix(std::vector<Expr>& bundle, const ExprMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) bundle.push_back(m(i, j));
}

void append_vector(std::vector<Expr>& bundle, const ExprVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) bundle.push_back(v(i));
}

void append_form(std::vector<Expr>& bundle, const KForm& form) {
    for (const auto& [idx, coeff] : form.coefficients) bundle.push_back(coeff);
}

ExprMatrix identity_matrix(int d) {
    ExprMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Expr(i == j ? 1.0 : 0.0);
    return m;
}

std::vector<VectorField> e_frame(const FpkStructure& s) {
    EndField l = projector_l(s);
    std::vector<VectorField> fields;
    for (int a = 0; a < s.chart->dimension(); ++a)
        fields.push_back(apply(l, coordinate_field(s.chart, a)));
    return fields;
}

} // namespace

FpkStructure make_fpk_structure(ChartPtr chart, EndField phi, std::vector<VectorField> xi,
                                std::vector<KForm> eta, MetricField g,
                                std::vector<double> alpha, int n, int k) {
    if (!chart) throw DimensionMismatch("structure needs a chart");
    if (n < 0 || k < 0 || chart->dimension() != 2 * n + k)
        throw DimensionMismatch("chart dimension must equal 2n + k");
    if (static_cast<int>(xi.size()) != k || static_cast<int>(eta.size()) != k ||
        static_cast<int>(alpha.size()) != k)
        throw DimensionMismatch("xi, eta and alpha must each have k entries");
    if (!(*phi.chart == *chart) || !(*g.chart == *chart))
        throw ChartMismatch("phi and g must live on the structure chart");
    if (phi.matrix.rows() != chart->dimension() || phi.matrix.cols() != chart->dimension())
        throw DimensionMismatch("phi matrix must be square of the chart dimension");
    for (const auto& x : xi) {
        if (!(*x.chart == *chart)) throw ChartMismatch("xi fields must live on the structure chart");
        if (x.components.size() != chart->dimension())
            throw DimensionMismatch("xi component count must equal the chart dimension");
    }
    for (const auto& e : eta) {
        if (!(*e.chart == *chart)) throw ChartMismatch("eta forms must live on the structure chart");
        if (e.degree != 1) throw DimensionMismatch("eta entries must be 1-forms");
    }
    return FpkStructure{std::move(chart), std::move(phi), std::move(xi), std::move(eta),
                        std::move(g),     std::move(alpha), n, k};
}

EndField projector_l(const FpkStructure& s) {
    ExprMatrix p2 = s.phi.matrix * s.phi.matrix;
    ExprMatrix l(p2.rows(), p2.cols());
    for (Eigen::Index i = 0; i < p2.rows(); ++i)
        for (Eigen::Index j = 0; j < p2.cols(); ++j) l(i, j) = -p2(i, j);
    return EndField{s.chart, std::move(l)};
}

EndField projector_m(const FpkStructure& s) {
    ExprMatrix m = s.phi.matrix * s.phi.matrix + identity_matrix(s.chart->dimension());
    return EndField{s.chart, std::move(m)};
}

std::vector<CheckReport> validate_fpk(const FpkStructure& s, int samples, double tol) {
    const int d = s.chart->dimension();
    const ExprMatrix& p = s.phi.matrix;
    std::vector<CheckReport> reports;

    {
        std::vector<Expr> bundle;
        append_matrix(bundle, ExprMatrix(p * p * p + p));
        reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "validate:phi-cubed"));
    }

    if (s.k == 0) {
        reports.push_back(vacuous_report("validate:frame-duality", tol, "k = 0"));
        reports.push_back(vacuous_report("validate:phi-kernel", tol, "k = 0"));
        reports.push_back(vacuous_report("validate:eta-cokernel", tol, "k = 0"));
    } else {
        std::vector<Expr> duality, kernel, cokernel;
        for (int i = 0; i < s.k; ++i) {
            for (int j = 0; j < s.k; ++j)
                duality.push_back(apply_form(s.eta[i], {s.xi[j]}) - Expr(i == j ? 1.0 : 0.0));
            append_vector(kernel, apply(s.phi, s.xi[i]).components);
            ExprVector ei = covector(s.eta[i]);
            for (int a = 0; a < d; ++a) {
                Expr entry;
                for (int m = 0; m < d; ++m) entry += ei(m) * p(m, a);
                cokernel.push_back(entry);
            }
        }
        reports.push_back(exprs_zero(duality, *s.chart, samples, tol, "validate:frame-duality"));
        reports.push_back(exprs_zero(kernel, *s.chart, samples, tol, "validate:phi-kernel"));
        reports.push_back(exprs_zero(cokernel, *s.chart, samples, tol, "validate:eta-cokernel"));
    }

    {
        ExprMatrix rhs = identity_matrix(d);
        ExprMatrix lhs = p * p + rhs;
        for (int i = 0; i < s.k; ++i) {
            ExprVector ei = covector(s.eta[i]);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) lhs(a, b) -= s.xi[i].components(a) * ei(b);
        }
        std::vector<Expr> bundle;
        append_matrix(bundle, lhs);
        reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "validate:phi-squared"));
    }

    {
        ExprMatrix l = projector_l(s).matrix;
        ExprMatrix m = projector_m(s).matrix;
        ExprMatrix id = identity_matrix(d);
        std::vector<Expr> bundle;
        append_matrix(bundle, ExprMatrix(l + m - id));
        append_matrix(bundle, ExprMatrix(l * l - l));
        append_matrix(bundle, ExprMatrix(m * m - m));
        append_matrix(bundle, ExprMatrix(l * m));
        reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "validate:projectors"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) bundle.push_back(s.g.matrix(i, j) - s.g.matrix(j, i));
        if (bundle.empty())
            reports.push_back(vacuous_report("validate:metric-symmetry", tol, "dimension 1"));
        else
            reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "validate:metric-symmetry"));
    }

    {
        double global_min = std::numeric_limits<double>::infinity();
        CheckReport r = sample_check(
            *s.chart, samples, 0.0, "validate:metric-positivity", [&](const Point& pt) {
                Eigen::MatrixXd gm = evaluate_matrix(s.g.matrix, pt);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(gm);
                double min_eig = eigs.eigenvalues().minCoeff();
                global_min = std::min(global_min, min_eig);
                return std::max(0.0, kMetricEigenFloor - min_eig);
            });
        r.note = "min eigenvalue over samples = " + std::to_string(global_min);
        reports.push_back(std::move(r));
    }

    {
        ExprMatrix lhs = s.g.matrix - ExprMatrix(p.transpose() * s.g.matrix * p);
        for (int i = 0; i < s.k; ++i) {
            ExprVector ei = covector(s.eta[i]);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) lhs(a, b) -= ei(a) * ei(b);
        }
        std::vector<Expr> bundle;
        append_matrix(bundle, lhs);
        SplitMix64 rng(sample_seed(*s.chart, "validate:compatibility-fields"));
        for (int r = 0; r < kRandomFieldCount / 2; ++r) {
            VectorField x = random_field(s.chart, rng, 2);
            VectorField y = random_field(s.chart, rng, 2);
            Expr value = metric_eval(s.g, x, y) - metric_eval(s.g, apply(s.phi, x), apply(s.phi, y));
            for (int i = 0; i < s.k; ++i)
                value -= apply_form(s.eta[i], {x}) * apply_form(s.eta[i], {y});
            bundle.push_back(value);
        }
        reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "validate:compatibility"));
    }

    return reports;
}

KForm fundamental_form(const FpkStructure& s) {
    ExprMatrix m = s.phi.matrix.transpose() * s.g.matrix;
    KForm phi_g = make_kform(s.chart, 2);
    for (int a = 0; a < s.chart->dimension(); ++a)
        for (int b = a + 1; b < s.chart->dimension(); ++b) add_term(phi_g, {a, b}, m(a, b));
    return phi_g;
}

std::vector<CheckReport> verify_fundamental_form(const FpkStructure& s, int samples, double tol) {
    std::vector<CheckReport> reports;
    ExprMatrix m = s.phi.matrix.transpose() * s.g.matrix;

    {
        std::vector<Expr> bundle;
        for (int a = 0; a < s.chart->dimension(); ++a)
            for (int b = a; b < s.chart->dimension(); ++b) bundle.push_back(m(a, b) + m(b, a));
        reports.push_back(
            exprs_zero(bundle, *s.chart, samples, tol, "fundamental:antisymmetry"));
    }

    {
        KForm phi_g = fundamental_form(s);
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i) append_form(bundle, interior_product(s.xi[i], phi_g));
        if (bundle.empty())
            reports.push_back(vacuous_report("fundamental:lemma1", tol,
                                             s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "fundamental:lemma1"));
    }

    {
        RankRange rank = numeric_rank(EndField{s.chart, m}, samples);
        CheckReport r;
        r.identity = "fundamental:rank";
        r.tolerance = 0.0;
        r.samples_used = samples;
        r.max_residual = std::max(std::abs(rank.min_rank - 2 * s.n),
                                  std::abs(rank.max_rank - 2 * s.n));
        r.pass = r.max_residual <= r.tolerance;
        r.note = "rank range [" + std::to_string(rank.min_rank) + ", " +
                 std::to_string(rank.max_rank) + "], expected " + std::to_string(2 * s.n);
        reports.push_back(std::move(r));
    }

    return reports;
}

VectorField normality_tensor(const FpkStructure& s, const VectorField& x, const VectorField& y) {
    VectorField n = nijenhuis_pair(s.phi, x, y);
    for (int i = 0; i < s.k; ++i) {
        KForm deta = exterior_derivative(s.eta[i]);
        n = n + (apply_form(deta, {x, y}) * s.xi[i]);
    }
    return n;
}

namespace {

struct FitResult {
    std::vector<double> fitted;
    std::vector<CheckReport> eta_reports;
    CheckReport almost_k_report;
    bool almost_K = false;
    bool almost_S = false;
};

FitResult fit_and_check(const FpkStructure& s, int samples, double tol) {
    FitResult out;
    KForm phi_g = fundamental_form(s);
    const int d = s.chart->dimension();

    if (2 < d) {
        std::vector<Expr> bundle;
        append_form(bundle, exterior_derivative(phi_g));
        out.almost_k_report = exprs_zero(bundle, *s.chart, samples, tol, "classify:almost-K");
    } else {
        out.almost_k_report =
            vacuous_report("classify:almost-K", tol, "Phi_g has top degree, closed trivially");
    }
    out.almost_K = out.almost_k_report.pass;

    std::vector<KForm> detas;
    for (int i = 0; i < s.k; ++i) detas.push_back(exterior_derivative(s.eta[i]));

    if (s.k > 0 && s.n > 0) {
        std::vector<VectorField> lf = e_frame(s);
        std::vector<Expr> phi_pairs;
        std::vector<std::vector<Expr>> deta_pairs(s.k);
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                phi_pairs.push_back(apply_form(phi_g, {lf[a], lf[b]}));
                for (int i = 0; i < s.k; ++i)
                    deta_pairs[i].push_back(apply_form(detas[i], {lf[a], lf[b]}));
            }

        BoxSampler sampler(*s.chart, "classify:alpha-fit");
        detail::EvalScratch scratch;
        std::vector<double> num(s.k, 0.0);
        double den = 0.0;
        long count = 0;
        const int max_draws = 5 * samples + 20;
        int draws = 0, used = 0;
        while (used < samples) {
            if (draws >= max_draws)
                throw SamplingExhausted("classify:alpha-fit: sampling exhausted at the division guard");
            ++draws;
            Point pt = sampler.draw();
            scratch.bind(pt);
            double den_local = 0.0;
            std::vector<double> num_local(s.k, 0.0);
            long count_local = 0;
            try {
                for (std::size_t q = 0; q < phi_pairs.size(); ++q) {
                    double w = scratch.eval(phi_pairs[q]);
                    den_local += w * w;
                    for (int i = 0; i < s.k; ++i)
                        num_local[i] += scratch.eval(deta_pairs[i][q]) * w;
                    ++count_local;
                }
            } catch (const DivisionNearZero&) {
                continue;
            }
            den += den_local;
            for (int i = 0; i < s.k; ++i) num[i] += num_local[i];
            count += count_local;
            ++used;
        }
        if (count == 0 || den / static_cast<double>(count) < 1e-16)
            throw AlphaFitIllPosed(
                "classify: Phi_g samples to zero on all tested E-frame pairs");
        for (int i = 0; i < s.k; ++i) out.fitted.push_back(-num[i] / den);
    } else {
        out.fitted = s.alpha; // n = 0: any constant fits d(eta) = -alpha * 0
    }

    bool etas_pass = true;
    for (int i = 0; i < s.k; ++i) {
        KForm residual = detas[i] + (Expr(out.fitted[i]) * phi_g);
        std::vector<Expr> bundle;
        append_form(bundle, residual);
        std::string label = "classify:almost-S-eta" + std::to_string(i + 1);
        CheckReport r = bundle.empty() ? vacuous_report(label, tol, "identically zero")
                                       : exprs_zero(bundle, *s.chart, samples, tol, label);
        etas_pass = etas_pass && r.pass;
        out.eta_reports.push_back(std::move(r));
    }
    out.almost_S = out.almost_K && etas_pass;
    return out;
}

} // namespace

Classification classify(const FpkStructure& s, int samples, double tol) {
    Classification out;
    FitResult fit = fit_and_check(s, samples, tol);
    out.almost_K = fit.almost_K;
    out.almost_S = fit.almost_S;
    out.fitted_alpha = fit.fitted;
    out.reports.push_back(fit.almost_k_report);
    for (auto& r : fit.eta_reports) out.reports.push_back(r);

    {
        CheckReport cross;
        cross.identity = "classify:alpha-cross-check";
        cross.tolerance = tol;
        cross.samples_used = samples;
        double residual = 0.0;
        for (int i = 0; i < s.k; ++i)
            residual = std::max(residual, std::abs(fit.fitted[i] - s.alpha[i]));
        cross.max_residual = residual;
        cross.pass = residual <= tol;
        cross.note = s.k == 0 ? "k = 0" : "max |fitted - declared| over the k constants";
        out.reports.push_back(std::move(cross));
    }

    KForm phi_g = fundamental_form(s);
    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i)
            for (int j = i + 1; j < s.k; ++j)
                append_form(bundle, interior_product(lie_bracket(s.xi[i], s.xi[j]), phi_g));
        if (bundle.empty())
            out.reports.push_back(vacuous_report("classify:T-involutivity", tol,
                                                 s.k < 2 ? "k < 2" : "identically zero"));
        else
            out.reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "classify:T-involutivity"));
    }

    const int d = s.chart->dimension();
    {
        std::vector<Expr> bundle;
        std::vector<VectorField> frame;
        for (int a = 0; a < d; ++a) frame.push_back(coordinate_field(s.chart, a));
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                append_vector(bundle, normality_tensor(s, frame[a], frame[b]).components);
        if (bundle.empty())
            out.reports.push_back(vacuous_report("classify:normality", tol, "dimension 1"));
        else
            out.reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "classify:normality"));
        out.normal = out.reports.back().pass;
    }

    {
        std::vector<Expr> bundle;
        std::vector<VectorField> lf = e_frame(s);
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                append_vector(bundle, normality_tensor(s, lf[a], lf[b]).components);
        if (bundle.empty())
            out.reports.push_back(vacuous_report("classify:cr-integrability", tol, "dimension 1"));
        else
            out.reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "classify:cr-integrability"));
        out.cr_integrable = out.reports.back().pass;
    }

    return out;
}

std::vector<CheckReport> structure_propositions(const FpkStructure& s, int samples, double tol) {
    FitResult fit = fit_and_check(s, samples, tol);
    if (!fit.almost_S)
        throw PreconditionNotAlmostS(
            "structure_propositions: the conditional checks (Propositions 3-4) require an "
            "almost S-structure; classification rejected it");

    std::vector<CheckReport> reports;
    KForm phi_g = fundamental_form(s);
    const int d = s.chart->dimension();

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i) append_form(bundle, interior_product(s.xi[i], phi_g));
        if (bundle.empty())
            reports.push_back(
                vacuous_report("prop:lemma1", tol, s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "prop:lemma1"));
    }

    {
        std::vector<Expr> bundle;
        if (s.k >= 2) {
            KForm dphi = 2 < d ? exterior_derivative(phi_g) : make_kform(s.chart, std::min(3, d));
            std::vector<VectorField> zs =
                frame_and_random_fields(s.chart, kRandomFieldCount, "prop:prop2-fields");
            for (int i = 0; i < s.k; ++i)
                for (int j = i + 1; j < s.k; ++j) {
                    VectorField bracket = lie_bracket(s.xi[i], s.xi[j]);
                    for (const auto& z : zs) {
                        Expr lhs = 2 < d ? apply_form(dphi, {s.xi[i], s.xi[j], z}) : Expr(0.0);
                        bundle.push_back(lhs + apply_form(phi_g, {bracket, z}));
                    }
                }
        }
        if (bundle.empty())
            reports.push_back(vacuous_report("prop:prop2-identity", tol, "k < 2"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "prop:prop2-identity"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i)
            for (int j = i + 1; j < s.k; ++j)
                append_form(bundle, interior_product(lie_bracket(s.xi[i], s.xi[j]), phi_g));
        if (bundle.empty())
            reports.push_back(vacuous_report("prop:prop2-involutivity", tol,
                                             s.k < 2 ? "k < 2" : "identically zero"));
        else
            reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "prop:prop2-involutivity"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i)
            for (int j = i + 1; j < s.k; ++j)
                append_vector(bundle, lie_bracket(s.xi[i], s.xi[j]).components);
        if (bundle.empty())
            reports.push_back(vacuous_report("prop:prop3-xi-brackets", tol, "k < 2"));
        else
            reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "prop:prop3-xi-brackets"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i)
            for (int j = 0; j < s.k; ++j)
                append_form(bundle, lie_derivative(s.xi[i], s.eta[j]));
        if (bundle.empty())
            reports.push_back(
                vacuous_report("prop:prop4-lie-eta", tol, s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(exprs_zero(bundle, *s.chart, samples, tol, "prop:prop4-lie-eta"));
    }

    {
        std::vector<Expr> bundle;
        for (int i = 0; i < s.k; ++i) append_form(bundle, lie_derivative(s.xi[i], phi_g));
        if (bundle.empty())
            reports.push_back(vacuous_report("prop:lie-xi-fundamental", tol,
                                             s.k == 0 ? "k = 0" : "identically zero"));
        else
            reports.push_back(
                exprs_zero(bundle, *s.chart, samples, tol, "prop:lie-xi-fundamental"));
    }

    return reports;
}

RankRange numeric_rank(const EndField& e, int samples, double threshold) {
    if (e.matrix.rows() != e.matrix.cols()) throw DimensionMismatch("numeric_rank: square only");
    if (samples < 1) throw Error("numeric_rank: samples must be >= 1");
    BoxSampler sampler(*e.chart, "numeric-rank");
    RankRange out;
    const int max_draws = 5 * samples + 20;
    int draws = 0, used = 0;
    while (used < samples) {
        if (draws >= max_draws)
            throw SamplingExhausted("numeric-rank: sampling exhausted at the division guard");
        ++draws;
        Point pt = sampler.draw();
        Eigen::MatrixXd m;
        try {
            m = evaluate_matrix(e.matrix, pt);
        } catch (const DivisionNearZero&) {
            continue;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& sv = svd.singularValues();
        double cutoff = sv.size() > 0 ? threshold * sv(0) : 0.0;
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
        if (used == 0) {
            out.min_rank = out.max_rank = rank;
        } else {
            out.min_rank = std::min(out.min_rank, rank);
            out.max_rank = std::max(out.max_rank, rank);
        }
        ++used;
    }
    return out;
}

EndField stable_complex_structure(const FpkStructure& s) {
    const int d = s.chart->dimension();
    ChartPtr extended =
        extend_chart(*s.chart, s.k, "t", std::vector<Interval>(s.k, Interval{-1.0, 1.0}));
    const int ed = extended->dimension();
    ExprMatrix j(ed, ed);
    for (int a = 0; a < ed; ++a)
        for (int b = 0; b < ed; ++b) j(a, b) = Expr(0.0);
    for (int a = 0; a < d; ++a) {
        for (int r = 0; r < d; ++r) j(r, a) = s.phi.matrix(r, a);
        for (int i = 0; i < s.k; ++i) {
            Expr ei_a = covector(s.eta[i])(a);
            j(d + i, a) = ei_a;
        }
    }
    for (int i = 0; i < s.k; ++i)
        for (int r = 0; r < d; ++r) j(r, d + i) = -s.xi[i].components(r);
    return EndField{std::move(extended), std::move(j)};
}

} // namespace fpk
