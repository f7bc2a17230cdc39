#include "fpk/report.hpp"

#include <cmath>

namespace fpk {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t sample_seed(const Chart& chart, std::string_view label) {
    return chart.seed() ^ fnv1a(label);
}

BoxSampler::BoxSampler(const Chart& chart, std::string_view label)
    : chart_(&chart), rng_(sample_seed(chart, label)) {}

Point BoxSampler::draw() {
    Point p;
    for (int i = 0; i < chart_->dimension(); ++i) {
        const Interval& iv = chart_->box(i);
        p[chart_->coordinate(i)] = rng_.uniform(iv.lo, iv.hi);
    }
    return p;
}

CheckReport exprs_zero(const std::vector<Expr>& bundle, const Chart& chart, int samples,
                       double tol, const std::string& label) {
    if (samples < 1) throw Error(label + ": samples must be >= 1");
    if (!(tol > 0.0)) throw Error(label + ": tolerance must be positive");

    CheckReport report;
    report.identity = label;
    report.tolerance = tol;
    if (bundle.empty()) {
        report.pass = true;
        report.note = "identically zero";
        return report;
    }

    BoxSampler sampler(chart, label);
    detail::EvalScratch scratch;
    const int max_draws = 5 * samples + 20;
    int draws = 0;
    int guarded = 0;

    while (report.samples_used < samples) {
        if (draws >= max_draws)
            throw SamplingExhausted(label + ": " + std::to_string(guarded) + " of " +
                                    std::to_string(draws) +
                                    " draws hit the division guard; box likely crosses a pole");
        ++draws;
        Point p = sampler.draw();
        scratch.bind(p);
        double worst = 0.0;
        try {
            for (const Expr& e : bundle) {
                double r = std::abs(scratch.eval(e));
                if (r > worst) worst = r;
            }
        } catch (const DivisionNearZero&) {
            ++guarded;
            continue;
        }
        ++report.samples_used;
        if (report.samples_used == 1 || worst > report.max_residual) {
            report.max_residual = worst;
            report.witness = std::move(p);
        }
    }

    report.pass = report.max_residual <= tol;
    if (guarded > 0)
        report.note = std::to_string(guarded) + " draws redrawn at the division guard";
    return report;
}

CheckReport expr_zero(const Expr& e, const Chart& chart, int samples, double tol,
                      const std::string& label) {
    return exprs_zero(std::vector<Expr>{e}, chart, samples, tol, label);
}

CheckReport sample_check(const Chart& chart, int samples, double tol, const std::string& label,
                         const std::function<double(const Point&)>& residual_at) {
    if (samples < 1) throw Error(label + ": samples must be >= 1");
    if (tol < 0.0) throw Error(label + ": tolerance must be non-negative");

    CheckReport report;
    report.identity = label;
    report.tolerance = tol;

    BoxSampler sampler(chart, label);
    const int max_draws = 5 * samples + 20;
    int draws = 0;
    int guarded = 0;

    while (report.samples_used < samples) {
        if (draws >= max_draws)
            throw SamplingExhausted(label + ": " + std::to_string(guarded) + " of " +
                                    std::to_string(draws) +
                                    " draws hit the division guard; box likely crosses a pole");
        ++draws;
        Point p = sampler.draw();
        double r = 0.0;
        try {
            r = residual_at(p);
        } catch (const DivisionNearZero&) {
            ++guarded;
            continue;
        }
        ++report.samples_used;
        if (report.samples_used == 1 || r > report.max_residual) {
            report.max_residual = r;
            report.witness = std::move(p);
        }
    }

    report.pass = report.max_residual <= tol;
    if (guarded > 0)
        report.note = std::to_string(guarded) + " draws redrawn at the division guard";
    return report;
}

CheckReport vacuous_report(std::string identity, double tolerance, std::string note) {
    CheckReport report;
    report.identity = std::move(identity);
    report.pass = true;
    report.tolerance = tolerance;
    report.note = std::move(note);
    return report;
}

} // namespace fpk
