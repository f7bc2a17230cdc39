#ifndef FPK_REPORT_HPP
#define FPK_REPORT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fpk/chart.hpp"
#include "fpk/expr.hpp"

namespace fpk {

/// Outcome of one sampled identity check.
struct CheckReport {
    std::string identity;
    bool pass = false;
    double max_residual = 0.0;
    Point witness;
    int samples_used = 0;
    double tolerance = 0.0;
    std::string note;
};

/// SplitMix64: tiny, seedable, platform-independent generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

private:
    std::uint64_t state_;
};

std::uint64_t fnv1a(std::string_view text);

/// Seed for one sampling pass: the chart seed mixed with the call-site label,
/// so distinct checks draw distinct streams but each stream is reproducible.
std::uint64_t sample_seed(const Chart& chart, std::string_view label);

/// Draws points uniformly from a chart's box.
class BoxSampler {
public:
    BoxSampler(const Chart& chart, std::string_view label);
    Point draw();

private:
    const Chart* chart_;
    SplitMix64 rng_;
};

/// Sampled zero test for a single expression. `label` names the identity in the
/// report and salts the RNG stream. Points where evaluation hits the division
/// guard are redrawn; if fewer than `samples` clean points fit in 5*samples+20
/// draws the check throws SamplingExhausted.
CheckReport expr_zero(const Expr& e, const Chart& chart, int samples, double tol,
                      const std::string& label = "expr_zero");

/// Bundle form of expr_zero: every expression is evaluated at the same points
/// (one memoized pass per point); the report carries the worst residual across
/// the whole bundle. An empty bundle passes vacuously.
CheckReport exprs_zero(const std::vector<Expr>& bundle, const Chart& chart, int samples,
                       double tol, const std::string& label);

/// Passing report for an identity with nothing to test.
CheckReport vacuous_report(std::string identity, double tolerance,
                           std::string note = "nothing to test");

/// Generic sampled check for residuals that are not plain expression values
/// (eigenvalue floors, determinant floors, rank defects). `residual_at` may
/// throw DivisionNearZero to reject a point; the redraw policy matches
/// exprs_zero. Unlike exprs_zero, tol = 0 is allowed (floor-style residuals
/// already fold their threshold into the value).
CheckReport sample_check(const Chart& chart, int samples, double tol, const std::string& label,
                         const std::function<double(const Point&)>& residual_at);

} // namespace fpk

#endif
