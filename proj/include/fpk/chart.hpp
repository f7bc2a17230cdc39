#ifndef FPK_CHART_HPP
#define FPK_CHART_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fpk/errors.hpp"

namespace fpk {

/// Closed sampling interval for one coordinate.
struct Interval {
    double lo = -1.0;
    double hi = 1.0;
    bool operator==(const Interval& other) const { return lo == other.lo && hi == other.hi; }
};

/// A point of a chart, keyed by coordinate name.
using Point = std::map<std::string, double>;

/// A coordinate patch: ordered distinct coordinate names, a sampling box and an RNG seed.
class Chart {
public:
    Chart(std::vector<std::string> coordinates, std::vector<Interval> box, std::uint64_t seed);

    int dimension() const { return static_cast<int>(coordinates_.size()); }
    const std::vector<std::string>& coordinates() const { return coordinates_; }
    const std::string& coordinate(int i) const { return coordinates_.at(i); }
    const Interval& box(int i) const { return box_.at(i); }
    const std::vector<Interval>& box() const { return box_; }
    std::uint64_t seed() const { return seed_; }

    /// Index of `name`, or -1 when it is not a coordinate of this chart.
    int index_of(std::string_view name) const;

    /// Midpoint of the sampling box.
    Point midpoint() const;

    bool operator==(const Chart& other) const;

private:
    std::vector<std::string> coordinates_;
    std::vector<Interval> box_;
    std::uint64_t seed_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box,
                    std::uint64_t seed);

/// Chart with `coordinates` and the same interval for every coordinate.
ChartPtr make_chart(std::vector<std::string> coordinates, Interval common_box,
                    std::uint64_t seed);

/// New chart appending `extra` coordinates named `<prefix>1..<prefix>extra` with the given
/// boxes. Throws DimensionMismatch on a name collision with the base chart.
ChartPtr extend_chart(const Chart& base, int extra, const std::string& prefix,
                      const std::vector<Interval>& extra_box);

} // namespace fpk

#endif
