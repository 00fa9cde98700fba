#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dtwidx {

/// A finite real-valued sequence. `id` and `label` are optional metadata
/// filled in by loaders; the values are what every distance operates on.
struct TimeSeries {
    std::vector<double> values;
    std::uint64_t id = 0;
    std::string label;

    std::size_t length() const { return values.size(); }
};

/// Throws std::invalid_argument unless the series is non-empty and every
/// sample is finite.
void validate_series(const TimeSeries& series);

/// Sakoe-Chiba band: a path element (i, j) is feasible iff |i - j| <= radius.
/// The unbounded band admits every element.
class BandConstraint {
public:
    static BandConstraint unbounded() { return BandConstraint(std::nullopt); }
    static BandConstraint banded(std::size_t r) { return BandConstraint(r); }

    bool is_unbounded() const { return !radius_.has_value(); }
    const std::optional<std::size_t>& radius() const { return radius_; }

    /// Band feasibility of a 1-based warping-matrix cell.
    bool admits(std::size_t i, std::size_t j) const {
        if (!radius_) return true;
        const std::size_t diff = i > j ? i - j : j - i;
        return diff <= *radius_;
    }

private:
    explicit BandConstraint(std::optional<std::size_t> r) : radius_(r) {}
    std::optional<std::size_t> radius_;
};

/// An alignment between two sequences: ordered matrix cells (i, j), 1-based.
/// A valid path starts at (1,1), ends at (n,m), never retreats in either
/// coordinate and advances each coordinate by at most one per step.
struct WarpingPath {
    std::vector<std::pair<std::size_t, std::size_t>> steps;

    std::size_t size() const { return steps.size(); }
};

}  // namespace dtwidx
