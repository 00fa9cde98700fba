#include "dtwidx/dtw.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dtwidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lengths_feasible(std::size_t n, std::size_t m, const BandConstraint& band) {
    if (band.is_unbounded()) return true;
    const std::size_t diff = n > m ? n - m : m - n;
    return diff <= *band.radius();
}

// Column window of band-feasible cells in row i (1-based, clipped to [1, m]).
std::pair<std::size_t, std::size_t> row_window(std::size_t i, std::size_t m,
                                               const BandConstraint& band) {
    if (band.is_unbounded()) return {1, m};
    const std::size_t r = *band.radius();
    const std::size_t lo = i > r ? i - r : 1;
    const std::size_t hi = std::min(m, i + r);
    return {lo, hi};
}

}  // namespace

std::optional<double> dtw(const TimeSeries& q, const TimeSeries& c,
                          const BandConstraint& band) {
    validate_series(q);
    validate_series(c);
    const std::size_t n = q.length();
    const std::size_t m = c.length();
    if (!lengths_feasible(n, m, band)) return std::nullopt;

    // Two rolling rows indexed 0..m; row 0 is the virtual border. Windows
    // move monotonically right, so clearing [lo-1, hi] per row keeps every
    // cell read either current or +inf.
    std::vector<double> prev(m + 1, kInf);
    std::vector<double> curr(m + 1, kInf);
    prev[0] = 0.0;

    for (std::size_t i = 1; i <= n; ++i) {
        const auto [lo, hi] = row_window(i, m, band);
        std::fill(curr.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                  curr.begin() + static_cast<std::ptrdiff_t>(hi + 1), kInf);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double best =
                std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = base_distance(q.values[i - 1], c.values[j - 1]) + best;
        }
        std::swap(prev, curr);
    }
    const double result = prev[m];
    if (result == kInf) return std::nullopt;
    return result;
}

std::optional<Alignment> dtw_with_path(const TimeSeries& q, const TimeSeries& c,
                                       const BandConstraint& band) {
    validate_series(q);
    validate_series(c);
    const std::size_t n = q.length();
    const std::size_t m = c.length();
    if (!lengths_feasible(n, m, band)) return std::nullopt;

    std::vector<double> dp((n + 1) * (m + 1), kInf);
    const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
    dp[at(0, 0)] = 0.0;

    for (std::size_t i = 1; i <= n; ++i) {
        const auto [lo, hi] = row_window(i, m, band);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double best = std::min(
                {dp[at(i - 1, j - 1)], dp[at(i - 1, j)], dp[at(i, j - 1)]});
            dp[at(i, j)] =
                base_distance(q.values[i - 1], c.values[j - 1]) + best;
        }
    }
    if (dp[at(n, m)] == kInf) return std::nullopt;

    Alignment out;
    out.distance = dp[at(n, m)];
    std::size_t i = n, j = m;
    std::vector<std::pair<std::size_t, std::size_t>> rev;
    rev.emplace_back(i, j);
    while (i > 1 || j > 1) {
        const double diag = (i > 1 && j > 1) ? dp[at(i - 1, j - 1)] : kInf;
        const double vert = i > 1 ? dp[at(i - 1, j)] : kInf;
        const double horz = j > 1 ? dp[at(i, j - 1)] : kInf;
        const double best = std::min({diag, vert, horz});
        if (diag == best) {
            --i;
            --j;
        } else if (vert == best) {
            --i;
        } else {
            --j;
        }
        rev.emplace_back(i, j);
    }
    out.path.steps.assign(rev.rbegin(), rev.rend());
    return out;
}

bool validate_path(const WarpingPath& path, std::size_t n, std::size_t m,
                   const BandConstraint& band) {
    const auto& s = path.steps;
    if (s.empty()) return false;
    if (s.front().first != 1 || s.front().second != 1) return false;
    if (s.back().first != n || s.back().second != m) return false;
    for (const auto& [i, j] : s) {
        if (i < 1 || i > n || j < 1 || j > m) return false;
        if (!band.admits(i, j)) return false;
    }
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k].first < s[k - 1].first || s[k].second < s[k - 1].second)
            return false;
        const std::size_t di = s[k].first - s[k - 1].first;
        const std::size_t dj = s[k].second - s[k - 1].second;
        if (di > 1 || dj > 1) return false;
        if (di == 0 && dj == 0) return false;
    }
    return true;
}

double path_cost(const TimeSeries& q, const TimeSeries& c,
                 const WarpingPath& path) {
    validate_series(q);
    validate_series(c);
    if (!validate_path(path, q.length(), c.length(), BandConstraint::unbounded())) {
        throw std::invalid_argument("invalid warping path for these lengths");
    }
    double cost = 0.0;
    for (const auto& [i, j] : path.steps) {
        cost += base_distance(q.values[i - 1], c.values[j - 1]);
    }
    return cost;
}

namespace {

// Depth-first enumeration of all band-feasible paths. Costs accumulate in
// step order, which matches the dynamic program's association exactly.
void enumerate_paths(const TimeSeries& q, const TimeSeries& c,
                     const BandConstraint& band, std::size_t i, std::size_t j,
                     double cost, double& best) {
    cost += base_distance(q.values[i - 1], c.values[j - 1]);
    const std::size_t n = q.length();
    const std::size_t m = c.length();
    if (i == n && j == m) {
        best = std::min(best, cost);
        return;
    }
    if (i < n && j < m && band.admits(i + 1, j + 1))
        enumerate_paths(q, c, band, i + 1, j + 1, cost, best);
    if (i < n && band.admits(i + 1, j))
        enumerate_paths(q, c, band, i + 1, j, cost, best);
    if (j < m && band.admits(i, j + 1))
        enumerate_paths(q, c, band, i, j + 1, cost, best);
}

}  // namespace

std::optional<double> brute_force_dtw(const TimeSeries& q, const TimeSeries& c,
                                      const BandConstraint& band) {
    validate_series(q);
    validate_series(c);
    if (q.length() + c.length() > 14) {
        throw std::invalid_argument(
            "brute_force_dtw is capped at combined length 14");
    }
    if (!lengths_feasible(q.length(), c.length(), band)) return std::nullopt;
    double best = kInf;
    enumerate_paths(q, c, band, 1, 1, 0.0, best);
    if (best == kInf) return std::nullopt;
    return best;
}

}  // namespace dtwidx
