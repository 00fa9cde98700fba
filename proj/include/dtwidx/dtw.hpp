#pragma once

#include <cmath>
#include <optional>

#include "dtwidx/series.hpp"

namespace dtwidx {

inline double base_distance(double a, double b) { return std::fabs(a - b); }

/**
 * Band-constrained DTW distance with L1 base distance.
 *
 * Evaluates the dynamic program row by row over the banded cells only;
 * cells outside the band act as +infinity. Returns nullopt when no
 * band-feasible alignment exists, which happens exactly when the length
 * difference exceeds the band radius.
 */
std::optional<double> dtw(const TimeSeries& q, const TimeSeries& c,
                          const BandConstraint& band);

struct Alignment {
    double distance = 0.0;
    WarpingPath path;
};

/// DTW plus one optimal warping path. Ties between predecessors are broken
/// diagonal first, then vertical, then horizontal, so the path is
/// deterministic. Returns nullopt when infeasible.
std::optional<Alignment> dtw_with_path(const TimeSeries& q, const TimeSeries& c,
                                       const BandConstraint& band);

/// Cost of an arbitrary alignment: sum of base distances over its steps.
/// Throws std::invalid_argument if the path is not valid for the lengths.
double path_cost(const TimeSeries& q, const TimeSeries& c,
                 const WarpingPath& path);

/// True iff the path satisfies boundary, monotonicity, continuity and band
/// feasibility for an n-by-m warping matrix.
bool validate_path(const WarpingPath& path, std::size_t n, std::size_t m,
                   const BandConstraint& band);

/// Test oracle: enumerates every band-feasible warping path and returns the
/// minimum path cost. Throws std::invalid_argument when
/// len(q) + len(c) > 14. Returns nullopt when infeasible.
std::optional<double> brute_force_dtw(const TimeSeries& q, const TimeSeries& c,
                                      const BandConstraint& band);

}  // namespace dtwidx
