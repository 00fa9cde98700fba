#pragma once

#include <cstddef>
#include <vector>

#include "dtwidx/series.hpp"

namespace dtwidx {

/// Windowed max/min boundary sequences of a query under band radius r,
/// with windows clipped to the sequence ends.
struct Envelope {
    std::vector<double> upper;
    std::vector<double> lower;
    std::size_t radius = 0;

    std::size_t length() const { return upper.size(); }
};

Envelope envelope(const TimeSeries& q, std::size_t r);

/// Convenience overload; throws std::invalid_argument for an unbounded band
/// since the envelope needs a finite window.
Envelope envelope(const TimeSeries& q, const BandConstraint& band);

/**
 * Sum over candidate points of their distance to the envelope: points above
 * the upper boundary pay c_i - u_i, points below the lower boundary pay
 * l_i - c_i, points inside pay nothing. Lower-bounds the band-constrained
 * DTW between the envelope's source and the candidate. Requires equal
 * lengths.
 */
double lb_keogh(const Envelope& env, const TimeSeries& c);

/// Padding recipe: every sequence is brought to length lmax by appending
/// copies of the shared constant pad_value.
struct ExtensionParams {
    std::size_t lmax = 0;
    double pad_value = 0.0;
};

/// Appends pad_value until the sequence reaches params.lmax. Throws
/// std::invalid_argument when the sequence is already that long or longer,
/// since the technique requires at least one appended element.
TimeSeries extend(const TimeSeries& x, const ExtensionParams& params);

/// lb_keogh applied to the pair extended to a common length. Valid for
/// unequal-length sequences; the value does not depend on the particular
/// lmax as long as both sequences fit.
double lb_keogh_plus(const TimeSeries& q, const TimeSeries& c, std::size_t r,
                     const ExtensionParams& params);

/// Four-feature bound: max distance among (first, last, max, min) pairs.
double lb_kim(const TimeSeries& q, const TimeSeries& c);

/// One-sided sums against the criterion sequence q: candidate points above
/// max(q) or below min(q) pay their excess.
double lb_yi(const TimeSeries& q, const TimeSeries& c);

}  // namespace dtwidx
