#include "dtwidx/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtwidx {

Envelope envelope(const TimeSeries& q, std::size_t r) {
    validate_series(q);
    const std::size_t n = q.length();
    Envelope env;
    env.radius = r;
    env.upper.resize(n);
    env.lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > r ? i - r : 0;
        const std::size_t hi = std::min(n - 1, i + r);
        double u = q.values[lo];
        double l = q.values[lo];
        for (std::size_t k = lo + 1; k <= hi; ++k) {
            u = std::max(u, q.values[k]);
            l = std::min(l, q.values[k]);
        }
        env.upper[i] = u;
        env.lower[i] = l;
    }
    return env;
}

Envelope envelope(const TimeSeries& q, const BandConstraint& band) {
    if (band.is_unbounded()) {
        throw std::invalid_argument("envelope requires a finite band radius");
    }
    return envelope(q, *band.radius());
}

double lb_keogh(const Envelope& env, const TimeSeries& c) {
    validate_series(c);
    if (c.length() != env.length()) {
        throw std::invalid_argument("lb_keogh requires equal lengths");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < c.length(); ++i) {
        const double v = c.values[i];
        if (v > env.upper[i]) {
            sum += v - env.upper[i];
        } else if (v < env.lower[i]) {
            sum += env.lower[i] - v;
        }
    }
    return sum;
}

TimeSeries extend(const TimeSeries& x, const ExtensionParams& params) {
    validate_series(x);
    if (x.length() >= params.lmax) {
        throw std::invalid_argument(
            "extension target must exceed the sequence length");
    }
    TimeSeries out = x;
    out.values.resize(params.lmax, params.pad_value);
    return out;
}

double lb_keogh_plus(const TimeSeries& q, const TimeSeries& c, std::size_t r,
                     const ExtensionParams& params) {
    const TimeSeries q_ext = extend(q, params);
    const TimeSeries c_ext = extend(c, params);
    return lb_keogh(envelope(q_ext, r), c_ext);
}

double lb_kim(const TimeSeries& q, const TimeSeries& c) {
    validate_series(q);
    validate_series(c);
    const auto [q_min, q_max] =
        std::minmax_element(q.values.begin(), q.values.end());
    const auto [c_min, c_max] =
        std::minmax_element(c.values.begin(), c.values.end());
    const double d_first = std::fabs(q.values.front() - c.values.front());
    const double d_last = std::fabs(q.values.back() - c.values.back());
    const double d_max = std::fabs(*q_max - *c_max);
    const double d_min = std::fabs(*q_min - *c_min);
    return std::max({d_first, d_last, d_max, d_min});
}

double lb_yi(const TimeSeries& q, const TimeSeries& c) {
    validate_series(q);
    validate_series(c);
    const auto [q_min, q_max] =
        std::minmax_element(q.values.begin(), q.values.end());
    double sum = 0.0;
    for (double v : c.values) {
        if (v > *q_max) {
            sum += v - *q_max;
        } else if (v < *q_min) {
            sum += *q_min - v;
        }
    }
    return sum;
}

}  // namespace dtwidx
