#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dtwidx/ingest.hpp"
#include "dtwidx/series.hpp"

namespace testutil {

// All randomness below uses mt19937_64 output bits directly (shifts and
// modulo) so sequences are reproducible across standard libraries.

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_double(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline dtwidx::TimeSeries random_series(std::mt19937_64& rng, std::size_t len,
                                        double lo, double hi,
                                        std::uint64_t id = 0) {
    dtwidx::TimeSeries s;
    s.id = id;
    s.values.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        s.values.push_back(uniform(rng, lo, hi));
    }
    return s;
}

/// Values restricted to the integer grid {-2,...,2}; sums over such values
/// are exact in doubles, which makes oracle comparisons bit-sharp.
inline dtwidx::TimeSeries random_grid_series(std::mt19937_64& rng,
                                             std::size_t len,
                                             std::uint64_t id = 0) {
    dtwidx::TimeSeries s;
    s.id = id;
    s.values.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        s.values.push_back(static_cast<double>(rng() % 5) - 2.0);
    }
    return s;
}

/// Labeled dataset with three shape families (sine, bump, ramp), each
/// jittered in phase/position and amplitude plus additive noise. Resembles
/// a small UCR classification set.
inline dtwidx::Dataset synthetic_dataset(std::size_t per_class,
                                         std::size_t length,
                                         std::uint64_t seed,
                                         double noise = 0.05) {
    std::mt19937_64 rng(seed);
    dtwidx::Dataset ds;
    ds.name = "synthetic";
    std::uint64_t id = 0;
    const double pi = 3.14159265358979323846;
    for (int cls = 0; cls < 3; ++cls) {
        for (std::size_t k = 0; k < per_class; ++k) {
            dtwidx::TimeSeries s;
            s.id = id++;
            s.label = std::to_string(cls + 1);
            s.values.reserve(length);
            const double amp = uniform(rng, 0.8, 1.2);
            if (cls == 0) {
                const double cycles = 1.0 + static_cast<double>(rng() % 2);
                const double phase = uniform(rng, 0.0, 2.0 * pi);
                for (std::size_t i = 0; i < length; ++i) {
                    const double t = static_cast<double>(i) /
                                     static_cast<double>(length);
                    s.values.push_back(
                        amp * std::sin(2.0 * pi * cycles * t + phase));
                }
            } else if (cls == 1) {
                const double center =
                    uniform(rng, 0.3, 0.7) * static_cast<double>(length);
                const double width = uniform(rng, 1.0 / 16.0, 1.0 / 8.0) *
                                     static_cast<double>(length);
                for (std::size_t i = 0; i < length; ++i) {
                    const double d = (static_cast<double>(i) - center) / width;
                    s.values.push_back(amp * std::exp(-0.5 * d * d));
                }
            } else {
                const double sign = (rng() % 2 == 0) ? 1.0 : -1.0;
                for (std::size_t i = 0; i < length; ++i) {
                    const double t = static_cast<double>(i) /
                                     static_cast<double>(length);
                    s.values.push_back(sign * amp * (t - 0.5));
                }
            }
            for (double& v : s.values) {
                v += noise * (2.0 * unit_double(rng) - 1.0);
            }
            ds.sequences.push_back(std::move(s));
        }
    }
    return ds;
}

/// Slowly varying noise-free sinusoids; PAA approximates these well, so
/// refinement trends are easy to see.
inline dtwidx::Dataset smooth_dataset(std::size_t count, std::size_t length,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    dtwidx::Dataset ds;
    ds.name = "smooth";
    const double pi = 3.14159265358979323846;
    for (std::size_t k = 0; k < count; ++k) {
        dtwidx::TimeSeries s;
        s.id = k;
        s.label = "1";
        s.values.reserve(length);
        const double amp = uniform(rng, 0.8, 1.2);
        const double phase = uniform(rng, 0.0, 2.0 * pi);
        const double drift = uniform(rng, -0.3, 0.3);
        for (std::size_t i = 0; i < length; ++i) {
            const double t =
                static_cast<double>(i) / static_cast<double>(length);
            s.values.push_back(amp * std::sin(2.0 * pi * t + phase) +
                               drift * t);
        }
        ds.sequences.push_back(std::move(s));
    }
    return ds;
}

inline bool near(double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
}

/// a <= b up to relative slack.
inline bool leq_rel(double a, double b, double rel) {
    return a <= b + rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace testutil
