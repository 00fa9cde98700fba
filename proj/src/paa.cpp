#include "dtwidx/paa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtwidx {

void Mbr::expand(const PaaVector& v) {
    if (v.n_paa() != dims()) {
        throw std::invalid_argument("mbr dimension mismatch");
    }
    for (std::size_t i = 0; i < dims(); ++i) {
        low[i] = std::min(low[i], v.coords[i]);
        high[i] = std::max(high[i], v.coords[i]);
    }
}

void Mbr::expand(const Mbr& other) {
    if (other.dims() != dims()) {
        throw std::invalid_argument("mbr dimension mismatch");
    }
    for (std::size_t i = 0; i < dims(); ++i) {
        low[i] = std::min(low[i], other.low[i]);
        high[i] = std::max(high[i], other.high[i]);
    }
}

bool Mbr::contains(const PaaVector& v) const {
    if (v.n_paa() != dims()) return false;
    for (std::size_t i = 0; i < dims(); ++i) {
        if (v.coords[i] < low[i] || v.coords[i] > high[i]) return false;
    }
    return true;
}

PaaVector paa_transform(const TimeSeries& x, std::size_t n_paa) {
    validate_series(x);
    if (n_paa == 0 || x.length() % n_paa != 0) {
        throw std::invalid_argument(
            "paa_transform requires the length to be a multiple of n_paa");
    }
    const std::size_t seg = x.length() / n_paa;
    PaaVector out;
    out.lmax = x.length();
    out.coords.resize(n_paa);
    for (std::size_t i = 0; i < n_paa; ++i) {
        double sum = 0.0;
        for (std::size_t k = i * seg; k < (i + 1) * seg; ++k) {
            sum += x.values[k];
        }
        out.coords[i] = sum / static_cast<double>(seg);
    }
    return out;
}

namespace {

double paa_scale(const PaaVector& v) {
    return static_cast<double>(v.lmax) / static_cast<double>(v.n_paa());
}

void require_compatible(const PaaVector& a, const PaaVector& b) {
    if (a.n_paa() != b.n_paa() || a.lmax != b.lmax) {
        throw std::invalid_argument("paa vectors are not compatible");
    }
}

}  // namespace

double d_paa(const PaaVector& qbar, const PaaVector& cbar) {
    require_compatible(qbar, cbar);
    double sum = 0.0;
    for (std::size_t i = 0; i < qbar.n_paa(); ++i) {
        sum += std::fabs(qbar.coords[i] - cbar.coords[i]);
    }
    return paa_scale(qbar) * sum;
}

PaaEnvelope paa_envelope(const Envelope& env, std::size_t n_paa) {
    TimeSeries upper;
    upper.values = env.upper;
    TimeSeries lower;
    lower.values = env.lower;
    return PaaEnvelope{paa_transform(upper, n_paa), paa_transform(lower, n_paa)};
}

double lb_paa(const PaaEnvelope& penv, const PaaVector& cbar) {
    require_compatible(penv.upper, cbar);
    double sum = 0.0;
    for (std::size_t i = 0; i < cbar.n_paa(); ++i) {
        const double v = cbar.coords[i];
        if (v > penv.upper.coords[i]) {
            sum += v - penv.upper.coords[i];
        } else if (v < penv.lower.coords[i]) {
            sum += penv.lower.coords[i] - v;
        }
    }
    return paa_scale(cbar) * sum;
}

double lb_mbr(const PaaEnvelope& penv, const Mbr& box) {
    if (box.dims() != penv.upper.n_paa()) {
        throw std::invalid_argument("mbr dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < box.dims(); ++i) {
        if (penv.lower.coords[i] > box.high[i]) {
            sum += penv.lower.coords[i] - box.high[i];
        } else if (box.low[i] > penv.upper.coords[i]) {
            sum += box.low[i] - penv.upper.coords[i];
        }
    }
    return paa_scale(penv.upper) * sum;
}

}  // namespace dtwidx
