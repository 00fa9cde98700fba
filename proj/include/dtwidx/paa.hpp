#pragma once

#include <cstddef>
#include <vector>

#include "dtwidx/lower_bounds.hpp"
#include "dtwidx/series.hpp"

namespace dtwidx {

/// Piecewise aggregate approximation: segment means of an extended sequence.
struct PaaVector {
    std::vector<double> coords;
    std::size_t lmax = 0;

    std::size_t n_paa() const { return coords.size(); }
};

/// Axis-aligned bounding box over PaaVectors.
struct Mbr {
    std::vector<double> low;
    std::vector<double> high;

    std::size_t dims() const { return low.size(); }

    static Mbr of(const PaaVector& v) { return Mbr{v.coords, v.coords}; }

    void expand(const PaaVector& v);
    void expand(const Mbr& other);
    bool contains(const PaaVector& v) const;
};

/// PAA forms of a query envelope's upper and lower boundaries.
struct PaaEnvelope {
    PaaVector upper;
    PaaVector lower;
};

/// Segment means. The length must be an exact multiple of n_paa, which the
/// extension step guarantees by construction.
PaaVector paa_transform(const TimeSeries& x, std::size_t n_paa);

/// Scaled L1 distance between PAA vectors: (lmax / n_paa) * sum of
/// coordinate gaps. Never exceeds the L1 distance of the source sequences.
double d_paa(const PaaVector& qbar, const PaaVector& cbar);

/// PAA-transforms both envelope boundaries.
PaaEnvelope paa_envelope(const Envelope& env, std::size_t n_paa);

/// Scaled out-of-envelope sum in PAA space; lower-bounds lb_keogh of the
/// source pair.
double lb_paa(const PaaEnvelope& penv, const PaaVector& cbar);

/// Scaled minimum separation between the envelope intervals and the box
/// slabs, per dimension. Lower-bounds lb_paa for every vector inside the
/// box.
double lb_mbr(const PaaEnvelope& penv, const Mbr& box);

}  // namespace dtwidx
