#include "dtwidx/series.hpp"

#include <cmath>
#include <stdexcept>

namespace dtwidx {

void validate_series(const TimeSeries& series) {
    if (series.values.empty()) {
        throw std::invalid_argument("time series must contain at least one sample");
    }
    for (double v : series.values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("time series samples must be finite");
        }
    }
}

}  // namespace dtwidx
