#include "apk/rng.hpp"

#include <cmath>

namespace apk {

double CounterRng::exponential() noexcept {
    // 1 - u lies in (0, 1]
    return -std::log1p(-uniform());
}

std::uint64_t CounterRng::poisson(double mean) noexcept {
    if (!(mean > 0.0)) return 0;
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 10000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0 && cdf <= u) break;
    }
    return k;
}

} // namespace apk
