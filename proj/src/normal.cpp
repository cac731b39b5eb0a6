#include "grf/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace grf {

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("norm_quantile: p must be in (0, 1)");
    // work in the lower tail (x <= 0), mirror afterwards
    const bool flip = p > 0.5;
    const double pm = flip ? 1.0 - p : p;

    double x;
    if (pm > 0.2) {
        x = kSqrt2Pi * (pm - 0.5);  // linear seed near the median
    } else {
        // invert the tail asymptotic Phi(x) ~ phi(x)/|x|
        const double t = std::sqrt(-2.0 * std::log(pm));
        x = -(t - (0.5 * std::log(2.0 * kPi) + std::log(t)) / t);
    }
    // Halley iterations: cubic convergence, fixed count keeps evaluation branch-free
    for (int it = 0; it < 4; ++it) {
        const double f = norm_cdf(x) - pm;
        const double d = norm_pdf(x);
        if (d <= 0.0) break;
        const double r = f / d;
        const double denom = 1.0 + 0.5 * x * r;
        x -= (denom > 0.5) ? r / denom : r;
    }
    return flip ? -x : x;
}

}  // namespace grf
