#ifndef GRF_RNG_HPP
#define GRF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "grf/normal.hpp"

namespace grf {

/// Fixed chunk size for all chunked samplers. Results are a function of
/// (seed, chunking), never of the thread count, so estimates are bit-identical
/// under any parallel schedule.
inline constexpr long long kChunkSize = 8192;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent substream id from (seed, chunk, purpose).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t chunk, std::uint64_t purpose) {
    return splitmix64(splitmix64(seed ^ splitmix64(chunk + 1)) ^ splitmix64(purpose + 0x51ULL));
}

/// One independent random stream. Uniform and normal draws are generated by
/// explicit formulas on top of mt19937_64 so the byte-exact sequence is fixed
/// by this code, not by the standard library's distribution implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t stream_id) : eng_(stream_id) {}
    RngStream(std::uint64_t seed, std::uint64_t chunk, std::uint64_t purpose)
        : eng_(derive_stream(seed, chunk, purpose)) {}

    /// uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// uniform on (0, 1]
    double uniform_pos() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    /// uniform on the open interval (0, 1)
    double uniform_open() { return (static_cast<double>(eng_() >> 12) + 0.5) * 0x1.0p-52; }

    /// standard normal via Box-Muller (pair-cached)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double theta = 2.0 * kPi * uniform();
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    /// N(mu, sigma^2) conditioned on being >= lower (lower may be -inf).
    /// Inverse-CDF below mu + 4 sigma; exponential rejection in the far tail,
    /// where the inverse CDF loses precision.
    double truncnorm_lower(double mu, double sigma, double lower) {
        if (!(sigma > 0.0)) throw std::invalid_argument("truncnorm_lower: sigma must be positive");
        if (std::isinf(lower) && lower < 0.0) return mu + sigma * normal();
        const double alpha = (lower - mu) / sigma;
        return mu + sigma * truncated_std_normal(alpha);
    }

private:
    double truncated_std_normal(double alpha) {
        if (alpha < 4.0) {
            const double q = norm_tail(alpha);  // mass above alpha
            const double s = q * (1.0 - uniform());
            return std::max(-norm_quantile(s), alpha);  // clamp: support is exact
        }
        // Robert's exponential rejection sampler for the far tail
        const double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
        for (;;) {
            const double x = alpha - std::log(uniform_pos()) / lambda;
            const double dx = x - lambda;
            if (uniform() <= std::exp(-0.5 * dx * dx)) return x;
        }
    }

    std::mt19937_64 eng_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// Inverse-CDF map of a uniform u in (0, 1) to N(mu, sigma^2) | X >= lower.
/// Monotone in u, so a shared u couples draws across different lower bounds
/// (common random numbers); lower = -inf gives the untruncated law.
inline double truncnorm_lower_icdf(double u, double mu, double sigma, double lower) {
    const double alpha = std::isinf(lower) && lower < 0.0
                             ? -std::numeric_limits<double>::infinity()
                             : (lower - mu) / sigma;
    const double q = std::isinf(alpha) ? 1.0 : norm_tail(alpha);
    const double x = -norm_quantile(q * (1.0 - u));
    return mu + sigma * std::max(x, alpha);
}

/// Purpose tags for derived substreams.
namespace stream_purpose {
inline constexpr std::uint64_t kMvn = 1;
inline constexpr std::uint64_t kHessian = 2;
inline constexpr std::uint64_t kFieldRealization = 3;
inline constexpr std::uint64_t kTruncatedField = 0x10000;  // + threshold index
}  // namespace stream_purpose

}  // namespace grf

#endif
