#include "grf/mvn.hpp"

#include <stdexcept>

namespace grf {

Eigen::MatrixXd sample_mvn(const GaussianLaw& law, long long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_mvn: n must be >= 1");
    const MvnSampler sampler(law);
    const int d = sampler.dim();
    Eigen::MatrixXd out(n, d);
    const long long nchunks = (n + kChunkSize - 1) / kChunkSize;

#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < nchunks; ++c) {
        RngStream rng(seed, static_cast<std::uint64_t>(c), stream_purpose::kMvn);
        const long long lo = c * kChunkSize;
        const long long hi = std::min(n, lo + kChunkSize);
        Eigen::VectorXd x(d);
        for (long long r = lo; r < hi; ++r) {
            sampler.draw(rng, x.data());
            out.row(r) = x;
        }
    }
    return out;
}

}  // namespace grf
