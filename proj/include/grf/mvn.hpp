#ifndef GRF_MVN_HPP
#define GRF_MVN_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "grf/gaussian_law.hpp"
#include "grf/rng.hpp"

namespace grf {

/// Samples from a fixed Gaussian law. The factor is computed once at
/// construction; draws are mean + L z with z filled in a fixed order.
class MvnSampler {
public:
    explicit MvnSampler(const GaussianLaw& law)
        : mean_(law.mean), factor_(psd_factor(law.cov)) {}
    MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
        : mean_(std::move(mean)), factor_(psd_factor(cov)) {}

    int dim() const { return static_cast<int>(mean_.size()); }

    void draw(RngStream& rng, double* out) const {
        const int d = dim();
        Eigen::VectorXd z(d);
        for (int i = 0; i < d; ++i) z(i) = rng.normal();
        Eigen::Map<Eigen::VectorXd>(out, d) = mean_ + factor_ * z;
    }

    Eigen::VectorXd draw(RngStream& rng) const {
        Eigen::VectorXd x(dim());
        draw(rng, x.data());
        return x;
    }

    const Eigen::MatrixXd& factor() const { return factor_; }
    const Eigen::VectorXd& mean() const { return mean_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
};

/// n independent draws (rows) from the law. Deterministic given
/// (law, n, seed, kChunkSize); chunks run in parallel when OpenMP is enabled.
Eigen::MatrixXd sample_mvn(const GaussianLaw& law, long long n, std::uint64_t seed);

}  // namespace grf

#endif
