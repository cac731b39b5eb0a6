#ifndef GRF_KACRICE_HPP
#define GRF_KACRICE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "grf/covmodel.hpp"

namespace grf {

/// Covariance blocks of the jointly Gaussian (X, grad X, vech hess X) at a
/// fixed location. vech is column-major over the lower triangle; d is the
/// domain dimension, q = d(d+1)/2.
struct JointGaussianSpec {
    double fv = 1.0;               // Var(X)
    Eigen::MatrixXd dv;            // d x d
    Eigen::MatrixXd d2v;           // q x q
    Eigen::RowVectorXd fdcov;      // 1 x d
    Eigen::RowVectorXd fd2cov;     // 1 x q
    Eigen::MatrixXd dd2cov;        // d x q

    int dim() const { return static_cast<int>(dv.rows()); }
    int vech_dim() const { return static_cast<int>(d2v.rows()); }

    /// assembled (1+d+q) x (1+d+q) covariance, order (X, grad, vech hess)
    Eigen::MatrixXd joint() const;

    /// shape consistency, PSD joint, invertible gradient block
    void validate() const;
};

/// Tail estimates of the peak height distribution on a threshold grid.
struct PeakCdfEstimate {
    std::vector<double> thresholds;
    std::vector<double> tail;            // estimates of P(height > u)
    std::vector<double> se;              // delta-method standard errors
    std::vector<bool> tail_underflow;    // algorithm 2: P(X > u | grad = 0) underflowed
    long long niters = 0;
    std::uint64_t seed = 0;
    int algorithm = 0;
    long long n_field_above_top = 0;     // algorithm 1: samples with X > max(u)
};

/// Monte Carlo evaluation of the Kac-Rice ratio: samples (X, vech hess)
/// conditioned on grad = 0 and averages |det hess| over negative-definite
/// draws above each threshold. Thresholds may include -inf. Deterministic
/// given (spec, u, niters, seed); chunks run in parallel.
PeakCdfEstimate algorithm1(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed);

/// Tail-accelerated variant: draws the field value from the truncated
/// conditional law X | X > u, grad = 0, shifts shared zero-mean Hessian draws
/// by the conditional mean, and multiplies by the analytic tail probability.
PeakCdfEstimate algorithm2(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed);

/// d = 1 adapter from the moments of (X, X', X'').
JointGaussianSpec spec_from_moments_1d(const DerivativeMoments& m);

namespace reference {
/// Plain single-loop implementations kept for testing: identical streams and
/// summation order as the parallel kernels, so results must be bit-identical.
PeakCdfEstimate algorithm1(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed);
PeakCdfEstimate algorithm2(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed);
}  // namespace reference

}  // namespace grf

#endif
