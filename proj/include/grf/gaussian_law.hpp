#ifndef GRF_GAUSSIAN_LAW_HPP
#define GRF_GAUSSIAN_LAW_HPP

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "grf/sym_matrix.hpp"

namespace grf {

/// A multivariate Gaussian N(mean, cov) with positive semi-definite covariance.
struct GaussianLaw {
    Eigen::VectorXd mean;
    SymMatrix cov;

    GaussianLaw(Eigen::VectorXd m, SymMatrix c) : mean(std::move(m)), cov(std::move(c)) {
        if (mean.size() != cov.dim())
            throw std::invalid_argument("GaussianLaw: mean/covariance dimension mismatch");
    }

    int dim() const { return cov.dim(); }
};

/// Exact conditional law given cov[observed_indices] = observed_values.
/// Throws SingularBlock when the observed block is numerically singular
/// (condition number above ~1e12 after jitter).
GaussianLaw condition(const GaussianLaw& joint, std::span<const int> observed_indices,
                      std::span<const double> observed_values);

/// True iff all eigenvalues are strictly negative. Implemented as an attempted
/// Cholesky factorization of -m with strictly positive pivots (zero tolerance).
bool is_negative_definite(const SymMatrix& m);

/// (log|det|, sign) of a symmetric matrix; sign is 0 when det == 0
/// (log|det| = -inf in that case).
std::pair<double, int> logdet_and_det_sign(const SymMatrix& m);

/// Lower-triangular factor L with L L^T ~= m, for PSD m.
/// Tries plain Cholesky; on failure adds diagonal jitter 1e-12*trace/d and
/// retries up to 3 times with x10 escalation; final fallback is an
/// eigendecomposition with negative eigenvalues clamped to zero (rejected via
/// NotPSD when any eigenvalue < -1e-8 * scale).
Eigen::MatrixXd psd_factor(const SymMatrix& m);
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m);

}  // namespace grf

#endif
