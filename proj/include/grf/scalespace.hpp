#ifndef GRF_SCALESPACE_HPP
#define GRF_SCALESPACE_HPP

#include <Eigen/Dense>
#include <optional>

#include "grf/covmodel.hpp"
#include "grf/kacrice.hpp"

namespace grf {

/// The (N+1)-dimensional scale space field X(t, nu), parameterized internally
/// by the log-scale v = -log(nu), under which the field is stationary in each
/// coordinate separately.
struct ScaleSpaceSpec {
    int N = 1;          // spatial dimension
    double v = 0.0;     // log-scale
    Kernel kernel;      // isotropic 1D profile; Gaussian enables closed forms

    static ScaleSpaceSpec gaussian(int N, double nu) {
        return ScaleSpaceSpec{N, -std::log(nu), gaussian_kernel()};
    }
    static ScaleSpaceSpec with_kernel(int N, double nu, Kernel k) {
        return ScaleSpaceSpec{N, -std::log(nu), normalize_kernel(std::move(k))};
    }
};

/// Covariance blocks of (X, grad X, vech hess X) for the 2D scale space
/// (N = 1). Hessian components are ordered (tt, vv, tv); gradient (t, v).
struct ScaleSpaceBlocks {
    double field_var = 1.0;
    Eigen::Matrix2d sigma11;                 // gradient covariance
    Eigen::Matrix3d sigma22;                 // Hessian covariance
    Eigen::Matrix<double, 3, 2> sigma21;     // Hessian x gradient
    Eigen::Matrix<double, 3, 3> sigma21_tilde;  // Hessian x (X, gradient)

    /// Cov(hess | grad = 0) = Sigma22 - Sigma21 Sigma11^{-1} Sigma12
    Eigen::Matrix3d conditional_hessian() const;
};

/// Closed-form blocks for the Gaussian kernel.
ScaleSpaceBlocks gaussian_blocks_2d(double v);

/// Blocks for a general C^2 normalized kernel, each entry an adaptive
/// quadrature of the integrand obtained by differentiating the scale-space
/// covariance (the Gaussian closed forms are the cross-check).
ScaleSpaceBlocks general_blocks_2d(const Kernel& kernel, double v);

/// det and negative-definiteness of [[e^{2v}A, e^v B], [e^v B^T, C]] versus
/// e^{2Nv} det([[A, B],[B^T, C]]); the two agree identically.
struct ScaleBlockIdentity {
    double lhs = 0.0, rhs = 0.0;
    bool lhs_negdef = false, rhs_negdef = false;
};
ScaleBlockIdentity scale_block_identity(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        double C, double v, int N);

/// Covariance blocks of (X, grad X, vech hess X) in the form Algorithm 1
/// consumes, with vech in column-major lower-triangle order over the
/// coordinates (t_1..t_N, v). Closed form for the Gaussian kernel at any N;
/// quadrature for general kernels at N = 1 only.
JointGaussianSpec spec_for_kacrice(const ScaleSpaceSpec& spec);

/// E[X(t1, nu1) X(t2, nu2)] of the Gaussian-kernel scale space field;
/// t1, t2 are N-vectors.
double scale_space_covariance(int N, const double* t1, double nu1, const double* t2, double nu2);

}  // namespace grf

#endif
