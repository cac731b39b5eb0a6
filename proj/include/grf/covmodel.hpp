#ifndef GRF_COVMODEL_HPP
#define GRF_COVMODEL_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "grf/errors.hpp"

namespace grf {

/// Partial derivatives of the covariance h(t, tau) at tau = 0 for a fixed t.
/// Subscript 1 differentiates in t, subscript 2 in tau.
struct CovDerivatives {
    double h0 = 0, h1 = 0, h2 = 0;
    double h11 = 0, h12 = 0, h22 = 0;
    double h111 = 0, h112 = 0, h1111 = 0;

    /// h0 > 0 and Var(X') = h11/4 - 2 h2 > 0; all entries finite.
    void validate() const;
};

/// Variances/covariances of (X, X', X'') at a fixed location.
struct DerivativeMoments {
    double var_x = 0, var_xp = 0, var_xpp = 0;
    double cov_x_xp = 0, cov_x_xpp = 0, cov_xp_xpp = 0;

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d m;
        m << var_x, cov_x_xp, cov_x_xpp,  //
            cov_x_xp, var_xp, cov_xp_xpp,  //
            cov_x_xpp, cov_xp_xpp, var_xpp;
        return m;
    }

    /// positive variances and PSD 3x3 matrix (eigenvalues >= -1e-10 * scale)
    void validate() const;
};

/// Smoothing kernel with two derivatives, normalized so that int k^2 = 1.
struct Kernel {
    std::function<double(double)> f, d1, d2;
    bool is_gaussian = false;
};

/// k(s) = pi^{-1/4} exp(-s^2/2); satisfies int k^2 = 1 exactly.
Kernel gaussian_kernel();

/// Rescales an arbitrary C^2 kernel so that int k^2 = 1. Warns on stderr when
/// the input deviates from unit normalization by more than 1e-6.
Kernel normalize_kernel(Kernel raw);

/// Scalar function of t with analytic first and second derivatives.
struct ScalarFunction {
    std::function<double(double)> f, d1, d2;

    static ScalarFunction constant(double c);
    /// coefficients in ascending order: c0 + c1 t + c2 t^2 + ...
    static ScalarFunction poly(std::vector<double> coeffs);
};

/// A centered 1D Gaussian process model.
class ProcessModel {
public:
    enum class Type { kStationary, kVaryingBandwidth, kScaledVariance, kCosine, kHDerivatives };

    /// X(t) = int nu^{-1/2} k((t-s)/nu) dB(s)
    static ProcessModel stationary(Kernel k, double nu);
    /// X(t) = int nu(t)^{-1/2} k((t-s)/nu(t)) dB(s); nu(t) > 0 on the queried domain
    static ProcessModel varying_bandwidth(Kernel k, ScalarFunction nu);
    /// Y(t) = sigma(t) X(t) over a unit-variance base model
    static ProcessModel scaled(ProcessModel base, ScalarFunction sigma);
    /// X(t) = c1 z1 cos(omega t) + c2 z2 sin(omega t)
    static ProcessModel cosine(double c1, double c2, double omega);
    /// model given directly by its covariance derivatives at each t
    static ProcessModel from_h_derivatives(std::function<CovDerivatives(double)> h);

    Type type() const { return type_; }
    const Kernel& kernel() const { return kernel_; }
    const ScalarFunction& nu() const { return nu_; }
    const ScalarFunction& sigma() const { return sigma_; }
    const ProcessModel& base() const { return *base_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double omega() const { return omega_; }

    /// true when every moment has a closed form (Gaussian kernel or cosine)
    bool has_closed_form() const;
    /// true when the model is defined by a kernel convolution (possibly scaled)
    bool is_kernel_defined() const;

private:
    ProcessModel() = default;

    Type type_ = Type::kStationary;
    Kernel kernel_;
    ScalarFunction nu_;
    ScalarFunction sigma_;
    std::shared_ptr<const ProcessModel> base_;
    double c1_ = 0, c2_ = 0, omega_ = 0;
    std::function<CovDerivatives(double)> hderiv_;

    friend DerivativeMoments moments(const ProcessModel&, double);
};

/// Lemma-style moment assembly from covariance derivatives:
///   Var(X)    = h0            E[X X']   = h1/2
///   Var(X')   = h11/4 - 2h2   E[X X'']  = h11/4 + 2h2
///   Var(X'')  = h1111/16 - h112 + 12 h22
///   E[X'X'']  = h111/8 - h12
/// Throws NonPSDMoments when the assembled matrix is not PSD.
DerivativeMoments moments_from_h(const CovDerivatives& d);

/// Moments as Wiener-integral inner products, by adaptive quadrature.
/// Requires a kernel-defined model with a twice-differentiable kernel.
DerivativeMoments moments_via_quadrature(const ProcessModel& model, double t);

/// Propagates unit-variance base moments through Y = sigma X.
/// The base must satisfy var_x = 1, cov_x_xp = 0, cov_x_xpp = -var_xp
/// (identities of any constant-unit-variance process).
DerivativeMoments scaled_moments(const DerivativeMoments& base, double sigma, double sigma_p,
                                 double sigma_pp);

/// Exact moments of the cosine process.
DerivativeMoments cosine_moments(double c1, double c2, double omega, double t);

/// Finite-difference covariance derivatives for a user-supplied h(t, tau),
/// defined for tau >= 0 only. Central stencils in t, one-sided in tau, one
/// Richardson level, with steps calibrated to the local tau-scale of h.
CovDerivatives h_derivatives_numeric(const std::function<double(double, double)>& h, double t);

/// Best available moments: closed form when the model has one, else quadrature.
DerivativeMoments moments(const ProcessModel& model, double t);

/// h(t, tau) = E[X(t - d/2) X(t + d/2)], tau = d^2. Closed form for
/// Gaussian-kernel and cosine models, quadrature otherwise.
std::function<double(double, double)> h_function(const ProcessModel& model);

/// E[X(t1) X(t2)] for grid sampling.
double covariance(const ProcessModel& model, double t1, double t2);

}  // namespace grf

#endif
