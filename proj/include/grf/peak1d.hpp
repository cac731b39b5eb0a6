#ifndef GRF_PEAK1D_HPP
#define GRF_PEAK1D_HPP

#include <utility>

#include "grf/covmodel.hpp"

namespace grf {

/// The two parameters of the 1D peak height law:
///   sigma_tilde^2 = Var(X | X' = 0),  rho = Cor(X, X'' | X' = 0).
struct PeakParams {
    double rho = 0.0;
    double sigma_tilde = 1.0;
};

/// |rho| close enough to 1 that the Rayleigh limit law applies.
inline bool is_boundary(const PeakParams& p) { return std::abs(p.rho) > 1.0 - 1e-9; }

/// Parameters from the moments of (X, X', X'').
/// Throws DegenerateField when the correlation is 0/0 within 1e-12 of scale,
/// or when |rho| overshoots 1 by more than 1e-9.
PeakParams peak_params(const DerivativeMoments& m);

/// Same parameters computed directly from covariance derivatives.
PeakParams peak_params_from_h(const CovDerivatives& d);

/// rho of the Gaussian-kernel bandwidth process, closed form in
/// (nu, nu', nu''). Constant in t whenever nu is linear.
double rho_gauss_bandwidth(double nu, double nu_p, double nu_pp);

/// Legacy parameter of the constant-variance case: kappa = -sqrt(3) rho.
inline double kappa(const PeakParams& p) { return -1.7320508075688772 * p.rho; }

/// Peak height density for |rho| < 1:
///   f(x) = (1/s) phi(x/s) sqrt(2 pi (1 - rho^2)) psi(-rho x / (sqrt(1-rho^2) s)).
/// Throws BoundaryRho when |rho| is at the boundary (use rayleigh_density).
double peak_density(const PeakParams& p, double x);

/// Tail probability P(peak height > u), by adaptive quadrature of the density.
double peak_tail(const PeakParams& p, double u);

/// (mean, variance) of the peak height:
///   mean = -sqrt(pi/2) rho s,  variance = [1 - (pi/2 - 1) rho^2] s^2.
std::pair<double, double> peak_moments(const PeakParams& p);

/// Boundary law |rho| = 1: a (sign-flipped) Rayleigh(sigma_tilde).
/// rho = -1 has support x >= 0; rho = +1 mirrors to x <= 0.
double rayleigh_density(const PeakParams& p, double x);
double rayleigh_tail(const PeakParams& p, double u);
std::pair<double, double> rayleigh_moments(const PeakParams& p);

/// Dispatchers that route |rho| > 1 - 1e-9 to the Rayleigh forms.
double density(const PeakParams& p, double x);
double tail(const PeakParams& p, double u);
std::pair<double, double> height_moments(const PeakParams& p);

}  // namespace grf

#endif
