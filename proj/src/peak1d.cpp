#include "grf/peak1d.hpp"

#include <cmath>
#include <limits>

#include "grf/normal.hpp"
#include "grf/quadrature.hpp"

namespace grf {

namespace {

constexpr double kBoundaryEps = 1e-9;

double clamp_rho(double num, double denom, double scale) {
    if (denom < 1e-12 * scale) {
        if (std::abs(num) < 1e-12 * scale)
            throw DegenerateField("peak_params: correlation is 0/0, moments are rank-deficient");
        throw DegenerateField("peak_params: conditional correlation denominator vanished");
    }
    double rho = num / denom;
    if (std::abs(rho) > 1.0) {
        if (std::abs(rho) - 1.0 > kBoundaryEps)
            throw DegenerateField("peak_params: |rho| exceeds 1 beyond numerical tolerance");
        rho = rho > 0.0 ? 1.0 : -1.0;
    }
    return rho;
}

}  // namespace

PeakParams peak_params(const DerivativeMoments& m) {
    if (!(m.var_xp > 0.0)) throw std::invalid_argument("peak_params: Var(X') must be positive");
    const double num = m.cov_x_xpp * m.var_xp - m.cov_x_xp * m.cov_xp_xpp;
    const double d1sq = m.var_x * m.var_xp - m.cov_x_xp * m.cov_x_xp;
    const double d2sq = m.var_xp * m.var_xpp - m.cov_xp_xpp * m.cov_xp_xpp;
    const double denom = std::sqrt(std::max(d1sq, 0.0)) * std::sqrt(std::max(d2sq, 0.0));
    const double scale = m.var_xp * std::sqrt(std::max(m.var_x * m.var_xpp, 0.0)) +
                         std::numeric_limits<double>::min();
    PeakParams p;
    p.rho = clamp_rho(num, denom, scale);
    p.sigma_tilde = std::sqrt(d1sq / m.var_xp);
    return p;
}

PeakParams peak_params_from_h(const CovDerivatives& d) {
    d.validate();
    const double a = 2.0 * d.h2 - 0.25 * d.h11;
    const double b = 2.0 * d.h2 + 0.25 * d.h11;
    const double c = d.h12 - 0.125 * d.h111;
    const double m22 = 12.0 * d.h22 - d.h112 + d.h1111 / 16.0;  // = Var(X'')
    const double num = -(2.0 * a * b - d.h1 * c);
    const double denom = std::sqrt(std::max(-c * c - a * m22, 0.0)) *
                         std::sqrt(std::max(-d.h1 * d.h1 - 4.0 * d.h0 * a, 0.0));
    const double scale =
        -a * std::sqrt(std::max(4.0 * d.h0 * m22, 0.0)) + std::numeric_limits<double>::min();
    PeakParams p;
    p.rho = clamp_rho(num, denom, scale);
    p.sigma_tilde = std::sqrt(d.h0 - d.h1 * d.h1 / (d.h11 - 8.0 * d.h2));
    return p;
}

double rho_gauss_bandwidth(double nu, double nu_p, double nu_pp) {
    if (!(nu > 0.0)) throw std::invalid_argument("rho_gauss_bandwidth: nu must be positive");
    const double a2 = nu_p * nu_p;
    const double one = 1.0 + a2;
    const double denom = one * (7.0 * a2 * a2 + 16.0 * a2 + 3.0) + 4.0 * one * nu_pp * nu +
                         2.0 * nu_pp * nu_pp * nu * nu;
    return -std::sqrt(one * one * one / denom);
}

double peak_density(const PeakParams& p, double x) {
    if (is_boundary(p)) throw BoundaryRho("peak_density: |rho| = 1, use rayleigh_density");
    const double s = p.sigma_tilde, rho = p.rho;
    const double c = std::sqrt(1.0 - rho * rho);
    return (1.0 / s) * norm_pdf(x / s) * kSqrt2Pi * c * psi(-rho * x / (c * s));
}

double peak_tail(const PeakParams& p, double u) {
    if (is_boundary(p)) throw BoundaryRho("peak_tail: |rho| = 1, use rayleigh_tail");
    if (std::isinf(u)) return u < 0.0 ? 1.0 : 0.0;
    return integrate([&](double x) { return peak_density(p, x); }, u,
                     std::numeric_limits<double>::infinity());
}

std::pair<double, double> peak_moments(const PeakParams& p) {
    if (is_boundary(p)) throw BoundaryRho("peak_moments: |rho| = 1, use rayleigh_moments");
    const double mean = -std::sqrt(kPi / 2.0) * p.rho * p.sigma_tilde;
    const double var =
        (1.0 - (kPi / 2.0 - 1.0) * p.rho * p.rho) * p.sigma_tilde * p.sigma_tilde;
    return {mean, var};
}

double rayleigh_density(const PeakParams& p, double x) {
    if (!is_boundary(p)) throw NotBoundary("rayleigh_density: |rho| != 1");
    const double s = p.sigma_tilde;
    const double y = p.rho < 0.0 ? x : -x;  // rho = +1 mirrors the support
    if (y < 0.0) return 0.0;
    return kSqrt2Pi * y / (s * s) * norm_pdf(y / s);
}

double rayleigh_tail(const PeakParams& p, double u) {
    if (!is_boundary(p)) throw NotBoundary("rayleigh_tail: |rho| != 1");
    const double s = p.sigma_tilde;
    if (p.rho < 0.0) {
        if (u <= 0.0) return 1.0;
        return std::exp(-0.5 * u * u / (s * s));
    }
    if (u >= 0.0) return 0.0;
    return 1.0 - std::exp(-0.5 * u * u / (s * s));
}

std::pair<double, double> rayleigh_moments(const PeakParams& p) {
    if (!is_boundary(p)) throw NotBoundary("rayleigh_moments: |rho| != 1");
    const double sgn = p.rho < 0.0 ? 1.0 : -1.0;
    const double mean = sgn * std::sqrt(kPi / 2.0) * p.sigma_tilde;
    const double var = (2.0 - kPi / 2.0) * p.sigma_tilde * p.sigma_tilde;
    return {mean, var};
}

double density(const PeakParams& p, double x) {
    return is_boundary(p) ? rayleigh_density(p, x) : peak_density(p, x);
}

double tail(const PeakParams& p, double u) {
    return is_boundary(p) ? rayleigh_tail(p, u) : peak_tail(p, u);
}

std::pair<double, double> height_moments(const PeakParams& p) {
    return is_boundary(p) ? rayleigh_moments(p) : peak_moments(p);
}

}  // namespace grf
