#include "grf/covmodel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "grf/normal.hpp"
#include "grf/quadrature.hpp"

namespace grf {

namespace {
constexpr double kPsdTol = 1e-10;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}
}  // namespace

void CovDerivatives::validate() const {
    for (double v : {h0, h1, h2, h11, h12, h22, h111, h112, h1111}) check_finite(v, "CovDerivatives");
    if (!(h0 > 0.0)) throw std::invalid_argument("CovDerivatives: h0 must be positive");
    if (!(0.25 * h11 - 2.0 * h2 > 0.0))
        throw std::invalid_argument("CovDerivatives: Var(X') = h11/4 - 2 h2 must be positive");
}

void DerivativeMoments::validate() const {
    for (double v : {var_x, var_xp, var_xpp, cov_x_xp, cov_x_xpp, cov_xp_xpp})
        check_finite(v, "DerivativeMoments");
    if (!(var_x > 0.0) || !(var_xp > 0.0) || !(var_xpp > 0.0))
        throw std::invalid_argument("DerivativeMoments: variances must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(matrix());
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -kPsdTol * scale)
        throw NonPSDMoments("DerivativeMoments: covariance matrix of (X, X', X'') is not PSD");
}

Kernel gaussian_kernel() {
    Kernel k;
    const double c = std::pow(kPi, -0.25);
    k.f = [c](double s) { return c * std::exp(-0.5 * s * s); };
    k.d1 = [c](double s) { return -s * c * std::exp(-0.5 * s * s); };
    k.d2 = [c](double s) { return (s * s - 1.0) * c * std::exp(-0.5 * s * s); };
    k.is_gaussian = true;
    return k;
}

Kernel normalize_kernel(Kernel raw) {
    if (!raw.f || !raw.d1 || !raw.d2)
        throw std::invalid_argument("normalize_kernel: kernel needs f, d1, d2");
    const double m = integrate_line([&](double s) {
        const double v = raw.f(s);
        return v * v;
    });
    if (!(m > 0.0)) throw std::invalid_argument("normalize_kernel: int k^2 must be positive");
    if (std::abs(m - 1.0) > 1e-6)
        std::cerr << "normalize_kernel: int k^2 = " << m << ", rescaling to 1\n";
    if (std::abs(m - 1.0) < 1e-12) return raw;
    const double c = 1.0 / std::sqrt(m);
    Kernel k;
    k.f = [c, f = raw.f](double s) { return c * f(s); };
    k.d1 = [c, f = raw.d1](double s) { return c * f(s); };
    k.d2 = [c, f = raw.d2](double s) { return c * f(s); };
    k.is_gaussian = raw.is_gaussian;
    return k;
}

ScalarFunction ScalarFunction::constant(double c) {
    ScalarFunction s;
    s.f = [c](double) { return c; };
    s.d1 = [](double) { return 0.0; };
    s.d2 = [](double) { return 0.0; };
    return s;
}

ScalarFunction ScalarFunction::poly(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("ScalarFunction::poly: empty coefficients");
    auto eval = [](const std::vector<double>& c, double t) {
        double acc = 0.0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
        return acc;
    };
    std::vector<double> d1(coeffs.size() > 1 ? coeffs.size() - 1 : 1, 0.0);
    for (size_t i = 1; i < coeffs.size(); ++i) d1[i - 1] = coeffs[i] * static_cast<double>(i);
    std::vector<double> d2(d1.size() > 1 ? d1.size() - 1 : 1, 0.0);
    for (size_t i = 1; i < d1.size(); ++i) d2[i - 1] = d1[i] * static_cast<double>(i);
    ScalarFunction s;
    s.f = [coeffs, eval](double t) { return eval(coeffs, t); };
    s.d1 = [d1, eval](double t) { return eval(d1, t); };
    s.d2 = [d2, eval](double t) { return eval(d2, t); };
    return s;
}

ProcessModel ProcessModel::stationary(Kernel k, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("ProcessModel::stationary: nu must be positive");
    ProcessModel m;
    m.type_ = Type::kStationary;
    m.kernel_ = normalize_kernel(std::move(k));
    m.nu_ = ScalarFunction::constant(nu);
    return m;
}

ProcessModel ProcessModel::varying_bandwidth(Kernel k, ScalarFunction nu) {
    ProcessModel m;
    m.type_ = Type::kVaryingBandwidth;
    m.kernel_ = normalize_kernel(std::move(k));
    m.nu_ = std::move(nu);
    return m;
}

ProcessModel ProcessModel::scaled(ProcessModel base, ScalarFunction sigma) {
    if (base.type_ == Type::kScaledVariance)
        throw std::invalid_argument("ProcessModel::scaled: base is already variance-scaled");
    ProcessModel m;
    m.type_ = Type::kScaledVariance;
    m.base_ = std::make_shared<ProcessModel>(std::move(base));
    m.sigma_ = std::move(sigma);
    return m;
}

ProcessModel ProcessModel::cosine(double c1, double c2, double omega) {
    if (!(c1 > 0.0 && c2 > 0.0 && omega > 0.0))
        throw std::invalid_argument("ProcessModel::cosine: c1, c2, omega must be positive");
    ProcessModel m;
    m.type_ = Type::kCosine;
    m.c1_ = c1;
    m.c2_ = c2;
    m.omega_ = omega;
    return m;
}

ProcessModel ProcessModel::from_h_derivatives(std::function<CovDerivatives(double)> h) {
    ProcessModel m;
    m.type_ = Type::kHDerivatives;
    m.hderiv_ = std::move(h);
    return m;
}

bool ProcessModel::has_closed_form() const {
    switch (type_) {
        case Type::kStationary:
        case Type::kVaryingBandwidth:
            return kernel_.is_gaussian;
        case Type::kScaledVariance:
            return base_->has_closed_form();
        case Type::kCosine:
        case Type::kHDerivatives:
            return true;
    }
    return false;
}

bool ProcessModel::is_kernel_defined() const {
    switch (type_) {
        case Type::kStationary:
        case Type::kVaryingBandwidth:
            return true;
        case Type::kScaledVariance:
            return base_->is_kernel_defined();
        default:
            return false;
    }
}

DerivativeMoments moments_from_h(const CovDerivatives& d) {
    d.validate();
    DerivativeMoments m;
    m.var_x = d.h0;
    m.var_xp = 0.25 * d.h11 - 2.0 * d.h2;
    m.var_xpp = d.h1111 / 16.0 - d.h112 + 12.0 * d.h22;
    m.cov_x_xp = 0.5 * d.h1;
    m.cov_x_xpp = 0.25 * d.h11 + 2.0 * d.h2;
    m.cov_xp_xpp = d.h111 / 8.0 - d.h12;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.matrix());
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -kPsdTol * scale)
        throw NonPSDMoments("moments_from_h: inconsistent covariance derivatives");
    return m;
}

namespace {

/// Wiener integrands of X, X', X'' for g(t, s) = nu(t)^{-1/2} k((t-s)/nu(t)),
/// written in the variable w = (t-s)/nu(t).
struct KernelIntegrands {
    const Kernel& k;
    double nu, a, b;  // nu(t), nu'(t), nu''(t)

    double g(double w) const { return std::pow(nu, -0.5) * k.f(w); }
    double gt(double w) const {
        const double ut = (1.0 - w * a) / nu;
        return -0.5 * a * std::pow(nu, -1.5) * k.f(w) + std::pow(nu, -0.5) * k.d1(w) * ut;
    }
    double gtt(double w) const {
        const double ut = (1.0 - w * a) / nu;
        const double utt = -(2.0 * ut * a + w * b) / nu;
        return -0.5 * b * std::pow(nu, -1.5) * k.f(w) + 0.75 * a * a * std::pow(nu, -2.5) * k.f(w) -
               a * std::pow(nu, -1.5) * k.d1(w) * ut + std::pow(nu, -0.5) * k.d2(w) * ut * ut +
               std::pow(nu, -0.5) * k.d1(w) * utt;
    }
};

DerivativeMoments kernel_moments_quadrature(const Kernel& k, double nu, double a, double b) {
    if (!(nu > 0.0)) throw std::invalid_argument("moments_via_quadrature: nu(t) must be positive");
    KernelIntegrands gi{k, nu, a, b};
    auto inner = [&](auto&& f1, auto&& f2) {
        return integrate_line([&](double w) { return f1(w) * f2(w) * nu; });
    };
    auto g = [&](double w) { return gi.g(w); };
    auto gt = [&](double w) { return gi.gt(w); };
    auto gtt = [&](double w) { return gi.gtt(w); };
    DerivativeMoments m;
    m.var_x = inner(g, g);
    m.cov_x_xp = inner(g, gt);
    m.var_xp = inner(gt, gt);
    m.cov_x_xpp = inner(g, gtt);
    m.cov_xp_xpp = inner(gt, gtt);
    m.var_xpp = inner(gtt, gtt);
    return m;
}

/// Closed-form moments of the Gaussian-kernel bandwidth process:
///   Var(X')  = (1 + a^2) / (2 nu^2)
///   Var(X'') = (9a^4 + 18a^2 + 3)/(4 nu^4) - b(a^2 - 1)/nu^3 + b^2/(2 nu^2)
///   E[X'X''] = -(a^3 + a)/(2 nu^3) + a b/(2 nu^2)
/// with a = nu'(t), b = nu''(t); unit variance gives E[XX'] = 0 and
/// E[XX''] = -Var(X').
DerivativeMoments gaussian_bandwidth_moments(double nu, double a, double b) {
    DerivativeMoments m;
    const double n2 = nu * nu, n3 = n2 * nu, n4 = n2 * n2;
    m.var_x = 1.0;
    m.var_xp = (1.0 + a * a) / (2.0 * n2);
    m.var_xpp = (9.0 * a * a * a * a + 18.0 * a * a + 3.0) / (4.0 * n4) -
                b * (a * a - 1.0) / n3 + b * b / (2.0 * n2);
    m.cov_x_xp = 0.0;
    m.cov_x_xpp = -m.var_xp;
    m.cov_xp_xpp = -(a * a * a + a) / (2.0 * n3) + a * b / (2.0 * n2);
    return m;
}

}  // namespace

DerivativeMoments moments_via_quadrature(const ProcessModel& model, double t) {
    switch (model.type()) {
        case ProcessModel::Type::kStationary:
            return kernel_moments_quadrature(model.kernel(), model.nu().f(t), 0.0, 0.0);
        case ProcessModel::Type::kVaryingBandwidth:
            return kernel_moments_quadrature(model.kernel(), model.nu().f(t), model.nu().d1(t),
                                             model.nu().d2(t));
        case ProcessModel::Type::kScaledVariance:
            return scaled_moments(moments_via_quadrature(model.base(), t), model.sigma().f(t),
                                  model.sigma().d1(t), model.sigma().d2(t));
        default:
            throw std::invalid_argument("moments_via_quadrature: model is not kernel-defined");
    }
}

DerivativeMoments scaled_moments(const DerivativeMoments& base, double sigma, double sigma_p,
                                 double sigma_pp) {
    if (!(sigma > 0.0)) throw std::invalid_argument("scaled_moments: sigma must be positive");
    const double tol = 1e-10 * std::max(1.0, base.var_xp);
    if (std::abs(base.var_x - 1.0) > 1e-10 || std::abs(base.cov_x_xp) > tol ||
        std::abs(base.cov_x_xpp + base.var_xp) > tol)
        throw BaseNotUnitVariance("scaled_moments: base moments are not unit-variance");

    const double l1 = base.var_xp, l2 = base.var_xpp, r1 = base.cov_xp_xpp;
    DerivativeMoments m;
    m.var_x = sigma * sigma;
    m.var_xp = sigma_p * sigma_p + sigma * sigma * l1;
    m.var_xpp = sigma_pp * sigma_pp + (4.0 * sigma_p * sigma_p - 2.0 * sigma * sigma_pp) * l1 +
                sigma * sigma * l2 + 4.0 * sigma * sigma_p * r1;
    m.cov_x_xp = sigma * sigma_p;
    m.cov_x_xpp = sigma * sigma_pp - sigma * sigma * l1;
    m.cov_xp_xpp = sigma_p * sigma_pp + sigma * sigma_p * l1 + sigma * sigma * r1;
    return m;
}

DerivativeMoments cosine_moments(double c1, double c2, double omega, double t) {
    if (!(c1 > 0.0 && c2 > 0.0 && omega > 0.0))
        throw std::invalid_argument("cosine_moments: c1, c2, omega must be positive");
    const double s = std::sin(omega * t), c = std::cos(omega * t);
    const double w2 = omega * omega;
    DerivativeMoments m;
    m.var_x = c1 * c1 * c * c + c2 * c2 * s * s;
    m.var_xp = w2 * (c1 * c1 * s * s + c2 * c2 * c * c);
    m.var_xpp = w2 * w2 * m.var_x;
    m.cov_x_xp = omega * s * c * (c2 * c2 - c1 * c1);
    m.cov_x_xpp = -w2 * m.var_x;
    m.cov_xp_xpp = -w2 * m.cov_x_xp;
    return m;
}

namespace {

/// Central difference of given order with one Richardson extrapolation level.
template <class F>
double central_derivative(F&& f, double t, int order, double step) {
    auto stencil = [&](double h) -> double {
        switch (order) {
            case 1:
                return (f(t + h) - f(t - h)) / (2.0 * h);
            case 2:
                return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            case 3:
                return (f(t + 2 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2 * h)) /
                       (2.0 * h * h * h);
            case 4:
                return (f(t + 2 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) +
                        f(t - 2 * h)) /
                       (h * h * h * h);
            default:
                throw std::logic_error("central_derivative: unsupported order");
        }
    };
    const double coarse = stencil(step), fine = stencil(0.5 * step);
    return (4.0 * fine - coarse) / 3.0;  // both stencils are O(h^2)
}

/// One-sided derivative in tau at tau = 0 (domain is tau >= 0), second order,
/// with one Richardson level.
template <class F>
double onesided_tau_derivative(F&& f, int order, double step) {
    auto stencil = [&](double h) -> double {
        if (order == 1) return (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
        return (2.0 * f(0.0) - 5.0 * f(h) + 4.0 * f(2.0 * h) - f(3.0 * h)) / (h * h);
    };
    const double coarse = stencil(step), fine = stencil(0.5 * step);
    // second-order one-sided stencils: Richardson removes the O(h^2) term
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

CovDerivatives h_derivatives_numeric(const std::function<double(double, double)>& h, double t) {
    auto eval = [&](double tt, double tau) {
        const double v = h(tt, tau);
        if (!std::isfinite(v))
            throw StencilOutOfDomain("h_derivatives_numeric: h not finite at a stencil node");
        return v;
    };

    // calibrate the tau length scale from a pilot first derivative
    const double h0 = eval(t, 0.0);
    const double tau0 = 1e-4 * (1.0 + t * t);
    const double h2_pilot = (eval(t, tau0) - h0) / tau0;
    double ltau = std::abs(h2_pilot) > 0.0 ? std::abs(h0 / h2_pilot) : 1.0;
    ltau = std::clamp(ltau, 1e-6, 1e6);
    const double lt = std::sqrt(ltau);

    // steps balance stencil roundoff (amplified by step^-order) against
    // truncation; mixed partials take larger steps because the tau stencil
    // amplifies the noise of the inner t stencil
    const double st1 = 1e-4 * lt, st3 = 2e-3 * lt, st4 = 2e-2 * lt;
    const double st_mix1 = 1e-3 * lt, st_mix2 = 5e-3 * lt;
    const double dtau1 = 1e-4 * ltau, dtau2 = 4e-3 * ltau, dtau_mix = 2e-3 * ltau;

    auto h_at_tau = [&](double tau) { return [&, tau](double tt) { return eval(tt, tau); }; };
    auto dt_n = [&](int order, double step) {
        return [&, order, step](double tau) { return central_derivative(h_at_tau(tau), t, order, step); };
    };

    CovDerivatives d;
    d.h0 = h0;
    d.h1 = central_derivative(h_at_tau(0.0), t, 1, st1);
    d.h11 = central_derivative(h_at_tau(0.0), t, 2, st1);
    d.h111 = central_derivative(h_at_tau(0.0), t, 3, st3);
    d.h1111 = central_derivative(h_at_tau(0.0), t, 4, st4);
    d.h2 = onesided_tau_derivative([&](double tau) { return eval(t, tau); }, 1, dtau1);
    d.h22 = onesided_tau_derivative([&](double tau) { return eval(t, tau); }, 2, dtau2);
    d.h12 = onesided_tau_derivative(dt_n(1, st_mix1), 1, dtau_mix);
    d.h112 = onesided_tau_derivative(dt_n(2, st_mix2), 1, dtau_mix);
    return d;
}

DerivativeMoments moments(const ProcessModel& model, double t) {
    switch (model.type()) {
        case ProcessModel::Type::kStationary:
        case ProcessModel::Type::kVaryingBandwidth: {
            if (model.kernel().is_gaussian)
                return gaussian_bandwidth_moments(model.nu().f(t), model.nu().d1(t),
                                                  model.nu().d2(t));
            return moments_via_quadrature(model, t);
        }
        case ProcessModel::Type::kScaledVariance:
            return scaled_moments(moments(model.base(), t), model.sigma().f(t),
                                  model.sigma().d1(t), model.sigma().d2(t));
        case ProcessModel::Type::kCosine:
            return cosine_moments(model.c1(), model.c2(), model.omega(), t);
        case ProcessModel::Type::kHDerivatives:
            return moments_from_h(model.hderiv_(t));
    }
    throw std::logic_error("moments: unknown model type");
}

std::function<double(double, double)> h_function(const ProcessModel& model) {
    switch (model.type()) {
        case ProcessModel::Type::kStationary: {
            const double nu = model.nu().f(0.0);
            if (model.kernel().is_gaussian)
                return [nu](double, double tau) { return std::exp(-tau / (4.0 * nu * nu)); };
            const Kernel k = model.kernel();
            return [k, nu](double t, double tau) {
                const double d = std::sqrt(std::max(tau, 0.0));
                const double t1 = t - 0.5 * d, t2 = t + 0.5 * d;
                return integrate_line([&](double s) {
                    return k.f((t1 - s) / nu) * k.f((t2 - s) / nu) / nu;
                });
            };
        }
        case ProcessModel::Type::kVaryingBandwidth: {
            const ScalarFunction nu = model.nu();
            if (model.kernel().is_gaussian) {
                return [nu](double t, double tau) {
                    const double d = std::sqrt(std::max(tau, 0.0));
                    const double n1 = nu.f(t - 0.5 * d), n2 = nu.f(t + 0.5 * d);
                    const double ss = n1 * n1 + n2 * n2;
                    return std::sqrt(2.0 * n1 * n2 / ss) * std::exp(-tau / (2.0 * ss));
                };
            }
            const Kernel k = model.kernel();
            return [k, nu](double t, double tau) {
                const double d = std::sqrt(std::max(tau, 0.0));
                const double t1 = t - 0.5 * d, t2 = t + 0.5 * d;
                const double n1 = nu.f(t1), n2 = nu.f(t2);
                return integrate_line([&](double s) {
                    return k.f((t1 - s) / n1) * k.f((t2 - s) / n2) / std::sqrt(n1 * n2);
                });
            };
        }
        case ProcessModel::Type::kScaledVariance: {
            auto base_h = h_function(model.base());
            const ScalarFunction sig = model.sigma();
            return [base_h, sig](double t, double tau) {
                const double d = std::sqrt(std::max(tau, 0.0));
                return sig.f(t - 0.5 * d) * sig.f(t + 0.5 * d) * base_h(t, tau);
            };
        }
        case ProcessModel::Type::kCosine: {
            const double c1 = model.c1(), c2 = model.c2(), om = model.omega();
            return [c1, c2, om](double t, double tau) {
                const double d = std::sqrt(std::max(tau, 0.0));
                const double t1 = t - 0.5 * d, t2 = t + 0.5 * d;
                return c1 * c1 * std::cos(om * t1) * std::cos(om * t2) +
                       c2 * c2 * std::sin(om * t1) * std::sin(om * t2);
            };
        }
        default:
            throw std::invalid_argument("h_function: model has no covariance function");
    }
}

double covariance(const ProcessModel& model, double t1, double t2) {
    const double t = 0.5 * (t1 + t2), tau = (t1 - t2) * (t1 - t2);
    return h_function(model)(t, tau);
}

}  // namespace grf
