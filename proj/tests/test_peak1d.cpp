#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "grf/normal.hpp"
#include "grf/peak1d.hpp"
#include "oracles.hpp"

using namespace grf;

namespace {

const double kRhoGauss = -1.0 / std::sqrt(3.0);

DerivativeMoments stationary_gaussian_moments() {
    CovDerivatives d;
    d.h0 = 1.0;
    d.h2 = -0.25;
    d.h22 = 0.0625;
    return moments_from_h(d);
}

ProcessModel ex_linear_bandwidth() {
    return ProcessModel::varying_bandwidth(gaussian_kernel(), ScalarFunction::poly({0.1, 0.5}));
}

ProcessModel ex_bandwidth_and_variance() {
    return ProcessModel::scaled(ex_linear_bandwidth(), ScalarFunction::poly({6.0, -10.0, 8.0}));
}

/// density in the legacy kappa parameterization of the stationary
/// unit-variance case (the two forms must agree pointwise)
double kappa_form_density(double kappa, double x) {
    const double c = std::sqrt(3.0 - kappa * kappa);
    return norm_pdf(x) * std::sqrt(2.0 * kPi * (3.0 - kappa * kappa) / 3.0) *
           psi(kappa * x / c);
}

}  // namespace

TEST_CASE("peak_params: stationary Gaussian covariance") {
    const PeakParams p = peak_params(stationary_gaussian_moments());
    CHECK(p.rho == doctest::Approx(kRhoGauss).epsilon(1e-14));
    CHECK(p.sigma_tilde == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kappa(p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("peak_params: linear bandwidth is constant in t") {
    // closed-form value -(1+a^2)/sqrt(7a^4+16a^2+3) = -5/sqrt(119) at a = 1/2,
    // confirmed by three independent derivations (Wiener integrals, symbolic
    // covariance derivatives, direct numerical integration)
    const ProcessModel model = ex_linear_bandwidth();
    const double expected = -5.0 / std::sqrt(119.0);
    for (int i = 0; i < 20; ++i) {
        const double t = 0.05 * (i + 1);
        const PeakParams p = peak_params(moments(model, t));
        CHECK(p.rho == doctest::Approx(expected).epsilon(1e-10));
        CHECK(p.sigma_tilde == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("peak_params: cosine process sits on the Rayleigh boundary") {
    for (double t : {0.3, kPi / 8.0, 1.9}) {
        const PeakParams p = peak_params(cosine_moments(3.0, 4.0, 2.0, t));
        CHECK(is_boundary(p));
        CHECK(p.rho == doctest::Approx(-1.0).epsilon(1e-12));
    }
    const PeakParams quarter = peak_params(cosine_moments(3.0, 4.0, 2.0, kPi / 4.0));
    CHECK(quarter.sigma_tilde == doctest::Approx(4.0).epsilon(1e-12));
    const PeakParams half = peak_params(cosine_moments(3.0, 4.0, 2.0, kPi / 2.0));
    CHECK(half.sigma_tilde == doctest::Approx(3.0).epsilon(1e-12));
    const PeakParams equal = peak_params(cosine_moments(2.0, 2.0, 5.0, 0.7));
    CHECK(equal.rho == -1.0);
    CHECK(equal.sigma_tilde == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("peak_params: bandwidth-and-variance extremes") {
    const ProcessModel model = ex_bandwidth_and_variance();
    // frozen from an independent 30-digit evaluation of the closed forms
    CHECK(peak_params(moments(model, 0.2)).rho ==
          doctest::Approx(-0.53795852788422747).epsilon(1e-12));
    CHECK(peak_params(moments(model, 0.7)).rho ==
          doctest::Approx(0.37830542679394696).epsilon(1e-12));

    double rho_min = 1.0, rho_max = -1.0, t_min = 0, t_max = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const double r = peak_params(moments(model, t)).rho;
        if (r < rho_min) rho_min = r, t_min = t;
        if (r > rho_max) rho_max = r, t_max = t;
    }
    CHECK(rho_min == doctest::Approx(-0.54).epsilon(0.02));
    CHECK(t_min > 0.1);
    CHECK(t_min < 0.25);
    CHECK(rho_max == doctest::Approx(0.38).epsilon(0.03));
    CHECK(t_max > 0.65);
    CHECK(t_max < 0.8);
}

TEST_CASE("peak_params_from_h agrees with the moment route") {
    CovDerivatives d;
    d.h0 = 1.0;
    d.h2 = -0.25;
    d.h22 = 0.0625;
    const PeakParams a = peak_params_from_h(d);
    const PeakParams b = peak_params(moments_from_h(d));
    CHECK(a.rho == doctest::Approx(b.rho).epsilon(1e-12));
    CHECK(a.sigma_tilde == doctest::Approx(b.sigma_tilde).epsilon(1e-12));

    // non-stationary: finite-difference derivatives of a closed-form h
    auto h = h_function(ex_bandwidth_and_variance());
    for (double t : {0.25, 0.6}) {
        const CovDerivatives dn = h_derivatives_numeric(h, t);
        const PeakParams ph = peak_params_from_h(dn);
        const PeakParams pm = peak_params(moments_from_h(dn));
        CHECK(ph.rho == doctest::Approx(pm.rho).epsilon(1e-10));
        CHECK(ph.sigma_tilde == doctest::Approx(pm.sigma_tilde).epsilon(1e-10));
    }
}

TEST_CASE("peak_params_from_h: constant variance forces rho <= 0") {
    // any stationary-variance process: h1 = 0
    for (double h2 : {-0.1, -0.4, -0.9}) {
        CovDerivatives d;
        d.h0 = 1.0;
        d.h2 = h2;
        d.h22 = h2 * h2;  // kappa = 1 family
        const PeakParams p = peak_params_from_h(d);
        CHECK(p.rho <= 1e-12);
    }
    for (double t : {0.2, 0.5, 0.8}) {
        CHECK(peak_params(moments(ex_linear_bandwidth(), t)).rho <= 1e-12);
        CHECK(peak_params(moments(ProcessModel::stationary(gaussian_kernel(), 0.4), t)).rho <=
              1e-12);
    }
}

TEST_CASE("peak_params_from_h: unit-variance stationary kappa identity") {
    CovDerivatives d;
    d.h0 = 1.0;
    d.h2 = -0.3;
    d.h22 = 0.13;
    const PeakParams p = peak_params_from_h(d);
    const double kap = -d.h2 / std::sqrt(d.h22);
    CHECK(p.rho == doctest::Approx(-kap / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(kappa(p) == doctest::Approx(kap).epsilon(1e-13));
}

TEST_CASE("peak_params: rank-deficient moments raise DegenerateField") {
    DerivativeMoments m;
    m.var_x = 1.0;
    m.var_xp = 1.0;
    m.var_xpp = 1.0;
    m.cov_x_xp = 1.0;  // X' = X a.s.: denominator vanishes
    m.cov_x_xpp = 0.0;
    m.cov_xp_xpp = 0.0;
    CHECK_THROWS_AS(peak_params(m), DegenerateField);
}

TEST_CASE("rho_gauss_bandwidth: constant bandwidth reduces to the stationary value") {
    CHECK(rho_gauss_bandwidth(0.3, 0.0, 0.0) == doctest::Approx(kRhoGauss).epsilon(1e-14));
    CHECK(rho_gauss_bandwidth(7.0, 0.0, 0.0) == doctest::Approx(kRhoGauss).epsilon(1e-14));
}

TEST_CASE("rho_gauss_bandwidth: linear slope 1/2") {
    CHECK(rho_gauss_bandwidth(0.35, 0.5, 0.0) ==
          doctest::Approx(-5.0 / std::sqrt(119.0)).epsilon(1e-14));
    // independent of nu for nu'' = 0
    CHECK(rho_gauss_bandwidth(0.1, 0.5, 0.0) ==
          doctest::Approx(rho_gauss_bandwidth(0.6, 0.5, 0.0)).epsilon(1e-14));
}

TEST_CASE("rho_gauss_bandwidth matches the quadrature pipeline") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> a_dist(-0.9, 0.9), b_dist(-0.6, 0.6),
        t_dist(0.1, 0.9);
    for (int rep = 0; rep < 10; ++rep) {
        const double a = a_dist(eng), b = b_dist(eng), t = t_dist(eng);
        const double nu0 = 0.45;
        std::vector<double> coeffs{nu0, a, 0.5 * b};  // nu(t) = nu0 + a t + b t^2/2
        const ProcessModel model =
            ProcessModel::varying_bandwidth(gaussian_kernel(), ScalarFunction::poly(coeffs));
        const double nu_t = nu0 + a * t + 0.5 * b * t * t;
        if (!(nu_t > 0.05)) continue;
        const double closed = rho_gauss_bandwidth(nu_t, a + b * t, b);
        const double via_quad = peak_params(moments_via_quadrature(model, t)).rho;
        CHECK(closed == doctest::Approx(via_quad).epsilon(1e-6));
    }
}

TEST_CASE("peak_density: rho = 0 recovers the normal density") {
    const PeakParams p{0.0, 1.0};
    for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0})
        CHECK(peak_density(p, x) == doctest::Approx(norm_pdf(x)).epsilon(1e-14));
}

TEST_CASE("peak_density equals the kappa-form density pointwise") {
    const PeakParams p{kRhoGauss, 1.0};
    for (double x = -5.0; x <= 5.0; x += 0.01)
        CHECK(peak_density(p, x) == doctest::Approx(kappa_form_density(1.0, x)).epsilon(1e-12));
}

TEST_CASE("peak_density: reflection symmetry in the sign of rho") {
    const PeakParams plus{0.62, 1.3}, minus{-0.62, 1.3};
    for (double x = -4.0; x <= 4.0; x += 0.37)
        CHECK(peak_density(plus, x) == doctest::Approx(peak_density(minus, -x)).epsilon(1e-15));
}

TEST_CASE("peak_density: boundary rho is rejected") {
    CHECK_THROWS_AS(peak_density(PeakParams{-1.0, 1.0}, 0.5), BoundaryRho);
    CHECK_THROWS_AS(peak_tail(PeakParams{1.0, 1.0}, 0.5), BoundaryRho);
    CHECK_THROWS_AS(peak_moments(PeakParams{-1.0, 2.0}), BoundaryRho);
}

TEST_CASE("peak_tail: limits and frozen oracle values") {
    const PeakParams p{kRhoGauss, 1.0};
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(peak_tail(p, -inf) == 1.0);
    CHECK(peak_tail(p, inf) == 0.0);
    // frozen 30-digit quadrature of the density
    CHECK(peak_tail(p, 0.0) == doctest::Approx(0.78867513459481288).epsilon(1e-10));
    CHECK(peak_tail(p, 1.0) == doctest::Approx(0.37656049086529101).epsilon(1e-10));
    for (double u = -2.0; u < 3.0; u += 0.5)
        CHECK(peak_tail(p, u) >= peak_tail(p, u + 0.5));
}

TEST_CASE("peak_moments: closed forms against quadrature") {
    const PeakParams z{0.0, 1.0};
    CHECK(peak_moments(z).first == doctest::Approx(0.0));
    CHECK(peak_moments(z).second == doctest::Approx(1.0));

    const PeakParams p{kRhoGauss, 1.0};
    auto [mean, var] = peak_moments(p);
    CHECK(mean == doctest::Approx(std::sqrt(kPi / 6.0)).epsilon(1e-14));
    CHECK(var == doctest::Approx(0.80973455773503446).epsilon(1e-12));

    // mean scales linearly in sigma_tilde at fixed rho
    const PeakParams p2{kRhoGauss, 2.5};
    CHECK(peak_moments(p2).first == doctest::Approx(2.5 * mean).epsilon(1e-14));
}

TEST_CASE("normalization and moment consistency over the parameter grid") {
    std::vector<double> rhos{-0.99};
    for (double r = -0.9; r < 0.95; r += 0.1) rhos.push_back(r);
    rhos.push_back(0.99);
    for (double rho : rhos) {
        for (double s : {0.5, 1.0, 2.0}) {
            const PeakParams p{rho, s};
            const double lim = 14.0 * s;
            auto f = [&](double x) { return peak_density(p, x); };
            const double mass = oracle::simpson(f, -lim, lim, 40000);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
            const double m1 = oracle::simpson([&](double x) { return x * f(x); }, -lim, lim, 40000);
            const double m2 =
                oracle::simpson([&](double x) { return x * x * f(x); }, -lim, lim, 40000);
            auto [mean, var] = peak_moments(p);
            CHECK(m1 == doctest::Approx(mean).scale(1.0).epsilon(1e-8));
            CHECK(m2 - m1 * m1 == doctest::Approx(var).epsilon(1e-8));
        }
    }
}

TEST_CASE("rayleigh boundary: density, tail, and moments") {
    const PeakParams p{-1.0, 1.0};
    CHECK(rayleigh_density(p, -0.3) == 0.0);
    CHECK(rayleigh_density(p, 0.5) > 0.0);
    CHECK(rayleigh_tail(p, -2.0) == 1.0);
    CHECK(rayleigh_tail(p, 0.0) == 1.0);
    CHECK(rayleigh_tail(p, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

    const double mass = oracle::simpson([&](double x) { return rayleigh_density(p, x); }, 0.0, 20.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    const double mean_q =
        oracle::simpson([&](double x) { return x * rayleigh_density(p, x); }, 0.0, 20.0);
    auto [mean, var] = rayleigh_moments(p);
    CHECK(mean == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));
    CHECK(mean_q == doctest::Approx(mean).epsilon(1e-10));
    CHECK(var == doctest::Approx(2.0 - kPi / 2.0).epsilon(1e-14));

    // rho = +1 mirror
    const PeakParams m{1.0, 1.5};
    CHECK(rayleigh_density(m, 0.7) == 0.0);
    CHECK(rayleigh_density(m, -0.7) == doctest::Approx(rayleigh_density(PeakParams{-1.0, 1.5}, 0.7)));
    CHECK(rayleigh_moments(m).first == doctest::Approx(-1.5 * std::sqrt(kPi / 2.0)));
    CHECK_THROWS_AS(rayleigh_density(PeakParams{0.0, 1.0}, 0.5), NotBoundary);
}

TEST_CASE("cosine process peaks: large sigma_tilde dominates stochastically") {
    const PeakParams big = peak_params(cosine_moments(3.0, 4.0, 2.0, kPi / 4.0));   // s = 4
    const PeakParams small = peak_params(cosine_moments(3.0, 4.0, 2.0, kPi / 2.0)); // s = 3
    const double mass_big =
        oracle::simpson([&](double x) { return rayleigh_density(big, x); }, 0.0, 50.0);
    const double mass_small =
        oracle::simpson([&](double x) { return rayleigh_density(small, x); }, 0.0, 50.0);
    CHECK(mass_big == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mass_small == doctest::Approx(1.0).epsilon(1e-9));
    for (double u = 0.5; u < 12.0; u += 0.5)
        CHECK(rayleigh_tail(big, u) > rayleigh_tail(small, u));
}

TEST_CASE("boundary continuity: rho near -1 approaches the Rayleigh law") {
    // the sup-distance is attained at x = 0 and equals phi(0) sqrt(1 - rho^2)
    // exactly, so the convergence rate is the square root of the gap
    const PeakParams b{-1.0, 1.0};
    for (double gap : {1e-4, 1e-6}) {
        const PeakParams p{-1.0 + gap, 1.0};
        double sup = 0.0;
        for (double x = 0.0; x <= 5.0; x += 0.01)
            sup = std::max(sup, std::abs(peak_density(p, x) - rayleigh_density(b, x)));
        CHECK(sup < 0.41 * std::sqrt(1.0 - p.rho * p.rho));
    }
    const PeakParams tight{-1.0 + 1e-6, 1.0};
    double sup = 0.0;
    for (double x = 0.0; x <= 5.0; x += 0.01)
        sup = std::max(sup, std::abs(peak_density(tight, x) - rayleigh_density(b, x)));
    CHECK(sup < 2e-3);
}

TEST_CASE("scale equivariance: sigma_tilde is a scale parameter") {
    const PeakParams base{0.4, 1.0};
    for (double c : {0.5, 2.0, 7.0}) {
        const PeakParams scaled{0.4, c};
        for (double x : {-1.0, 0.3, 2.2})
            CHECK(peak_density(scaled, c * x) * c ==
                  doctest::Approx(peak_density(base, x)).epsilon(1e-15));
    }
}

TEST_CASE("dispatchers route the boundary automatically") {
    CHECK(density(PeakParams{-1.0, 2.0}, 1.0) ==
          doctest::Approx(rayleigh_density(PeakParams{-1.0, 2.0}, 1.0)));
    CHECK(density(PeakParams{0.3, 2.0}, 1.0) ==
          doctest::Approx(peak_density(PeakParams{0.3, 2.0}, 1.0)));
    CHECK(tail(PeakParams{-1.0, 2.0}, 1.0) ==
          doctest::Approx(rayleigh_tail(PeakParams{-1.0, 2.0}, 1.0)));
    CHECK(height_moments(PeakParams{-1.0, 2.0}).first ==
          doctest::Approx(rayleigh_moments(PeakParams{-1.0, 2.0}).first));
}
