#ifndef GRF_QUADRATURE_HPP
#define GRF_QUADRATURE_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "grf/errors.hpp"

namespace grf {

inline constexpr double kQuadAbsTol = 1e-10;
inline constexpr double kQuadRelTol = 1e-8;

/// Adaptive Gauss-Kronrod over [a, b]; either endpoint may be infinite
/// (Boost substitutes a tanh-style change of variable for unbounded ranges).
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = kQuadAbsTol,
                 double rel_tol = kQuadRelTol) {
    using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0, l1 = 0.0;
    const double val = rule::integrate(f, a, b, 15, 1e-12, &err, &l1);
    if (!std::isfinite(val) || err > abs_tol + rel_tol * std::abs(val))
        throw QuadratureFailure("integrate: requested tolerance not reached");
    return val;
}

template <class F>
double integrate_line(F&& f, double abs_tol = kQuadAbsTol, double rel_tol = kQuadRelTol) {
    return integrate(std::forward<F>(f), -std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), abs_tol, rel_tol);
}

}  // namespace grf

#endif
