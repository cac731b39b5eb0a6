#ifndef GRF_TESTS_ORACLES_HPP
#define GRF_TESTS_ORACLES_HPP

// Independent oracles used by the test suite. Everything here is deliberately
// naive (brute force, textbook formulas) and shares no code path with the
// implementations it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Determinant by cofactor expansion, O(n!).
inline double cofactor_det(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 1) return m(0, 0);
    double det = 0.0;
    double sign = 1.0;
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        det += sign * m(0, j) * cofactor_det(minor);
        sign = -sign;
    }
    return det;
}

/// Composite Simpson rule on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Kolmogorov-Smirnov statistic of samples against a continuous CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        ks = std::max(ks, std::abs((static_cast<double>(i) + 1.0) / n - f));
        ks = std::max(ks, std::abs(static_cast<double>(i) / n - f));
    }
    return ks;
}

/// Strict local maxima on a row-major lattice by checking every interior
/// point against its axis neighbors, one axis at a time.
inline std::vector<long long> brute_local_maxima(std::span<const double> v,
                                                 std::span<const int> shape) {
    const int nd = static_cast<int>(shape.size());
    std::vector<long long> stride(nd);
    long long total = 1;
    for (int a = nd - 1; a >= 0; --a) {
        stride[a] = total;
        total *= shape[a];
    }
    std::vector<long long> out;
    for (long long flat = 0; flat < total; ++flat) {
        bool interior = true, peak = true;
        long long rem = flat;
        for (int a = 0; a < nd; ++a) {
            const long long c = rem / stride[a];
            rem %= stride[a];
            if (c == 0 || c == shape[a] - 1) interior = false;
        }
        if (!interior) continue;
        for (int a = 0; a < nd && peak; ++a)
            peak = v[flat] > v[flat - stride[a]] && v[flat] > v[flat + stride[a]];
        if (peak) out.push_back(flat);
    }
    return out;
}

inline double sample_mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_var(std::span<const double> x) {
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / (static_cast<double>(x.size()) - 1.0);
}

}  // namespace oracle

#endif
