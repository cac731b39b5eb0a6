#include "grf/fieldsim.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "grf/errors.hpp"
#include "grf/rng.hpp"
#include "grf/scalespace.hpp"

namespace grf {

namespace {

constexpr long long kMaxGridPoints = 16384;  // factorization memory budget

/// Lower-triangular factor of the grid covariance, computed in place to keep
/// one n x n buffer, with diagonal jitter retries as in psd_factor. The fill
/// callback repopulates the matrix because a failed in-place factorization
/// destroys it.
template <class FillFn>
Eigen::MatrixXd grid_factor(long long n, FillFn&& fill) {
    Eigen::MatrixXd cov(n, n);
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        fill(cov);
        const double base = cov.trace() / static_cast<double>(n);
        if (attempt > 0) {
            jitter = (jitter == 0.0) ? 1e-12 * base : 10.0 * jitter;
            if (!(jitter > 0.0)) break;
            cov.diagonal().array() += jitter;
        }
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(cov);
        if (llt.info() == Eigen::Success) {
            cov.triangularView<Eigen::StrictlyUpper>().setZero();
            return cov;
        }
    }
    throw NotPSDGrid("grid covariance factorization failed after jitter retries");
}

struct RealizationPeaks {
    std::vector<double> heights;
    std::vector<long long> flat_indices;
};

template <class CoordFn>
PeakSampleSet harvest(const Eigen::MatrixXd& factor, std::span<const int> shape, CoordFn&& coord,
                      int ndim, long long nsims, std::uint64_t seed, bool parallel) {
    const long long n = factor.rows();
    std::vector<RealizationPeaks> per_real(static_cast<size_t>(nsims));

    auto run_one = [&](long long r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r), stream_purpose::kFieldRealization);
        Eigen::VectorXd z(n);
        for (long long i = 0; i < n; ++i) z(i) = rng.normal();
        Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * z;
        const auto idx = find_local_maxima(std::span<const double>(x.data(), x.size()), shape);
        auto& out = per_real[static_cast<size_t>(r)];
        out.flat_indices = idx;
        out.heights.reserve(idx.size());
        for (long long k : idx) out.heights.push_back(x(k));
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long r = 0; r < nsims; ++r) run_one(r);
    } else {
        for (long long r = 0; r < nsims; ++r) run_one(r);
    }

    PeakSampleSet set;
    set.ndim = ndim;
    set.nsims = nsims;
    set.seed = seed;
    for (long long r = 0; r < nsims; ++r) {
        const auto& p = per_real[static_cast<size_t>(r)];
        for (size_t k = 0; k < p.heights.size(); ++k) {
            set.heights.push_back(p.heights[k]);
            set.realization.push_back(r);
            coord(p.flat_indices[k], set.locations);
        }
    }
    return set;
}

PeakSampleSet simulate_1d_impl(const ProcessModel& model, const GridAxis& grid, long long nsims,
                               std::uint64_t seed, bool parallel) {
    grid.validate();
    if (nsims < 0) throw std::invalid_argument("simulate_process_1d: nsims must be >= 0");
    PeakSampleSet empty;
    empty.ndim = 1;
    empty.nsims = nsims;
    empty.seed = seed;
    if (nsims == 0) return empty;
    if (grid.count > kMaxGridPoints) throw GridTooLarge("simulate_process_1d: grid too large");

    const int n = grid.count;
    auto h = h_function(model);
    auto fill = [&](Eigen::MatrixXd& cov) {
        for (int j = 0; j < n; ++j) {
            const double tj = grid.at(j);
            for (int i = j; i < n; ++i) {
                const double ti = grid.at(i);
                const double c = h(0.5 * (ti + tj), (ti - tj) * (ti - tj));
                cov(i, j) = c;
                cov(j, i) = c;
            }
        }
    };
    const Eigen::MatrixXd factor = grid_factor(n, fill);
    const int shape[1] = {n};
    auto coord = [&](long long flat, std::vector<double>& loc) {
        loc.push_back(grid.at(static_cast<int>(flat)));
    };
    return harvest(factor, shape, coord, 1, nsims, seed, parallel);
}

PeakSampleSet simulate_scale_space_impl(int N, const GridAxis& t_axis, const GridAxis& nu_axis,
                                        long long nsims, std::uint64_t seed, bool parallel) {
    if (N != 1 && N != 2)
        throw UnsupportedDimension("simulate_scale_space: N must be 1 or 2");
    t_axis.validate();
    nu_axis.validate();
    if (!(nu_axis.start > 0.0))
        throw std::invalid_argument("simulate_scale_space: nu must stay positive");
    if (nsims < 0) throw std::invalid_argument("simulate_scale_space: nsims must be >= 0");

    const int nt = t_axis.count, nn = nu_axis.count;
    long long total = nn;
    for (int i = 0; i < N; ++i) total *= nt;
    PeakSampleSet empty;
    empty.ndim = N + 1;
    empty.nsims = nsims;
    empty.seed = seed;
    if (nsims == 0) return empty;
    if (total > kMaxGridPoints) throw GridTooLarge("simulate_scale_space: grid too large");

    // row-major lattice over (t_1, ..., t_N, nu)
    std::vector<int> shape(static_cast<size_t>(N) + 1, nt);
    shape.back() = nn;
    auto point = [&](long long flat, double* t, double* nu) {
        long long rem = flat;
        *nu = nu_axis.at(static_cast<int>(rem % nn));
        rem /= nn;
        for (int a = N - 1; a >= 0; --a) {
            t[a] = t_axis.at(static_cast<int>(rem % nt));
            rem /= nt;
        }
    };

    auto fill = [&](Eigen::MatrixXd& cov) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long j = 0; j < total; ++j) {
            double tj[2], ti[2], nuj, nui;
            point(j, tj, &nuj);
            for (long long i = j; i < total; ++i) {
                point(i, ti, &nui);
                const double c = scale_space_covariance(N, ti, nui, tj, nuj);
                cov(i, j) = c;
                cov(j, i) = c;
            }
        }
    };
    const Eigen::MatrixXd factor = grid_factor(total, fill);
    auto coord = [&](long long flat, std::vector<double>& loc) {
        double t[2], nu;
        point(flat, t, &nu);
        for (int a = 0; a < N; ++a) loc.push_back(t[a]);
        loc.push_back(nu);
    };
    return harvest(factor, shape, coord, N + 1, nsims, seed, parallel);
}

}  // namespace

void GridAxis::validate() const {
    if (count < 3) throw std::invalid_argument("GridAxis: need at least 3 points per axis");
    if (!(stop > start)) throw std::invalid_argument("GridAxis: stop must exceed start");
}

std::vector<long long> find_local_maxima(std::span<const double> values,
                                         std::span<const int> shape) {
    const int ndim = static_cast<int>(shape.size());
    long long total = 1;
    std::vector<long long> stride(static_cast<size_t>(ndim));
    for (int a = ndim - 1; a >= 0; --a) {
        if (shape[a] < 3)
            throw std::invalid_argument("find_local_maxima: need at least 3 points per axis");
        stride[static_cast<size_t>(a)] = total;
        total *= shape[a];
    }
    if (static_cast<long long>(values.size()) != total)
        throw std::invalid_argument("find_local_maxima: value count does not match shape");

    std::vector<long long> out;
    std::vector<int> coord(static_cast<size_t>(ndim), 1);
    // iterate all interior lattice points
    for (;;) {
        long long flat = 0;
        for (int a = 0; a < ndim; ++a) flat += coord[static_cast<size_t>(a)] * stride[static_cast<size_t>(a)];
        const double v = values[static_cast<size_t>(flat)];
        bool peak = true;
        for (int a = 0; a < ndim && peak; ++a) {
            const long long s = stride[static_cast<size_t>(a)];
            if (!(v > values[static_cast<size_t>(flat - s)]) ||
                !(v > values[static_cast<size_t>(flat + s)]))
                peak = false;
        }
        if (peak) out.push_back(flat);
        // advance interior odometer
        int a = ndim - 1;
        for (; a >= 0; --a) {
            if (++coord[static_cast<size_t>(a)] <= shape[a] - 2) break;
            coord[static_cast<size_t>(a)] = 1;
        }
        if (a < 0) break;
    }
    return out;
}

PeakSampleSet simulate_process_1d(const ProcessModel& model, const GridAxis& grid, long long nsims,
                                  std::uint64_t seed) {
    return simulate_1d_impl(model, grid, nsims, seed, true);
}

PeakSampleSet simulate_scale_space(int N, const GridAxis& t_axis, const GridAxis& nu_axis,
                                   long long nsims, std::uint64_t seed) {
    return simulate_scale_space_impl(N, t_axis, nu_axis, nsims, seed, true);
}

std::pair<std::vector<double>, std::vector<double>> empirical_tail(const PeakSampleSet& peaks,
                                                                   std::span<const double> u) {
    const long long n = peaks.size();
    if (n < 1) throw NoPeaks("empirical_tail: no peaks in sample set");
    std::vector<double> tail(u.size()), se(u.size());
    for (size_t j = 0; j < u.size(); ++j) {
        long long count = 0;
        for (double h : peaks.heights) count += h > u[j] ? 1 : 0;
        const double p = static_cast<double>(count) / static_cast<double>(n);
        tail[j] = p;
        se[j] = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    }
    return {tail, se};
}

namespace reference {

PeakSampleSet simulate_process_1d(const ProcessModel& model, const GridAxis& grid, long long nsims,
                                  std::uint64_t seed) {
    return simulate_1d_impl(model, grid, nsims, seed, false);
}

PeakSampleSet simulate_scale_space(int N, const GridAxis& t_axis, const GridAxis& nu_axis,
                                   long long nsims, std::uint64_t seed) {
    return simulate_scale_space_impl(N, t_axis, nu_axis, nsims, seed, false);
}

}  // namespace reference

}  // namespace grf
