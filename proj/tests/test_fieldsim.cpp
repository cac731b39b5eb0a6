#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "grf/fieldsim.hpp"
#include "grf/mvn.hpp"
#include "grf/kacrice.hpp"
#include "grf/normal.hpp"
#include "grf/peak1d.hpp"
#include "grf/scalespace.hpp"
#include "oracles.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace grf;

TEST_CASE("find_local_maxima: 1D basics") {
    const int shape1[] = {5};
    const std::vector<double> monotone{0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK(find_local_maxima(monotone, shape1).empty());

    const std::vector<double> spike{0.0, 1.0, 5.0, 1.0, 0.0};
    const auto idx = find_local_maxima(spike, shape1);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == 2);

    const int shape4[] = {4};
    const std::vector<double> plateau{0.0, 1.0, 1.0, 0.0};
    CHECK(find_local_maxima(plateau, shape4).empty());

    const std::vector<double> boundary_high{9.0, 1.0, 2.0, 7.0};
    CHECK(find_local_maxima(boundary_high, shape4).empty());

    const std::vector<double> constant{1.0, 1.0, 1.0, 1.0};
    CHECK(find_local_maxima(constant, shape4).empty());
}

TEST_CASE("find_local_maxima: agrees with brute force on random lattices") {
    std::mt19937_64 eng(5);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<int> shape;
        const int ndim = 1 + rep % 3;
        long long total = 1;
        for (int a = 0; a < ndim; ++a) {
            shape.push_back(3 + static_cast<int>(eng() % 6));
            total *= shape.back();
        }
        std::vector<double> v(static_cast<size_t>(total));
        for (double& x : v) x = nd(eng);
        CHECK(find_local_maxima(v, shape) == oracle::brute_local_maxima(v, shape));
    }
}

TEST_CASE("simulate_process_1d: zero realizations give an empty sample set") {
    const ProcessModel model = ProcessModel::stationary(gaussian_kernel(), 0.3);
    const PeakSampleSet s = simulate_process_1d(model, GridAxis{0.0, 1.0, 50}, 0, 1);
    CHECK(s.size() == 0);
    CHECK(s.nsims == 0);
}

TEST_CASE("simulate_process_1d: deterministic, thread-invariant, matches the serial twin") {
    const ProcessModel model = ProcessModel::stationary(gaussian_kernel(), 0.25);
    const GridAxis grid{0.0, 1.0, 60};
    const PeakSampleSet a = simulate_process_1d(model, grid, 200, 9);
    const PeakSampleSet b = simulate_process_1d(model, grid, 200, 9);
    const PeakSampleSet r = reference::simulate_process_1d(model, grid, 200, 9);
    CHECK(a.heights == b.heights);
    CHECK(a.heights == r.heights);
    CHECK(a.locations == r.locations);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const PeakSampleSet s1 = simulate_process_1d(model, grid, 200, 9);
    omp_set_num_threads(saved);
    CHECK(a.heights == s1.heights);
#endif
}

TEST_CASE("simulate_process_1d: no recorded peak sits on the grid boundary") {
    const ProcessModel model = ProcessModel::stationary(gaussian_kernel(), 0.15);
    const GridAxis grid{0.0, 1.0, 80};
    const PeakSampleSet s = simulate_process_1d(model, grid, 300, 17);
    REQUIRE(s.size() > 0);
    for (double loc : s.locations) {
        CHECK(loc > grid.start);
        CHECK(loc < grid.stop);
    }
}

TEST_CASE("exact sampling fidelity: sample covariance matches the model") {
    const ProcessModel model = ProcessModel::stationary(gaussian_kernel(), 0.3);
    const int n = 24;
    const GridAxis grid{0.0, 1.0, n};
    // regenerate the field values through the same factor path used by the
    // simulator: draw via sample_mvn on the grid law
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cov(i, j) = covariance(model, grid.at(i), grid.at(j));
    GaussianLaw law(Eigen::VectorXd::Zero(n), SymMatrix::from_dense(cov));
    const long long nsims = 20000;
    const Eigen::MatrixXd draws = sample_mvn(law, nsims, 23);
    Eigen::MatrixXd emp = (draws.transpose() * draws) / static_cast<double>(nsims);
    const double bound = 5.0 / std::sqrt(static_cast<double>(nsims));
    CHECK((emp - cov).cwiseAbs().maxCoeff() < bound);
}

TEST_CASE("empirical_tail: edge cases and errors") {
    PeakSampleSet s;
    s.heights = {1.0, 2.0, 3.0};
    s.nsims = 10;
    const std::vector<double> u{0.0, 2.5, 10.0};
    auto [tail, se] = empirical_tail(s, u);
    CHECK(tail[0] == 1.0);
    CHECK(tail[1] == doctest::Approx(1.0 / 3.0));
    CHECK(tail[2] == 0.0);
    CHECK(se[0] == 0.0);
    CHECK(se[1] > 0.0);

    const PeakSampleSet empty;
    CHECK_THROWS_AS(empirical_tail(empty, u), NoPeaks);
}

TEST_CASE("cosine process: peaks harvested near pi/4 follow Rayleigh(4)") {
    const ProcessModel model = ProcessModel::cosine(3.0, 4.0, 2.0);
    const GridAxis grid{0.0, 2.0 * kPi, 1001};  // step 0.002 pi
    const PeakSampleSet s = simulate_process_1d(model, grid, 10000, 37);
    std::vector<double> near;
    for (long long i = 0; i < s.size(); ++i)
        if (std::abs(s.locations[static_cast<size_t>(i)] - kPi / 4.0) < 0.1)
            near.push_back(s.heights[static_cast<size_t>(i)]);
    REQUIRE(near.size() > 300);
    const double ks = oracle::ks_statistic(
        near, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x * x / 32.0); });
    CHECK(ks < 0.05);
}

TEST_CASE("discretization: refining the grid loses no peaks and moves the tail little") {
    const ProcessModel model =
        ProcessModel::varying_bandwidth(gaussian_kernel(), ScalarFunction::poly({0.1, 0.5}));
    const long long nsims = 4000;
    const PeakSampleSet coarse = simulate_process_1d(model, GridAxis{0.0, 1.0, 100}, nsims, 41);
    const PeakSampleSet fine = simulate_process_1d(model, GridAxis{0.0, 1.0, 200}, nsims, 43);
    CHECK(fine.size() >= static_cast<long long>(0.95 * static_cast<double>(coarse.size())));
    const std::vector<double> u{-0.5, 0.5, 1.5};
    auto [t1, s1] = empirical_tail(coarse, u);
    auto [t2, s2] = empirical_tail(fine, u);
    for (size_t j = 0; j < u.size(); ++j)
        CHECK(std::abs(t1[j] - t2[j]) < 3.0 * (s1[j] + s2[j]) + 1e-6);
}

TEST_CASE("simulate_scale_space: determinism and interior peaks") {
    const GridAxis t_axis{0.0, 1.0, 10};
    const GridAxis nu_axis{0.2, 1.2, 8};
    const PeakSampleSet a = simulate_scale_space(1, t_axis, nu_axis, 400, 51);
    const PeakSampleSet b = reference::simulate_scale_space(1, t_axis, nu_axis, 400, 51);
    CHECK(a.heights == b.heights);
    CHECK(a.ndim == 2);
    for (long long i = 0; i < a.size(); ++i) {
        const double t = a.locations[static_cast<size_t>(2 * i)];
        const double nu = a.locations[static_cast<size_t>(2 * i + 1)];
        CHECK(t > t_axis.start);
        CHECK(t < t_axis.stop);
        CHECK(nu > nu_axis.start);
        CHECK(nu < nu_axis.stop);
    }
    CHECK_THROWS_AS(simulate_scale_space(3, t_axis, nu_axis, 1, 1), UnsupportedDimension);
}

TEST_CASE("scale space empirical tail tracks the Kac-Rice estimate") {
    // 2D scale space at a modest lattice; the acceptance suite runs the full
    // 3D comparison
    const GridAxis t_axis{0.0, 1.0, 14};
    const GridAxis nu_axis{0.2, 1.2, 12};
    const PeakSampleSet sim = simulate_scale_space(1, t_axis, nu_axis, 6000, 57);
    REQUIRE(sim.size() > 100);
    const std::vector<double> u{0.0, 1.0, 2.0};
    auto [tail, se] = empirical_tail(sim, u);
    const PeakCdfEstimate kr =
        algorithm1(spec_for_kacrice(ScaleSpaceSpec::gaussian(1, 0.7)), u, 200000, 59);
    for (size_t j = 0; j < u.size(); ++j)
        CHECK(std::abs(tail[j] - kr.tail[j]) < 3.0 * (se[j] + kr.se[j]) + 0.02);
}

TEST_CASE("grid limits are enforced") {
    const ProcessModel model = ProcessModel::stationary(gaussian_kernel(), 0.3);
    CHECK_THROWS_AS(simulate_process_1d(model, GridAxis{0.0, 1.0, 2}, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_process_1d(model, GridAxis{0.0, 1.0, 30000}, 1, 1), GridTooLarge);
}
