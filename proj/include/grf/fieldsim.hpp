#ifndef GRF_FIELDSIM_HPP
#define GRF_FIELDSIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "grf/covmodel.hpp"

namespace grf {

/// One uniformly spaced grid axis with count >= 3 (local maxima need
/// interior points).
struct GridAxis {
    double start = 0.0;
    double stop = 1.0;
    int count = 0;

    double step() const { return (stop - start) / (count - 1); }
    double at(int i) const { return start + step() * i; }
    void validate() const;
};

/// Peak heights and locations harvested from simulated realizations.
struct PeakSampleSet {
    int ndim = 1;
    std::vector<double> heights;
    std::vector<double> locations;         // row-major, ndim per peak
    std::vector<long long> realization;    // realization id per peak
    long long nsims = 0;
    std::uint64_t seed = 0;

    long long size() const { return static_cast<long long>(heights.size()); }
};

/// Strict interior local maxima of values on a row-major lattice of the given
/// shape: a point counts when it strictly exceeds its 2*ndim axis-adjacent
/// neighbors. Boundary points and plateaus never count.
std::vector<long long> find_local_maxima(std::span<const double> values,
                                         std::span<const int> shape);

/// Exact simulation of a 1D model on a grid: the grid covariance matrix is
/// factorized once and reused across realizations. Realizations run in
/// parallel on independent derived streams; output is identical for any
/// thread count.
PeakSampleSet simulate_process_1d(const ProcessModel& model, const GridAxis& grid, long long nsims,
                                  std::uint64_t seed);

/// Exact simulation of the Gaussian-kernel scale space field on a
/// (t_1..t_N, nu) lattice; N in {1, 2}.
PeakSampleSet simulate_scale_space(int N, const GridAxis& t_axis, const GridAxis& nu_axis,
                                   long long nsims, std::uint64_t seed);

/// tail[j] = fraction of peak heights > u[j], with binomial standard errors.
/// Throws NoPeaks when the sample set is empty.
std::pair<std::vector<double>, std::vector<double>> empirical_tail(const PeakSampleSet& peaks,
                                                                   std::span<const double> u);

namespace reference {
/// Serial twins of the simulators (same streams, same merge order).
PeakSampleSet simulate_process_1d(const ProcessModel& model, const GridAxis& grid, long long nsims,
                                  std::uint64_t seed);
PeakSampleSet simulate_scale_space(int N, const GridAxis& t_axis, const GridAxis& nu_axis,
                                   long long nsims, std::uint64_t seed);
}  // namespace reference

}  // namespace grf

#endif
