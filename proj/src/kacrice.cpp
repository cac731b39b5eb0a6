#include "grf/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grf/gaussian_law.hpp"
#include "grf/mvn.hpp"
#include "grf/normal.hpp"
#include "grf/rng.hpp"
#include "grf/sym_matrix.hpp"

namespace grf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// |det H| when H is negative definite, else 0. One in-place Cholesky of -H
/// per sample decides both the indicator and the determinant.
double negdef_weight(const double* vech, int d, const VechIndex& vi, double* work) {
    // unpack -H into a dense lower workspace (d x d, column-major)
    for (int j = 0; j < d; ++j)
        for (int i = j; i < d; ++i) work[j * d + i] = -vech[vi(i, j)];
    double det = 1.0;
    for (int k = 0; k < d; ++k) {
        double piv = work[k * d + k];
        for (int j = 0; j < k; ++j) piv -= work[j * d + k] * work[j * d + k];
        if (!(piv > 0.0)) return 0.0;
        det *= piv;
        const double r = std::sqrt(piv);
        work[k * d + k] = r;
        for (int i = k + 1; i < d; ++i) {
            double s = work[k * d + i];
            for (int j = 0; j < k; ++j) s -= work[j * d + i] * work[j * d + k];
            work[k * d + i] = s / r;
        }
    }
    return det;  // = |det H| since -H is positive definite
}

/// Per-chunk running sums for the ratio estimator at each threshold.
struct ChunkSums {
    std::vector<double> num;      // sum a_i
    std::vector<double> num_sq;   // sum a_i^2
    std::vector<double> cross;    // sum a_i b_i
    double den = 0.0;             // sum b_i
    double den_sq = 0.0;          // sum b_i^2
    long long n_field_above = 0;  // diagnostics: samples with X_i > max threshold

    explicit ChunkSums(size_t nthr)
        : num(nthr, 0.0), num_sq(nthr, 0.0), cross(nthr, 0.0) {}

    void merge(const ChunkSums& o) {
        for (size_t j = 0; j < num.size(); ++j) {
            num[j] += o.num[j];
            num_sq[j] += o.num_sq[j];
            cross[j] += o.cross[j];
        }
        den += o.den;
        den_sq += o.den_sq;
        n_field_above += o.n_field_above;
    }
};

PeakCdfEstimate finalize(const std::vector<double>& u, const ChunkSums& total, long long niters,
                         std::uint64_t seed, int algorithm,
                         const std::vector<double>& num_scale, double den_scale,
                         const std::vector<bool>& underflow) {
    if (!(total.den > 0.0))
        throw ZeroDenominator(
            "kacrice: no sample produced a negative-definite Hessian; "
            "increase niters or check the spec");
    PeakCdfEstimate est;
    est.thresholds = u;
    est.niters = niters;
    est.seed = seed;
    est.algorithm = algorithm;
    est.tail.resize(u.size());
    est.se.resize(u.size());
    est.tail_underflow = underflow;
    est.n_field_above_top = total.n_field_above;

    const double n = static_cast<double>(niters);
    const double bbar = den_scale * total.den / n;
    const double var_b = den_scale * den_scale * (total.den_sq / n) - bbar * bbar;
    for (size_t j = 0; j < u.size(); ++j) {
        const double abar = num_scale[j] * total.num[j] / n;
        const double ratio = abar / bbar;
        const double var_a = num_scale[j] * num_scale[j] * (total.num_sq[j] / n) - abar * abar;
        const double cov_ab = num_scale[j] * den_scale * (total.cross[j] / n) - abar * bbar;
        const double var_ratio =
            (var_a - 2.0 * ratio * cov_ab + ratio * ratio * var_b) / (n * bbar * bbar);
        est.tail[j] = ratio;
        est.se[j] = std::sqrt(std::max(var_ratio, 0.0));
        if (!underflow.empty() && underflow[j]) {
            est.tail[j] = 0.0;
            est.se[j] = 0.0;
        }
    }
    return est;
}

template <class ChunkFn>
ChunkSums run_chunks(size_t nthr, long long niters, ChunkFn&& fn, bool parallel) {
    const long long nchunks = (niters + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkSums> partial(static_cast<size_t>(nchunks), ChunkSums(nthr));
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long c = 0; c < nchunks; ++c) {
            const long long lo = c * kChunkSize;
            const long long hi = std::min(niters, lo + kChunkSize);
            fn(c, lo, hi, partial[static_cast<size_t>(c)]);
        }
    } else {
        for (long long c = 0; c < nchunks; ++c) {
            const long long lo = c * kChunkSize;
            const long long hi = std::min(niters, lo + kChunkSize);
            fn(c, lo, hi, partial[static_cast<size_t>(c)]);
        }
    }
    ChunkSums total(nthr);
    for (const auto& p : partial) total.merge(p);  // fixed merge order
    return total;
}

PeakCdfEstimate algorithm1_impl(const JointGaussianSpec& spec, std::vector<double> u,
                                long long niters, std::uint64_t seed, bool parallel) {
    spec.validate();
    if (niters < 1) throw std::invalid_argument("algorithm1: niters must be >= 1");
    if (!std::is_sorted(u.begin(), u.end()))
        throw std::invalid_argument("algorithm1: thresholds must be ascending");

    const int d = spec.dim();
    const int q = spec.vech_dim();
    const VechIndex vi(d);

    // conditional law of (X, vech hess) given grad = 0; the -inf denominator
    // threshold is implicit: the denominator sums drop the field indicator
    GaussianLaw joint(Eigen::VectorXd::Zero(1 + d + q), SymMatrix::from_dense(spec.joint()));
    std::vector<int> grad_idx(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) grad_idx[static_cast<size_t>(i)] = 1 + i;
    const std::vector<double> zeros(static_cast<size_t>(d), 0.0);
    const MvnSampler sampler(condition(joint, grad_idx, zeros));

    const size_t nthr = u.size();
    auto chunk_fn = [&](long long c, long long lo, long long hi, ChunkSums& sums) {
        RngStream rng(seed, static_cast<std::uint64_t>(c), stream_purpose::kMvn);
        std::vector<double> x(static_cast<size_t>(1 + q));
        std::vector<double> work(static_cast<size_t>(d) * d);
        for (long long i = lo; i < hi; ++i) {
            sampler.draw(rng, x.data());
            const double field = x[0];
            if (nthr > 0 && field > u[nthr - 1]) ++sums.n_field_above;
            const double w = negdef_weight(x.data() + 1, d, vi, work.data());
            if (w == 0.0) continue;
            sums.den += w;
            sums.den_sq += w * w;
            // ascending thresholds: indicators are a prefix of the grid
            for (size_t j = nthr; j-- > 0;) {
                if (!(field > u[j])) continue;
                // field exceeds u[j], hence all lower thresholds as well
                for (size_t l = 0; l <= j; ++l) {
                    sums.num[l] += w;
                    sums.num_sq[l] += w * w;
                    sums.cross[l] += w * w;
                }
                break;
            }
        }
    };
    const ChunkSums total = run_chunks(nthr, niters, chunk_fn, parallel);

    std::vector<double> num_scale(nthr, 1.0);
    return finalize(u, total, niters, seed, 1, num_scale, 1.0, {});
}

PeakCdfEstimate algorithm2_impl(const JointGaussianSpec& spec, std::vector<double> u,
                                long long niters, std::uint64_t seed, bool parallel) {
    spec.validate();
    if (niters < 1) throw std::invalid_argument("algorithm2: niters must be >= 1");
    if (!std::is_sorted(u.begin(), u.end()))
        throw std::invalid_argument("algorithm2: thresholds must be ascending");

    const int d = spec.dim();
    const int q = spec.vech_dim();
    const VechIndex vi(d);

    // conditional covariance of vech hess given (X, grad); mean is linear in
    // the observed field value with coefficient vector mean_coef
    GaussianLaw joint(Eigen::VectorXd::Zero(1 + d + q), SymMatrix::from_dense(spec.joint()));
    std::vector<int> obs_idx(static_cast<size_t>(1 + d));
    for (int i = 0; i <= d; ++i) obs_idx[static_cast<size_t>(i)] = i;
    std::vector<double> obs_one(static_cast<size_t>(1 + d), 0.0);
    obs_one[0] = 1.0;  // conditional mean at (X, grad) = (1, 0) gives the coefficient
    const GaussianLaw cond = condition(joint, obs_idx, obs_one);
    const Eigen::VectorXd mean_coef = cond.mean;
    const MvnSampler hess_sampler(GaussianLaw(Eigen::VectorXd::Zero(q), cond.cov));

    // law of X given grad = 0
    Eigen::LLT<Eigen::MatrixXd> dv_llt(spec.dv);
    if (dv_llt.info() != Eigen::Success)
        throw NotPSD("algorithm2: gradient covariance is not positive definite");
    const double sigma_cond_sq =
        spec.fv - (spec.fdcov * dv_llt.solve(spec.fdcov.transpose()))(0, 0);
    if (!(sigma_cond_sq > 0.0))
        throw DegenerateField("algorithm2: Var(X | grad = 0) must be positive");
    const double sigma_cond = std::sqrt(sigma_cond_sq);

    // p_{grad}(0); cancels in the ratio but retained for debuggability
    const Eigen::MatrixXd dv_l = dv_llt.matrixL();
    double logdet_dv = 0.0;
    for (int i = 0; i < d; ++i) logdet_dv += 2.0 * std::log(dv_l(i, i));
    const double p_grad0 = std::exp(-0.5 * (d * std::log(2.0 * kPi) + logdet_dv));

    const size_t nthr = u.size();
    std::vector<double> tail_prob(nthr);
    std::vector<bool> underflow(nthr, false);
    for (size_t j = 0; j < nthr; ++j) {
        tail_prob[j] = std::isinf(u[j]) && u[j] < 0.0 ? 1.0 : norm_tail(u[j] / sigma_cond);
        if (tail_prob[j] <= 0.0) underflow[j] = true;
    }

    auto chunk_fn = [&](long long c, long long lo, long long hi, ChunkSums& sums) {
        const auto nchunk = static_cast<size_t>(hi - lo);
        RngStream hess_rng(seed, static_cast<std::uint64_t>(c), stream_purpose::kHessian);
        std::vector<double> hess(nchunk * static_cast<size_t>(q));
        for (size_t i = 0; i < nchunk; ++i)
            hess_sampler.draw(hess_rng, hess.data() + i * static_cast<size_t>(q));

        // one shared uniform per sample couples the truncated field draws
        // across thresholds (and reproduces the denominator exactly at -inf)
        RngStream field_rng(seed, static_cast<std::uint64_t>(c),
                            stream_purpose::kTruncatedField + nthr);
        std::vector<double> uni(nchunk);
        for (size_t i = 0; i < nchunk; ++i) uni[i] = field_rng.uniform_open();

        std::vector<double> den_w(nchunk);
        std::vector<double> shifted(static_cast<size_t>(q));
        std::vector<double> work(static_cast<size_t>(d) * d);

        auto weight_at = [&](double field, size_t i) {
            const double* h = hess.data() + i * static_cast<size_t>(q);
            for (int m = 0; m < q; ++m)
                shifted[static_cast<size_t>(m)] = h[m] + field * mean_coef(m);
            return negdef_weight(shifted.data(), d, vi, work.data());
        };

        // denominator: the appended u = -inf case, untruncated field law
        for (size_t i = 0; i < nchunk; ++i) {
            den_w[i] = weight_at(truncnorm_lower_icdf(uni[i], 0.0, sigma_cond, -kInf), i);
            sums.den += den_w[i];
            sums.den_sq += den_w[i] * den_w[i];
        }
        for (size_t j = 0; j < nthr; ++j) {
            if (underflow[j]) continue;
            const double alpha = u[j] / sigma_cond;
            if (alpha < 4.0) {
                for (size_t i = 0; i < nchunk; ++i) {
                    const double w =
                        weight_at(truncnorm_lower_icdf(uni[i], 0.0, sigma_cond, u[j]), i);
                    sums.num[j] += w;
                    sums.num_sq[j] += w * w;
                    sums.cross[j] += w * den_w[i];
                }
            } else {
                // far tail: the inverse CDF loses precision, use the rejection
                // sampler on a per-threshold stream
                RngStream rng(seed, static_cast<std::uint64_t>(c),
                              stream_purpose::kTruncatedField + j);
                for (size_t i = 0; i < nchunk; ++i) {
                    const double w = weight_at(rng.truncnorm_lower(0.0, sigma_cond, u[j]), i);
                    sums.num[j] += w;
                    sums.num_sq[j] += w * w;
                    sums.cross[j] += w * den_w[i];
                }
            }
        }
    };
    const ChunkSums total = run_chunks(nthr, niters, chunk_fn, parallel);

    std::vector<double> num_scale(nthr);
    for (size_t j = 0; j < nthr; ++j) num_scale[j] = p_grad0 * tail_prob[j];
    return finalize(u, total, niters, seed, 2, num_scale, p_grad0, underflow);
}

}  // namespace

Eigen::MatrixXd JointGaussianSpec::joint() const {
    const int d = dim(), q = vech_dim();
    Eigen::MatrixXd m(1 + d + q, 1 + d + q);
    m(0, 0) = fv;
    m.block(0, 1, 1, d) = fdcov;
    m.block(1, 0, d, 1) = fdcov.transpose();
    m.block(0, 1 + d, 1, q) = fd2cov;
    m.block(1 + d, 0, q, 1) = fd2cov.transpose();
    m.block(1, 1, d, d) = dv;
    m.block(1, 1 + d, d, q) = dd2cov;
    m.block(1 + d, 1, q, d) = dd2cov.transpose();
    m.block(1 + d, 1 + d, q, q) = d2v;
    return m;
}

void JointGaussianSpec::validate() const {
    const int d = dim(), q = vech_dim();
    if (d < 1) throw std::invalid_argument("JointGaussianSpec: dimension must be >= 1");
    if (q != d * (d + 1) / 2)
        throw std::invalid_argument("JointGaussianSpec: vech dimension must be d(d+1)/2");
    if (!(fv > 0.0)) throw std::invalid_argument("JointGaussianSpec: field variance must be positive");
    if (dv.cols() != d || fdcov.size() != d || fd2cov.size() != q || dd2cov.rows() != d ||
        dd2cov.cols() != q || d2v.cols() != q)
        throw std::invalid_argument("JointGaussianSpec: block shape mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint());
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
        throw NotPSD("JointGaussianSpec: assembled joint covariance is not PSD");
}

PeakCdfEstimate algorithm1(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed) {
    return algorithm1_impl(spec, std::move(u), niters, seed, true);
}

PeakCdfEstimate algorithm2(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed) {
    return algorithm2_impl(spec, std::move(u), niters, seed, true);
}

JointGaussianSpec spec_from_moments_1d(const DerivativeMoments& m) {
    m.validate();
    JointGaussianSpec spec;
    spec.fv = m.var_x;
    spec.dv = Eigen::MatrixXd::Constant(1, 1, m.var_xp);
    spec.d2v = Eigen::MatrixXd::Constant(1, 1, m.var_xpp);
    spec.fdcov = Eigen::RowVectorXd::Constant(1, m.cov_x_xp);
    spec.fd2cov = Eigen::RowVectorXd::Constant(1, m.cov_x_xpp);
    spec.dd2cov = Eigen::MatrixXd::Constant(1, 1, m.cov_xp_xpp);
    return spec;
}

namespace reference {

PeakCdfEstimate algorithm1(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed) {
    return algorithm1_impl(spec, std::move(u), niters, seed, false);
}

PeakCdfEstimate algorithm2(const JointGaussianSpec& spec, std::vector<double> u, long long niters,
                           std::uint64_t seed) {
    return algorithm2_impl(spec, std::move(u), niters, seed, false);
}

}  // namespace reference

}  // namespace grf
