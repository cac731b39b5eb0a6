#include "grf/gaussian_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grf/errors.hpp"

namespace grf {

GaussianLaw condition(const GaussianLaw& joint, std::span<const int> observed_indices,
                      std::span<const double> observed_values) {
    if (observed_indices.size() != observed_values.size())
        throw std::invalid_argument("condition: index/value count mismatch");
    if (observed_indices.empty()) return joint;

    const int d = joint.dim();
    std::vector<char> is_obs(static_cast<size_t>(d), 0);
    for (int i : observed_indices) {
        if (i < 0 || i >= d) throw std::out_of_range("condition: observed index out of range");
        if (is_obs[static_cast<size_t>(i)]) throw std::invalid_argument("condition: duplicate observed index");
        is_obs[static_cast<size_t>(i)] = 1;
    }
    std::vector<int> kept;
    for (int i = 0; i < d; ++i)
        if (!is_obs[static_cast<size_t>(i)]) kept.push_back(i);
    const int no = static_cast<int>(observed_indices.size());
    const int nk = static_cast<int>(kept.size());

    Eigen::MatrixXd full = joint.cov.dense();
    Eigen::MatrixXd soo(no, no), sko(nk, no), skk(nk, nk);
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) soo(a, b) = full(observed_indices[a], observed_indices[b]);
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < no; ++b) sko(a, b) = full(kept[a], observed_indices[b]);
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < nk; ++b) skk(a, b) = full(kept[a], kept[b]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(soo);
    const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    const double jitter = 1e-12 * emax;
    if (!(emax > 0.0) || emin + jitter <= 0.0 || emax / (emin + jitter) > 1e12)
        throw SingularBlock("condition: observed block is numerically singular");

    Eigen::VectorXd dev(no);
    for (int a = 0; a < no; ++a) dev(a) = observed_values[a] - joint.mean(observed_indices[a]);

    Eigen::LLT<Eigen::MatrixXd> llt(soo + jitter * Eigen::MatrixXd::Identity(no, no));
    Eigen::MatrixXd gain = llt.solve(sko.transpose()).transpose();  // nk x no

    Eigen::VectorXd mean(nk);
    for (int a = 0; a < nk; ++a) mean(a) = joint.mean(kept[a]);
    mean += gain * dev;
    Eigen::MatrixXd cov = skk - gain * sko.transpose();

    return GaussianLaw(std::move(mean), SymMatrix::from_dense(cov));
}

bool is_negative_definite(const SymMatrix& m) {
    const int d = m.dim();
    Eigen::MatrixXd a = -m.dense();
    // in-place lower Cholesky with strict pivot test
    for (int k = 0; k < d; ++k) {
        double piv = a(k, k);
        for (int j = 0; j < k; ++j) piv -= a(k, j) * a(k, j);
        if (!(piv > 0.0)) return false;
        piv = std::sqrt(piv);
        a(k, k) = piv;
        for (int i = k + 1; i < d; ++i) {
            double s = a(i, k);
            for (int j = 0; j < k; ++j) s -= a(i, j) * a(k, j);
            a(i, k) = s / piv;
        }
    }
    return true;
}

std::pair<double, int> logdet_and_det_sign(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
    double logdet = 0.0;
    int sign = 1;
    for (int i = 0; i < m.dim(); ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
        logdet += std::log(std::abs(ev));
        if (ev < 0.0) sign = -sign;
    }
    return {logdet, sign};
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
    const int d = static_cast<int>(m.rows());
    const double base = m.trace() / d;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd a = m;
        if (jitter > 0.0) a.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            if (l.allFinite()) return l;
        }
        jitter = (jitter == 0.0) ? 1e-12 * base : 10.0 * jitter;
        if (jitter <= 0.0) break;  // zero or negative trace: jitter cannot help
    }
    // semidefinite or near-semidefinite input: factor through eigenvalues
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
        throw NotPSD("psd_factor: matrix has a significantly negative eigenvalue");
    Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal();
}

Eigen::MatrixXd psd_factor(const SymMatrix& m) { return psd_factor(m.dense()); }

}  // namespace grf
