#include "grf/scalespace.hpp"

#include <cmath>

#include "grf/gaussian_law.hpp"
#include "grf/quadrature.hpp"
#include "grf/sym_matrix.hpp"

namespace grf {

Eigen::Matrix3d ScaleSpaceBlocks::conditional_hessian() const {
    return sigma22 - sigma21 * sigma11.llt().solve(sigma21.transpose());
}

ScaleSpaceBlocks gaussian_blocks_2d(double v) {
    const double e2 = std::exp(2.0 * v), e4 = e2 * e2;
    ScaleSpaceBlocks b;
    b.field_var = 1.0;
    b.sigma11 << 0.5 * e2, 0.0,  //
        0.0, 0.5;
    b.sigma22 << 0.75 * e4, 0.25 * e2, 0.0,  //
        0.25 * e2, 1.75, 0.0,                //
        0.0, 0.0, 1.25 * e2;
    b.sigma21 << 0.0, -0.5 * e2,  //
        0.0, 0.0,                 //
        0.5 * e2, 0.0;
    b.sigma21_tilde.col(0) << -0.5 * e2, -0.5, 0.0;
    b.sigma21_tilde.rightCols<2>() = b.sigma21;
    return b;
}

ScaleSpaceBlocks general_blocks_2d(const Kernel& kernel, double v) {
    const double e1 = std::exp(v), e2 = e1 * e1, e3 = e2 * e1, e4 = e2 * e2;
    const auto& k = kernel.f;
    const auto& k1 = kernel.d1;
    const auto& k2 = kernel.d2;
    auto I = [&](auto&& f) { return integrate_line(f); };

    // integrands from differentiating the covariance
    //   e^{(v1+v2)/2} int k((s-t1)e^{v1}) k((s-t2)e^{v2}) ds
    // at coincident points, in the variable w = (s-t)e^{v}
    ScaleSpaceBlocks b;
    b.field_var = I([&](double w) { return k(w) * k(w); });

    const double i_k1k1 = I([&](double w) { return k1(w) * k1(w); });
    b.sigma11(0, 0) = e2 * i_k1k1;
    b.sigma11(0, 1) = b.sigma11(1, 0) =
        -e1 * I([&](double w) { return (w * k1(w) + 0.5 * k(w)) * k1(w); });
    b.sigma11(1, 1) = I([&](double w) {
        const double a = 0.5 * k(w) + w * k1(w);
        return a * a;
    });

    // field x Hessian (first column of sigma21_tilde)
    b.sigma21_tilde(0, 0) = e2 * I([&](double w) { return k(w) * k2(w); });
    b.sigma21_tilde(1, 0) =
        I([&](double w) { return 0.25 * k(w) * (4 * w * w * k2(w) + 8 * w * k1(w) + k(w)); });
    b.sigma21_tilde(2, 0) =
        -e1 * I([&](double w) { return 0.5 * k(w) * (2 * w * k2(w) + 3 * k1(w)); });

    // gradient x Hessian; rows (tt, vv, tv), columns (t, v)
    b.sigma21(0, 0) = -e3 * I([&](double w) { return k1(w) * k2(w); });
    b.sigma21(0, 1) =
        e2 * I([&](double w) { return 0.5 * k2(w) * (2.0 * w * k1(w) + k(w)); });
    b.sigma21(1, 0) = -e1 * I([&](double w) {
        return 0.25 * k1(w) * (4 * w * w * k2(w) + 8 * w * k1(w) + k(w));
    });
    b.sigma21(1, 1) = I([&](double w) {
        return w * w * w * k1(w) * k2(w) + 0.5 * w * w * k(w) * k2(w) +
               2.0 * w * w * k1(w) * k1(w) + 1.25 * w * k(w) * k1(w) + 0.125 * k(w) * k(w);
    });
    b.sigma21(2, 0) =
        e2 * I([&](double w) { return 0.5 * k1(w) * (2.0 * w * k2(w) + 3.0 * k1(w)); });
    b.sigma21(2, 1) = -e1 * I([&](double w) {
        return 0.25 * (4 * w * w * k1(w) * k2(w) + 2 * w * k(w) * k2(w) +
                       6 * w * k1(w) * k1(w) + 3 * k(w) * k1(w));
    });
    b.sigma21_tilde.rightCols<2>() = b.sigma21;

    b.sigma22(0, 0) = e4 * I([&](double w) { return k2(w) * k2(w); });
    b.sigma22(0, 1) = b.sigma22(1, 0) = e2 * I([&](double w) {
        return 0.25 * k2(w) * (4 * w * w * k2(w) + 8 * w * k1(w) + k(w));
    });
    b.sigma22(0, 2) = b.sigma22(2, 0) =
        -e3 * I([&](double w) { return 0.5 * k2(w) * (2.0 * w * k2(w) + 3.0 * k1(w)); });
    b.sigma22(1, 1) = I([&](double w) {
        const double eta = w * w * k2(w) + 2.0 * w * k1(w) + 0.25 * k(w);
        return eta * eta;
    });
    b.sigma22(1, 2) = b.sigma22(2, 1) = -e1 * I([&](double w) {
        return 0.125 * (8 * w * w * w * k2(w) * k2(w) + 28 * w * w * k1(w) * k2(w) +
                        2 * w * k(w) * k2(w) + 24 * w * k1(w) * k1(w) + 3 * k(w) * k1(w));
    });
    b.sigma22(2, 2) = e2 * I([&](double w) {
        return w * w * k2(w) * k2(w) + 3.0 * w * k1(w) * k2(w) + 2.25 * k1(w) * k1(w);
    });
    return b;
}

ScaleBlockIdentity scale_block_identity(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        double C, double v, int N) {
    if (A.rows() != N || A.cols() != N || B.size() != N)
        throw std::invalid_argument("scale_block_identity: block dimensions must match N");
    const double ev = std::exp(v);
    Eigen::MatrixXd scaled(N + 1, N + 1), plain(N + 1, N + 1);
    scaled.topLeftCorner(N, N) = ev * ev * A;
    scaled.topRightCorner(N, 1) = ev * B;
    scaled.bottomLeftCorner(1, N) = ev * B.transpose();
    scaled(N, N) = C;
    plain.topLeftCorner(N, N) = A;
    plain.topRightCorner(N, 1) = B;
    plain.bottomLeftCorner(1, N) = B.transpose();
    plain(N, N) = C;

    ScaleBlockIdentity out;
    out.lhs = scaled.determinant();
    out.rhs = std::exp(2.0 * N * v) * plain.determinant();
    out.lhs_negdef = is_negative_definite(SymMatrix::from_dense(scaled));
    out.rhs_negdef = is_negative_definite(SymMatrix::from_dense(plain));
    return out;
}

namespace {

/// Gaussian-kernel blocks for arbitrary spatial dimension N, from symbolic
/// differentiation of cosh(dv)^{-N/2} exp(-e^{v1+v2} r / (4 cosh dv)):
///   Var(dt_i X) = e^{2v}/2                Var(dv X) = N/2
///   E[X dt_i t_i X] = -e^{2v}/2           E[X dvv X] = -N/2
///   E[dt_i X dt_i v X] = e^{2v}/2         E[dv X dt_i t_i X] = -e^{2v}/2
///   Var(dt_i t_i X) = 3 e^{4v}/4          E[dt_i t_i X dt_j t_j X] = e^{4v}/4
///   Var(dt_i t_j X) = e^{4v}/4            E[dt_i t_i X dvv X] = N e^{2v}/4
///   Var(dt_i v X) = (N+4) e^{2v}/4        Var(dvv X) = N (3N+4)/4
/// All other entries vanish.
JointGaussianSpec gaussian_spec_nd(int N, double v) {
    const double e2 = std::exp(2.0 * v), e4 = e2 * e2;
    const int d = N + 1;
    const VechIndex vech(d);
    const int q = vech.size();
    const int iv = N;  // index of the v coordinate

    JointGaussianSpec spec;
    spec.fv = 1.0;
    spec.dv = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < N; ++i) spec.dv(i, i) = 0.5 * e2;
    spec.dv(iv, iv) = 0.5 * N;
    spec.fdcov = Eigen::RowVectorXd::Zero(d);
    spec.fd2cov = Eigen::RowVectorXd::Zero(q);
    spec.dd2cov = Eigen::MatrixXd::Zero(d, q);
    spec.d2v = Eigen::MatrixXd::Zero(q, q);

    auto is_spatial = [N](int i) { return i < N; };
    for (int a = 0; a < q; ++a) {
        auto [i, j] = vech.pair(a);
        if (is_spatial(i) && i == j) spec.fd2cov(a) = -0.5 * e2;
        if (i == iv && j == iv) spec.fd2cov(a) = -0.5 * N;
        // gradient x Hessian
        if (is_spatial(j) && i == iv) spec.dd2cov(j, a) = 0.5 * e2;      // (t_j v) with t_j
        if (is_spatial(i) && i == j) spec.dd2cov(iv, a) = -0.5 * e2;     // (t_i t_i) with v
        for (int bI = 0; bI < q; ++bI) {
            auto [m, n] = vech.pair(bI);
            double val = 0.0;
            if (is_spatial(i) && i == j && is_spatial(m) && m == n)
                val = (i == m) ? 0.75 * e4 : 0.25 * e4;
            else if (is_spatial(i) && is_spatial(j) && i != j)
                val = (m == i && n == j) ? 0.25 * e4 : 0.0;
            else if (is_spatial(j) && i == iv && is_spatial(n) && m == iv)
                val = (j == n) ? 0.25 * (N + 4.0) * e2 : 0.0;
            else if (i == iv && j == iv) {
                if (m == iv && n == iv)
                    val = 0.25 * N * (3.0 * N + 4.0);
                else if (is_spatial(m) && m == n)
                    val = 0.25 * N * e2;
            } else if (is_spatial(i) && i == j && m == iv && n == iv)
                val = 0.25 * N * e2;
            if (val != 0.0) spec.d2v(a, bI) = val;
        }
    }
    return spec;
}

}  // namespace

JointGaussianSpec spec_for_kacrice(const ScaleSpaceSpec& spec) {
    if (spec.N < 1) throw std::invalid_argument("spec_for_kacrice: N must be >= 1");
    if (spec.kernel.is_gaussian) return gaussian_spec_nd(spec.N, spec.v);
    if (spec.N > 1)
        throw UnsupportedDimension(
            "spec_for_kacrice: general kernels are supported for N = 1 only");

    const ScaleSpaceBlocks b = general_blocks_2d(spec.kernel, spec.v);
    // reorder Hessian components from (tt, vv, tv) to vech order (tt, tv, vv)
    const int perm[3] = {0, 2, 1};
    JointGaussianSpec out;
    out.fv = b.field_var;
    out.dv = b.sigma11;
    out.fdcov = Eigen::RowVectorXd::Zero(2);
    out.fd2cov = Eigen::RowVectorXd(3);
    out.dd2cov = Eigen::MatrixXd(2, 3);
    out.d2v = Eigen::MatrixXd(3, 3);
    for (int a = 0; a < 3; ++a) {
        out.fd2cov(a) = b.sigma21_tilde(perm[a], 0);
        for (int g = 0; g < 2; ++g) out.dd2cov(g, a) = b.sigma21(perm[a], g);
        for (int c = 0; c < 3; ++c) out.d2v(a, c) = b.sigma22(perm[a], perm[c]);
    }
    return out;
}

double scale_space_covariance(int N, const double* t1, double nu1, const double* t2, double nu2) {
    if (!(nu1 > 0.0 && nu2 > 0.0))
        throw std::invalid_argument("scale_space_covariance: nu must be positive");
    double r = 0.0;
    for (int i = 0; i < N; ++i) r += (t1[i] - t2[i]) * (t1[i] - t2[i]);
    const double s2 = nu1 * nu1 + nu2 * nu2;
    return std::pow(2.0 * nu1 * nu2 / s2, 0.5 * N) * std::exp(-r / (2.0 * s2));
}

}  // namespace grf
