#ifndef GRF_SYM_MATRIX_HPP
#define GRF_SYM_MATRIX_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace grf {

/// Bijection between (i, j), i >= j, and linear vech indices.
/// Ordering is column-major over the lower triangle:
///   (0,0), (1,0), ..., (d-1,0), (1,1), (2,1), ..., (d-1,d-1).
class VechIndex {
public:
    explicit VechIndex(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("VechIndex: dimension must be >= 1");
        pairs_.reserve(size());
        for (int j = 0; j < d; ++j)
            for (int i = j; i < d; ++i) pairs_.emplace_back(i, j);
    }

    int dim() const { return d_; }
    int size() const { return d_ * (d_ + 1) / 2; }

    /// linear index of entry (i, j); arguments may be given in either order
    int operator()(int i, int j) const {
        if (i < j) std::swap(i, j);
        if (j < 0 || i >= d_) throw std::out_of_range("VechIndex: index out of range");
        // column j starts at offset j*d - j(j-1)/2
        return j * d_ - j * (j - 1) / 2 + (i - j);
    }

    std::pair<int, int> pair(int k) const { return pairs_.at(static_cast<size_t>(k)); }

private:
    int d_;
    std::vector<std::pair<int, int>> pairs_;
};

/// Symmetric d x d matrix stored as its packed lower triangle, so symmetry is
/// exact by construction.
class SymMatrix {
public:
    explicit SymMatrix(int d) : idx_(d), data_(static_cast<size_t>(idx_.size()), 0.0) {}

    static SymMatrix from_dense(const Eigen::MatrixXd& m) {
        if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix not square");
        SymMatrix s(static_cast<int>(m.rows()));
        for (int j = 0; j < s.dim(); ++j)
            for (int i = j; i < s.dim(); ++i) s(i, j) = 0.5 * (m(i, j) + m(j, i));
        return s;
    }

    static SymMatrix identity(int d) {
        SymMatrix s(d);
        for (int i = 0; i < d; ++i) s(i, i) = 1.0;
        return s;
    }

    int dim() const { return idx_.dim(); }
    const VechIndex& vech_index() const { return idx_; }

    double operator()(int i, int j) const { return data_[static_cast<size_t>(idx_(i, j))]; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(idx_(i, j))]; }

    const std::vector<double>& vech() const { return data_; }
    std::vector<double>& vech() { return data_; }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd m(dim(), dim());
        for (int j = 0; j < dim(); ++j)
            for (int i = 0; i < dim(); ++i) m(i, j) = (*this)(i, j);
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim(); ++i) t += (*this)(i, i);
        return t;
    }

private:
    VechIndex idx_;
    std::vector<double> data_;
};

/// Rebuild a symmetric matrix from a vech slice (same ordering as VechIndex).
inline SymMatrix unvech(const double* v, int d) {
    SymMatrix s(d);
    const int q = s.vech_index().size();
    for (int k = 0; k < q; ++k) {
        auto [i, j] = s.vech_index().pair(k);
        s(i, j) = v[k];
    }
    return s;
}

}  // namespace grf

#endif
