#pragma once

// Small dense matrices over an exact or floating coefficient field, with
// the Gaussian-elimination routines the intertwining solver needs.

#include <stdexcept>
#include <vector>

#include "dunkl/rational.hpp"

namespace dunkl {

template <class K>
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, K(0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  K& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const K& at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = K(1);
    return m;
  }

  DenseMatrix multiply(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
    DenseMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const K& v = at(i, k);
        if (FieldOps<K>::is_zero(v, 0.0)) continue;
        for (int j = 0; j < o.cols_; ++j) out.at(i, j) += v * o.at(k, j);
      }
    return out;
  }

  std::vector<K> apply(const std::vector<K>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matrix apply shape mismatch");
    std::vector<K> out(rows_, K(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out[i] += at(i, j) * x[j];
    return out;
  }

 private:
  int rows_, cols_;
  std::vector<K> a_;
};

namespace detail {
template <class K>
double pivot_size(const K& v) {
  return FieldOps<K>::abs_estimate(v);
}
}  // namespace detail

// Solves A X = B for A (r x c) with r >= c. Requires full column rank and a
// consistent system: leftover rows after elimination must vanish. Both
// conditions failing indicates an internal bug in the caller, hence
// logic_error.
template <class K>
DenseMatrix<K> solve_full_column_rank(DenseMatrix<K> A, DenseMatrix<K> B) {
  const int r = A.rows(), c = A.cols(), k = B.cols();
  if (B.rows() != r) throw std::invalid_argument("rhs row mismatch");
  if (r < c) throw std::logic_error("underdetermined system");
  double scale = 0;
  if constexpr (!FieldOps<K>::exact) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) scale = std::max(scale, detail::pivot_size(A.at(i, j)));
  }
  int row = 0;
  std::vector<int> pivot_rows;
  for (int col = 0; col < c; ++col) {
    int best = -1;
    double best_sz = 0;
    for (int i = row; i < r; ++i) {
      double sz = detail::pivot_size(A.at(i, col));
      if (sz > best_sz) {
        best_sz = sz;
        best = i;
      }
    }
    if (best < 0 || (!FieldOps<K>::exact && best_sz <= 1e-12 * scale)) {
      throw std::logic_error("rank-deficient system");
    }
    if (best != row) {
      for (int j = 0; j < c; ++j) std::swap(A.at(best, j), A.at(row, j));
      for (int j = 0; j < k; ++j) std::swap(B.at(best, j), B.at(row, j));
    }
    K inv = K(1) / A.at(row, col);
    for (int j = col; j < c; ++j) A.at(row, j) *= inv;
    for (int j = 0; j < k; ++j) B.at(row, j) *= inv;
    for (int i = 0; i < r; ++i) {
      if (i == row) continue;
      K f = A.at(i, col);
      if (FieldOps<K>::is_zero(f, 0.0)) continue;
      for (int j = col; j < c; ++j) A.at(i, j) -= f * A.at(row, j);
      for (int j = 0; j < k; ++j) B.at(i, j) -= f * B.at(row, j);
    }
    ++row;
  }
  // consistency of the discarded rows
  for (int i = row; i < r; ++i) {
    for (int j = 0; j < k; ++j) {
      if constexpr (FieldOps<K>::exact) {
        if (!FieldOps<K>::is_zero(B.at(i, j), 0.0)) throw std::logic_error("inconsistent overdetermined system");
      } else {
        if (detail::pivot_size(B.at(i, j)) > 1e-9 * (scale > 0 ? scale : 1.0)) {
          throw std::logic_error("inconsistent overdetermined system");
        }
      }
    }
  }
  DenseMatrix<K> X(c, k);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < k; ++j) X.at(i, j) = B.at(i, j);
  return X;
}

template <class K>
DenseMatrix<K> invert(const DenseMatrix<K>& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("inverting non-square matrix");
  return solve_full_column_rank(A, DenseMatrix<K>::identity(A.rows()));
}

}  // namespace dunkl
