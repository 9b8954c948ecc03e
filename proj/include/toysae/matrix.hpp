#pragma once

#include <cblas.h>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace toysae {

// dense row-major f64 matrix; products go through BLAS
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

// C = op(A)·op(B), op selected by trans flags
inline Matrix matmul(const Matrix& A, const Matrix& B, bool trans_a = false,
                     bool trans_b = false) {
  const std::size_t am = trans_a ? A.cols() : A.rows();
  const std::size_t ak = trans_a ? A.rows() : A.cols();
  const std::size_t bk = trans_b ? B.cols() : B.rows();
  const std::size_t bn = trans_b ? B.rows() : B.cols();
  if (ak != bk) throw std::invalid_argument("matmul: inner dimension mismatch");
  Matrix C(am, bn);
  if (am == 0 || bn == 0 || ak == 0) return C;
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, static_cast<int>(am),
              static_cast<int>(bn), static_cast<int>(ak), 1.0, A.data(),
              static_cast<int>(A.cols()), B.data(), static_cast<int>(B.cols()),
              0.0, C.data(), static_cast<int>(C.cols()));
  return C;
}

}  // namespace toysae
