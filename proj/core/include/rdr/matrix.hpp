#pragma once

#include <cstddef>
#include <vector>

namespace rdr {

// Dense row-major matrix of doubles. Constructors taking data reject
// non-finite entries; shape mismatches throw std::invalid_argument.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix col(std::size_t j) const;                       // as rows x 1
  std::vector<double> col_vector(std::size_t j) const;
  Matrix cols_range(std::size_t j0, std::size_t j1) const;  // columns [j0, j1)
  Matrix rows_subset(const std::vector<std::size_t>& idx) const;
  Matrix cols_subset(const std::vector<std::size_t>& idx) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// C = A * B.  Summation over the inner index is sequential within each
// output element, so results are bitwise reproducible.
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B without materialising the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// C = A * B^T without materialising the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
// Column Euclidean norms.
std::vector<double> column_norms(const Matrix& a);

// y = A * x and y = A^T * x.
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x);

}  // namespace rdr
