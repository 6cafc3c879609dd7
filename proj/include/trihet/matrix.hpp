#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace trihet {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Compressed sparse rows with explicit values.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }

  static CsrMatrix from_dense(const Matrix& m);
  CsrMatrix transposed() const;
  Matrix to_dense() const;
};

/// Non-owning CSR view whose values may come from elsewhere (e.g. the
/// per-edge weights of the propagation operator).
struct CsrView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const std::size_t> offsets;
  std::span<const std::size_t> indices;
  std::span<const double> values;

  static CsrView of(const CsrMatrix& m) { return {m.rows, m.cols, m.offsets, m.indices, m.values}; }
};

}  // namespace trihet
