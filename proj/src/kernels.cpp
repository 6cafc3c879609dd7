#include "trihet/kernels.hpp"

#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace trihet {

CsrMatrix CsrMatrix::from_dense(const Matrix& m) {
  CsrMatrix out;
  out.rows = m.rows();
  out.cols = m.cols();
  out.offsets.assign(1, 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        out.indices.push_back(j);
        out.values.push_back(m(i, j));
      }
    }
    out.offsets.push_back(out.indices.size());
  }
  return out;
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.offsets.assign(cols + 1, 0);
  for (auto j : indices) ++t.offsets[j + 1];
  for (std::size_t j = 0; j < cols; ++j) t.offsets[j + 1] += t.offsets[j];
  t.indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t dst = cursor[indices[e]]++;
      t.indices[dst] = i;
      t.values[dst] = values[e];
    }
  }
  return t;
}

Matrix CsrMatrix::to_dense() const {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) m(i, indices[e]) += values[e];
  }
  return m;
}

}  // namespace trihet

namespace trihet::kernels {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void reshape(Matrix& out, std::size_t rows, std::size_t cols) {
  if (out.rows() != rows || out.cols() != cols) out = Matrix(rows, cols);
}

using index_t = std::int64_t;

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void spmm(const CsrView& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.rows(), "spmm: dimension mismatch");
  reshape(out, a.rows, b.cols());
  const std::size_t n = b.cols();
#pragma omp parallel for schedule(dynamic, 64)
  for (index_t i = 0; i < static_cast<index_t>(a.rows); ++i) {
    double* o = out.data() + static_cast<std::size_t>(i) * n;
    std::fill(o, o + n, 0.0);
    for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
      const double w = a.values[e];
      const double* src = b.data() + a.indices[e] * n;
      for (std::size_t c = 0; c < n; ++c) o[c] += w * src[c];
    }
  }
}

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.rows(), "gemm: dimension mismatch");
  reshape(out, a.rows(), b.cols());
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < static_cast<index_t>(a.rows()); ++i) {
    double* o = out.data() + static_cast<std::size_t>(i) * n;
    std::fill(o, o + n, 0.0);
    const double* ar = a.data() + static_cast<std::size_t>(i) * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double w = ar[p];
      if (w == 0.0) continue;
      const double* br = b.data() + p * n;
      for (std::size_t c = 0; c < n; ++c) o[c] += w * br[c];
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows() == b.rows(), "gemm_tn: dimension mismatch");
  reshape(out, a.cols(), b.cols());
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
#pragma omp parallel for schedule(static)
  for (index_t r = 0; r < static_cast<index_t>(k); ++r) {
    double* o = out.data() + static_cast<std::size_t>(r) * n;
    std::fill(o, o + n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = a.data()[i * k + static_cast<std::size_t>(r)];
      if (w == 0.0) continue;
      const double* br = b.data() + i * n;
      for (std::size_t c = 0; c < n; ++c) o[c] += w * br[c];
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.cols(), "gemm_nt: dimension mismatch");
  reshape(out, a.rows(), b.rows());
  const std::size_t k = a.cols();
  const std::size_t n = b.rows();
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < static_cast<index_t>(a.rows()); ++i) {
    const double* ar = a.data() + static_cast<std::size_t>(i) * k;
    double* o = out.data() + static_cast<std::size_t>(i) * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* br = b.data() + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ar[p] * br[p];
      o[j] = s;
    }
  }
}

void sampled_dot(const CsrView& pattern, const Matrix& g, const Matrix& b, std::span<double> out) {
  require(g.cols() == b.cols() && g.rows() == pattern.rows && b.rows() == pattern.cols, "sampled_dot: dimension mismatch");
  require(out.size() == pattern.indices.size(), "sampled_dot: output size mismatch");
  const std::size_t n = g.cols();
#pragma omp parallel for schedule(dynamic, 64)
  for (index_t i = 0; i < static_cast<index_t>(pattern.rows); ++i) {
    const double* gr = g.data() + static_cast<std::size_t>(i) * n;
    for (std::size_t e = pattern.offsets[i]; e < pattern.offsets[i + 1]; ++e) {
      const double* br = b.data() + pattern.indices[e] * n;
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += gr[c] * br[c];
      out[e] = s;
    }
  }
}

namespace reference {

void spmm(const CsrView& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.rows(), "spmm: dimension mismatch");
  out = Matrix(a.rows, b.cols());
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
      for (std::size_t c = 0; c < b.cols(); ++c) out(i, c) += a.values[e] * b(a.indices[e], c);
    }
  }
}

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.rows(), "gemm: dimension mismatch");
  out = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
      for (std::size_t c = 0; c < b.cols(); ++c) out(i, c) += a(i, p) * b(p, c);
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows() == b.rows(), "gemm_tn: dimension mismatch");
  out = Matrix(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t r = 0; r < a.cols(); ++r) {
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += a(i, r) * b(i, c);
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.cols(), "gemm_nt: dimension mismatch");
  out = Matrix(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      for (std::size_t p = 0; p < a.cols(); ++p) out(i, j) += a(i, p) * b(j, p);
    }
  }
}

void sampled_dot(const CsrView& pattern, const Matrix& g, const Matrix& b, std::span<double> out) {
  require(out.size() == pattern.indices.size(), "sampled_dot: output size mismatch");
  for (std::size_t i = 0; i < pattern.rows; ++i) {
    for (std::size_t e = pattern.offsets[i]; e < pattern.offsets[i + 1]; ++e) {
      out[e] = 0.0;
      for (std::size_t c = 0; c < g.cols(); ++c) out[e] += g(i, c) * b(pattern.indices[e], c);
    }
  }
}

}  // namespace reference

}  // namespace trihet::kernels
