#pragma once

// Data-parallel kernels used by the model and trainer. Every kernel in
// `trihet::kernels` is an OpenMP loop over output rows with no cross-thread
// reductions, so results are bitwise independent of the thread count.
// `trihet::kernels::reference` holds the straightforward serial versions the
// tests and benchmarks compare against.

#include <span>

#include "trihet/matrix.hpp"

namespace trihet::kernels {

/// out = A * B  (A sparse rows x k, B dense k x n)
void spmm(const CsrView& a, const Matrix& b, Matrix& out);
/// out = A * B
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
/// out = A^T * B
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
/// out = A * B^T
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
/// out[e] = <G.row(i), B.row(j)> for every stored entry e = (i, j) of `pattern`.
void sampled_dot(const CsrView& pattern, const Matrix& g, const Matrix& b, std::span<double> out);

/// Number of threads the kernels will use.
int max_threads();

namespace reference {
void spmm(const CsrView& a, const Matrix& b, Matrix& out);
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
void sampled_dot(const CsrView& pattern, const Matrix& g, const Matrix& b, std::span<double> out);
}  // namespace reference

}  // namespace trihet::kernels
