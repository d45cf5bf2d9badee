#pragma once

// Matrix-product kernels. Every kernel has a serial reference and an OpenMP
// version; both accumulate each output element in ascending inner-index
// order, so their results are bit-identical regardless of thread count.

#include <cstddef>

namespace sgner::kernels {

// C[m×n] (+)= A[m×k] · B[k×n]
void gemm_nn_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate);
void gemm_nn_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate);

// C[m×n] (+)= A[m×k] · B[n×k]ᵀ
void gemm_nt_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate);
void gemm_nt_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate);

// C[m×n] (+)= A[k×m]ᵀ · B[k×n]
void gemm_tn_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate);
void gemm_tn_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate);

/// Dispatching entry points used by the tape: OpenMP when built with it and
/// the product is large enough to amortize the fork, serial otherwise.
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);

/// Minimum m·k·n for the dispatcher to go parallel.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

/// Number of threads the OpenMP kernels will use (1 without OpenMP).
int max_threads();

}  // namespace sgner::kernels
