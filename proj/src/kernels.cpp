#include "sgner/kernels.hpp"

#include <algorithm>

#ifdef SGNER_HAVE_OPENMP
#include <omp.h>
#endif

namespace sgner::kernels {

namespace {

inline void nn_row(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                   std::size_t n, bool accumulate) {
  double* ci = c + i * n;
  if (!accumulate) std::fill(ci, ci + n, 0.0);
  const double* ai = a + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = ai[p];
    if (av == 0.0) continue;
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void nt_row(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                   std::size_t n, bool accumulate) {
  double* ci = c + i * n;
  const double* ai = a + i * k;
  std::size_t j = 0;
  // Four independent dot products per pass; each still sums in p order.
  for (; j + 4 <= n; j += 4) {
    const double* b0 = b + j * k;
    const double* b1 = b0 + k;
    const double* b2 = b1 + k;
    const double* b3 = b2 + k;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      s0 += av * b0[p];
      s1 += av * b1[p];
      s2 += av * b2[p];
      s3 += av * b3[p];
    }
    if (accumulate) {
      ci[j] += s0;
      ci[j + 1] += s1;
      ci[j + 2] += s2;
      ci[j + 3] += s3;
    } else {
      ci[j] = s0;
      ci[j + 1] = s1;
      ci[j + 2] = s2;
      ci[j + 3] = s3;
    }
  }
  for (; j < n; ++j) {
    const double* bj = b + j * k;
    double s = 0.0;
    for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
    ci[j] = accumulate ? ci[j] + s : s;
  }
}

inline void tn_row(const double* a, const double* b, double* c, std::size_t i, std::size_t m,
                   std::size_t k, std::size_t n, bool accumulate) {
  double* ci = c + i * n;
  if (!accumulate) std::fill(ci, ci + n, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    const double av = a[p * m + i];
    if (av == 0.0) continue;
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

}  // namespace

// The `av == 0.0` skips are exact: adding av*b = ±0 never changes a finite sum.

void gemm_nn_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) nn_row(a, b, c, i, k, n, accumulate);
}

void gemm_nn_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate) {
  const auto rows = static_cast<long>(m);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) nn_row(a, b, c, static_cast<std::size_t>(i), k, n, accumulate);
}

void gemm_nt_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) nt_row(a, b, c, i, k, n, accumulate);
}

void gemm_nt_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate) {
  const auto rows = static_cast<long>(m);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) nt_row(a, b, c, static_cast<std::size_t>(i), k, n, accumulate);
}

void gemm_tn_serial(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) tn_row(a, b, c, i, m, k, n, accumulate);
}

void gemm_tn_omp(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate) {
  const auto rows = static_cast<long>(m);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i)
    tn_row(a, b, c, static_cast<std::size_t>(i), m, k, n, accumulate);
}

namespace {

bool go_parallel(std::size_t m, std::size_t k, std::size_t n) {
#ifdef SGNER_HAVE_OPENMP
  return m > 1 && m * k * n >= kParallelThreshold && omp_get_max_threads() > 1 &&
         !omp_in_parallel();
#else
  (void)m, (void)k, (void)n;
  return false;
#endif
}

}  // namespace

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  if (go_parallel(m, k, n))
    gemm_nn_omp(a, b, c, m, k, n, accumulate);
  else
    gemm_nn_serial(a, b, c, m, k, n, accumulate);
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  if (go_parallel(m, k, n))
    gemm_nt_omp(a, b, c, m, k, n, accumulate);
  else
    gemm_nt_serial(a, b, c, m, k, n, accumulate);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  if (go_parallel(m, k, n))
    gemm_tn_omp(a, b, c, m, k, n, accumulate);
  else
    gemm_tn_serial(a, b, c, m, k, n, accumulate);
}

int max_threads() {
#ifdef SGNER_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace sgner::kernels
