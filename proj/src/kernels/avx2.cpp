// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "vsum/kernels.hpp"

namespace vsum::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4), _mm256_loadu_pd(py + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += px[i] * py[i];
  return s;
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
  }
  for (; i < n; ++i) py[i] += a * px[i];
}

void xpby_avx2(std::span<const double> x, double b, std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(py + i), _mm256_loadu_pd(px + i)));
  }
  for (; i < n; ++i) py[i] = px[i] + b * py[i];
}

// Rows of the grid Laplacians are short (3 or 5 entries), so the vector lanes
// run across the nonzeros of one row with a gather on x.
void spmv_avx2(const CsrView& m, double shift, std::span<const double> x, std::span<double> y) {
  const std::size_t n = m.row_ptr.size() - 1;
  const double* vals = m.vals.data();
  const std::size_t* cols = m.cols.data();
  const double* px = x.data();
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t k = m.row_ptr[r];
    const std::size_t end = m.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m256i idx = _mm256_set_epi64x(static_cast<long long>(cols[k + 3]), static_cast<long long>(cols[k + 2]),
                                            static_cast<long long>(cols[k + 1]), static_cast<long long>(cols[k]));
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), _mm256_i64gather_pd(px, idx, 8), acc);
    }
    double s = shift * px[r] + hsum(acc);
    for (; k < end; ++k) s += vals[k] * px[cols[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelSet& avx2_kernel_table() {
  static const KernelSet set{"avx2", dot_avx2, axpy_avx2, xpby_avx2, spmv_avx2};
  return set;
}

}  // namespace vsum::kernels
