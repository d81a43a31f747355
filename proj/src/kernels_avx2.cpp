#include "dsm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// AVX2 variants, compiled with per-function target attributes so the rest of
// the binary stays baseline x86-64. Elementwise kernels produce bit-identical
// results to the scalar reference; reductions differ only by summation order.

namespace dsm::kernels {
namespace {

#define DSM_AVX2_TARGET __attribute__((target("avx2")))

DSM_AVX2_TARGET inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

DSM_AVX2_TARGET double clamped_energy_cost_avx2(const double* load,
                                                const double* pv,
                                                const double* price,
                                                std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d net = _mm256_sub_pd(_mm256_loadu_pd(load + i),
                                _mm256_loadu_pd(pv + i));
    net = _mm256_max_pd(net, zero);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(net, _mm256_loadu_pd(price + i)));
  }
  double total = hsum4(acc);
  for (; i < n; ++i) {
    double net = load[i] - pv[i];
    if (net > 0.0) total += net * price[i];
  }
  return total;
}

DSM_AVX2_TARGET void net_and_surplus_avx2(const double* load, const double* pv,
                                          double* net, double* surplus,
                                          std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(load + i),
                              _mm256_loadu_pd(pv + i));
    _mm256_storeu_pd(net + i, _mm256_max_pd(d, zero));
    _mm256_storeu_pd(surplus + i, _mm256_max_pd(_mm256_sub_pd(zero, d), zero));
  }
  for (; i < n; ++i) {
    double d = load[i] - pv[i];
    net[i] = d > 0.0 ? d : 0.0;
    surplus[i] = d < 0.0 ? -d : 0.0;
  }
}

DSM_AVX2_TARGET void placement_marginals_avx2(const double* others,
                                              const double* pv,
                                              const double* price,
                                              double rating, double* out,
                                              std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d r = _mm256_set1_pd(rating);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d o = _mm256_loadu_pd(others + i);
    __m256d p = _mm256_loadu_pd(pv + i);
    // same association as the scalar reference: (others + rating) - pv
    __m256d with = _mm256_max_pd(_mm256_sub_pd(_mm256_add_pd(o, r), p), zero);
    __m256d without = _mm256_max_pd(_mm256_sub_pd(o, p), zero);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(price + i),
                                            _mm256_sub_pd(with, without)));
  }
  for (; i < n; ++i) {
    double with = others[i] + rating - pv[i];
    double without = others[i] - pv[i];
    if (with < 0.0) with = 0.0;
    if (without < 0.0) without = 0.0;
    out[i] = price[i] * (with - without);
  }
}

DSM_AVX2_TARGET double weighted_sum_sq_avx2(const double* re, const double* im,
                                            const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vr = _mm256_loadu_pd(re + i);
    __m256d vi = _mm256_loadu_pd(im + i);
    __m256d mag = _mm256_add_pd(_mm256_mul_pd(vr, vr), _mm256_mul_pd(vi, vi));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(mag, _mm256_loadu_pd(w + i)));
  }
  double total = hsum4(acc);
  for (; i < n; ++i) total += (re[i] * re[i] + im[i] * im[i]) * w[i];
  return total;
}

DSM_AVX2_TARGET double abs_deviation_sum_avx2(const double* v, double ref,
                                              std::size_t n) {
  const __m256d vref = _mm256_set1_pd(ref);
  // clears the sign bit
  const __m256d abs_mask = _mm256_castsi256_pd(
      _mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), vref);
    acc = _mm256_add_pd(acc, _mm256_and_pd(d, abs_mask));
  }
  double total = hsum4(acc);
  for (; i < n; ++i) {
    double d = v[i] - ref;
    total += d < 0.0 ? -d : d;
  }
  return total;
}

DSM_AVX2_TARGET double dot_avx2(const double* a, const double* b,
                                std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                           _mm256_loadu_pd(b + i)));
  double total = hsum4(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

DSM_AVX2_TARGET double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double total = hsum4(acc);
  for (; i < n; ++i) total += a[i];
  return total;
}

const Ops avx2_table = {
    clamped_energy_cost_avx2, net_and_surplus_avx2, placement_marginals_avx2,
    weighted_sum_sq_avx2,     abs_deviation_sum_avx2,
    dot_avx2,                 sum_avx2,
};

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

const Ops& avx2_ops() { return avx2_table; }

}  // namespace dsm::kernels

#else  // non-x86: scalar only

namespace dsm::kernels {

bool avx2_available() { return false; }

const Ops& avx2_ops() { return scalar::ops; }

}  // namespace dsm::kernels

#endif
