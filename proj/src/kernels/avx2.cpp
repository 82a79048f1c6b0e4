// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "oams/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

#include <cmath>
#include <limits>

namespace oams::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

MinMax min_max_avx2(const double* a, std::size_t n) {
    MinMax mm{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vmin = _mm256_loadu_pd(a);
        __m256d vmax = vmin;
        for (i = 4; i + 4 <= n; i += 4) {
            __m256d x = _mm256_loadu_pd(a + i);
            vmin = _mm256_min_pd(vmin, x);
            vmax = _mm256_max_pd(vmax, x);
        }
        alignas(32) double lo[4];
        alignas(32) double hi[4];
        _mm256_store_pd(lo, vmin);
        _mm256_store_pd(hi, vmax);
        for (int k = 0; k < 4; ++k) {
            if (lo[k] < mm.min) mm.min = lo[k];
            if (hi[k] > mm.max) mm.max = hi[k];
        }
    }
    for (; i < n; ++i) {
        if (a[i] < mm.min) mm.min = a[i];
        if (a[i] > mm.max) mm.max = a[i];
    }
    return mm;
}

double l1_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

} // namespace

const KernelTable* avx2_table_impl() noexcept {
    static const KernelTable table{"avx2", dot_avx2, min_max_avx2, l1_avx2, sum_avx2};
    return &table;
}

} // namespace oams::kernels

#else

namespace oams::kernels {
const KernelTable* avx2_table_impl() noexcept { return nullptr; }
} // namespace oams::kernels

#endif
