#include "rvs/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>
#define RVS_HAVE_AVX2 1
#else
#define RVS_HAVE_AVX2 0
#endif

#include <limits>

namespace rvs::simd {

#if RVS_HAVE_AVX2

namespace {

// Four independent TwoSum lanes, folded into one accumulator at the end.
TwoSumAccumulator sum_avx2(std::span<const double> xs)
{
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();
    const std::size_t n = xs.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(xs.data() + i);
        const __m256d s = _mm256_add_pd(sum, x);
        const __m256d bp = _mm256_sub_pd(s, sum);
        const __m256d err = _mm256_add_pd(_mm256_sub_pd(sum, _mm256_sub_pd(s, bp)), _mm256_sub_pd(x, bp));
        comp = _mm256_add_pd(comp, err);
        sum = s;
    }
    alignas(32) double s4[4];
    alignas(32) double c4[4];
    _mm256_store_pd(s4, sum);
    _mm256_store_pd(c4, comp);
    TwoSumAccumulator acc;
    for (int lane = 0; lane < 4; ++lane) {
        acc.add(s4[lane]);
    }
    for (int lane = 0; lane < 4; ++lane) {
        acc.add(c4[lane]);
    }
    for (; i < n; ++i) {
        acc.add(xs[i]);
    }
    return acc;
}

MinMax min_max_avx2(std::span<const double> xs)
{
    const std::size_t n = xs.size();
    __m256d lo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d hi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(xs.data() + i);
        lo = _mm256_min_pd(lo, x);
        hi = _mm256_max_pd(hi, x);
    }
    alignas(32) double l4[4];
    alignas(32) double h4[4];
    _mm256_store_pd(l4, lo);
    _mm256_store_pd(h4, hi);
    MinMax r{l4[0], h4[0]};
    for (int lane = 1; lane < 4; ++lane) {
        r.min = l4[lane] < r.min ? l4[lane] : r.min;
        r.max = h4[lane] > r.max ? h4[lane] : r.max;
    }
    for (; i < n; ++i) {
        r.min = xs[i] < r.min ? xs[i] : r.min;
        r.max = xs[i] > r.max ? xs[i] : r.max;
    }
    return r;
}

} // namespace

const KernelTable* avx2_kernels()
{
    static const KernelTable table{"avx2", &sum_avx2, &min_max_avx2};
    if (!__builtin_cpu_supports("avx2")) {
        return nullptr;
    }
    return &table;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

} // namespace rvs::simd
