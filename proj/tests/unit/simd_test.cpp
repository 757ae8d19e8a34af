#include "rvs/simd/kernels.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace {

using rvs::simd::KernelTable;

// Dyadic inputs k * 2^-40 with |k| < 2^52 sum exactly in 128-bit integers.
std::vector<double> dyadic(std::size_t n, std::uint64_t seed, __int128& exact)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> k(-(std::int64_t{1} << 52) + 1, (std::int64_t{1} << 52) - 1);
    std::vector<double> xs(n);
    exact = 0;
    for (auto& x : xs) {
        const std::int64_t v = k(rng) >> std::uniform_int_distribution<int>(0, 50)(rng);
        exact += v;
        x = std::ldexp(static_cast<double>(v), -40);
    }
    return xs;
}

double to_double(__int128 v) { return std::ldexp(static_cast<double>(v), -40); }

std::vector<const KernelTable*> tables()
{
    std::vector<const KernelTable*> t{&rvs::simd::scalar_kernels()};
    if (const auto* avx = rvs::simd::avx2_kernels()) {
        t.push_back(avx);
    }
    return t;
}

TEST(Simd, ActiveTableIsOneOfTheKnown)
{
    const auto& a = rvs::simd::active_kernels();
    const auto known = tables();
    EXPECT_TRUE(std::any_of(known.begin(), known.end(), [&](const KernelTable* t) { return t->name == a.name; }));
}

TEST(Simd, CompensatedSumMatchesExactOnEveryTable)
{
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u, 65537u}) {
        __int128 exact = 0;
        const auto xs = dyadic(n, 100 + n, exact);
        const double want = to_double(exact);
        for (const auto* t : tables()) {
            const double got = t->compensated_sum(xs).value();
            // compensated summation: error within a few ulps of the result
            // plus eps^2 times the absolute sum
            double abs_sum = 0;
            for (double x : xs) {
                abs_sum += std::abs(x);
            }
            EXPECT_NEAR(got, want, 4 * std::abs(want) * 1.2e-16 + abs_sum * 1e-30) << t->name << " n = " << n;
        }
    }
}

TEST(Simd, IllConditionedHarmonicCancellation)
{
    // sum of +1/k and -1/k in shuffled order is exactly 0 in real arithmetic
    std::vector<double> xs;
    for (int k = 1; k <= 20000; ++k) {
        xs.push_back(1.0 / k);
        xs.push_back(-1.0 / k);
    }
    std::shuffle(xs.begin(), xs.end(), std::mt19937_64(5));
    for (const auto* t : tables()) {
        EXPECT_NEAR(t->compensated_sum(xs).value(), 0.0, 1e-15) << t->name;
    }
}

TEST(Simd, ScalarAndAvx2AgreeOnSmoothSeries)
{
    const auto* avx = rvs::simd::avx2_kernels();
    if (!avx) {
        GTEST_SKIP() << "AVX2 kernels not available";
    }
    std::vector<double> xs;
    for (int k = 1; k <= 100003; ++k) {
        xs.push_back(1.0 / (static_cast<double>(k) * k));
    }
    const double s = rvs::simd::scalar_kernels().compensated_sum(xs).value();
    const double v = avx->compensated_sum(xs).value();
    EXPECT_NEAR(s, v, 2.3e-16 * s);
}

TEST(Simd, MinMaxIdenticalAcrossTables)
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1e3);
    for (std::size_t n : {1u, 2u, 4u, 7u, 8u, 9u, 1001u}) {
        std::vector<double> xs(n);
        for (auto& x : xs) {
            x = g(rng);
        }
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        for (const auto* t : tables()) {
            const auto mm = t->min_max(xs);
            EXPECT_EQ(mm.min, *lo) << t->name << " n = " << n;
            EXPECT_EQ(mm.max, *hi) << t->name << " n = " << n;
        }
    }
}

} // namespace
