#include "rvs/compensated.hpp"
#include "rvs/signed_log.hpp"
#include "rvs/special.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace {

using rvs::SignedLogValue;

TEST(SignedLog, RealRoundTrip)
{
    for (double x : {1.0, -1.0, 3.5, -2.25e-300, 7e300, 0.125}) {
        // exp(log|x|) loses about |log|x|| ulps
        const double slack = 4e-16 * (1 + std::abs(std::log(std::abs(x))));
        EXPECT_NEAR(SignedLogValue::from_real(x).to_real(), x, slack * std::abs(x)) << x;
    }
    EXPECT_TRUE(SignedLogValue::from_real(0.0).is_zero());
    EXPECT_EQ(SignedLogValue::from_real(0.0).to_real(), 0.0);
}

TEST(SignedLog, ArithmeticMatchesDoubles)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        const auto A = SignedLogValue::from_real(a);
        const auto B = SignedLogValue::from_real(b);
        EXPECT_NEAR((A * B).to_real(), a * b, 1e-13 * std::abs(a * b));
        EXPECT_NEAR((A / B).to_real(), a / b, 1e-13 * std::abs(a / b));
        // the sum of two values is accurate relative to the larger operand
        const double scale = std::max(std::abs(a), std::abs(b));
        EXPECT_NEAR((A + B).to_real(), a + b, 1e-13 * scale);
        EXPECT_NEAR((A - B).to_real(), a - b, 1e-13 * scale);
    }
}

TEST(SignedLog, ExactCancellationIsZero)
{
    const auto a = SignedLogValue::from_real(2.5);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_TRUE((a + (-a)).is_zero());
}

TEST(SignedLog, HugeMagnitudesStayFinite)
{
    // 4^n (n!)^2 at n = 1000 overflows a double by thousands of orders
    const double n = 1000;
    const auto v = rvs::pow(SignedLogValue::from_real(4.0), n) *
                   rvs::pow(SignedLogValue::from_log(1, std::lgamma(n + 1)), 2.0);
    EXPECT_TRUE(v.is_finite());
    EXPECT_NEAR(v.logmag, n * std::log(4.0) + 2 * std::lgamma(n + 1), 1e-9 * v.logmag);
    EXPECT_TRUE(std::isinf(v.to_real()));
}

TEST(SignedLog, PowDomain)
{
    const auto neg = SignedLogValue::from_real(-2.0);
    EXPECT_DOUBLE_EQ(rvs::pow(neg, 3.0).to_real(), -8.0);
    EXPECT_DOUBLE_EQ(rvs::pow(neg, 2.0).to_real(), 4.0);
    EXPECT_THROW(rvs::pow(neg, 0.5), std::domain_error);
    EXPECT_THROW(rvs::pow(SignedLogValue::zero(), -1.0), std::domain_error);
    EXPECT_TRUE(rvs::pow(SignedLogValue::zero(), 2.0).is_zero());
    EXPECT_THROW(SignedLogValue::one() / SignedLogValue::zero(), std::domain_error);
}

TEST(Special, FactorialsAgainstProducts)
{
    double lf = 0.0;
    for (std::int64_t k = 0; k <= 300; ++k) {
        if (k > 1) {
            lf += std::log(static_cast<double>(k));
        }
        EXPECT_NEAR(rvs::log_factorial(k), lf, 1e-11 * std::max(1.0, lf)) << k;
    }
    for (std::int64_t k = -1; k <= 300; ++k) {
        double ld = 0.0;
        for (std::int64_t j = k; j >= 2; j -= 2) {
            ld += std::log(static_cast<double>(j));
        }
        EXPECT_NEAR(rvs::log_double_factorial(k), ld, 1e-11 * std::max(1.0, ld)) << k;
    }
    EXPECT_THROW(rvs::log_double_factorial(-2), std::domain_error);
}

TEST(Special, DoubleFactorialSmallValues)
{
    const double expected[] = {1, 1, 1, 2, 3, 8, 15, 48, 105, 384, 945};
    for (int k = -1; k <= 9; ++k) {
        EXPECT_NEAR(std::exp(rvs::log_double_factorial(k)), expected[k + 1], 1e-9 * expected[k + 1]) << k;
    }
}

TEST(Compensated, RecoversLostLowBits)
{
    rvs::TwoSumAccumulator acc;
    acc.add(1.0);
    for (int i = 0; i < 1000; ++i) {
        acc.add(1e-17);
    }
    acc.add(-1.0);
    EXPECT_NEAR(acc.value(), 1e-14, 1e-26);
}

TEST(Compensated, MergeEqualsSequential)
{
    rvs::TwoSumAccumulator a;
    rvs::TwoSumAccumulator b;
    rvs::TwoSumAccumulator all;
    for (int k = 1; k <= 5000; ++k) {
        const double x = 1.0 / k;
        (k <= 2500 ? a : b).add(x);
        all.add(x);
    }
    a.merge(b);
    EXPECT_NEAR(a.value(), all.value(), 4e-16 * all.value());
}

} // namespace
