#include "rvs/catalog.hpp"
#include "rvs/expr.hpp"
#include "rvs/verdict.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using rvs::Conclusion;
using rvs::Index;
using rvs::LimitEstimate;
using rvs::SignedLogValue;
using rvs::TermSource;

constexpr double kTol = 1e-3;

LimitEstimate exact(double v)
{
    LimitEstimate e;
    e.value = v;
    e.decisive = true;
    return e;
}

TermSource ratio_source(double (*r)(double), Index first = 1)
{
    return TermSource::from_ratio("r", first, SignedLogValue::one(),
                                  [r](Index n) { return r(static_cast<double>(n)); });
}

TermSource expr(const std::string& text)
{
    const auto e = rvs::parse(text);
    return rvs::expression_source(e, text, rvs::first_valid_index(e).value());
}

rvs::Verdict ladder(const TermSource& s, Index n_max = rvs::kDefaultNMax)
{
    rvs::LadderConfig c;
    c.n_max = n_max;
    return rvs::run_ladder(s, c);
}

TEST(Raabe, SignOfAlphaPlusOne)
{
    EXPECT_EQ(rvs::raabe_test(exact(-2), kTol).conclusion, Conclusion::Converges);
    EXPECT_EQ(rvs::raabe_test(exact(-0.5), kTol).conclusion, Conclusion::Diverges);
    EXPECT_EQ(rvs::raabe_test(exact(-1), kTol).conclusion, Conclusion::Inconclusive);
    auto loose = exact(-2);
    loose.decisive = false;
    EXPECT_EQ(rvs::raabe_test(loose, kTol).conclusion, Conclusion::Inconclusive);
    EXPECT_TRUE(rvs::in_minus_one_band(exact(-1.0005), kTol));
    EXPECT_FALSE(rvs::in_minus_one_band(exact(-1.01), kTol));
}

TEST(Gauss, TelescopingRatio)
{
    // a_{n+1}/a_n = (n+1)/(n+3): alpha(n) = -2n/(n+3), p = -2, r = 2
    const auto s = ratio_source([](double n) { return -2 / (n + 3); });
    const auto grid = rvs::default_grid(1, 1 << 16);
    const auto d = rvs::raabe_statistic(s, grid);
    const auto a = rvs::extrapolate_limit(grid, d.alpha, kTol);
    const auto form = rvs::fit_gauss_form(d, a);
    EXPECT_TRUE(form.valid) << form.reason;
    EXPECT_NEAR(form.p, -2, 1e-6);
    EXPECT_NEAR(form.r, 2, 0.05);
    const auto v = rvs::gauss_test(d, a, kTol);
    EXPECT_EQ(v.conclusion, Conclusion::Converges);
    EXPECT_EQ(v.decided_by, "gauss");
}

TEST(Gauss, HarmonicBoundaryDiverges)
{
    const auto s = ratio_source([](double n) { return -1 / (n + 1); });
    const auto grid = rvs::default_grid(1, 1 << 16);
    const auto d = rvs::raabe_statistic(s, grid);
    const auto v = rvs::gauss_test(d, rvs::extrapolate_limit(grid, d.alpha, kTol), kTol);
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
}

TEST(Bertrand, Cases)
{
    EXPECT_EQ(rvs::bertrand_test(exact(-1), exact(-2), kTol).conclusion, Conclusion::Converges);
    EXPECT_EQ(rvs::bertrand_test(exact(-1), exact(1), kTol).conclusion, Conclusion::Diverges);
    const auto v = rvs::bertrand_test(exact(-1), exact(-1), kTol);
    EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
    EXPECT_TRUE(v.decided_by.empty());
    auto loose = exact(-2);
    loose.decisive = false;
    EXPECT_EQ(rvs::bertrand_test(exact(-1), loose, kTol).conclusion, Conclusion::Inconclusive);
}

TEST(Refined, EnvelopeRoute)
{
    // alpha = -2 with beta = 1/2 under the log weight: alpha + beta < -1, beta >= 0
    rvs::DiagnosticSeries d;
    d.grid = rvs::default_grid(1, 1 << 16);
    d.beta.assign(d.grid.size(), 0.5);
    d.family = rvs::WeightFamily::log();
    d.alpha_hat = -2;
    EXPECT_EQ(rvs::refined_test(d, exact(-2), kTol).conclusion, Conclusion::Converges);
    // beta = -1/2 with alpha = 0: alpha + beta > -1, beta <= 0
    d.beta.assign(d.grid.size(), -0.5);
    d.alpha_hat = 0;
    EXPECT_EQ(rvs::refined_test(d, exact(0), kTol).conclusion, Conclusion::Diverges);
    // beta = 1/2 with alpha = -1.2: neither bound applies
    d.beta.assign(d.grid.size(), 0.5);
    d.alpha_hat = -1.2;
    EXPECT_EQ(rvs::refined_test(d, exact(-1.2), kTol).conclusion, Conclusion::Inconclusive);
}

TEST(Refined, BoundedSecondOrderAtMinusOne)
{
    const auto e = rvs::entry_or_throw("dfact_ratio_sq");
    const auto grid = rvs::default_grid(1, 1 << 18);
    const auto d = rvs::second_order_statistic(e.source, -1, rvs::WeightFamily::power(1), grid);
    const auto v = rvs::refined_test(d, exact(-1), kTol);
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
    EXPECT_EQ(v.decided_by, "refined");
    ASSERT_TRUE(v.beta_hat);
    EXPECT_NEAR(v.beta_hat->value, 1.25, 1e-3);
}

TEST(Accumulation, ConvergentB)
{
    const auto e = rvs::entry_or_throw("raabe_product");
    const auto grid = rvs::default_grid(1, 1 << 16);
    const auto t = rvs::accumulation_trace(e.source, -1, grid);
    EXPECT_GT(t.k0, 0);
    EXPECT_EQ(rvs::accumulation_test(t, exact(-1), kTol).conclusion, Conclusion::Diverges);
}

TEST(Accumulation, DriftingBIsInconclusive)
{
    // alpha(k) = -1 - 1/log k makes B(n) -> -inf
    const auto s = ratio_source([](double k) { return (-1 - 1 / std::log(k)) / k; }, 3);
    const auto grid = rvs::default_grid(3, 1 << 16);
    const auto t = rvs::accumulation_trace(s, -1, grid);
    EXPECT_LT(t.min_B, 0);
    EXPECT_EQ(rvs::accumulation_test(t, exact(-1), kTol).conclusion, Conclusion::Inconclusive);
    EXPECT_EQ(rvs::accumulation_test(t, exact(-2), kTol).conclusion, Conclusion::Inconclusive);
}

TEST(Doubling, PowerLaws)
{
    const auto grid = rvs::default_grid(1, 1 << 16);
    EXPECT_EQ(rvs::doubling_test(expr("n^-0.5"), grid, kTol).conclusion, Conclusion::Diverges);
    EXPECT_EQ(rvs::doubling_test(expr("n^-2"), grid, kTol).conclusion, Conclusion::Converges);
    // geometric decay has c_{n+1}/c_n -> 1/2, so the rung does not apply
    EXPECT_EQ(rvs::doubling_test(expr("2^-n"), grid, kTol).conclusion, Conclusion::Inconclusive);
}

TEST(Unbounded, GeometricAndFactorial)
{
    const auto grid = rvs::default_grid(1, 1 << 12);
    EXPECT_EQ(rvs::raabe_unbounded_test(rvs::raabe_statistic(expr("2^-n"), grid)).conclusion, Conclusion::Converges);
    EXPECT_EQ(rvs::raabe_unbounded_test(rvs::raabe_statistic(expr("1.5^n"), grid)).conclusion, Conclusion::Diverges);
    EXPECT_EQ(rvs::raabe_unbounded_test(rvs::raabe_statistic(expr("n^-2"), grid)).conclusion,
              Conclusion::Inconclusive);
}

TEST(Ladder, Rungs)
{
    auto v = ladder(expr("1/n^2"));
    EXPECT_EQ(v.conclusion, Conclusion::Converges);
    EXPECT_EQ(v.decided_by, "raabe");
    EXPECT_NEAR(v.alpha_hat.value, -2, 1e-6);

    v = ladder(expr("1/n"));
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
    EXPECT_EQ(v.decided_by, "gauss");

    v = ladder(expr("1/(n*log(n)^2)"));
    EXPECT_EQ(v.conclusion, Conclusion::Converges);
    EXPECT_EQ(v.decided_by, "bertrand");
    ASSERT_TRUE(v.beta_hat);
    EXPECT_NEAR(v.beta_hat->value, -2, 0.05);

    v = ladder(expr("log(n)/n"));
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
    EXPECT_EQ(v.decided_by, "bertrand");

    // Bertrand's case (v): the known divergence is not claimed
    v = ladder(expr("1/(n*log(n))"));
    EXPECT_EQ(v.conclusion, Conclusion::Inconclusive);
    EXPECT_TRUE(v.decided_by.empty());
}

TEST(Ladder, ExplicitFamilyRunsRefinedFirst)
{
    const auto e = rvs::entry_or_throw("dfact_ratio_sq");
    rvs::LadderConfig c;
    c.family = rvs::WeightFamily::power(1);
    const auto v = rvs::run_ladder(e.source, c);
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
    EXPECT_EQ(v.decided_by, "refined");
}

TEST(Karamata, HarmonicReportsRatioOnly)
{
    // at alpha = -1 the constant is not determined; n c_n / S_n = 1/H_n
    const Index n = 1 << 16;
    const auto est = rvs::karamata_estimate(expr("1/n"), exact(-1), n, kTol);
    EXPECT_EQ(est.target, rvs::AsymptoticEstimate::Target::PartialSum);
    EXPECT_FALSE(est.C);
    long double h = 0;
    for (Index k = 1; k <= n; ++k) {
        h += 1.0L / k;
    }
    ASSERT_TRUE(est.ratio_diagnostic);
    EXPECT_NEAR(*est.ratio_diagnostic, 1 / static_cast<double>(h), 1e-12);
}

TEST(Karamata, InverseSquareTail)
{
    // sum_{k >= n} 1/k^2 ~ 1/n, so C = 1, p = -1
    const Index n = 1 << 14;
    const auto est = rvs::karamata_estimate(expr("1/n^2"), exact(-2), n, kTol);
    EXPECT_EQ(est.target, rvs::AsymptoticEstimate::Target::TailSum);
    EXPECT_DOUBLE_EQ(est.p, -1);
    ASSERT_TRUE(est.C);
    EXPECT_NEAR(*est.C, 1, 1e-12);
    long double tail = 0;
    for (Index k = n; k <= 1 << 26; ++k) {
        tail += 1.0L / (static_cast<long double>(k) * k);
    }
    EXPECT_NEAR(rvs::estimate_value(est, n), static_cast<double>(tail), 1e-3 * static_cast<double>(tail));
}

TEST(Alternating, PairDifferences)
{
    // a_n = (-1)^(n+1)/n: consecutive magnitudes differ by 1/(2k(2k+1))
    const auto alt = TermSource::from_terms("alt", 1, [](Index k) {
        return SignedLogValue::from_log(k % 2 ? 1 : -1, -std::log(static_cast<double>(k)));
    });
    const auto d = rvs::pair_difference_source(alt);
    for (Index k : {1, 10, 1000}) {
        const double x = static_cast<double>(k);
        const double want = 1 / (2 * x * (2 * x + 1));
        EXPECT_NEAR(std::exp(d.term(k).logmag), want, 1e-9 * want) << k;
    }
}

TEST(Alternating, Verdicts)
{
    auto v = ladder(rvs::entry_or_throw("alt_harmonic").source);
    EXPECT_EQ(v.conclusion, Conclusion::Converges);
    EXPECT_EQ(v.decided_by.rfind("alternating:", 0), 0u);
    ASSERT_TRUE(v.absolute_conclusion);
    EXPECT_EQ(*v.absolute_conclusion, Conclusion::Diverges);

    v = ladder(rvs::entry_or_throw("alt_inv_log").source);
    EXPECT_EQ(v.conclusion, Conclusion::Converges);

    // terms growing like n^{1/2}: not even a_n -> 0
    v = ladder(rvs::entry_or_throw("alt_gamma_ratio(1)").source);
    EXPECT_EQ(v.conclusion, Conclusion::Diverges);
}

} // namespace
