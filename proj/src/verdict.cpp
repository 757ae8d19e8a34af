#include "rvs/verdict.hpp"

#include "rvs/classify.hpp"
#include "rvs/compensated.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rvs {

std::string to_string(Conclusion c)
{
    switch (c) {
    case Conclusion::Converges:
        return "Converges";
    case Conclusion::Diverges:
        return "Diverges";
    default:
        return "Inconclusive";
    }
}

std::string to_string(AsymptoticEstimate::Target t)
{
    return t == AsymptoticEstimate::Target::PartialSum ? "partial_sum" : "tail_sum";
}

namespace {

constexpr double kEnvelopeEps = 0.05;
constexpr double kDoublingMargin = 0.02;
constexpr double kGaussMinR = 1.1;
constexpr double kGaussPinned = 1e-8;
// |alpha(n) + 1| needed before an unbounded Raabe statistic is trusted.
constexpr double kUnboundedAlpha = 10.0;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// "1.25 (= 5/4)" when v is within the uncertainty of a small fraction.
std::string num_with_fraction(double v, double hw)
{
    std::string s = num(v);
    const double slack = std::max(3 * hw, 1e-6);
    for (int q = 2; q <= 16; ++q) {
        const double p = std::round(v * q);
        if (std::abs(v - p / q) <= slack && std::abs(v - std::round(v)) > slack) {
            if (std::gcd(static_cast<long>(std::abs(p)), static_cast<long>(q)) == 1) {
                s += " (= " + num(p) + "/" + std::to_string(q) + ")";
            }
            break;
        }
    }
    return s;
}

std::string pm(const LimitEstimate& e) { return num(e.value) + " +- " + num(e.half_width); }

double band_width(const LimitEstimate& e, double tol)
{
    const double w = std::max(tol, 3 * e.half_width);
    return e.model == kLogFitModel ? std::max(w, kLogFitBand) : w;
}

std::optional<LimitEstimate> try_extrapolate(const std::vector<Index>& grid, const std::vector<double>& y, double tol)
{
    try {
        return extrapolate_limit(grid, y, tol);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// Statistics of log-type terms settle like 1/log n (alpha(n) of (log n)^2/n^2,
// or log n (alpha(n) + 1) when the logarithm is shifted, log(2k) against
// log k); retry with that basis.
std::optional<LimitEstimate> extrapolate_slow(const std::vector<Index>& grid, const std::vector<double>& y, double tol)
{
    auto e = try_extrapolate(grid, y, tol);
    if (e && e->decisive) {
        return e;
    }
    try {
        const auto lc = log_corrected_fit(grid, y, tol);
        if (lc.decisive) {
            return lc;
        }
    } catch (const std::invalid_argument&) {
    }
    return e;
}

LimitEstimate hypothesis_minus_one()
{
    LimitEstimate e;
    e.value = -1.0;
    e.half_width = 0.0;
    e.model = "hypothesis alpha = -1";
    e.decisive = true;
    return e;
}

AsymptoticEstimate partial_form(double p, double q)
{
    AsymptoticEstimate e;
    e.target = AsymptoticEstimate::Target::PartialSum;
    e.p = p;
    e.q = q;
    return e;
}

AsymptoticEstimate tail_form(double p, double q)
{
    AsymptoticEstimate e;
    e.target = AsymptoticEstimate::Target::TailSum;
    e.p = p;
    e.q = q;
    return e;
}

// |a_n| ~ c / n  =>  S_n ~ c log n, with c calibrated as n |a_n|.
AsymptoticEstimate log_partial_sum(const TermSource& a, Index n)
{
    auto e = partial_form(0.0, 1.0);
    e.C = std::exp(std::log(static_cast<double>(n)) + a.term(n).logmag);
    e.at_n = n;
    return e;
}

} // namespace

bool in_minus_one_band(const LimitEstimate& e, double tol) { return std::abs(e.value + 1) <= band_width(e, tol); }

double estimate_value(const AsymptoticEstimate& e, Index n)
{
    if (!e.C) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double x = static_cast<double>(n);
    return *e.C * std::pow(x, e.p) * (e.q == 0.0 ? 1.0 : std::pow(std::log(x), e.q));
}

// ---------------------------------------------------------------------------
// Raabe

Verdict raabe_test(const LimitEstimate& alpha_hat, double tol)
{
    Verdict v;
    v.alpha_hat = alpha_hat;
    if (!alpha_hat.decisive) {
        v.notes.push_back("raabe: alpha(n) has no decisive limit (" + pm(alpha_hat) + ")");
        return v;
    }
    if (in_minus_one_band(alpha_hat, tol)) {
        v.notes.push_back("raabe: alpha = " + pm(alpha_hat) + " lies in the -1 band; no conclusion");
        return v;
    }
    v.decided_by = "raabe";
    if (alpha_hat.value < -1) {
        v.conclusion = Conclusion::Converges;
        v.estimate = tail_form(alpha_hat.value + 1, 0.0);
        v.notes.push_back("raabe: alpha = " + pm(alpha_hat) + " < -1, so sum |a_n| < inf");
    } else {
        v.conclusion = Conclusion::Diverges;
        v.estimate = partial_form(alpha_hat.value + 1, 0.0);
        v.notes.push_back("raabe: alpha = " + pm(alpha_hat) + " > -1, so sum |a_n| = inf");
    }
    return v;
}

Verdict raabe_unbounded_test(const DiagnosticSeries& diag)
{
    Verdict v;
    const auto& y = diag.alpha;
    const std::size_t m = y.size();
    if (m < 4) {
        return v;
    }
    const double first = y[m - 4];
    const double last = y[m - 1];
    bool down = true;
    bool up = true;
    for (std::size_t i = m - 4; i + 1 < m; ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(y[i + 1])) {
            return v;
        }
        down = down && y[i + 1] < y[i];
        up = up && y[i + 1] > y[i];
    }
    const bool away = (down && last < -1) || (up && last > -1);
    if (!away || std::abs(last + 1) < kUnboundedAlpha || std::abs(last + 1) < 2 * std::abs(first + 1)) {
        return v;
    }
    v.decided_by = "raabe";
    const std::string trail = "alpha(n) = " + num(first) + " -> " + num(last) + " over the last 3 octaves";
    if (down) {
        v.conclusion = Conclusion::Converges;
        v.notes.push_back("raabe: " + trail + ", unbounded below; alpha(n) <= -r < -1 eventually, so sum |a_n| < inf");
    } else {
        v.conclusion = Conclusion::Diverges;
        v.notes.push_back("raabe: " + trail + ", unbounded above; alpha(n) >= -1 eventually, so sum |a_n| = inf");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Gauss

GaussForm fit_gauss_form(const DiagnosticSeries& diag, const LimitEstimate& p_hat)
{
    GaussForm g;
    g.p = p_hat.value;
    const std::size_t m = diag.grid.size();
    const std::size_t tail = std::min(m, std::max<std::size_t>(4, (m + 1) / 2));
    const double floor_eps = 64 * DBL_EPSILON * std::max(1.0, std::abs(g.p));

    std::vector<double> lx, ly;
    for (std::size_t i = m - tail; i < m; ++i) {
        const double y = std::abs(diag.alpha[i] - g.p);
        if (y > floor_eps * static_cast<double>(diag.grid[i])) {
            lx.push_back(std::log(static_cast<double>(diag.grid[i])));
            ly.push_back(std::log(y));
        }
    }
    if (lx.size() < 3) {
        if (lx.empty()) {
            g.r = std::numeric_limits<double>::infinity();
            g.bound_estimate = 0.0;
            g.valid = true;
            g.reason = "alpha(n) equals p to rounding on the tail (B_n = 0)";
        } else {
            g.reason = "too few samples above rounding level";
        }
        return g;
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    g.r = 1.0 - slope;

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double z = std::exp((g.r - 1) * lx[i] + ly[i]);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
    }
    g.bound_estimate = hi;
    if (!(g.r > kGaussMinR)) {
        g.reason = "fitted r = " + num(g.r) + " is not > " + num(kGaussMinR);
        return g;
    }
    if (!std::isfinite(hi) || hi > 10 * lo) {
        g.reason = "n^(r-1) |alpha(n) - p| is not bounded on the tail";
        return g;
    }
    g.valid = true;
    return g;
}

Verdict gauss_test(const DiagnosticSeries& diag, const LimitEstimate& alpha_hat, double tol)
{
    Verdict v;
    v.alpha_hat = alpha_hat;
    if (!alpha_hat.decisive) {
        v.notes.push_back("gauss: skipped, p needs a decisive limit of alpha(n)");
        return v;
    }
    if (alpha_hat.model == kLogFitModel) {
        v.notes.push_back("gauss: no Gauss form, alpha(n) approaches its limit like 1/log n, not like n^(1-r)");
        return v;
    }
    const GaussForm g = fit_gauss_form(diag, alpha_hat);
    if (!g.valid) {
        v.notes.push_back("gauss: no Gauss form, " + g.reason);
        return v;
    }
    v.decided_by = "gauss";
    std::string form = "gauss: alpha(n) = p + n^(1-r) B_n with p = " + pm(alpha_hat) + ", r = " + num(g.r) +
                       ", sup |B_n| ~ " + num(g.bound_estimate);
    if (!g.reason.empty()) {
        form += " (" + g.reason + ")";
    }
    v.notes.push_back(form);
    // The Gauss form pins p much more tightly than the Raabe band.
    (void)tol;
    if (std::abs(alpha_hat.value + 1) <= std::max(3 * alpha_hat.half_width, kGaussPinned)) {
        v.conclusion = Conclusion::Diverges;
        v.estimate = partial_form(0.0, 1.0);
        v.notes.push_back("gauss: p = -1, a_n ~ c/n, so sum |a_n| = inf");
    } else if (alpha_hat.value < -1) {
        v.conclusion = Conclusion::Converges;
        v.estimate = tail_form(alpha_hat.value + 1, 0.0);
        v.notes.push_back("gauss: a_n ~ c n^p with p < -1, so sum |a_n| < inf");
    } else {
        v.conclusion = Conclusion::Diverges;
        v.estimate = partial_form(alpha_hat.value + 1, 0.0);
        v.notes.push_back("gauss: a_n ~ c n^p with p > -1, so sum |a_n| = inf");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Refined weights

Verdict refined_test(const DiagnosticSeries& beta_series, const LimitEstimate& alpha_hat, double tol)
{
    Verdict v;
    v.alpha_hat = alpha_hat;
    if (!beta_series.family || beta_series.beta.size() != beta_series.grid.size()) {
        v.notes.push_back("refined: no second-order samples");
        return v;
    }
    const WeightFamily family = *beta_series.family;
    v.beta_family = family;
    const auto beta = try_extrapolate(beta_series.grid, beta_series.beta, tol);
    if (!beta) {
        v.notes.push_back("refined (" + family.name() + "): b(n)(alpha(n) - alpha) is not finite");
        return v;
    }
    v.beta_hat = *beta;
    const double a = beta_series.alpha_hat;
    const std::string stat = family == WeightFamily::power(1) && a == -1.0
                                 ? std::string("n(alpha(n)+1)")
                                 : "b(n)(alpha(n) - (" + num(a) + ")), b = " + family.name();

    if (family.inverse_sum_converges()) {
        // |a_n| ~ C n^alpha once b(n)(alpha(n) - alpha) is bounded and sum 1/(k b(k)) < inf.
        if (!beta->decisive) {
            v.notes.push_back("refined: " + stat + " has no decisive limit (" + pm(*beta) +
                              "); boundedness hypothesis not met");
            return v;
        }
        v.decided_by = "refined";
        v.notes.push_back("refined: " + stat + " -> " + num_with_fraction(beta->value, beta->half_width) +
                          " (bounded; sum 1/(k b(k)) < inf), so |a_n| ~ C n^" + num(a));
        if (a < -1) {
            v.conclusion = Conclusion::Converges;
            v.estimate = tail_form(a + 1, 0.0);
        } else if (a == -1.0) {
            v.conclusion = Conclusion::Diverges;
            v.estimate = partial_form(0.0, 1.0);
        } else {
            v.conclusion = Conclusion::Diverges;
            v.estimate = partial_form(a + 1, 0.0);
        }
        return v;
    }

    if (!beta->decisive) {
        v.notes.push_back("refined (" + family.name() + "): no decisive limit of " + stat + " (" + pm(*beta) + ")");
        return v;
    }
    const double b = beta->value;
    const double band = band_width(*beta, tol);
    const double s = a + b;
    if (b >= -band && s < -1 - band) {
        v.conclusion = Conclusion::Converges;
        v.decided_by = "refined";
        v.estimate = tail_form(s + 1 + kEnvelopeEps, 0.0);
        v.notes.push_back("refined (" + family.name() + "): beta = " + pm(*beta) + " >= 0 and alpha + beta = " +
                          num(s) + " < -1; |a_n| <= n^(alpha+beta+eps), eps = " + num(kEnvelopeEps));
    } else if (b <= band && s > -1 + band) {
        v.conclusion = Conclusion::Diverges;
        v.decided_by = "refined";
        v.estimate = partial_form(s + 1 - kEnvelopeEps, 0.0);
        v.notes.push_back("refined (" + family.name() + "): beta = " + pm(*beta) + " <= 0 and alpha + beta = " +
                          num(s) + " > -1; |a_n| >= n^(alpha+beta-eps), eps = " + num(kEnvelopeEps));
    } else {
        v.notes.push_back("refined (" + family.name() + "): beta = " + pm(*beta) + ", alpha + beta = " + num(s) +
                          "; neither one-sided bound applies");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Bertrand

Verdict bertrand_test(const LimitEstimate& alpha_hat, const LimitEstimate& beta_hat, double tol)
{
    Verdict v;
    v.alpha_hat = alpha_hat;
    v.beta_hat = beta_hat;
    v.beta_family = WeightFamily::log();
    if (!beta_hat.decisive) {
        v.notes.push_back("bertrand: log n (alpha(n) - alpha) has no decisive limit (" + pm(beta_hat) + ")");
        return v;
    }
    if (!alpha_hat.decisive) {
        v.notes.push_back("bertrand: alpha has no decisive limit");
        return v;
    }
    const double b = beta_hat.value;
    const std::string eps = num(kEnvelopeEps);
    if (in_minus_one_band(alpha_hat, tol)) {
        if (std::abs(b + 1) <= band_width(beta_hat, tol)) {
            v.notes.push_back("bertrand: case (v), alpha = -1 and beta = " + pm(beta_hat) +
                              " = -1; the test gives no conclusion");
            return v;
        }
        v.decided_by = "bertrand";
        if (b > -1) {
            v.conclusion = Conclusion::Diverges;
            v.estimate = partial_form(0.0, b + 1);
            v.notes.push_back("bertrand: case (iii), alpha = -1, beta = " + pm(beta_hat) +
                              " > -1; (log n)^(beta+1-eps) <= S_n <= (log n)^(beta+1+eps), eps = " + eps);
        } else {
            v.conclusion = Conclusion::Converges;
            v.estimate = tail_form(0.0, b + 1);
            v.notes.push_back("bertrand: case (iv), alpha = -1, beta = " + pm(beta_hat) +
                              " < -1; tail between (log n)^(beta+1-eps) and (log n)^(beta+1+eps), eps = " + eps);
        }
        return v;
    }
    v.decided_by = "bertrand";
    const double a = alpha_hat.value;
    if (a < -1) {
        v.conclusion = Conclusion::Converges;
        v.estimate = tail_form(a + 1, b);
        v.notes.push_back("bertrand: case (i), alpha = " + num(a) + " < -1; tail ~ n^(alpha+1) (log n)^(beta+-eps)");
    } else {
        v.conclusion = Conclusion::Diverges;
        v.estimate = partial_form(a + 1, b);
        v.notes.push_back("bertrand: case (ii), alpha = " + num(a) +
                          " > -1; S_n ~ n^(alpha+1) (log n)^(beta+-eps)");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Accumulation

AccumulationTrace accumulation_trace(const TermSource& src, double alpha, const std::vector<Index>& grid)
{
    AccumulationTrace t;
    t.alpha = alpha;
    auto alpha_at = [&](Index k) { return static_cast<double>(k) * src.abs_ratio_m1(k); };
    for (Index n : grid) {
        if (std::abs(alpha_at(n) - alpha) < 0.5) {
            t.k0 = n;
            break;
        }
    }
    if (t.k0 == 0 || grid.empty()) {
        return t;
    }
    t.c0 = src.term(t.k0).logmag;
    TwoSumAccumulator b, d, h;
    t.min_B = std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    while (next < grid.size() && grid[next] < t.k0) {
        ++next;
    }
    for (Index k = t.k0; k <= grid.back(); ++k) {
        const double ak = alpha_at(k);
        const double x = static_cast<double>(k);
        b.add((ak - alpha) / x);
        d.add(std::log1p(ak / x) - ak / x);
        h.add(1.0 / x);
        t.min_B = std::min(t.min_B, b.value());
        if (next < grid.size() && k == grid[next]) {
            const double e = h.value() - std::log(x);
            t.checkpoints.push_back(k);
            t.B.push_back(b.value());
            t.D.push_back(d.value());
            t.E.push_back(e);
            t.Q.push_back(t.c0 + d.value() + alpha * e);
            ++next;
        }
    }
    return t;
}

Verdict accumulation_test(const AccumulationTrace& trace, const LimitEstimate& alpha_hat, double tol)
{
    Verdict v;
    v.alpha_hat = alpha_hat;
    if (!alpha_hat.decisive || alpha_hat.value < -1 - band_width(alpha_hat, tol)) {
        v.notes.push_back("accumulation: needs alpha >= -1");
        return v;
    }
    if (trace.k0 == 0 || trace.checkpoints.size() < 2) {
        v.notes.push_back("accumulation: no grid index with |alpha(k) - alpha| < 0.5");
        return v;
    }
    const std::string range = "[" + std::to_string(trace.k0) + ", " + std::to_string(trace.checkpoints.back()) + "]";
    if (trace.min_B >= 0) {
        v.conclusion = Conclusion::Diverges;
        v.decided_by = "accumulation";
        v.estimate = partial_form(trace.alpha + 1, 0.0);
        v.notes.push_back("accumulation: B(n) >= 0 for every n in " + range + " (checked range only)");
        return v;
    }
    std::vector<double> inc;
    for (std::size_t j = 1; j < trace.B.size(); ++j) {
        inc.push_back(std::abs(trace.B[j] - trace.B[j - 1]));
    }
    bool geometric = inc.size() >= 4;
    for (std::size_t j = inc.size() >= 3 ? inc.size() - 3 : 0; geometric && j < inc.size(); ++j) {
        geometric = inc[j - 1] > 0 ? inc[j] <= 0.75 * inc[j - 1] : inc[j] == 0.0;
    }
    if (geometric) {
        v.conclusion = Conclusion::Diverges;
        v.decided_by = "accumulation";
        v.estimate = partial_form(trace.alpha + 1, 0.0);
        v.notes.push_back("accumulation: B(n) -> " + num(trace.B.back()) +
                          " (octave increments shrink geometrically on " + range + ")");
        return v;
    }
    v.notes.push_back("accumulation: B(n) goes negative (min " + num(trace.min_B) + ") without settling on " +
                      range);
    return v;
}

// ---------------------------------------------------------------------------
// Doubling

Verdict doubling_test(const TermSource& src, const std::vector<Index>& grid, double tol)
{
    Verdict v;
    if (grid.size() < 4) {
        v.notes.push_back("doubling: grid too short");
        return v;
    }
    for (std::size_t i = grid.size() - 4; i < grid.size(); ++i) {
        const double r = src.abs_ratio_m1(grid[i]);
        if (!(std::abs(r) < 0.01)) {
            v.notes.push_back("doubling: skipped, c_{n+1}/c_n does not approach 1 (n = " + std::to_string(grid[i]) +
                              ", ratio - 1 = " + num(r) + ")");
            return v;
        }
    }
    const auto d = doubling_ratios(src, grid);
    const std::string window = "c_2n/c_n in [" + num(d.tail_inf) + ", " + num(d.tail_sup) + "] on the tail";
    if (d.tail_inf > 0.5 + kDoublingMargin) {
        v.conclusion = Conclusion::Diverges;
        v.decided_by = "doubling";
        v.notes.push_back("doubling: " + window + ", inf > 1/2 + " + num(kDoublingMargin));
        return v;
    }
    if (d.tail_sup < 0.5 - kDoublingMargin) {
        // Ratios creeping toward 1/2 (as for 1/(n log n)) do not count.
        const auto lim = try_extrapolate(grid, d.ratios, tol);
        const double spread = d.tail_sup - d.tail_inf;
        if (lim && lim->decisive && lim->value + std::max(lim->half_width, spread) < 0.5 - kDoublingMargin) {
            v.conclusion = Conclusion::Converges;
            v.decided_by = "doubling";
            v.notes.push_back("doubling: " + window + ", limit " + pm(*lim) + " < 1/2 - " + num(kDoublingMargin));
            return v;
        }
        v.notes.push_back("doubling: " + window + " but the ratios have no settled limit below 1/2");
        return v;
    }
    v.notes.push_back("doubling: " + window + " straddles 1/2");
    return v;
}

// ---------------------------------------------------------------------------
// Karamata

namespace {

double sum_range_positive(const TermSource& src, Index n)
{
    TwoSumAccumulator acc;
    for (Index k = src.first_index(); k <= n; ++k) {
        acc.add(std::exp(src.term(k).logmag));
    }
    return acc.value();
}

} // namespace

AsymptoticEstimate karamata_estimate(const TermSource& src, const LimitEstimate& alpha_hat, Index n, double tol)
{
    if (!alpha_hat.decisive) {
        throw std::invalid_argument("karamata estimate needs a decisive index");
    }
    const auto t = src.term(n);
    if (t.sign <= 0) {
        throw TermError("karamata estimate needs positive terms", n);
    }
    const double a = alpha_hat.value;
    const double x = static_cast<double>(n);
    const double log_ncn = std::log(x) + t.logmag;
    AsymptoticEstimate e;
    e.at_n = n;
    if (in_minus_one_band(alpha_hat, tol)) {
        const double s = sum_range_positive(src, n);
        e.target = AsymptoticEstimate::Target::PartialSum;
        e.ratio_diagnostic = std::exp(log_ncn) / s;
        return e;
    }
    e.p = a + 1;
    const double denom = a > -1 ? a + 1 : -1 - a;
    e.target = a > -1 ? AsymptoticEstimate::Target::PartialSum : AsymptoticEstimate::Target::TailSum;
    e.C = std::exp(log_ncn - std::log(denom) - e.p * std::log(x));
    return e;
}

// ---------------------------------------------------------------------------
// Ladder

namespace {

struct SignPattern {
    bool all_same = true;
    bool alternating = true;
    int sign = 0;
};

SignPattern probe_signs(const TermSource& src, const std::vector<Index>& grid)
{
    std::vector<Index> probes;
    const Index first = src.first_index();
    for (Index k = first; k < first + 64; ++k) {
        probes.push_back(k);
    }
    for (Index n : grid) {
        probes.push_back(n);
    }
    SignPattern p;
    for (Index k : probes) {
        const int s = src.term(k).sign;
        const int t = src.term(k + 1).sign;
        if (s == 0 || t == 0) {
            throw TermError("zero term", s == 0 ? k : k + 1);
        }
        if (p.sign == 0) {
            p.sign = s;
        }
        p.all_same = p.all_same && s == p.sign && t == p.sign;
        p.alternating = p.alternating && t == -s;
    }
    return p;
}

void append_notes(Verdict& into, const Verdict& from)
{
    into.notes.insert(into.notes.end(), from.notes.begin(), from.notes.end());
}

// Adopts a decisive rung result, keeping the trail of notes.
Verdict adopt(Verdict trail, const Verdict& rung)
{
    trail.conclusion = rung.conclusion;
    trail.decided_by = rung.decided_by;
    if (rung.beta_hat) {
        trail.beta_hat = rung.beta_hat;
        trail.beta_family = rung.beta_family;
    }
    trail.estimate = rung.estimate;
    append_notes(trail, rung);
    return trail;
}

void calibrate_estimate(Verdict& v, const TermSource& a, Index n, double tol)
{
    if (!v.estimate || v.estimate->C) {
        return;
    }
    const auto& e = *v.estimate;
    if (e.target == AsymptoticEstimate::Target::PartialSum && e.p == 0.0 && e.q == 1.0 &&
        (v.decided_by == "gauss" || v.decided_by == "refined")) {
        v.estimate = log_partial_sum(a, n);
        v.notes.push_back("estimate: S_n ~ c log n with c = n|a_n| at n = " + std::to_string(n));
        return;
    }
    if (e.q == 0.0 && v.alpha_hat.decisive && !in_minus_one_band(v.alpha_hat, tol) &&
        std::abs(e.p - (v.alpha_hat.value + 1)) < 1e-12) {
        v.estimate = karamata_estimate(a, v.alpha_hat, n, tol);
        const bool partial = v.estimate->target == AsymptoticEstimate::Target::PartialSum;
        v.notes.push_back(std::string("estimate: ") + (partial ? "S_n ~ n a_n/(alpha+1)" : "tail ~ n a_n/(-1-alpha)") +
                          " calibrated at n = " + std::to_string(n));
    }
}

Verdict run_positive(const TermSource& a, const LadderConfig& config)
{
    const double tol = config.tol;
    Verdict v;
    const auto grid = default_grid(a.first_index(), config.n_max);
    if (grid.size() < 4) {
        v.notes.push_back("fewer than 4 grid points below n_max");
        return v;
    }
    const auto diag = raabe_statistic(a, grid);
    const auto est = extrapolate_slow(grid, diag.alpha, tol);
    if (est) {
        v.alpha_hat = *est;
        if (est->model != "v + c1/n + c2/n^2") {
            v.notes.push_back("raabe: alpha(n) settles like 1/log n; limit from the fit " + est->model);
        }
    } else {
        v.alpha_hat.value = std::numeric_limits<double>::quiet_NaN();
        v.alpha_hat.half_width = std::numeric_limits<double>::infinity();
        v.notes.push_back("raabe: alpha(n) samples are not finite");
    }
    const LimitEstimate& alpha = v.alpha_hat;

    bool alpha_usable = alpha.decisive;
    if (alpha_usable) {
        const double dev = rs_envelope_deviation(a, alpha.value, grid);
        if (dev > 0.25) {
            alpha_usable = false;
            v.notes.push_back("alpha-based rungs skipped: |a_[xn]|/|a_n| deviates from x^alpha by " + num(dev) +
                              " (not regularly varying on the probed range)");
        }
    }
    const bool band = alpha_usable && in_minus_one_band(alpha, tol);
    auto finish = [&](Verdict rung) {
        Verdict out = adopt(std::move(v), rung);
        calibrate_estimate(out, a, grid.back(), tol);
        return out;
    };

    auto run_refined = [&](const WeightFamily& family) -> std::optional<Verdict> {
        if (!alpha_usable) {
            return std::nullopt;
        }
        const double a_used = band ? -1.0 : alpha.value;
        Verdict r;
        try {
            r = refined_test(second_order_statistic(a, a_used, family, grid), alpha, tol);
        } catch (const std::invalid_argument& e) {
            v.notes.push_back(std::string("refined: ") + e.what());
            return std::nullopt;
        }
        if (r.conclusion != Conclusion::Inconclusive) {
            return r;
        }
        append_notes(v, r);
        if (!v.beta_hat && r.beta_hat) {
            v.beta_hat = r.beta_hat;
            v.beta_family = r.beta_family;
        }
        return std::nullopt;
    };

    // raabe
    if (alpha_usable) {
        const Verdict r = raabe_test(alpha, tol);
        if (r.conclusion != Conclusion::Inconclusive) {
            return finish(r);
        }
        append_notes(v, r);
    } else {
        if (est) {
            v.notes.push_back("raabe: alpha = " + pm(alpha) + " is not decisive");
        }
        const Verdict r = raabe_unbounded_test(diag);
        if (r.conclusion != Conclusion::Inconclusive) {
            return finish(r);
        }
    }

    if (config.family) {
        if (auto r = run_refined(*config.family)) {
            return finish(*r);
        }
    }

    // gauss
    if (alpha_usable) {
        const Verdict r = gauss_test(diag, alpha, tol);
        if (r.conclusion != Conclusion::Inconclusive) {
            return finish(r);
        }
        append_notes(v, r);
    }

    if (!config.family) {
        if (auto r = run_refined(WeightFamily::power(1))) {
            return finish(*r);
        }
    }

    // bertrand, with alpha = -1 either measured or as a hypothesis that a
    // decisive log n (alpha(n) + 1) confirms
    bool minus_one = band;
    LimitEstimate alpha_for_b = alpha;
    if (!alpha.decisive) {
        const auto log_diag = second_order_statistic(a, -1.0, WeightFamily::log(), grid);
        const auto b = extrapolate_slow(grid, log_diag.beta, tol);
        if (b && b->decisive && rs_envelope_deviation(a, -1.0, grid) <= 0.25) {
            minus_one = true;
            alpha_for_b = hypothesis_minus_one();
            v.notes.push_back("bertrand: alpha(n) has no decisive limit, but log n (alpha(n) + 1) -> " + pm(*b) +
                              ", so alpha(n) -> -1");
        }
    }
    if (minus_one) {
        const auto log_diag = second_order_statistic(a, -1.0, WeightFamily::log(), grid);
        const auto b = extrapolate_slow(grid, log_diag.beta, tol);
        if (b) {
            const Verdict r = bertrand_test(alpha_for_b, *b, tol);
            if (r.conclusion != Conclusion::Inconclusive) {
                return finish(r);
            }
            append_notes(v, r);
            v.beta_hat = b;
            v.beta_family = WeightFamily::log();
        }

        // accumulation
        const auto trace = accumulation_trace(a, -1.0, grid);
        const Verdict acc = accumulation_test(trace, alpha_for_b, tol);
        if (acc.conclusion != Conclusion::Inconclusive) {
            return finish(acc);
        }
        append_notes(v, acc);
    }

    // doubling
    const Verdict d = doubling_test(a, grid, tol);
    if (d.conclusion != Conclusion::Inconclusive) {
        return finish(d);
    }
    append_notes(v, d);
    return v;
}

} // namespace

Verdict run_ladder(const TermSource& src, const LadderConfig& config)
{
    Verdict v;
    try {
        const auto grid = default_grid(src.first_index(), config.n_max);
        const SignPattern signs = probe_signs(src, grid);
        if (signs.all_same) {
            v = run_positive(src.abs(), config);
            if (signs.sign < 0) {
                v.notes.insert(v.notes.begin(), "all probed terms are negative; analyzing -a_n");
            }
            return v;
        }
        if (signs.alternating) {
            return analyze_alternating(src, config);
        }
        const Verdict abs = run_positive(src.abs(), config);
        v = abs;
        v.absolute_conclusion = abs.conclusion;
        v.notes.insert(v.notes.begin(), "terms change sign without strict alternation; ladder applied to |a_n|");
        if (abs.conclusion == Conclusion::Converges) {
            v.decided_by = "absolute:" + abs.decided_by;
            v.notes.push_back("sum |a_n| < inf, so sum a_n converges absolutely");
        } else {
            v.conclusion = Conclusion::Inconclusive;
            v.decided_by.clear();
            v.estimate.reset();
            v.notes.push_back("sum |a_n| does not converge; no conclusion for sum a_n");
        }
        return v;
    } catch (const std::exception& e) {
        Verdict err;
        err.notes = v.notes;
        err.notes.push_back(std::string("error: ") + e.what());
        return err;
    }
}

Verdict run_positive_ladder(const TermSource& a, const LadderConfig& config) { return run_positive(a, config); }

} // namespace rvs
