#include "rvs/classify.hpp"
#include "rvs/verdict.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rvs {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_alternation(const TermSource& src, const std::vector<Index>& grid)
{
    std::vector<Index> probes;
    for (Index k = src.first_index(); k < src.first_index() + 64; ++k) {
        probes.push_back(k);
    }
    probes.insert(probes.end(), grid.begin(), grid.end());
    for (Index k : probes) {
        const int s = src.term(k).sign;
        const int t = src.term(k + 1).sign;
        if (s == 0 || t != -s) {
            throw std::invalid_argument("input does not alternate strictly at n = " + std::to_string(k));
        }
    }
}

// One sign for all probed k, or 0.
int one_sign(const TermSource& d, const std::vector<Index>& grid)
{
    int sign = 0;
    auto check = [&](Index k) {
        const int s = d.term(k).sign;
        if (s == 0) {
            return false;
        }
        if (sign == 0) {
            sign = s;
        }
        return s == sign;
    };
    // Early terms may have either sign; only the tail matters.
    for (Index n : grid) {
        for (Index k = n; k < n + 8; ++k) {
            if (!check(k)) {
                return 0;
            }
        }
    }
    return sign;
}

} // namespace

TermSource pair_difference_source(const TermSource& src)
{
    const Index k0 = std::max<Index>(1, (src.first_index() + 1) / 2);
    auto term = [src](Index k) {
        const auto b = src.term(2 * k);
        const double r = src.abs_ratio_m1(2 * k);
        if (r == 0.0) {
            return SignedLogValue::zero();
        }
        return SignedLogValue::from_log(r > 0 ? 1 : -1, b.logmag + std::log(std::abs(r)));
    };
    return TermSource::from_terms("pair_diff(" + src.name() + ")", k0, term)
        .with_formula("|p(2k+1)| - |p(2k)|");
}

Verdict analyze_alternating(const TermSource& src, const LadderConfig& config)
{
    const double tol = config.tol;
    const auto grid = default_grid(src.first_index(), config.n_max);
    require_alternation(src, grid);
    const TermSource a = src.abs();

    Verdict v;
    const Verdict absolute = run_positive_ladder(a, config);
    v.absolute_conclusion = absolute.conclusion;
    v.notes.push_back("absolute series: " + to_string(absolute.conclusion) +
                      (absolute.decided_by.empty() ? std::string() : " (" + absolute.decided_by + ")"));

    const auto diag = raabe_statistic(a, grid);
    std::optional<LimitEstimate> est;
    try {
        est = extrapolate_limit(grid, diag.alpha, tol);
    } catch (const std::invalid_argument&) {
    }
    if (est) {
        v.alpha_hat = *est;
    }
    const Index n = grid.back();
    const double zero_band = est ? std::max(tol, 3 * est->half_width) : 0.0;

    if (est && est->decisive && est->value < -1 && !in_minus_one_band(*est, tol)) {
        v.conclusion = Conclusion::Converges;
        v.decided_by = "alternating:absolute";
        v.notes.push_back("alternating: alpha = " + num(est->value) + " < -1, both halves converge");
        return v;
    }
    if (est && est->decisive && std::abs(est->value) > zero_band) {
        const double alpha = est->value;
        AsymptoticEstimate e;
        e.p = alpha;
        e.at_n = n;
        // 2^(alpha-1) a_n written as C n^alpha
        e.C = std::exp((alpha - 1) * std::log(2.0) + a.term(n).logmag - alpha * std::log(static_cast<double>(n)));
        v.decided_by = "alternating:even-odd";
        if (alpha < 0) {
            v.conclusion = Conclusion::Converges;
            e.target = AsymptoticEstimate::Target::TailSum;
            v.notes.push_back("alternating: alpha = " + num(alpha) +
                              " in (-1, 0); sum_{k>=n} (c_k - b_k) ~ -2^(alpha-1) a_n -> 0");
        } else {
            v.conclusion = Conclusion::Diverges;
            e.target = AsymptoticEstimate::Target::PartialSum;
            v.notes.push_back("alternating: alpha = " + num(alpha) + " > 0; sum (c_k - b_k) ~ 2^(alpha-1) a_n -> inf");
        }
        v.estimate = e;
        return v;
    }

    v.notes.push_back(est ? "alternating: alpha = " + num(est->value) + " +- " + num(est->half_width) +
                                " is 0 or undecided; summing c_k - b_k"
                          : "alternating: no finite Raabe limit; summing c_k - b_k");
    const TermSource d = pair_difference_source(src);
    const Index k_max = config.n_max / 2;
    const auto k_grid = default_grid(d.first_index(), k_max);
    const int sign = one_sign(d, k_grid);
    if (sign == 0) {
        v.notes.push_back("alternating: c_k - b_k changes sign on the tail; no conclusion");
        return v;
    }
    LadderConfig sub = config;
    sub.n_max = k_max;
    const Verdict r = run_positive_ladder(d.abs(), sub);
    v.beta_hat = r.beta_hat;
    v.beta_family = r.beta_family;
    for (const auto& note : r.notes) {
        v.notes.push_back("pair differences: " + note);
    }
    if (r.conclusion == Conclusion::Inconclusive) {
        return v;
    }
    v.conclusion = r.conclusion;
    v.decided_by = "alternating:pair-differences:" + r.decided_by;
    if (r.conclusion == Conclusion::Converges) {
        // Grouped sums converge; the ungrouped series also needs a_n -> 0.
        std::vector<double> mags;
        for (Index k : grid) {
            mags.push_back(std::exp(a.term(k).logmag));
        }
        const auto lim = log_corrected_fit(grid, mags, tol);
        if (std::abs(lim.value) > 0.5 * mags.back()) {
            v.notes.push_back("alternating: |a_n| -> " + num(lim.value) +
                              " != 0; the even/odd grouped sums converge, the ungrouped partial sums oscillate");
        }
    }
    return v;
}

} // namespace rvs
