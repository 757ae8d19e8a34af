// Acceptance gate: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include "rvs/catalog.hpp"
#include "rvs/classify.hpp"
#include "rvs/expr.hpp"
#include "rvs/oracle.hpp"
#include "rvs/report.hpp"
#include "rvs/verdict.hpp"

#include "naive_eval.hpp"

#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rvs;

namespace {

// Tolerances, pinned.
constexpr double kIndexTol = 1e-3;          // 2
constexpr double kSecondOrderTol = 1e-2;    // 3
constexpr double kKaramataBand = 0.01;      // 4
constexpr double kKaramataNearBand = 0.05;  // 4, |alpha + 1| <= 0.1
constexpr double kTrendFactor = 2.0;        // 4
constexpr double kDifferenceRel = 0.05;     // 5
constexpr double kRoundTripTol = 2e-3;      // 6
constexpr double kLogRatioTol = 0.05;       // 6
constexpr double kEnvelopeEps = 0.05;       // 7
constexpr double kParserRel = 1e-9;         // 8
constexpr double kRuntimeLimit = 30.0;      // 1, seconds

struct Report {
    std::vector<std::string> details;
    bool ok = true;

    void detail(const std::string& s) { details.push_back(s); }
    void check(bool cond, const std::string& s)
    {
        details.push_back(std::string(cond ? "ok   " : "BAD  ") + s);
        ok = ok && cond;
    }
};

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string num(double v) { return fmt("%.6g", v); }

int failures = 0;

void emit(int id, const std::string& title, const Report& r)
{
    std::printf("%s %d %s\n", r.ok ? "PASS" : "FAIL", id, title.c_str());
    for (const auto& d : r.details) {
        std::printf("    %s\n", d.c_str());
    }
    std::fflush(stdout);
    failures += !r.ok;
}

bool matches(Expected e, Conclusion c)
{
    return (e == Expected::Converges && c == Conclusion::Converges) ||
           (e == Expected::Diverges && c == Conclusion::Diverges);
}

bool contradicts(Expected e, Conclusion c)
{
    return (e == Expected::Converges && c == Conclusion::Diverges) ||
           (e == Expected::Diverges && c == Conclusion::Converges);
}

LimitEstimate alpha_of(const TermSource& src, Index n_max = kDefaultNMax)
{
    const auto grid = default_grid(src.first_index(), n_max);
    return extrapolate_limit(grid, raabe_statistic(src.abs(), grid).alpha);
}

TermSource power_source(double p)
{
    const std::string text = "n^(" + format_double(p) + ")";
    return expression_source(parse(text), text);
}

// ---------------------------------------------------------------------------

void criterion_catalog()
{
    Report r;
    const std::vector<std::string> names = {
        "inverse_square", "inverse_sqrt",      "harmonic",          "inv_nlogn",        "inv_nlog2n",
        "logn_over_n",    "raabe_product",     "gamma_ratio(-1)",   "gamma_ratio(-0.5)", "gamma_ratio(0)",
        "dfact_wallis",   "dfact_ratio_pow(1)", "dfact_ratio_sq",   "dfact_ratio_pow(3)", "gauss_telescoping"};
    const auto t0 = std::chrono::steady_clock::now();
    int reproduced = 0;
    for (const auto& name : names) {
        const auto e = entry_or_throw(name);
        LadderConfig lc;
        lc.family = e.family;
        const Verdict v = run_ladder(e.source, lc);
        const bool contra = contradicts(e.verdict, v.conclusion);
        bool good = matches(e.verdict, v.conclusion);
        std::string extra;
        if (name == "inv_nlogn" && v.conclusion == Conclusion::Inconclusive) {
            // Allowed to stay open, but the report must carry the oracle's view.
            AnalyzeOptions opt;
            opt.family = e.family;
            const auto rep = analyze("name", name, e.source, opt);
            bool oracle_note = false;
            for (const auto& n : rep.verdict.notes) {
                oracle_note = oracle_note || n.rfind("oracle:", 0) == 0;
            }
            good = oracle_note && rep.oracle.has_value();
            extra = oracle_note ? " (inconclusive allowed; oracle note present)" : " (oracle note missing)";
        }
        reproduced += good;
        r.check(good && !contra, name + ": expected " + to_string(e.verdict) + ", got " + to_string(v.conclusion) +
                                     (v.decided_by.empty() ? "" : " by " + v.decided_by) + extra);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.check(reproduced >= 12, std::to_string(reproduced) + " of " + std::to_string(names.size()) +
                                  " entries reproduced (need >= 12)");
    r.check(secs < kRuntimeLimit, "runtime " + fmt("%.2f", secs) + " s (limit 30 s)");
    emit(1, "catalog verdict table", r);
}

void criterion_index_recovery()
{
    Report r;
    auto check = [&](const std::string& label, const TermSource& src, double expected) {
        const auto est = alpha_of(src);
        const double err = std::abs(est.value - expected);
        r.check(err <= kIndexTol, label + ": alpha_hat = " + num(est.value) + ", analytic " + num(expected) +
                                      ", |err| = " + fmt("%.2e", err));
    };
    for (double p : {0.5, 1.0, 2.0}) {
        check("1/n^" + num(p), power_source(-p), -p);
    }
    for (double b : {-1.0, -0.5, 0.0}) {
        const auto e = entry_or_throw("gamma_ratio(" + num(b) + ")");
        check(e.name, e.source, b - 0.5);
    }
    for (double a : {1.0, 2.0, 3.0}) {
        const auto e = entry_or_throw(a == 2.0 ? "dfact_ratio_sq" : "dfact_ratio_pow(" + num(a) + ")");
        check(e.name, e.source, -a / 2);
    }
    check("dfact_wallis", entry_or_throw("dfact_wallis").source, -1.0);
    emit(2, "index recovery", r);
}

void criterion_second_order()
{
    Report r;
    auto check = [&](const std::string& name, double expected, const std::string& label) {
        const auto e = entry_or_throw(name);
        const auto a = e.source.abs();
        const auto grid = default_grid(a.first_index(), kDefaultNMax);
        const auto s = second_order_statistic(a, -1.0, WeightFamily::power(1), grid);
        const auto lim = extrapolate_limit(grid, s.beta);
        const double err = std::abs(lim.value - expected);
        r.check(err <= kSecondOrderTol, name + ": n(alpha(n)+1) -> " + num(lim.value) + ", expected " + label +
                                            ", |err| = " + fmt("%.2e", err));
    };
    check("dfact_ratio_sq", 1.25, "5/4");
    check("dfact_wallis", 1.0, "1");
    {
        // Closed form of the same statistic from the ratio 4n^2/(2n+1)^2.
        const long double m = 1e6L;
        const long double exact = m * (m * (4 * m * m / ((2 * m + 1) * (2 * m + 1)) - 1) + 1);
        r.detail("(dfact_wallis closed form: n(alpha(n)+1) = n(3n+1)/(2n+1)^2 = " +
                 fmt("%.9f", static_cast<double>(exact)) + " at n = 1e6, limit 3/4)");
    }
    check("gamma_ratio(-0.5)", 19.0 / 16.0, "19/16");
    check("raabe_product", 0.5, "1/2");
    emit(3, "second-order limits", r);
}

void criterion_karamata()
{
    Report r;
    const Index n = 100000;
    const Index n_far = Index{1} << 22;
    for (double alpha : {-3.0, -2.0, -1.5, -0.5, 0.0, 1.0}) {
        const auto src = power_source(alpha);
        const auto est = alpha_of(src);
        const auto k = karamata_estimate(src, est, n, kDefaultTol);
        const double predicted = estimate_value(k, n);
        double truth = 0.0;
        if (alpha < -1) {
            truth = tail_sum(src, n, n_far, [alpha](Index m) { return power_law_remainder(alpha, m); });
        } else {
            truth = sum_range(src, 1, n).value();
        }
        const double ratio = predicted / truth;
        const double band = std::abs(alpha + 1) <= 0.1 ? kKaramataNearBand : kKaramataBand;
        r.check(std::abs(ratio - 1) <= band, "n^" + num(alpha) + ": " + to_string(k.target) +
                                                 " estimate/oracle at n = 1e5 is " + fmt("%.6f", ratio));
    }
    for (const auto& e : catalog()) {
        if (e.alternating || !e.alpha || *e.alpha != -1.0) {
            continue;
        }
        const auto a = e.source.abs();
        auto ratio_at = [&](Index m) {
            const double s = sum_range(a, a.first_index(), m).value();
            return static_cast<double>(m) * std::exp(a.term(m).logmag) / s;
        };
        const double r3 = ratio_at(1000);
        const double r6 = ratio_at(1000000);
        r.check(r3 / r6 >= kTrendFactor, e.name + ": n c_n/S_n " + num(r3) + " at 1e3 -> " + num(r6) +
                                              " at 1e6, factor " + fmt("%.3f", r3 / r6) + " (need >= 2)");
    }
    emit(4, "Karamata ratios", r);
}

void criterion_alternating()
{
    Report r;
    struct Case {
        std::string label;
        std::string name;
        Expected expected;
    };
    const std::vector<Case> cases = {
        {"example 1", "alt_inv_log", Expected::Converges},
        {"example 2", "alt_log", Expected::Diverges},
        {"example 3, b = -1", "alt_gamma_ratio(-1)", Expected::Converges},
        {"example 3, b = 0", "alt_gamma_ratio(0)", Expected::Converges},
        {"example 3, b = 1", "alt_gamma_ratio(1)", Expected::Diverges},
        {"example 4", "alt_exp_pow(-0.5)", Expected::Converges},
    };
    for (const auto& c : cases) {
        const auto e = entry_or_throw(c.name);
        const auto v = run_ladder(e.source);
        r.check(matches(c.expected, v.conclusion), c.label + " (" + c.name + "): expected " +
                                                       to_string(c.expected) + ", got " + to_string(v.conclusion) +
                                                       (v.decided_by.empty() ? "" : " by " + v.decided_by));
    }
    // c_k - b_k sits at original index m = 2k; compare there.
    const auto d = pair_difference_source(entry_or_throw("alt_inv_log").source);
    const Index k = 5000;
    const double m = 2.0 * k;
    const double got = d.term(k).to_real();
    const double ref = -1.0 / (m * std::log(m) * std::log(m));
    const double rel = std::abs(got / ref - 1);
    r.check(rel <= kDifferenceRel, "example 1 difference at n = 1e4 (k = 5000): " + num(got) +
                                       " vs -1/(n (log n)^2) = " + num(ref) + ", rel " + fmt("%.2e", rel));
    const double ref_k = -1.0 / (k * std::log(double(k)) * std::log(double(k)));
    r.detail("(same difference against -1/(k (log k)^2) in the pair index: ratio " + fmt("%.4f", got / ref_k) + ")");
    emit(5, "alternating suite", r);
}

void criterion_round_trip()
{
    Report r;
    struct Delta {
        std::string label;
        std::function<double(Index)> f;
    };
    const std::vector<Delta> deltas = {
        {"0", [](Index) { return 0.0; }},
        {"1/k", [](Index k) { return 1.0 / static_cast<double>(k); }},
        {"1/log(k+1)", [](Index k) { return 1.0 / std::log(static_cast<double>(k) + 1); }},
    };
    const Index n = 1000000;
    for (double alpha : {-2.0, -1.0, 0.0, 1.0}) {
        for (const auto& d : deltas) {
            RepresentationParams p;
            p.C = 1.0;
            p.alpha = alpha;
            p.delta = d.f;
            p.name = "rs(" + num(alpha) + ", " + d.label + ")";
            const auto src = construct_rs(p);
            const auto cls = classify_variation(src);
            const bool rs = cls.kind == VariationClass::Kind::RS;
            const double err = std::abs(cls.alpha - alpha);
            const double log_ratio = src.term(n).logmag / std::log(static_cast<double>(n));
            const double dev = std::abs(log_ratio - alpha);
            r.check(rs && err <= kRoundTripTol, p.name + ": " + to_string(cls.kind) + "(" + num(cls.alpha) +
                                                    "), |err| = " + fmt("%.2e", err));
            r.check(dev <= kLogRatioTol,
                    p.name + ": log c_n / log n at 1e6 = " + num(log_ratio) + ", |dev| = " + fmt("%.3f", dev));
        }
    }
    emit(6, "representation round trip", r);
}

void criterion_sandwich()
{
    Report r;
    const Index n_max = 1000000;
    const auto ex1 = TermSource::from_terms("exp(floor(log n))", 1, [](Index n) {
        return SignedLogValue::from_log(1, std::floor(std::log(static_cast<double>(n))));
    });
    const double a = 0.5;
    const double b = 0.25;
    const auto ex2 = TermSource::from_terms("exp(a log n + b sin(n) log n)", 3, [a, b](Index n) {
        const double x = static_cast<double>(n);
        return SignedLogValue::from_log(1, a * std::log(x) + b * std::sin(x) * std::log(x));
    });

    // Pointwise bounds, in logs with a rounding allowance.
    const double slack = 1e-12;
    Index bad1 = 0;
    for (Index n = 1; n <= n_max; ++n) {
        const double l = ex1.term(n).logmag;
        const double ln = std::log(static_cast<double>(n));
        bad1 += !(l >= ln - 1 - slack && l <= ln + slack);
    }
    r.check(bad1 == 0, "example 1: n/e <= a_n <= n violated at " + std::to_string(bad1) + " of 1e6 indices");
    Index bad2 = 0;
    for (Index n = 3; n <= n_max; ++n) {
        const double l = ex2.term(n).logmag;
        const double ln = std::log(static_cast<double>(n));
        bad2 += !(l >= (a - b) * ln - slack && l <= (a + b) * ln + slack);
    }
    r.check(bad2 == 0, "example 2: n^(a-b) <= a_n <= n^(a+b) violated at " + std::to_string(bad2) +
                           " of 1e6 - 2 indices");

    const auto grid = default_grid(1, n_max / 2);
    const double x = 2.0;
    auto envelope_check = [&](const std::string& label, const TermSource& src, double lo_exp, double hi_exp) {
        const auto env = ratio_envelope(src, x, grid);
        const bool inside = envelope_within(env, x, lo_exp, hi_exp, kEnvelopeEps);
        r.check(inside, label + ": a_[2n]/a_n in [" + num(env.lo) + ", " + num(env.hi) + "], bounds [" +
                            num(std::pow(x, lo_exp)) + ", " + num(std::pow(x, hi_exp)) + "] +-5%");
    };
    envelope_check("example 1", ex1, 1.0, 1.0);
    envelope_check("example 2", ex2, a - b, a + b);
    emit(7, "sandwich checks", r);
}

void criterion_parser()
{
    Report r;
    std::mt19937_64 rng(20240611);
    testing_support::TreeGenerator gen(rng, 5);
    int compared = 0;
    int relative_ok = 0;
    int conditioned_ok = 0;
    int attempts = 0;
    std::string first_bad;
    while (compared < 1000 && attempts < 100000) {
        ++attempts;
        const auto tree = gen.tree();
        const Index n = gen.index();
        const auto naive = testing_support::naive_eval(*tree, static_cast<double>(n));
        if (!naive.valid || !std::isfinite(naive.value) || naive.value == 0.0 || std::abs(naive.value) > 1e300 ||
            std::abs(naive.value) < 1e-300) {
            continue;
        }
        const std::string text = testing_support::render(*tree);
        double got = 0.0;
        try {
            got = eval_logdomain(parse(text), n).to_real();
        } catch (const std::exception& e) {
            if (first_bad.empty()) {
                first_bad = text + " at n = " + std::to_string(n) + ": " + e.what();
            }
            ++compared;
            continue;
        }
        ++compared;
        const double diff = std::abs(got - naive.value);
        if (diff <= kParserRel * std::abs(naive.value)) {
            ++relative_ok;
        } else if (diff <= kParserRel * std::abs(naive.value) + 64 * DBL_EPSILON * naive.error) {
            // Cancellation makes both evaluators inexact; the naive side
            // carries a first-order error bound.
            ++conditioned_ok;
        } else if (first_bad.empty()) {
            first_bad = text + " at n = " + std::to_string(n) + ": " + num(got) + " vs " + num(naive.value);
        }
    }
    r.check(compared == 1000, std::to_string(compared) + " random trees (depth <= 5) compared after " +
                                  std::to_string(attempts) + " draws");
    r.check(relative_ok + conditioned_ok == compared,
            std::to_string(relative_ok) + " within 1e-9 relative, " + std::to_string(conditioned_ok) +
                " within 1e-9 relative plus the cancellation bound" +
                (first_bad.empty() ? std::string() : "; first mismatch: " + first_bad));

    struct Bad {
        std::string text;
        std::size_t offset;
    };
    const std::vector<Bad> bad = {{"", 0},      {"1/(n^2", 6}, {"n +* 2", 3},   {"log(n", 5},   {"foo(n)", 0},
                                  {"n)", 1},    {"sin()", 4},  {"3 n", 2},      {"@", 0},       {"pow(n)", 0},
                                  {"2..3", 0},  {"n^", 2},     {"(", 1},        {"log(n,2)", 0}, {"n ** 2", 3},
                                  {"-", 1},     {"fact(n,", 7}, {")", 0}};
    int positioned = 0;
    for (const auto& c : bad) {
        try {
            (void)parse(c.text);
            r.check(false, "'" + c.text + "' parsed without error");
        } catch (const ParseError& e) {
            positioned += e.offset() == c.offset;
            if (e.offset() != c.offset) {
                r.check(false, "'" + c.text + "': offset " + std::to_string(e.offset()) + ", expected " +
                                   std::to_string(c.offset));
            }
        }
    }
    r.check(positioned == static_cast<int>(bad.size()),
            std::to_string(positioned) + "/" + std::to_string(bad.size()) + " malformed inputs report their offset");
    emit(8, "parser", r);
}

void criterion_determinism()
{
    Report r;
    auto run = [](const std::string& name) {
        const auto e = entry_or_throw(name);
        AnalyzeOptions opt;
        opt.family = e.family;
        return to_json(analyze("name", name, e.source, opt)).dump(2);
    };
    auto run_expr = [](const std::string& text) {
        return to_json(analyze("expr", text, expression_source(parse(text), text), {})).dump(2);
    };
    for (const auto& name : {"dfact_ratio_sq", "alt_inv_log", "floor_log_exp"}) {
        const auto first = run(name);
        const auto second = run(name);
        r.check(first == second, std::string(name) + ": " + std::to_string(first.size()) + " bytes, " +
                                     (first == second ? "identical" : "different"));
    }
    const std::string text = "1/(n*log(n+1))";
    const auto a = run_expr(text);
    const auto b = run_expr(text);
    r.check(a == b, text + ": " + (a == b ? "identical" : "different"));
    emit(9, "determinism", r);
}

} // namespace

int main()
{
    criterion_catalog();
    criterion_index_recovery();
    criterion_second_order();
    criterion_karamata();
    criterion_alternating();
    criterion_round_trip();
    criterion_sandwich();
    criterion_parser();
    criterion_determinism();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
