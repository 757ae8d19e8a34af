#include "rvs/classify.hpp"

#include "rvs/expr.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace rvs {

// ---------------------------------------------------------------------------
// Representation

TermSource construct_rs(const RepresentationParams& params)
{
    if (!(params.C > 0) || !std::isfinite(params.C)) {
        throw std::invalid_argument("representation constant C must be positive");
    }
    const double alpha = params.alpha;
    std::function<double(Index)> mantissa = params.mantissa;
    if (!mantissa) {
        mantissa = [c = params.C](Index) { return c; };
    }
    std::function<double(Index)> delta = params.delta;
    if (!delta) {
        delta = [](Index) { return 0.0; };
    }
    auto log_mantissa = [mantissa](Index n) {
        const double m = mantissa(n);
        if (!(m > 0) || !std::isfinite(m)) {
            throw TermError("nonpositive mantissa", n);
        }
        return std::log(m);
    };
    // sum_{k=1}^n delta_k / k
    auto slow = std::make_shared<CumulativeTable>(
        1, delta(1), [delta](Index k) { return delta(k + 1) / static_cast<double>(k + 1); });

    auto term = [=](Index n) {
        return SignedLogValue::from_log(1, log_mantissa(n) + alpha * std::log(static_cast<double>(n)) + slow->at(n));
    };
    auto ratio = [=](Index n) {
        const double x = static_cast<double>(n);
        return std::expm1(log_mantissa(n + 1) - log_mantissa(n) + alpha * std::log1p(1.0 / x) +
                          delta(n + 1) / (x + 1.0));
    };
    return TermSource::from_terms_and_ratio(params.name, 1, term, ratio).with_known_index(alpha);
}

// ---------------------------------------------------------------------------
// Classification

std::string to_string(VariationClass::Kind k)
{
    switch (k) {
    case VariationClass::Kind::RS:
        return "RS";
    case VariationClass::Kind::ORS:
        return "ORS";
    case VariationClass::Kind::MSandwich:
        return "M_sandwich";
    default:
        return "Unknown";
    }
}

double VariationClass::evidence_value(const std::string& key) const
{
    for (const auto& [k, v] : evidence) {
        if (k == key) {
            return v;
        }
    }
    throw std::out_of_range("no evidence entry '" + key + "'");
}

namespace {

constexpr double kGuardSlack = 0.25;
constexpr double kStableFraction = 0.1;
constexpr double kEnvelopeXs[] = {1.25, 1.5, 2.0};

double logmag_of(const TermSource& src, Index n)
{
    const auto t = src.term(n);
    if (t.is_zero() || !std::isfinite(t.logmag)) {
        throw TermError("zero or non-finite term", n);
    }
    return t.logmag;
}

} // namespace

LimitEstimate log_corrected_fit(const std::vector<Index>& grid, const std::vector<double>& y, double tol)
{
    const double n_ref = static_cast<double>(grid.back());
    const std::vector<BasisFn> basis = {
        [](Index n) { return 1.0 / std::log(static_cast<double>(n)); },
        [n_ref](Index n) { return n_ref / static_cast<double>(n); },
    };
    return extrapolate_with_basis(grid, y, basis, kLogFitModel, tol);
}

double rs_envelope_deviation(const TermSource& a, double alpha, const std::vector<Index>& grid)
{
    double worst = 0.0;
    const std::size_t count = std::min<std::size_t>(4, grid.size());
    for (std::size_t i = grid.size() - count; i < grid.size(); ++i) {
        const Index n = grid[i];
        for (double x : kEnvelopeXs) {
            const auto m = static_cast<Index>(std::floor(x * static_cast<double>(n)));
            const double r = std::exp(logmag_of(a, m) - logmag_of(a, n) - alpha * std::log(x));
            worst = std::max(worst, std::abs(r - 1.0));
        }
    }
    return worst;
}

namespace {

bool stable(double prev, double last)
{
    return std::isfinite(prev) && std::isfinite(last) &&
           std::abs(last - prev) <= kStableFraction * std::max(1.0, std::abs(last));
}

} // namespace

VariationClass classify_variation(const TermSource& src, const ClassifyConfig& config)
{
    VariationClass out;
    const auto grid = default_grid(src.first_index(), config.n_max);
    if (grid.size() < 4) {
        out.notes.push_back("fewer than 4 grid points below n_max");
        return out;
    }

    bool any_nonzero = false;
    bool sign_change = false;
    int first_sign = 0;
    for (Index n : grid) {
        const int s = src.term(n).sign;
        any_nonzero = any_nonzero || s != 0;
        if (s != 0 && first_sign == 0) {
            first_sign = s;
        }
        sign_change = sign_change || (s != 0 && s != first_sign) || src.term(n + 1).sign != s;
    }
    if (!any_nonzero) {
        throw TermError("all probed terms are zero", grid.front());
    }
    if (sign_change) {
        out.notes.push_back("terms change sign; classifying |a_n|");
    }
    const TermSource a = src.abs();

    const auto diag = raabe_statistic(a, grid);
    LimitEstimate est;
    try {
        est = extrapolate_limit(grid, diag.alpha, config.tol);
    } catch (const std::invalid_argument&) {
        est.value = est.half_width = std::numeric_limits<double>::infinity();
        out.notes.push_back("Raabe samples are not finite");
    }
    out.evidence.emplace_back("alpha_hat", est.value);
    out.evidence.emplace_back("alpha_half_width", est.half_width);

    if (est.decisive) {
        const double dev = rs_envelope_deviation(a, est.value, grid);
        out.evidence.emplace_back("rs_envelope_deviation", dev);
        if (dev <= kGuardSlack) {
            out.kind = VariationClass::Kind::RS;
            out.alpha = out.lower = out.upper = est.value;
            out.estimate = est;
            return out;
        }
        out.notes.push_back("Raabe limit is decisive but |a_[xn]|/|a_n| strays from x^alpha");
    }

    const auto log_fit = std::isfinite(est.value) ? log_corrected_fit(grid, diag.alpha, config.tol) : est;
    out.evidence.emplace_back("alpha_hat_log_corrected", log_fit.value);
    out.evidence.emplace_back("alpha_half_width_log_corrected", log_fit.half_width);
    if (log_fit.decisive) {
        const double dev = rs_envelope_deviation(a, log_fit.value, grid);
        out.evidence.emplace_back("rs_envelope_deviation_log_corrected", dev);
        if (dev <= kGuardSlack) {
            out.kind = VariationClass::Kind::RS;
            out.alpha = out.lower = out.upper = log_fit.value;
            out.estimate = log_fit;
            out.notes.push_back("alpha(n) approaches its limit like 1/log n; log-corrected fit used");
            return out;
        }
    }

    // Windows of consecutive indices ending at the last two grid points.
    const Index w = std::max<Index>(16, config.window);
    const Index n_prev = grid[grid.size() - 2];
    const Index n_last = grid.back();
    auto window_lo = [&](Index n) { return std::max(a.first_index() + 1, n - w + 1); };

    auto alpha_at = [&](Index k) { return static_cast<double>(k) * a.abs_ratio_m1(k); };
    auto doubling_at = [&](Index k) { return std::exp(logmag_of(a, 2 * k) - logmag_of(a, k)); };
    const Window al_prev = scan_window(alpha_at, window_lo(n_prev), n_prev);
    const Window al_last = scan_window(alpha_at, window_lo(n_last), n_last);
    const Window db_prev = scan_window(doubling_at, window_lo(n_prev), n_prev);
    const Window db_last = scan_window(doubling_at, window_lo(n_last), n_last);
    out.evidence.emplace_back("alpha_window_inf_prev", al_prev.inf);
    out.evidence.emplace_back("alpha_window_sup_prev", al_prev.sup);
    out.evidence.emplace_back("alpha_window_inf", al_last.inf);
    out.evidence.emplace_back("alpha_window_sup", al_last.sup);
    out.evidence.emplace_back("doubling_window_inf", db_last.inf);
    out.evidence.emplace_back("doubling_window_sup", db_last.sup);

    const bool alpha_bounded = stable(al_prev.inf, al_last.inf) && stable(al_prev.sup, al_last.sup);
    auto doubling_consistent = [&](const Window& db, const Window& al) {
        return db.inf >= std::pow(2.0, al.inf) * (1 - kStableFraction) &&
               db.sup <= std::pow(2.0, al.sup) * (1 + kStableFraction);
    };
    if (alpha_bounded && doubling_consistent(db_prev, al_prev) && doubling_consistent(db_last, al_last)) {
        out.kind = VariationClass::Kind::ORS;
        out.lower = al_last.inf;
        out.upper = al_last.sup;
        out.notes.push_back("bounded-window rule: window inf/sup of alpha(k) agree within 10% over the last two "
                            "octaves and the doubling ratios stay inside [2^lo, 2^hi]");
        return out;
    }

    auto exponent_at = [&](Index k) { return logmag_of(a, k) / std::log(static_cast<double>(k)); };
    const Index lo_first = std::max<Index>(2, a.first_index());
    const Window ex_prev = scan_window(exponent_at, std::max(lo_first, n_prev - w + 1), n_prev);
    const Window ex_last = scan_window(exponent_at, std::max(lo_first, n_last - w + 1), n_last);
    out.evidence.emplace_back("exponent_window_inf_prev", ex_prev.inf);
    out.evidence.emplace_back("exponent_window_sup_prev", ex_prev.sup);
    out.evidence.emplace_back("exponent_window_inf", ex_last.inf);
    out.evidence.emplace_back("exponent_window_sup", ex_last.sup);
    if (stable(ex_prev.inf, ex_last.inf) && stable(ex_prev.sup, ex_last.sup)) {
        out.kind = VariationClass::Kind::MSandwich;
        out.lower = ex_last.inf;
        out.upper = ex_last.sup;
        out.notes.push_back("n^lower <= |a_n| <= n^upper on the probed windows");
        return out;
    }

    out.notes.push_back("no decisive limit and no stable window bounds");
    return out;
}

VariationClass class_algebra(const VariationClass& x, const VariationClass& y, ClassOp op, double r)
{
    using Kind = VariationClass::Kind;
    VariationClass out;
    const bool needs_y = op != ClassOp::Power;
    if (x.kind != Kind::RS || (needs_y && y.kind != Kind::RS)) {
        out.notes.push_back("index arithmetic only applies to regularly varying operands");
        return out;
    }
    double alpha = 0.0;
    switch (op) {
    case ClassOp::Product:
        alpha = x.alpha + y.alpha;
        break;
    case ClassOp::Quotient:
        alpha = x.alpha - y.alpha;
        break;
    case ClassOp::Power:
        alpha = x.alpha * r;
        break;
    case ClassOp::Sum:
        alpha = std::max(x.alpha, y.alpha);
        break;
    case ClassOp::Difference:
        if (!(y.alpha < x.alpha)) {
            out.notes.push_back("difference with subtrahend index >= minuend index: no rule, leading terms may cancel");
            return out;
        }
        alpha = x.alpha;
        out.notes.push_back("difference is asymptotic to the minuend");
        break;
    }
    out.kind = Kind::RS;
    out.alpha = out.lower = out.upper = alpha;
    return out;
}

LimitEstimate transform_index_numeric(const TermSource& src, const std::string& f_text, const ClassifyConfig& config)
{
    const auto f = parse(f_text);
    const auto composed = compose_terms(src, f, f_text);
    const auto grid = default_grid(composed.first_index(), config.n_max);
    const auto diag = raabe_statistic(composed, grid);
    return extrapolate_limit(grid, diag.alpha, config.tol);
}

Envelope ratio_envelope(const TermSource& src, double x, const std::vector<Index>& grid, Index window)
{
    if (!(x > 0)) {
        throw std::invalid_argument("ratio envelope needs x > 0");
    }
    if (grid.empty()) {
        throw std::invalid_argument("ratio envelope needs a grid");
    }
    const Index n_last = grid.back();
    const Index first = src.first_index();
    Index lo = std::max(first, n_last - std::max<Index>(1, window) + 1);
    while (static_cast<Index>(std::floor(x * static_cast<double>(lo))) < first) {
        ++lo;
    }
    auto ratio_at = [&](Index k) {
        const auto m = static_cast<Index>(std::floor(x * static_cast<double>(k)));
        const auto a = src.term(k);
        const auto b = src.term(m);
        if (a.sign <= 0 || b.sign <= 0) {
            throw TermError("ratio envelope needs positive terms", a.sign <= 0 ? k : m);
        }
        return std::exp(b.logmag - a.logmag);
    };
    const Window win = scan_window(ratio_at, lo, n_last);
    return {win.inf, win.sup};
}

bool envelope_within(const Envelope& env, double x, double phi, double psi, double eps)
{
    double lower = std::pow(x, phi);
    double upper = std::pow(x, psi);
    if (x <= 1) {
        std::swap(lower, upper);
    }
    return env.lo >= lower * (1 - eps) && env.hi <= upper * (1 + eps);
}

} // namespace rvs
