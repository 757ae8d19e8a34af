#include "rvs/catalog.hpp"

#include "rvs/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rvs {

// ---------------------------------------------------------------------------
// Weight families

double WeightFamily::weight(Index n) const
{
    const double x = static_cast<double>(n);
    switch (kind) {
    case Kind::Log:
        return std::log(x);
    case Kind::LogLog:
        return std::log(std::log(x));
    case Kind::Power:
        return std::pow(x, exponent);
    case Kind::LogPower:
        return std::pow(std::log(x), exponent);
    }
    return 1.0;
}

bool WeightFamily::inverse_sum_converges() const
{
    switch (kind) {
    case Kind::Power:
        return exponent > 0;
    case Kind::LogPower:
        return exponent > 1;
    default:
        return false;
    }
}

namespace {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

} // namespace

std::string WeightFamily::name() const
{
    switch (kind) {
    case Kind::Log:
        return "log";
    case Kind::LogLog:
        return "loglog";
    case Kind::Power:
        return "power:" + format_number(exponent);
    case Kind::LogPower:
        return "logpower:" + format_number(exponent);
    }
    return "?";
}

WeightFamily parse_weight_family(std::string_view text)
{
    if (text == "log") {
        return WeightFamily::log();
    }
    if (text == "loglog") {
        return WeightFamily::loglog();
    }
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const auto head = text.substr(0, colon);
        const auto value = parse_double(text.substr(colon + 1));
        if (value && *value > 0 && head == "power") {
            return WeightFamily::power(*value);
        }
        if (value && *value > 0 && head == "logpower") {
            return WeightFamily::log_power(*value);
        }
    }
    throw std::invalid_argument("unknown weight family '" + std::string(text) +
                                "' (expected log, loglog, power:r or logpower:theta with r, theta > 0)");
}

// ---------------------------------------------------------------------------
// Catalog

std::string to_string(Expected e)
{
    switch (e) {
    case Expected::Converges:
        return "converges";
    case Expected::Diverges:
        return "diverges";
    default:
        return "undocumented";
    }
}

namespace {

int alternating_sign(Index n) { return n % 2 == 0 ? 1 : -1; }
int alternating_sign_shifted(Index n) { return n % 2 == 0 ? -1 : 1; }

CatalogEntry gamma_ratio_entry(double beta)
{
    if (!(beta > -3.0)) {
        throw std::invalid_argument("gamma_ratio needs beta > -3");
    }
    const double first = std::lgamma(beta + 3.0) - std::log(4.0);
    auto src = TermSource::from_ratio("gamma_ratio(" + format_number(beta) + ")", 1,
                                      SignedLogValue::from_log(1, first),
                                      [beta](Index n) {
                                          const double m = static_cast<double>(n + 1);
                                          return (2 * beta - 1) / (2 * m) + beta * (beta - 1) / (4 * m * m);
                                      })
                   .with_formula("Gamma(2n+b+1) / (4^n (n!)^2), b = " + format_number(beta))
                   .with_known_index(beta - 0.5);
    CatalogEntry e;
    e.name = src.name();
    e.formula = src.formula();
    e.source = src;
    e.alpha = beta - 0.5;
    e.verdict = beta < -0.5 ? Expected::Converges : Expected::Diverges;
    e.second_order = 0.5 - beta + beta * (beta - 1) / 4;
    e.family = WeightFamily::power(1);
    e.provenance = "Gamma-ratio example; terms defined through the exact ratio "
                   "(1 + b/(2(n+1)))(1 + (b-1)/(2(n+1)))";
    return e;
}

CatalogEntry dfact_ratio_entry(double a, std::string name)
{
    if (!(a > 0)) {
        throw std::invalid_argument("dfact_ratio_pow needs a > 0");
    }
    auto src = TermSource::from_ratio(name, 1, SignedLogValue::from_log(1, -a * std::log(2.0)),
                                      [a](Index n) {
                                          return std::expm1(a * std::log1p(-1.0 / (2.0 * static_cast<double>(n) + 2.0)));
                                      })
                   .with_formula("((2n-1)!! / (2n)!!)^" + format_number(a))
                   .with_known_index(-a / 2);
    CatalogEntry e;
    e.name = src.name();
    e.formula = src.formula();
    e.source = src;
    e.alpha = -a / 2;
    e.verdict = a > 2 ? Expected::Converges : Expected::Diverges;
    if (a == 2) {
        e.second_order = 1.25;
        e.family = WeightFamily::power(1);
    }
    e.provenance = "double-factorial ratio example; Raabe decides a != 2, the n^1 weight decides a = 2";
    return e;
}

CatalogEntry alt_gamma_ratio_entry(double beta)
{
    auto base = gamma_ratio_entry(beta);
    const double first = std::lgamma(beta + 3.0) - std::log(4.0);
    auto src = TermSource::from_ratio("alt_gamma_ratio(" + format_number(beta) + ")", 1,
                                      SignedLogValue::from_log(1, first),
                                      [beta](Index n) {
                                          const double m = static_cast<double>(n + 1);
                                          return (2 * beta - 1) / (2 * m) + beta * (beta - 1) / (4 * m * m);
                                      },
                                      alternating_sign_shifted)
                   .with_formula("(-1)^(n-1) Gamma(2n+b+1) / (4^n (n!)^2), b = " + format_number(beta))
                   .with_known_index(beta - 0.5);
    CatalogEntry e = base;
    e.name = src.name();
    e.formula = src.formula();
    e.source = src;
    e.alternating = true;
    e.alternating_verdict = beta - 0.5 > 0 ? Expected::Diverges : Expected::Converges;
    e.provenance = "alternating Gamma-ratio example; the even/odd split decides by the sign of b - 1/2";
    return e;
}

CatalogEntry alt_exp_pow_entry(double theta)
{
    if (!(theta < 0)) {
        throw std::invalid_argument("alt_exp_pow needs theta < 0");
    }
    auto src = TermSource::from_ratio("alt_exp_pow(" + format_number(theta) + ")", 1,
                                      SignedLogValue::from_log(1, 1.0),
                                      [theta](Index n) {
                                          const double x = static_cast<double>(n);
                                          const double d = std::pow(x, theta) * std::expm1(theta * std::log1p(1.0 / x));
                                          return std::expm1(d);
                                      },
                                      alternating_sign)
                   .with_formula("(-1)^n exp(n^t), t = " + format_number(theta))
                   .with_known_index(0.0);
    CatalogEntry e;
    e.name = src.name();
    e.formula = src.formula();
    e.source = src;
    e.alpha = 0.0;
    e.verdict = Expected::Diverges;
    e.alternating = true;
    e.alternating_verdict = Expected::Converges;
    e.provenance = "alternating exp(n^t) example; the even/odd pair differences are summable for t < 0";
    return e;
}

CatalogEntry simple(std::string name, std::string formula, TermSource src, std::optional<double> alpha,
                    Expected verdict, std::string provenance)
{
    CatalogEntry e;
    e.name = std::move(name);
    e.formula = std::move(formula);
    e.source = src.renamed(e.name).with_formula(e.formula);
    if (alpha) {
        e.source = e.source.with_known_index(*alpha);
    }
    e.alpha = alpha;
    e.verdict = verdict;
    e.provenance = std::move(provenance);
    return e;
}

double lg(Index n) { return std::log(static_cast<double>(n)); }
double inv(Index n) { return 1.0 / static_cast<double>(n); }

std::vector<CatalogEntry> build_catalog()
{
    std::vector<CatalogEntry> out;
    using E = Expected;

    out.push_back(simple("inverse_square", "1/n^2",
                         TermSource::from_terms_and_ratio(
                             "", 1, [](Index n) { return SignedLogValue::from_log(1, -2 * lg(n)); },
                             [](Index n) {
                                 const double m = static_cast<double>(n + 1);
                                 return -(2.0 * static_cast<double>(n) + 1.0) / (m * m);
                             }),
                         -2.0, E::Converges, "p-series, p = 2"));

    out.push_back(simple("inverse_sqrt", "1/n^(1/2)",
                         TermSource::from_terms_and_ratio(
                             "", 1, [](Index n) { return SignedLogValue::from_log(1, -0.5 * lg(n)); },
                             [](Index n) { return std::expm1(-0.5 * std::log1p(inv(n))); }),
                         -0.5, E::Diverges, "p-series, p = 1/2"));

    {
        auto e = simple("harmonic", "1/n",
                        TermSource::from_terms_and_ratio(
                            "", 1, [](Index n) { return SignedLogValue::from_log(1, -lg(n)); },
                            [](Index n) { return -1.0 / static_cast<double>(n + 1); }),
                        -1.0, E::Diverges, "harmonic series; Raabe boundary case");
        e.second_order = 1.0;
        out.push_back(e);
    }

    out.push_back(simple(
        "inv_nlogn", "1/(n log(n+1))",
        TermSource::from_terms_and_ratio(
            "", 1, [](Index n) { return SignedLogValue::from_log(1, -lg(n) - std::log(std::log1p(static_cast<double>(n)))); },
            [](Index n) {
                const double x = static_cast<double>(n);
                return std::expm1(-std::log1p(1.0 / x) + std::log1p(-std::log1p(1.0 / (x + 1)) / std::log(x + 2)));
            }),
        -1.0, E::Diverges, "Bertrand boundary case alpha = beta = -1 (no conclusion from the test)"));

    out.push_back(simple(
        "inv_nlog2n", "1/(n (log n)^2)",
        TermSource::from_terms_and_ratio(
            "", 2, [](Index n) { return SignedLogValue::from_log(1, -lg(n) - 2 * std::log(lg(n))); },
            [](Index n) {
                const double x = static_cast<double>(n);
                return std::expm1(-std::log1p(1.0 / x) + 2 * std::log1p(-std::log1p(1.0 / x) / std::log(x + 1)));
            }),
        -1.0, E::Converges, "Bertrand case alpha = -1, beta = -2"));

    out.push_back(simple(
        "logn_over_n", "log(n)/n",
        TermSource::from_terms_and_ratio(
            "", 2, [](Index n) { return SignedLogValue::from_log(1, std::log(lg(n)) - lg(n)); },
            [](Index n) {
                const double x = static_cast<double>(n);
                return std::expm1(-std::log1p(1.0 / x) + std::log1p(std::log1p(1.0 / x) / std::log(x)));
            }),
        -1.0, E::Diverges, "Bertrand case alpha = -1, beta = +1"));

    {
        auto e = simple("raabe_product", "prod_{k=2}^n (2 - e^(1/k))",
                        TermSource::from_ratio("", 2, SignedLogValue::from_log(1, std::log(2.0 - std::exp(0.5))),
                                               [](Index n) { return -std::expm1(1.0 / static_cast<double>(n + 1)); }),
                        -1.0, E::Diverges,
                        "product of (2 - e^(1/k)); the k = 1 factor is negative, so the product starts at k = 2");
        e.second_order = 0.5;
        out.push_back(e);
    }

    for (double beta : {-1.0, -0.5, 0.0}) {
        out.push_back(gamma_ratio_entry(beta));
    }

    {
        auto e = simple("dfact_wallis", "4^(n-1) ((n-1)!)^2 / ((2n-1)!!)^2",
                        TermSource::from_ratio("", 1, SignedLogValue::one(),
                                               [](Index n) {
                                                   const double x = static_cast<double>(n);
                                                   return -(4 * x + 1) / ((2 * x + 1) * (2 * x + 1));
                                               }),
                        -1.0, E::Diverges,
                        "Wallis-type ratio 4n^2/(2n+1)^2; n(alpha(n)+1) = n(3n+1)/(2n+1)^2 -> 3/4");
        e.second_order = 0.75;
        out.push_back(e);
    }

    out.push_back(dfact_ratio_entry(1.0, "dfact_ratio_pow(1)"));
    out.push_back(dfact_ratio_entry(2.0, "dfact_ratio_sq"));
    out.push_back(dfact_ratio_entry(3.0, "dfact_ratio_pow(3)"));

    out.push_back(simple("gauss_telescoping", "a(n+1)/a(n) = (n+1)/(n+3), a(1) = 1",
                         TermSource::from_ratio("", 1, SignedLogValue::one(),
                                                [](Index n) { return -2.0 / static_cast<double>(n + 3); }),
                         -2.0, E::Converges, "telescoping Gauss-form ratio; a(n) = 6/((n+1)(n+2))"));

    out.push_back(simple("hypergeometric", "a(n+1)/a(n) = (n^2+n)/(n^2+3n+2), a(1) = 1",
                         TermSource::from_ratio("", 1, SignedLogValue::one(),
                                                [](Index n) { return -2.0 / static_cast<double>(n + 2); }),
                         -2.0, E::Converges, "hypergeometric-style ratio; a(n) = 2/(n(n+1))"));

    out.push_back(simple("floor_log_exp", "exp(floor(log n))",
                         TermSource::from_terms("", 1,
                                                [](Index n) { return SignedLogValue::from_log(1, std::floor(lg(n))); }),
                         std::nullopt, E::Diverges, "sandwiched n/e <= a(n) <= n but not regularly varying"));

    out.push_back(simple("sin_log_power", "exp(0.5 log n + 0.25 sin(n) log n)",
                         TermSource::from_terms("", 3,
                                                [](Index n) {
                                                    const double l = lg(n);
                                                    return SignedLogValue::from_log(
                                                        1, 0.5 * l + 0.25 * std::sin(static_cast<double>(n)) * l);
                                                }),
                         std::nullopt, E::Diverges, "sandwiched n^(1/4) <= a(n) <= n^(3/4), oscillating index"));

    {
        auto e = simple("alt_harmonic", "(-1)^n / n",
                        TermSource::from_ratio("", 1, SignedLogValue::from_log(-1, 0.0),
                                               [](Index n) { return -1.0 / static_cast<double>(n + 1); },
                                               alternating_sign),
                        -1.0, E::Diverges, "alternating harmonic series, sum -log 2");
        e.alternating = true;
        e.alternating_verdict = E::Converges;
        out.push_back(e);
    }
    {
        auto e = simple("alt_inv_log", "(-1)^n / log(n+1)",
                        TermSource::from_ratio("", 1, SignedLogValue::from_log(-1, -std::log(std::log(2.0))),
                                               [](Index n) {
                                                   const double x = static_cast<double>(n);
                                                   return -std::log1p(1.0 / (x + 1)) / std::log(x + 2);
                                               },
                                               alternating_sign),
                        0.0, E::Diverges, "alternating 1/log(n+1); pair differences ~ -1/(n (log n)^2)");
        e.alternating = true;
        e.alternating_verdict = E::Converges;
        out.push_back(e);
    }
    {
        auto e = simple("alt_log", "(-1)^n log(n+1)",
                        TermSource::from_ratio("", 1, SignedLogValue::from_log(-1, std::log(std::log(2.0))),
                                               [](Index n) {
                                                   const double x = static_cast<double>(n);
                                                   return std::log1p(1.0 / (x + 1)) / std::log(x + 1);
                                               },
                                               alternating_sign),
                        0.0, E::Diverges, "alternating log(n+1); pair differences ~ 1/(2n)");
        e.alternating = true;
        e.alternating_verdict = E::Diverges;
        out.push_back(e);
    }
    for (double beta : {-1.0, 0.0, 1.0}) {
        out.push_back(alt_gamma_ratio_entry(beta));
    }
    out.push_back(alt_exp_pow_entry(-0.5));
    return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> entries = build_catalog();
    return entries;
}

std::string base_name(std::string_view name)
{
    const auto paren = name.find('(');
    return std::string(paren == std::string_view::npos ? name : name.substr(0, paren));
}

std::optional<CatalogEntry> find_entry(std::string_view name)
{
    for (const auto& e : catalog()) {
        if (e.name == name) {
            return e;
        }
    }
    const auto open = name.find('(');
    if (open == std::string_view::npos || name.back() != ')') {
        return std::nullopt;
    }
    const auto head = name.substr(0, open);
    const auto param = parse_double(name.substr(open + 1, name.size() - open - 2));
    if (!param) {
        return std::nullopt;
    }
    if (head == "gamma_ratio") {
        return gamma_ratio_entry(*param);
    }
    if (head == "alt_gamma_ratio") {
        return alt_gamma_ratio_entry(*param);
    }
    if (head == "dfact_ratio_pow") {
        return dfact_ratio_entry(*param, "dfact_ratio_pow(" + format_number(*param) + ")");
    }
    if (head == "alt_exp_pow") {
        return alt_exp_pow_entry(*param);
    }
    return std::nullopt;
}

std::string nearest_name(std::string_view name)
{
    std::string best;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (const auto& e : catalog()) {
        for (const std::string& candidate : {e.name, base_name(e.name)}) {
            const auto d = edit_distance(name, candidate);
            if (d < best_d) {
                best_d = d;
                best = candidate;
            }
        }
    }
    return best;
}

CatalogEntry entry_or_throw(std::string_view name)
{
    if (auto e = find_entry(name)) {
        return *e;
    }
    throw std::invalid_argument("unknown catalog name '" + std::string(name) + "'; did you mean '" +
                                nearest_name(name) + "'?");
}

TermSource make_term_source(std::string_view spec)
{
    if (auto e = find_entry(spec)) {
        return e->source;
    }
    Expr expr;
    try {
        expr = parse(spec);
    } catch (const ParseError&) {
        const bool looks_like_name =
            !spec.empty() && std::all_of(spec.begin(), spec.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == ')' ||
                       c == '.' || c == '-';
            });
        if (looks_like_name) {
            entry_or_throw(spec);
        }
        throw;
    }
    if (expr.uses_x()) {
        throw std::invalid_argument("term formulas may only use the variable n");
    }
    return expression_source(expr, std::string(spec), first_valid_index(expr).value_or(1));
}

nlohmann::json catalog_json()
{
    auto list = nlohmann::json::array();
    for (const auto& e : catalog()) {
        nlohmann::json j;
        j["name"] = e.name;
        j["formula"] = e.formula;
        j["first_index"] = e.source.first_index();
        j["alpha"] = e.alpha ? nlohmann::json(*e.alpha) : nlohmann::json(nullptr);
        j["verdict"] = to_string(e.verdict);
        if (e.second_order) {
            j["second_order"] = *e.second_order;
        }
        if (e.alternating) {
            j["alternating_verdict"] = to_string(e.alternating_verdict);
        }
        j["provenance"] = e.provenance;
        list.push_back(std::move(j));
    }
    return list;
}

} // namespace rvs
