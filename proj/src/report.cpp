#include "rvs/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rvs {

using nlohmann::json;

namespace {

// JSON has no NaN or infinities; those travel as strings.
json jnum(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double get_num(const json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument("bad number '" + s + "'");
    }
    return j.get<double>();
}

VariationClass::Kind kind_from_string(const std::string& s)
{
    if (s == "RS") {
        return VariationClass::Kind::RS;
    }
    if (s == "ORS") {
        return VariationClass::Kind::ORS;
    }
    if (s == "M_sandwich") {
        return VariationClass::Kind::MSandwich;
    }
    return VariationClass::Kind::Unknown;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

Conclusion conclusion_from_string(const std::string& s)
{
    if (s == "Converges") {
        return Conclusion::Converges;
    }
    if (s == "Diverges") {
        return Conclusion::Diverges;
    }
    if (s == "Inconclusive") {
        return Conclusion::Inconclusive;
    }
    throw std::invalid_argument("unknown conclusion '" + s + "'");
}

json to_json(const LimitEstimate& e)
{
    return json{{"value", jnum(e.value)}, {"half_width", jnum(e.half_width)}, {"decisive", e.decisive},
                {"model", e.model},       {"c1", jnum(e.c1)},                 {"c2", jnum(e.c2)},
                {"n_ref", jnum(e.n_ref)}};
}

LimitEstimate limit_estimate_from_json(const json& j)
{
    LimitEstimate e;
    e.value = get_num(j.at("value"));
    e.half_width = get_num(j.at("half_width"));
    e.decisive = j.at("decisive").get<bool>();
    e.model = j.at("model").get<std::string>();
    e.c1 = get_num(j.at("c1"));
    e.c2 = get_num(j.at("c2"));
    e.n_ref = get_num(j.at("n_ref"));
    return e;
}

json to_json(const VariationClass& c)
{
    json j;
    j["kind"] = to_string(c.kind);
    j["alpha"] = jnum(c.alpha);
    j["lower"] = jnum(c.lower);
    j["upper"] = jnum(c.upper);
    j["estimate"] = c.estimate ? to_json(*c.estimate) : json(nullptr);
    auto ev = json::array();
    for (const auto& [k, v] : c.evidence) {
        ev.push_back(json{{"name", k}, {"value", jnum(v)}});
    }
    j["evidence"] = ev;
    j["notes"] = c.notes;
    return j;
}

VariationClass variation_class_from_json(const json& j)
{
    VariationClass c;
    c.kind = kind_from_string(j.at("kind").get<std::string>());
    c.alpha = get_num(j.at("alpha"));
    c.lower = get_num(j.at("lower"));
    c.upper = get_num(j.at("upper"));
    if (!j.at("estimate").is_null()) {
        c.estimate = limit_estimate_from_json(j.at("estimate"));
    }
    for (const auto& e : j.at("evidence")) {
        c.evidence.emplace_back(e.at("name").get<std::string>(), get_num(e.at("value")));
    }
    c.notes = j.at("notes").get<std::vector<std::string>>();
    return c;
}

json to_json(const Verdict& v)
{
    json j;
    j["conclusion"] = to_string(v.conclusion);
    j["decided_by"] = v.decided_by;
    j["alpha"] = to_json(v.alpha_hat);
    if (v.beta_hat) {
        json b = to_json(*v.beta_hat);
        b["family"] = v.beta_family ? json(v.beta_family->name()) : json(nullptr);
        j["beta"] = b;
    } else {
        j["beta"] = nullptr;
    }
    if (v.estimate) {
        const auto& e = *v.estimate;
        j["estimate"] = json{{"target", to_string(e.target)},
                             {"C", e.C ? jnum(*e.C) : json("undetermined")},
                             {"p", jnum(e.p)},
                             {"q", jnum(e.q)},
                             {"at_n", e.at_n},
                             {"ratio_diagnostic", e.ratio_diagnostic ? jnum(*e.ratio_diagnostic) : json(nullptr)}};
    } else {
        j["estimate"] = nullptr;
    }
    j["notes"] = v.notes;
    j["absolute_conclusion"] = v.absolute_conclusion ? json(to_string(*v.absolute_conclusion)) : json(nullptr);
    return j;
}

Verdict verdict_from_json(const json& j)
{
    Verdict v;
    v.conclusion = conclusion_from_string(j.at("conclusion").get<std::string>());
    v.decided_by = j.at("decided_by").get<std::string>();
    v.alpha_hat = limit_estimate_from_json(j.at("alpha"));
    if (!j.at("beta").is_null()) {
        const auto& b = j.at("beta");
        v.beta_hat = limit_estimate_from_json(b);
        if (!b.at("family").is_null()) {
            v.beta_family = parse_weight_family(b.at("family").get<std::string>());
        }
    }
    if (!j.at("estimate").is_null()) {
        const auto& ej = j.at("estimate");
        AsymptoticEstimate e;
        e.target = ej.at("target").get<std::string>() == "tail_sum" ? AsymptoticEstimate::Target::TailSum
                                                                    : AsymptoticEstimate::Target::PartialSum;
        const auto& c = ej.at("C");
        if (!(c.is_string() && c.get<std::string>() == "undetermined")) {
            e.C = get_num(c);
        }
        e.p = get_num(ej.at("p"));
        e.q = get_num(ej.at("q"));
        e.at_n = ej.at("at_n").get<Index>();
        if (!ej.at("ratio_diagnostic").is_null()) {
            e.ratio_diagnostic = get_num(ej.at("ratio_diagnostic"));
        }
        v.estimate = e;
    }
    v.notes = j.at("notes").get<std::vector<std::string>>();
    if (!j.at("absolute_conclusion").is_null()) {
        v.absolute_conclusion = conclusion_from_string(j.at("absolute_conclusion").get<std::string>());
    }
    return v;
}

json to_json(const AnalysisReport& r)
{
    json j;
    j["version"] = r.version;
    j["input"] = json{{"kind", r.input_kind},
                      {"text", r.input},
                      {"n_max", r.n_max},
                      {"tol", jnum(r.tol)},
                      {"family", r.family ? json(*r.family) : json(nullptr)}};
    j["variation"] = to_json(r.variation);
    j["verdict"] = to_json(r.verdict);
    if (r.diagnostics) {
        const auto& d = *r.diagnostics;
        j["diagnostics"] = json{{"grid_points", d.grid_points},
                                {"n_first", d.n_first},
                                {"n_last", d.n_last},
                                {"alpha_last", jnum(d.alpha_last)},
                                {"alpha_log_last", jnum(d.alpha_log_last)},
                                {"alpha_hat", to_json(d.alpha_hat)},
                                {"alpha_log_hat", to_json(d.alpha_log_hat)}};
    } else {
        j["diagnostics"] = nullptr;
    }
    if (r.oracle) {
        j["oracle"] = json{{"n_max", r.oracle->n_max},
                           {"partial_sum", jnum(r.oracle->partial_sum)},
                           {"empirical", to_string(r.oracle->empirical)}};
    } else {
        j["oracle"] = nullptr;
    }
    j["warnings"] = r.warnings;
    return j;
}

AnalysisReport report_from_json(const json& j)
{
    AnalysisReport r;
    r.version = j.at("version").get<std::string>();
    const auto& in = j.at("input");
    r.input_kind = in.at("kind").get<std::string>();
    r.input = in.at("text").get<std::string>();
    r.n_max = in.at("n_max").get<Index>();
    r.tol = get_num(in.at("tol"));
    if (!in.at("family").is_null()) {
        r.family = in.at("family").get<std::string>();
    }
    r.variation = variation_class_from_json(j.at("variation"));
    r.verdict = verdict_from_json(j.at("verdict"));
    if (!j.at("diagnostics").is_null()) {
        const auto& dj = j.at("diagnostics");
        DiagnosticSummary d;
        d.grid_points = dj.at("grid_points").get<std::size_t>();
        d.n_first = dj.at("n_first").get<Index>();
        d.n_last = dj.at("n_last").get<Index>();
        d.alpha_last = get_num(dj.at("alpha_last"));
        d.alpha_log_last = get_num(dj.at("alpha_log_last"));
        d.alpha_hat = limit_estimate_from_json(dj.at("alpha_hat"));
        d.alpha_log_hat = limit_estimate_from_json(dj.at("alpha_log_hat"));
        r.diagnostics = d;
    }
    if (!j.at("oracle").is_null()) {
        const auto& oj = j.at("oracle");
        OracleCheck o;
        o.n_max = oj.at("n_max").get<Index>();
        o.partial_sum = get_num(oj.at("partial_sum"));
        const auto e = oj.at("empirical").get<std::string>();
        o.empirical = e == "likely_converges"  ? EmpiricalVerdict::LikelyConverges
                      : e == "likely_diverges" ? EmpiricalVerdict::LikelyDiverges
                                               : EmpiricalVerdict::Undecided;
        r.oracle = o;
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

AnalysisReport analyze(const std::string& input_kind, const std::string& input, const TermSource& src,
                       const AnalyzeOptions& options)
{
    AnalysisReport r;
    r.input_kind = input_kind;
    r.input = input;
    r.n_max = options.n_max;
    r.tol = options.tol;
    if (options.family) {
        r.family = options.family->name();
    }

    try {
        const auto grid = default_grid(src.first_index(), options.n_max);
        const auto d = raabe_statistic(src.abs(), grid);
        DiagnosticSummary s;
        s.grid_points = grid.size();
        if (!grid.empty()) {
            s.n_first = grid.front();
            s.n_last = grid.back();
            s.alpha_last = d.alpha.back();
            s.alpha_log_last = d.alpha_log.back();
            s.alpha_hat = extrapolate_limit(grid, d.alpha, options.tol);
            s.alpha_log_hat = extrapolate_limit(grid, d.alpha_log, options.tol);
        }
        r.diagnostics = s;
    } catch (const std::exception& e) {
        r.warnings.push_back(std::string("diagnostics: ") + e.what());
    }

    try {
        ClassifyConfig cc;
        cc.n_max = options.n_max;
        cc.tol = options.tol;
        r.variation = classify_variation(src, cc);
    } catch (const std::exception& e) {
        r.warnings.push_back(std::string("classification: ") + e.what());
    }

    LadderConfig lc;
    lc.n_max = options.n_max;
    lc.tol = options.tol;
    lc.family = options.family;
    r.verdict = run_ladder(src, lc);

    if (options.oracle) {
        try {
            const auto trace = partial_sum(src, options.n_max);
            OracleCheck o;
            o.n_max = options.n_max;
            o.partial_sum = trace.partial_sums.back();
            o.empirical = empirical_verdict(trace);
            r.oracle = o;
            if (r.verdict.conclusion == Conclusion::Inconclusive) {
                r.verdict.notes.push_back("oracle: S(" + std::to_string(o.n_max) + ") = " + fmt(o.partial_sum) +
                                          ", octave increments say " + to_string(o.empirical));
            }
        } catch (const std::exception& e) {
            r.warnings.push_back(std::string("oracle: ") + e.what());
        }
    }
    return r;
}

std::string render_text(const AnalysisReport& r)
{
    std::ostringstream os;
    os << "input:       " << r.input_kind << " " << r.input << "\n";
    os << "n_max:       " << r.n_max << "   tol: " << fmt(r.tol);
    if (r.family) {
        os << "   family: " << *r.family;
    }
    os << "\n";
    const auto& v = r.verdict;
    os << "conclusion:  " << to_string(v.conclusion);
    if (!v.decided_by.empty()) {
        os << " (decided by " << v.decided_by << ")";
    }
    os << "\n";
    if (v.absolute_conclusion) {
        os << "sum |a_n|:   " << to_string(*v.absolute_conclusion) << "\n";
    }
    os << "alpha:       " << fmt(v.alpha_hat.value) << " +- " << fmt(v.alpha_hat.half_width)
       << (v.alpha_hat.decisive ? "" : " (not decisive)") << "\n";
    if (v.beta_hat) {
        os << "beta:        " << fmt(v.beta_hat->value) << " +- " << fmt(v.beta_hat->half_width);
        if (v.beta_family) {
            os << " [" << v.beta_family->name() << "]";
        }
        os << "\n";
    }
    if (v.estimate) {
        const auto& e = *v.estimate;
        os << "estimate:    " << to_string(e.target) << " ~ " << (e.C ? fmt(*e.C) : std::string("C")) << " n^"
           << fmt(e.p);
        if (e.q != 0.0) {
            os << " (log n)^" << fmt(e.q);
        }
        if (e.ratio_diagnostic) {
            os << "   n a_n / S_n = " << fmt(*e.ratio_diagnostic);
        }
        os << "\n";
    }
    os << "class:       " << to_string(r.variation.kind);
    if (r.variation.kind == VariationClass::Kind::RS) {
        os << "(" << fmt(r.variation.alpha) << ")";
    } else if (r.variation.kind != VariationClass::Kind::Unknown) {
        os << "(" << fmt(r.variation.lower) << ", " << fmt(r.variation.upper) << ")";
    }
    os << "\n";
    if (r.oracle) {
        os << "oracle:      S(" << r.oracle->n_max << ") = " << fmt(r.oracle->partial_sum) << ", "
           << to_string(r.oracle->empirical) << "\n";
    }
    os << "notes:\n";
    for (const auto& n : v.notes) {
        os << "  - " << n << "\n";
    }
    for (const auto& n : r.variation.notes) {
        os << "  - class: " << n << "\n";
    }
    for (const auto& w : r.warnings) {
        os << "  ! " << w << "\n";
    }
    return os.str();
}

} // namespace rvs
