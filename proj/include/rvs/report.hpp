#pragma once

#include "rvs/classify.hpp"
#include "rvs/diagnostics.hpp"
#include "rvs/oracle.hpp"
#include "rvs/verdict.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace rvs {

inline constexpr const char* kVersion = "rvseries 0.1.0";

struct DiagnosticSummary {
    std::size_t grid_points = 0;
    Index n_first = 0;
    Index n_last = 0;
    double alpha_last = 0.0;
    double alpha_log_last = 0.0;
    LimitEstimate alpha_hat;
    LimitEstimate alpha_log_hat;
};

struct OracleCheck {
    Index n_max = 0;
    double partial_sum = 0.0;
    EmpiricalVerdict empirical = EmpiricalVerdict::Undecided;
};

struct AnalysisReport {
    /// "name", "expr" or "ratio_expr"
    std::string input_kind;
    std::string input;
    Index n_max = kDefaultNMax;
    double tol = kDefaultTol;
    std::optional<std::string> family;
    VariationClass variation;
    Verdict verdict;
    std::optional<DiagnosticSummary> diagnostics;
    std::optional<OracleCheck> oracle;
    std::string version = kVersion;
    /// Notes from steps that failed without aborting the analysis.
    std::vector<std::string> warnings;
};

struct AnalyzeOptions {
    Index n_max = kDefaultNMax;
    double tol = kDefaultTol;
    std::optional<WeightFamily> family;
    bool oracle = true;
};

/// Runs diagnostics, classification, the ladder and (optionally) the oracle.
AnalysisReport analyze(const std::string& input_kind, const std::string& input, const TermSource& src,
                       const AnalyzeOptions& options);

nlohmann::json to_json(const LimitEstimate& e);
LimitEstimate limit_estimate_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VariationClass& c);
VariationClass variation_class_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

/// Human-readable multi-line summary.
std::string render_text(const AnalysisReport& r);

Conclusion conclusion_from_string(const std::string& s);

} // namespace rvs
