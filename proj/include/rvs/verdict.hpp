#pragma once

#include "rvs/diagnostics.hpp"
#include "rvs/term_source.hpp"
#include "rvs/weight_family.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rvs {

enum class Conclusion { Converges, Diverges, Inconclusive };

std::string to_string(Conclusion c);

/// C n^p (log n)^q for a partial or tail sum.
struct AsymptoticEstimate {
    enum class Target { PartialSum, TailSum };

    Target target = Target::PartialSum;
    /// Empty when the constant is not determined.
    std::optional<double> C;
    double p = 0.0;
    double q = 0.0;
    /// Index the constant was calibrated at (0 when C is empty).
    Index at_n = 0;
    /// n c_n / S_n at at_n, for the alpha = -1 case.
    std::optional<double> ratio_diagnostic;
};

std::string to_string(AsymptoticEstimate::Target t);

struct Verdict {
    Conclusion conclusion = Conclusion::Inconclusive;
    /// Rung identifier: raabe, gauss, refined, bertrand, accumulation,
    /// doubling, or alternating:<route>. Empty when inconclusive.
    std::string decided_by;
    LimitEstimate alpha_hat;
    std::optional<LimitEstimate> beta_hat;
    std::optional<WeightFamily> beta_family;
    std::optional<AsymptoticEstimate> estimate;
    std::vector<std::string> notes;
    /// For sign-changing input: the ladder's conclusion for sum |a_n|.
    std::optional<Conclusion> absolute_conclusion;
};

struct LadderConfig {
    Index n_max = kDefaultNMax;
    double tol = kDefaultTol;
    /// Weight family for the refined rung. When set explicitly the refined
    /// rung runs right after Raabe.
    std::optional<WeightFamily> family;
};

/// |alpha + 1| <= max(tol, 3 half_width).
bool in_minus_one_band(const LimitEstimate& e, double tol);

// ---------------------------------------------------------------------------
// Rungs. Each returns a partial verdict; Inconclusive means "escalate".

Verdict raabe_test(const LimitEstimate& alpha_hat, double tol);

/// Bound form of Raabe's test for a statistic without a finite limit:
/// decides when alpha(n) is strictly monotone away from -1 on the last four
/// grid points, |alpha(n) + 1| >= 10, and that distance at least doubled.
Verdict raabe_unbounded_test(const DiagnosticSeries& diag);

struct GaussForm {
    double p = 0.0;
    double r = 0.0;
    double bound_estimate = 0.0;
    bool valid = false;
    std::string reason;
};

/// p from the extrapolated limit, r from a log-log regression of
/// |alpha(n) - p| on the tail of the grid; valid when r > 1.1 and
/// n^(r-1) |alpha(n) - p| stays bounded.
GaussForm fit_gauss_form(const DiagnosticSeries& diag, const LimitEstimate& p_hat);

Verdict gauss_test(const DiagnosticSeries& diag, const LimitEstimate& alpha_hat, double tol);

/// `beta_series` must come from second_order_statistic with its family set.
Verdict refined_test(const DiagnosticSeries& beta_series, const LimitEstimate& alpha_hat, double tol);

/// `beta_hat` is the limit of log n (alpha(n) - alpha).
Verdict bertrand_test(const LimitEstimate& alpha_hat, const LimitEstimate& beta_hat, double tol);

struct AccumulationTrace {
    Index k0 = 0;
    double alpha = 0.0;
    double c0 = 0.0;
    std::vector<Index> checkpoints;
    std::vector<double> B; // sum_{k0}^{n} (alpha(k) - alpha) / k
    std::vector<double> D; // sum_{k0}^{n} (log(1 + alpha(k)/k) - alpha(k)/k)
    std::vector<double> E; // sum_{k0}^{n} 1/k - log n
    std::vector<double> Q; // c0 + D + alpha E
    /// Minimum of B over every index in [k0, n_max].
    double min_B = 0.0;
};

/// Dense sums from k0 (first grid point with |alpha(k) - alpha| < 0.5) to n_max,
/// recorded at the grid points.
AccumulationTrace accumulation_trace(const TermSource& src, double alpha, const std::vector<Index>& grid);

Verdict accumulation_test(const AccumulationTrace& trace, const LimitEstimate& alpha_hat, double tol);

Verdict doubling_test(const TermSource& src, const std::vector<Index>& grid, double tol);

/// Karamata sum estimate calibrated at index n. Needs positive terms.
AsymptoticEstimate karamata_estimate(const TermSource& src, const LimitEstimate& alpha_hat, Index n, double tol);

/// Value of the estimate at n: C n^p (log n)^q.
double estimate_value(const AsymptoticEstimate& e, Index n);

/// Even/odd split for strictly alternating input.
Verdict analyze_alternating(const TermSource& src, const LadderConfig& config = {});

/// c_k - b_k = |p_{2k+1}| - |p_{2k}| as a source in k.
TermSource pair_difference_source(const TermSource& src);

/// The ladder on |a_n| without the sign routing.
Verdict run_positive_ladder(const TermSource& a, const LadderConfig& config);

/// Runs the rungs in order and stops at the first decisive one; alternating
/// input goes to analyze_alternating.
Verdict run_ladder(const TermSource& src, const LadderConfig& config = {});

} // namespace rvs
