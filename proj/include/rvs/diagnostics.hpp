#pragma once

#include "rvs/term_source.hpp"
#include "rvs/weight_family.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rvs {

inline constexpr Index kDefaultNMax = Index{1} << 20;
inline constexpr double kDefaultTol = 1e-3;

/// n_j = 16 * 2^j for n_j <= n_max, skipping points below `first_index`.
std::vector<Index> default_grid(Index first_index, Index n_max = kDefaultNMax);

struct DiagnosticSeries {
    std::vector<Index> grid;
    /// n (|a_{n+1}/a_n| - 1)
    std::vector<double> alpha;
    /// n log|a_{n+1}/a_n|, from the log-magnitude difference of the terms
    std::vector<double> alpha_log;
    /// b(n) (alpha(n) - alpha_hat), when requested
    std::vector<double> beta;
    std::optional<WeightFamily> family;
    double alpha_hat = 0.0;
};

struct LimitEstimate {
    double value = 0.0;
    double half_width = 0.0;
    /// Coefficients of value + c1 (n_ref/n) + c2 (n_ref/n)^2 on the tail fit.
    double c1 = 0.0;
    double c2 = 0.0;
    double n_ref = 1.0;
    std::string model = "v + c1/n + c2/n^2";
    bool decisive = false;
};

/// alpha(n) for every grid point. Uses the exact ratio when the source has
/// one. Throws TermError on a zero term.
DiagnosticSeries raabe_statistic(const TermSource& src, const std::vector<Index>& grid);

/// Least-squares fit of v + c1/n + c2/n^2 over the tail half of the samples
/// (at least 4 points). half_width = max(residual 2-norm, |v - v'|) where v'
/// comes from the same fit without the last point. Throws
/// std::invalid_argument for fewer than 4 samples or non-finite samples.
LimitEstimate extrapolate_limit(const std::vector<Index>& grid, const std::vector<double>& samples,
                                double tol = kDefaultTol);

using BasisFn = std::function<double(Index)>;

/// Same tail and nesting rule as extrapolate_limit with a caller-chosen
/// basis (the constant term is implicit).
LimitEstimate extrapolate_with_basis(const std::vector<Index>& grid, const std::vector<double>& samples,
                                     const std::vector<BasisFn>& basis, std::string model, double tol);

/// beta(n) = b(n) (alpha(n) - alpha_hat). The weight must be >= 1 on the grid.
DiagnosticSeries second_order_statistic(const TermSource& src, double alpha_hat, const WeightFamily& family,
                                        const std::vector<Index>& grid);

/// (n + k) (|a_{n+r}/a_n| - 1) on the grid, computed from log magnitudes.
std::vector<double> shifted_statistic(const TermSource& src, Index r, Index k, const std::vector<Index>& grid);

struct DoublingSamples {
    std::vector<Index> grid;
    std::vector<double> ratios; // |a_{2n}| / |a_n|
    double tail_inf = 0.0;      // over the tail half of the grid
    double tail_sup = 0.0;
};

DoublingSamples doubling_ratios(const TermSource& src, const std::vector<Index>& grid);

/// Inf and sup of f(k) over k in [lo, hi], every `stride`-th index.
struct Window {
    double inf = 0.0;
    double sup = 0.0;
};
Window scan_window(const std::function<double(Index)>& f, Index lo, Index hi, Index stride = 1);

/// CSV with header "n,alpha,alpha_log,beta,doubling_ratio"; empty cells for
/// columns that were not computed.
void write_diagnostics_csv(std::ostream& os, const DiagnosticSeries& d, const DoublingSamples* doubling);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

} // namespace rvs
