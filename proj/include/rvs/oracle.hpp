#pragma once

// Brute-force ground truth for tests and the catalog cross-check. Nothing in
// the analytic ladder calls into this header.

#include "rvs/compensated.hpp"
#include "rvs/term_source.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rvs {

struct SumTrace {
    std::vector<Index> checkpoints;
    std::vector<double> partial_sums;
    /// increments[0] = S(n_0); increments[j] = S(n_j) - S(n_{j-1})
    std::vector<double> increments;
};

/// 16 * 2^j up to n_max, plus n_max itself.
std::vector<Index> default_checkpoints(Index first_index, Index n_max);

/// Compensated sum of a_k for first_index <= k <= n_max, recorded at the
/// checkpoints (default_checkpoints when empty). Terms are materialized in
/// chunks and summed with the active SIMD kernel; chunk sums merge with the
/// same error-free scheme, so the result depends only on the chunking.
/// Throws TermError when a term overflows to the real domain.
SumTrace partial_sum(const TermSource& src, Index n_max, std::vector<Index> checkpoints = {});

/// Compensated sum of a_k over [lo, hi].
TwoSumAccumulator sum_range(const TermSource& src, Index lo, Index hi);

/// sum_{k=n}^{n_far} a_k + remainder(n_far).
double tail_sum(const TermSource& src, Index n, Index n_far, const std::function<double(Index)>& remainder);

/// Midpoint integral remainder int_{n_far + 1/2}^inf x^p dx, p < -1.
double power_law_remainder(double p, Index n_far);

enum class EmpiricalVerdict { LikelyConverges, LikelyDiverges, Undecided };

std::string to_string(EmpiricalVerdict v);

/// Looks at the octave increments of the partial sums (needs >= 6 doubling
/// checkpoints). Geometric decay with ratio < 0.95 that is not creeping up
/// toward 1 -> LikelyConverges; increments that do not shrink -> LikelyDiverges.
EmpiricalVerdict empirical_verdict(const SumTrace& trace);

/// CSV with header "n,S,increment".
void write_sums_csv(std::ostream& os, const SumTrace& trace);

} // namespace rvs
