#include "rvs/oracle.hpp"

#include "rvs/diagnostics.hpp"
#include "rvs/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rvs {

std::vector<Index> default_checkpoints(Index first_index, Index n_max)
{
    std::vector<Index> out;
    for (Index n = 16; n <= n_max; n *= 2) {
        if (n >= first_index) {
            out.push_back(n);
        }
    }
    if (out.empty() || out.back() != n_max) {
        out.push_back(n_max);
    }
    return out;
}

TwoSumAccumulator sum_range(const TermSource& src, Index lo, Index hi)
{
    constexpr Index kChunk = 1 << 16;
    TwoSumAccumulator total;
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(kChunk));
    for (Index start = lo; start <= hi; start += kChunk) {
        const Index stop = std::min(hi, start + kChunk - 1);
        buf.clear();
        for (Index k = start; k <= stop; ++k) {
            const double v = src.term(k).to_real();
            if (!std::isfinite(v)) {
                throw TermError("term overflows the real domain", k);
            }
            buf.push_back(v);
        }
        total.merge(simd::compensated_sum(buf));
    }
    return total;
}

SumTrace partial_sum(const TermSource& src, Index n_max, std::vector<Index> checkpoints)
{
    const Index first = src.first_index();
    if (n_max < first) {
        throw std::invalid_argument("n_max below the first index");
    }
    if (checkpoints.empty()) {
        checkpoints = default_checkpoints(first, n_max);
    }
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < first ||
        checkpoints.back() > n_max) {
        throw std::invalid_argument("checkpoints must be sorted and inside [first_index, n_max]");
    }
    SumTrace trace;
    TwoSumAccumulator acc;
    Index next = first;
    double prev = 0.0;
    for (Index c : checkpoints) {
        if (c >= next) {
            acc.merge(sum_range(src, next, c));
            next = c + 1;
        }
        const double s = acc.value();
        trace.checkpoints.push_back(c);
        trace.partial_sums.push_back(s);
        trace.increments.push_back(s - prev);
        prev = s;
    }
    return trace;
}

double tail_sum(const TermSource& src, Index n, Index n_far, const std::function<double(Index)>& remainder)
{
    auto acc = sum_range(src, n, n_far);
    acc.add(remainder(n_far));
    return acc.value();
}

double power_law_remainder(double p, Index n_far)
{
    if (!(p < -1)) {
        throw std::invalid_argument("power-law remainder needs p < -1");
    }
    return std::pow(static_cast<double>(n_far) + 0.5, p + 1) / (-1 - p);
}

std::string to_string(EmpiricalVerdict v)
{
    switch (v) {
    case EmpiricalVerdict::LikelyConverges:
        return "likely_converges";
    case EmpiricalVerdict::LikelyDiverges:
        return "likely_diverges";
    default:
        return "undecided";
    }
}

EmpiricalVerdict empirical_verdict(const SumTrace& trace)
{
    // Octave increments: only consecutive checkpoints that double.
    std::vector<double> inc;
    for (std::size_t j = 1; j < trace.checkpoints.size(); ++j) {
        if (trace.checkpoints[j] == 2 * trace.checkpoints[j - 1]) {
            inc.push_back(std::abs(trace.increments[j]));
        }
    }
    if (inc.size() < 5) {
        return EmpiricalVerdict::Undecided;
    }
    std::vector<double> rho;
    for (std::size_t j = 1; j < inc.size(); ++j) {
        if (inc[j - 1] == 0.0) {
            return inc[j] == 0.0 ? EmpiricalVerdict::LikelyConverges : EmpiricalVerdict::LikelyDiverges;
        }
        rho.push_back(inc[j] / inc[j - 1]);
    }
    const auto last = std::span<const double>(rho).last(3);
    const double lo = *std::min_element(last.begin(), last.end());
    const double hi = *std::max_element(last.begin(), last.end());
    if (lo >= 0.99) {
        return EmpiricalVerdict::LikelyDiverges;
    }
    // Sub-geometric decay shows up as ratios drifting toward 1.
    const bool creeping = last[2] > last[0] + 0.002;
    if (hi < 0.95 && !creeping) {
        return EmpiricalVerdict::LikelyConverges;
    }
    return EmpiricalVerdict::Undecided;
}

void write_sums_csv(std::ostream& os, const SumTrace& trace)
{
    os << "n,S,increment\n";
    for (std::size_t j = 0; j < trace.checkpoints.size(); ++j) {
        os << trace.checkpoints[j] << ',' << format_double(trace.partial_sums[j]) << ','
           << format_double(trace.increments[j]) << '\n';
    }
}

} // namespace rvs
