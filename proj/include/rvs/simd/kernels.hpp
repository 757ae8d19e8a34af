#pragma once

// Data-parallel inner loops of the summation oracle and window statistics.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from CPUID; set
// RVS_FORCE_SCALAR=1 in the environment to pin the scalar path.

#include "rvs/compensated.hpp"

#include <span>
#include <string_view>

namespace rvs::simd {

struct MinMax {
    double min;
    double max;
};

struct KernelTable {
    std::string_view name;
    /// TwoSum-compensated sum of the span.
    TwoSumAccumulator (*compensated_sum)(std::span<const double>);
    /// Min and max of a non-empty span (NaN-free input).
    MinMax (*min_max)(std::span<const double>);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();
const KernelTable& active_kernels();

inline TwoSumAccumulator compensated_sum(std::span<const double> xs)
{
    return active_kernels().compensated_sum(xs);
}

inline MinMax min_max(std::span<const double> xs) { return active_kernels().min_max(xs); }

} // namespace rvs::simd
