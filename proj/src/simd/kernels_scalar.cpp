#include "rvs/simd/kernels.hpp"

#include <cstdlib>
#include <limits>

namespace rvs::simd {

namespace {

TwoSumAccumulator sum_scalar(std::span<const double> xs)
{
    TwoSumAccumulator acc;
    for (double x : xs) {
        acc.add(x);
    }
    return acc;
}

MinMax min_max_scalar(std::span<const double> xs)
{
    MinMax r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double x : xs) {
        r.min = x < r.min ? x : r.min;
        r.max = x > r.max ? x : r.max;
    }
    return r;
}

} // namespace

const KernelTable& scalar_kernels()
{
    static const KernelTable table{"scalar", &sum_scalar, &min_max_scalar};
    return table;
}

const KernelTable& active_kernels()
{
    static const KernelTable* table = [] {
        const char* force = std::getenv("RVS_FORCE_SCALAR");
        if (force != nullptr && force[0] == '1') {
            return &scalar_kernels();
        }
        if (const auto* avx = avx2_kernels()) {
            return avx;
        }
        return &scalar_kernels();
    }();
    return *table;
}

} // namespace rvs::simd
