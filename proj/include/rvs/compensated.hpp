#pragma once

// Error-free transformation (Knuth TwoSum) accumulator.

namespace rvs {

struct TwoSumAccumulator {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x)
    {
        const double s = sum + x;
        const double bp = s - sum;
        comp += (sum - (s - bp)) + (x - bp);
        sum = s;
    }

    void merge(const TwoSumAccumulator& other)
    {
        add(other.sum);
        add(other.comp);
    }

    double value() const { return sum + comp; }
};

} // namespace rvs
