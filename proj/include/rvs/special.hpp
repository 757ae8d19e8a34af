#pragma once

#include <cstdint>

namespace rvs {

/// log(n!!) for n >= -1, using (2m)!! = 2^m m! and (2m-1)!! = (2m)! / (2^m m!).
/// Throws std::domain_error for n < -1.
double log_double_factorial(std::int64_t n);

/// log(n!) for n >= 0.
double log_factorial(std::int64_t n);

} // namespace rvs
