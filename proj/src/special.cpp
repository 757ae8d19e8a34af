#include "rvs/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rvs {

double log_factorial(std::int64_t n)
{
    if (n < 0) {
        throw std::domain_error("factorial of a negative integer");
    }
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_double_factorial(std::int64_t n)
{
    if (n < -1) {
        throw std::domain_error("double factorial below -1");
    }
    if (n <= 0) {
        return 0.0;
    }
    const double ln2 = std::numbers::ln2;
    if (n % 2 == 0) {
        const double m = static_cast<double>(n / 2);
        return m * ln2 + std::lgamma(m + 1.0);
    }
    const double m = static_cast<double>((n + 1) / 2);
    return std::lgamma(2.0 * m + 1.0) - m * ln2 - std::lgamma(m + 1.0);
}

} // namespace rvs
