#include "rvs/signed_log.hpp"

#include <cstdio>
#include <stdexcept>
#include <utility>

namespace rvs {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SignedLogValue SignedLogValue::from_log(int sign, double logmag)
{
    if (sign == 0 || logmag == kNegInf) {
        return zero();
    }
    return {sign > 0 ? 1 : -1, logmag};
}

SignedLogValue SignedLogValue::from_real(double x)
{
    if (x == 0.0) {
        return zero();
    }
    if (std::isnan(x)) {
        return {1, std::numeric_limits<double>::quiet_NaN()};
    }
    return {x > 0 ? 1 : -1, std::log(std::fabs(x))};
}

double SignedLogValue::to_real() const
{
    if (sign == 0) {
        return 0.0;
    }
    return sign * std::exp(logmag);
}

SignedLogValue operator*(const SignedLogValue& a, const SignedLogValue& b)
{
    if (a.sign == 0 || b.sign == 0) {
        return SignedLogValue::zero();
    }
    return {a.sign * b.sign, a.logmag + b.logmag};
}

SignedLogValue operator/(const SignedLogValue& a, const SignedLogValue& b)
{
    if (b.sign == 0) {
        throw std::domain_error("division by zero");
    }
    if (a.sign == 0) {
        return SignedLogValue::zero();
    }
    return {a.sign * b.sign, a.logmag - b.logmag};
}

SignedLogValue operator+(const SignedLogValue& a, const SignedLogValue& b)
{
    if (a.sign == 0) {
        return b;
    }
    if (b.sign == 0) {
        return a;
    }
    const SignedLogValue& big = a.logmag >= b.logmag ? a : b;
    const SignedLogValue& small = a.logmag >= b.logmag ? b : a;
    if (!std::isfinite(big.logmag)) {
        if (big.sign != small.sign && big.logmag == small.logmag) {
            throw std::domain_error("inf - inf in log domain");
        }
        return big;
    }
    const double d = small.logmag - big.logmag; // <= 0
    if (big.sign == small.sign) {
        return {big.sign, big.logmag + std::log1p(std::exp(d))};
    }
    if (d == 0.0) {
        return SignedLogValue::zero();
    }
    // log(1 - e^d), d < 0
    const double l = d > -0.6931471805599453 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d));
    return {big.sign, big.logmag + l};
}

SignedLogValue operator-(const SignedLogValue& a, const SignedLogValue& b)
{
    return a + (-b);
}

SignedLogValue pow(const SignedLogValue& a, double y)
{
    if (std::isnan(y)) {
        throw std::domain_error("NaN exponent");
    }
    if (a.sign == 0) {
        if (y > 0) {
            return SignedLogValue::zero();
        }
        throw std::domain_error("zero raised to a non-positive power");
    }
    if (y == 0.0) {
        return SignedLogValue::one();
    }
    int sign = 1;
    if (a.sign < 0) {
        if (y != std::floor(y)) {
            throw std::domain_error("negative base with non-integer exponent");
        }
        sign = std::fmod(std::fabs(y), 2.0) == 1.0 ? -1 : 1;
    }
    return SignedLogValue::from_log(sign, a.logmag * y);
}

std::string to_string(const SignedLogValue& v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%+d, %.17g)", v.sign, v.logmag);
    return buf;
}

} // namespace rvs
