#pragma once

// Sign + natural-log-magnitude representation of a real number.
//
// Terms such as 4^n (n!)^2 leave the double range long before the series
// statistics become interesting, so every term is carried as (sign, log|x|)
// and products, quotients and powers are done additively.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace rvs {

struct SignedLogValue {
    /// -1, 0 or +1. Zero iff logmag is the -inf sentinel.
    int sign = 0;
    double logmag = -std::numeric_limits<double>::infinity();

    static SignedLogValue zero() { return {}; }
    static SignedLogValue one() { return {1, 0.0}; }
    static SignedLogValue from_log(int sign, double logmag);
    static SignedLogValue from_real(double x);

    double to_real() const;
    bool is_zero() const { return sign == 0; }
    bool is_finite() const { return sign == 0 || std::isfinite(logmag); }

    SignedLogValue abs() const { return sign == 0 ? zero() : SignedLogValue{1, logmag}; }
    SignedLogValue operator-() const { return {-sign, logmag}; }

    friend bool operator==(const SignedLogValue&, const SignedLogValue&) = default;
};

SignedLogValue operator*(const SignedLogValue& a, const SignedLogValue& b);
/// Throws std::domain_error on division by zero.
SignedLogValue operator/(const SignedLogValue& a, const SignedLogValue& b);
/// Log-sum-exp for equal signs, log-diff-exp otherwise.
SignedLogValue operator+(const SignedLogValue& a, const SignedLogValue& b);
SignedLogValue operator-(const SignedLogValue& a, const SignedLogValue& b);

/// a^y for real y. Negative bases need an integer-valued exponent; 0^y needs
/// y > 0. Violations throw std::domain_error.
SignedLogValue pow(const SignedLogValue& a, double y);

std::string to_string(const SignedLogValue& v);

} // namespace rvs
