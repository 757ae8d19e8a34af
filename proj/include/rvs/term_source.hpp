#pragma once

#include "rvs/signed_log.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace rvs {

using Index = std::int64_t;

/// Thrown when a term is zero or non-finite where the analysis needs a value.
class TermError : public std::runtime_error {
public:
    TermError(const std::string& what, Index index)
        : std::runtime_error(what + " at n = " + std::to_string(index)), index_(index)
    {
    }
    Index index() const { return index_; }

private:
    Index index_;
};

/// A deterministic real sequence a_n, n >= first_index, in log-magnitude form.
///
/// A source is defined either by a term function, or by a first term plus
/// the magnitude ratio |a_{n+1}/a_n| - 1 (with a sign pattern). In the second
/// case term(n) is rebuilt from compensated cumulative sums of
/// log1p(ratio), memoized in a thread-safe table. Copies share state; all
/// observable behaviour is that of a pure function of n.
class TermSource {
public:
    using TermFn = std::function<SignedLogValue(Index)>;
    using RatioFn = std::function<double(Index)>;
    using SignFn = std::function<int(Index)>;

    TermSource() = default;

    static TermSource from_terms(std::string name, Index first_index, TermFn term);

    /// `abs_ratio_m1(n)` must return |a_{n+1}/a_n| - 1 > -1 without cancellation.
    /// `sign` defaults to +1 everywhere.
    static TermSource from_ratio(std::string name, Index first_index, SignedLogValue first_term,
                                 RatioFn abs_ratio_m1, SignFn sign = {});

    /// `ratio_m1(n)` is the signed a_{n+1}/a_n - 1; a factor 1 + r < 0 flips the sign.
    static TermSource from_signed_ratio(std::string name, Index first_index, SignedLogValue first_term,
                                        RatioFn ratio_m1);

    /// Closed-form terms plus an exact magnitude ratio for the statistics.
    static TermSource from_terms_and_ratio(std::string name, Index first_index, TermFn term,
                                           RatioFn abs_ratio_m1);

    const std::string& name() const;
    const std::string& formula() const;
    Index first_index() const;
    std::optional<double> known_index() const;

    TermSource with_formula(std::string formula) const;
    TermSource with_known_index(double alpha) const;
    TermSource renamed(std::string name) const;

    /// Throws std::out_of_range below first_index.
    SignedLogValue term(Index n) const;
    int sign(Index n) const { return term(n).sign; }

    bool has_ratio() const;
    /// a_{n+1}/a_n - 1 (signed), only when an exact ratio exists.
    std::optional<double> ratio(Index n) const;
    /// |a_{n+1}/a_n| - 1. Exact form when has_ratio(), else expm1 of the
    /// log-magnitude difference. Throws TermError on a zero term.
    double abs_ratio_m1(Index n) const;
    /// log|a_{n+1}/a_n|.
    double log_abs_ratio(Index n) const;

    /// |a_n| as a source (keeps the exact ratio).
    TermSource abs() const;

    explicit operator bool() const { return static_cast<bool>(impl_); }

    struct Impl;

private:
    explicit TermSource(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Compensated running sum F(n) = base + sum_{k=first}^{n-1} inc(k), memoized.
/// Values depend only on n (the recurrence is always run in index order).
class CumulativeTable {
public:
    CumulativeTable(Index first, double base, std::function<double(Index)> inc);
    ~CumulativeTable();
    CumulativeTable(const CumulativeTable&) = delete;
    CumulativeTable& operator=(const CumulativeTable&) = delete;

    double at(Index n) const;

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace rvs
