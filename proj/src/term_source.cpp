#include "rvs/term_source.hpp"

#include "rvs/compensated.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace rvs {

// ---------------------------------------------------------------------------
// CumulativeTable

struct CumulativeTable::State {
    Index first;
    double base;
    std::function<double(Index)> inc;

    std::mutex mu;
    std::vector<double> values; // values[i] = F(first + i)
    TwoSumAccumulator acc;
};

CumulativeTable::CumulativeTable(Index first, double base, std::function<double(Index)> inc)
    : state_(std::make_unique<State>())
{
    state_->first = first;
    state_->base = base;
    state_->inc = std::move(inc);
    state_->acc.add(base);
    state_->values.push_back(state_->acc.value());
}

CumulativeTable::~CumulativeTable() = default;

double CumulativeTable::at(Index n) const
{
    State& s = *state_;
    if (n < s.first) {
        throw std::out_of_range("cumulative table below first index");
    }
    const auto offset = static_cast<std::size_t>(n - s.first);
    std::lock_guard lock(s.mu);
    if (offset >= s.values.size()) {
        constexpr std::size_t kChunk = 4096;
        const std::size_t target = (offset / kChunk + 1) * kChunk;
        s.values.reserve(target);
        while (s.values.size() < target) {
            const Index k = s.first + static_cast<Index>(s.values.size()) - 1;
            s.acc.add(s.inc(k));
            s.values.push_back(s.acc.value());
        }
    }
    return s.values[offset];
}

// ---------------------------------------------------------------------------
// TermSource

struct TermSource::Impl {
    std::string name;
    std::string formula;
    Index first = 1;
    std::optional<double> known_index;

    TermFn term_fn;               // closed form, if any
    RatioFn abs_ratio_fn;         // |a_{n+1}/a_n| - 1, if exact
    SignFn sign_fn;               // for ratio-built sources
    std::shared_ptr<CumulativeTable> logmag; // ratio-built magnitude
    std::shared_ptr<CumulativeTable> parity; // count of sign flips (signed ratio)
    int first_sign = 1;
};

namespace {

TermSource::RatioFn abs_from_signed(TermSource::RatioFn signed_ratio)
{
    return [r = std::move(signed_ratio)](Index n) {
        const double v = r(n);
        if (1.0 + v >= 0.0) {
            return v;
        }
        return -2.0 - v;
    };
}

} // namespace

TermSource TermSource::from_terms(std::string name, Index first_index, TermFn term)
{
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->first = first_index;
    impl->term_fn = std::move(term);
    return TermSource(std::move(impl));
}

TermSource TermSource::from_ratio(std::string name, Index first_index, SignedLogValue first_term,
                                  RatioFn abs_ratio_m1, SignFn sign)
{
    if (first_term.is_zero() || !first_term.is_finite()) {
        throw TermError("first term must be finite and nonzero", first_index);
    }
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->first = first_index;
    impl->abs_ratio_fn = abs_ratio_m1;
    impl->first_sign = first_term.sign;
    if (sign) {
        impl->sign_fn = std::move(sign);
    }
    impl->logmag = std::make_shared<CumulativeTable>(
        first_index, first_term.logmag, [r = std::move(abs_ratio_m1)](Index k) {
            const double v = r(k);
            if (!(v > -1.0) || !std::isfinite(v)) {
                throw TermError("ratio yields a zero or non-finite term", k + 1);
            }
            return std::log1p(v);
        });
    return TermSource(std::move(impl));
}

TermSource TermSource::from_terms_and_ratio(std::string name, Index first_index, TermFn term,
                                            RatioFn abs_ratio_m1)
{
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->first = first_index;
    impl->term_fn = std::move(term);
    impl->abs_ratio_fn = std::move(abs_ratio_m1);
    return TermSource(std::move(impl));
}

TermSource TermSource::from_signed_ratio(std::string name, Index first_index,
                                         SignedLogValue first_term, RatioFn ratio_m1)
{
    auto src = from_ratio(std::move(name), first_index, first_term, abs_from_signed(ratio_m1));
    auto impl = std::make_shared<Impl>(*src.impl_);
    impl->parity = std::make_shared<CumulativeTable>(
        first_index, 0.0, [r = std::move(ratio_m1)](Index k) { return 1.0 + r(k) < 0.0 ? 1.0 : 0.0; });
    return TermSource(std::move(impl));
}

const std::string& TermSource::name() const { return impl_->name; }
const std::string& TermSource::formula() const { return impl_->formula; }
Index TermSource::first_index() const { return impl_->first; }
std::optional<double> TermSource::known_index() const { return impl_->known_index; }

TermSource TermSource::with_formula(std::string formula) const
{
    auto impl = std::make_shared<Impl>(*impl_);
    impl->formula = std::move(formula);
    return TermSource(std::move(impl));
}

TermSource TermSource::with_known_index(double alpha) const
{
    auto impl = std::make_shared<Impl>(*impl_);
    impl->known_index = alpha;
    return TermSource(std::move(impl));
}

TermSource TermSource::renamed(std::string name) const
{
    auto impl = std::make_shared<Impl>(*impl_);
    impl->name = std::move(name);
    return TermSource(std::move(impl));
}

SignedLogValue TermSource::term(Index n) const
{
    const Impl& s = *impl_;
    if (n < s.first) {
        throw std::out_of_range("term index " + std::to_string(n) + " below first index " +
                                std::to_string(s.first));
    }
    if (s.term_fn) {
        return s.term_fn(n);
    }
    int sign = s.first_sign;
    if (s.sign_fn) {
        sign = s.sign_fn(n);
    } else if (s.parity && std::fmod(s.parity->at(n), 2.0) == 1.0) {
        sign = -sign;
    }
    return SignedLogValue::from_log(sign, s.logmag->at(n));
}

bool TermSource::has_ratio() const { return static_cast<bool>(impl_->abs_ratio_fn); }

std::optional<double> TermSource::ratio(Index n) const
{
    if (!has_ratio()) {
        return std::nullopt;
    }
    const double r = impl_->abs_ratio_fn(n);
    const int s = term(n).sign * term(n + 1).sign;
    if (s >= 0) {
        return r;
    }
    return -2.0 - r;
}

double TermSource::abs_ratio_m1(Index n) const
{
    if (has_ratio()) {
        return impl_->abs_ratio_fn(n);
    }
    const auto a = term(n);
    const auto b = term(n + 1);
    if (a.is_zero()) {
        throw TermError("zero term", n);
    }
    if (b.is_zero()) {
        throw TermError("zero term", n + 1);
    }
    return std::expm1(b.logmag - a.logmag);
}

double TermSource::log_abs_ratio(Index n) const
{
    if (has_ratio()) {
        return std::log1p(impl_->abs_ratio_fn(n));
    }
    const auto a = term(n);
    const auto b = term(n + 1);
    if (a.is_zero()) {
        throw TermError("zero term", n);
    }
    if (b.is_zero()) {
        throw TermError("zero term", n + 1);
    }
    return b.logmag - a.logmag;
}

TermSource TermSource::abs() const
{
    auto impl = std::make_shared<Impl>(*impl_);
    if (impl->term_fn) {
        impl->term_fn = [f = impl_->term_fn](Index n) { return f(n).abs(); };
    }
    impl->sign_fn = {};
    impl->parity.reset();
    impl->first_sign = 1;
    return TermSource(std::move(impl));
}

} // namespace rvs
