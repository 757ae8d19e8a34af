#pragma once

#include "rvs/diagnostics.hpp"
#include "rvs/term_source.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rvs {

/// c_n = mantissa(n) n^alpha exp(sum_{k=1}^n delta_k / k).
struct RepresentationParams {
    double C = 1.0;
    double alpha = 0.0;
    /// Defaults to the constant C.
    std::function<double(Index)> mantissa;
    /// Defaults to 0.
    std::function<double(Index)> delta;
    std::string name = "representation";
};

/// Builds the sequence in log domain, with an exact ratio. Throws
/// std::invalid_argument for C <= 0 and TermError for a nonpositive mantissa.
TermSource construct_rs(const RepresentationParams& params);

struct VariationClass {
    enum class Kind { RS, ORS, MSandwich, Unknown };

    Kind kind = Kind::Unknown;
    /// RS: the index. ORS / MSandwich: lower and upper exponents.
    double alpha = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<LimitEstimate> estimate;
    /// Named window values backing the claim, in insertion order.
    std::vector<std::pair<std::string, double>> evidence;
    std::vector<std::string> notes;

    double evidence_value(const std::string& key) const;
};

std::string to_string(VariationClass::Kind k);

struct ClassifyConfig {
    Index n_max = kDefaultNMax;
    double tol = kDefaultTol;
    /// Consecutive indices per evidence window.
    Index window = 4096;
};

/// RS(alpha) when the Raabe statistic has a decisive limit and the ratio
/// envelope agrees with x^alpha; ORS(lo, hi) when windowed inf/sup of
/// alpha(k) are stable over the last two octaves; MSandwich when the
/// windowed exponents log|a_k| / log k are; Unknown otherwise. Sign changes
/// are noted and |a_n| is classified. Throws TermError if the probed terms
/// are all zero.
VariationClass classify_variation(const TermSource& src, const ClassifyConfig& config = {});

/// Worst relative deviation of |a_[xn]| / |a_n| from x^alpha, x in
/// {1.25, 1.5, 2}, at the last four grid points.
double rs_envelope_deviation(const TermSource& a, double alpha, const std::vector<Index>& grid);

inline constexpr const char* kLogFitModel = "v + c/log n + d/n";

/// Half-width of the -1 band for limits taken from the log-corrected fit: the
/// unmodelled 1/(log n)^2 term is of this order at n ~ 1e6.
inline constexpr double kLogFitBand = 0.05;

/// v + c / log n + d / n fit of Raabe samples, for slowly varying corrections.
LimitEstimate log_corrected_fit(const std::vector<Index>& grid, const std::vector<double>& alpha, double tol);

enum class ClassOp { Product, Quotient, Power, Sum, Difference };

/// Index arithmetic for RS classes. Anything involving a non-RS class, or a
/// difference whose subtrahend index is not smaller, is Unknown with a note.
VariationClass class_algebra(const VariationClass& x, const VariationClass& y, ClassOp op, double r = 1.0);

/// Raabe index of f(a_n) when a_n has index alpha and x f'(x)/f(x) -> beta.
inline double transform_index(double alpha, double beta) { return alpha * beta; }

/// Extrapolated Raabe limit of f(a_n), f an expression in x.
LimitEstimate transform_index_numeric(const TermSource& src, const std::string& f_text,
                                      const ClassifyConfig& config = {});

struct Envelope {
    double lo = 0.0;
    double hi = 0.0;
};

/// Inf and sup of |a_{floor(x n)}| / |a_n| over a window of consecutive n
/// ending at the last grid point.
Envelope ratio_envelope(const TermSource& src, double x, const std::vector<Index>& grid, Index window = 4096);

/// Whether an envelope respects the bounds x^phi, x^psi (reversed for x <= 1)
/// with relative slack eps.
bool envelope_within(const Envelope& env, double x, double phi, double psi, double eps);

} // namespace rvs
