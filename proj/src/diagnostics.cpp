#include "rvs/diagnostics.hpp"

#include "rvs/simd/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rvs {

std::vector<Index> default_grid(Index first_index, Index n_max)
{
    std::vector<Index> grid;
    for (Index n = 16; n <= n_max; n *= 2) {
        if (n >= first_index) {
            grid.push_back(n);
        }
    }
    return grid;
}

namespace {

double checked_logmag(const TermSource& src, Index n)
{
    const auto t = src.term(n);
    if (t.is_zero()) {
        throw TermError("zero term", n);
    }
    if (!std::isfinite(t.logmag)) {
        throw TermError("non-finite term", n);
    }
    return t.logmag;
}

double raabe_at(const TermSource& src, Index n)
{
    const double r = src.abs_ratio_m1(n);
    if (!std::isfinite(r)) {
        throw TermError("non-finite ratio", n);
    }
    return static_cast<double>(n) * r;
}

struct Fit {
    std::vector<double> coef;
    double residual;
};

// Least squares on samples [begin, end) for coef_0 + sum_j coef_{j+1} basis_j(n).
Fit fit_range(const std::vector<Index>& grid, const std::vector<double>& y, std::size_t begin, std::size_t end,
              const std::vector<BasisFn>& basis)
{
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const auto cols = static_cast<Eigen::Index>(basis.size() + 1);
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Index n = grid[begin + static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            a(i, static_cast<Eigen::Index>(j + 1)) = basis[j](n);
        }
        b(i) = y[begin + static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    Fit f;
    f.coef.assign(c.data(), c.data() + c.size());
    f.residual = (a * c - b).norm();
    return f;
}

} // namespace

DiagnosticSeries raabe_statistic(const TermSource& src, const std::vector<Index>& grid)
{
    DiagnosticSeries d;
    d.grid = grid;
    d.alpha.reserve(grid.size());
    d.alpha_log.reserve(grid.size());
    for (Index n : grid) {
        d.alpha.push_back(raabe_at(src, n));
        const double diff = checked_logmag(src, n + 1) - checked_logmag(src, n);
        d.alpha_log.push_back(static_cast<double>(n) * diff);
    }
    return d;
}

LimitEstimate extrapolate_with_basis(const std::vector<Index>& grid, const std::vector<double>& samples,
                                     const std::vector<BasisFn>& basis, std::string model, double tol)
{
    const std::size_t m = samples.size();
    if (m < 4 || grid.size() != m) {
        throw std::invalid_argument("extrapolation needs at least 4 samples on a matching grid");
    }
    for (double s : samples) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("extrapolation got a non-finite sample");
        }
    }
    const std::size_t tail = std::min(m, std::max<std::size_t>(4, (m + 1) / 2));
    const Fit full = fit_range(grid, samples, m - tail, m, basis);

    const std::size_t nested_tail = std::min(m - 1, std::max<std::size_t>(3, m / 2));
    const Fit nested = fit_range(grid, samples, m - 1 - nested_tail, m - 1, basis);

    LimitEstimate e;
    e.value = full.coef[0];
    e.c1 = full.coef.size() > 1 ? full.coef[1] : 0.0;
    e.c2 = full.coef.size() > 2 ? full.coef[2] : 0.0;
    e.n_ref = static_cast<double>(grid[m - 1]);
    e.model = std::move(model);
    e.half_width = std::max(full.residual, std::abs(full.coef[0] - nested.coef[0]));
    e.decisive = e.half_width <= tol;
    return e;
}

LimitEstimate extrapolate_limit(const std::vector<Index>& grid, const std::vector<double>& samples, double tol)
{
    if (grid.empty()) {
        throw std::invalid_argument("extrapolation needs at least 4 samples on a matching grid");
    }
    const double n_ref = static_cast<double>(grid.back());
    const std::vector<BasisFn> basis = {
        [n_ref](Index n) { return n_ref / static_cast<double>(n); },
        [n_ref](Index n) {
            const double x = n_ref / static_cast<double>(n);
            return x * x;
        },
    };
    return extrapolate_with_basis(grid, samples, basis, "v + c1/n + c2/n^2", tol);
}

DiagnosticSeries second_order_statistic(const TermSource& src, double alpha_hat, const WeightFamily& family,
                                        const std::vector<Index>& grid)
{
    if (!std::isfinite(alpha_hat)) {
        throw std::invalid_argument("second-order statistic needs a finite alpha");
    }
    DiagnosticSeries d = raabe_statistic(src, grid);
    d.family = family;
    d.alpha_hat = alpha_hat;
    d.beta.reserve(grid.size());
    double prev_weight = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = family.weight(grid[i]);
        if (!(w >= 1.0) || w < prev_weight) {
            throw std::invalid_argument("weight " + family.name() + " is not >= 1 and nondecreasing at n = " +
                                        std::to_string(grid[i]));
        }
        prev_weight = w;
        d.beta.push_back(w * (d.alpha[i] - alpha_hat));
    }
    return d;
}

std::vector<double> shifted_statistic(const TermSource& src, Index r, Index k, const std::vector<Index>& grid)
{
    std::vector<double> out;
    out.reserve(grid.size());
    for (Index n : grid) {
        double log_ratio = 0.0;
        if (src.has_ratio()) {
            for (Index j = 0; j < r; ++j) {
                log_ratio += src.log_abs_ratio(n + j);
            }
        } else {
            log_ratio = checked_logmag(src, n + r) - checked_logmag(src, n);
        }
        out.push_back(static_cast<double>(n + k) * std::expm1(log_ratio));
    }
    return out;
}

DoublingSamples doubling_ratios(const TermSource& src, const std::vector<Index>& grid)
{
    DoublingSamples d;
    d.grid = grid;
    for (Index n : grid) {
        const auto a = src.term(n);
        const auto b = src.term(2 * n);
        if (a.sign <= 0 || b.sign <= 0) {
            throw TermError("doubling ratio needs positive terms", a.sign <= 0 ? n : 2 * n);
        }
        d.ratios.push_back(std::exp(b.logmag - a.logmag));
    }
    if (!d.ratios.empty()) {
        const std::size_t tail = std::max<std::size_t>(1, (d.ratios.size() + 1) / 2);
        const auto mm = simd::min_max(std::span<const double>(d.ratios).last(tail));
        d.tail_inf = mm.min;
        d.tail_sup = mm.max;
    }
    return d;
}

Window scan_window(const std::function<double(Index)>& f, Index lo, Index hi, Index stride)
{
    if (hi < lo || stride < 1) {
        throw std::invalid_argument("empty scan window");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>((hi - lo) / stride + 1));
    for (Index k = lo; k <= hi; k += stride) {
        const double v = f(k);
        if (std::isnan(v)) {
            throw std::domain_error("NaN in scan window at n = " + std::to_string(k));
        }
        values.push_back(v);
    }
    const auto mm = simd::min_max(values);
    return {mm.min, mm.max};
}

std::string format_double(double v)
{
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticSeries& d, const DoublingSamples* doubling)
{
    os << "n,alpha,alpha_log,beta,doubling_ratio\n";
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        os << d.grid[i] << ',' << format_double(d.alpha[i]) << ',' << format_double(d.alpha_log[i]) << ',';
        if (i < d.beta.size()) {
            os << format_double(d.beta[i]);
        }
        os << ',';
        if (doubling && i < doubling->ratios.size()) {
            os << format_double(doubling->ratios[i]);
        }
        os << '\n';
    }
}

} // namespace rvs
