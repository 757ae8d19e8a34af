#pragma once

// Small formula language for sequence terms.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'n' | 'x' | ident '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: log exp sin cos abs sqrt pow fact dfact loggamma. The variable `x`
// is only bound when an expression is applied to another sequence's terms
// (see compose_terms); plain term formulas use `n`.

#include "rvs/signed_log.hpp"
#include "rvs/term_source.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rvs {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& message, const std::string& subexpr, Index n)
        : std::runtime_error(message + " in '" + subexpr + "' at n = " + std::to_string(n)),
          subexpr_(subexpr), index_(n)
    {
    }
    const std::string& subexpression() const { return subexpr_; }
    Index index() const { return index_; }

private:
    std::string subexpr_;
    Index index_;
};

enum class ExprOp { Literal, VarN, VarX, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class ExprFunc { Log, Exp, Sin, Cos, Abs, Pow, Fact, Dfact, LogGamma, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op = ExprOp::Literal;
    double value = 0.0;              // Literal
    ExprFunc func = ExprFunc::Log;   // Call
    std::vector<ExprPtr> args;
};

/// Immutable parsed formula.
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprPtr root) : root_(std::move(root)) {}

    const ExprNode& root() const { return *root_; }
    bool uses_x() const;

    /// Fully parenthesized text that parses back to an identical tree.
    std::string to_string() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    ExprPtr root_;
};

Expr parse(std::string_view text);

/// Evaluates at index n with products, quotients, powers and factorials in
/// log domain. Throws DomainError on log of non-positive values, factorial of
/// negative or non-integer arguments, division by zero and similar.
SignedLogValue eval_logdomain(const Expr& e, Index n, std::optional<SignedLogValue> x = std::nullopt);

std::string function_name(ExprFunc f);
std::string to_string(const ExprNode& node);

/// TermSource with term(n) = e(n). Probes the first indices and a geometric
/// range up to `probe_max`; a zero or non-finite value raises TermError.
TermSource expression_source(const Expr& e, std::string text, Index first_index = 1,
                             Index probe_max = Index{1} << 21);

/// First n in [from, limit] where e(n) evaluates to a finite nonzero value.
/// Formulas such as 1/(n log n) are undefined at n = 1; a series does not
/// care about finitely many leading terms.
std::optional<Index> first_valid_index(const Expr& e, Index from = 1, Index limit = 16);

/// TermSource with a_1 = 1 and a_{n+1}/a_n - 1 = e(n).
TermSource ratio_expression_source(const Expr& e, std::string text, Index probe_max = Index{1} << 21);

/// f(a_n) for an expression f in the variable x.
TermSource compose_terms(const TermSource& src, const Expr& f, std::string text);

} // namespace rvs
