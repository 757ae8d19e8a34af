#include "rvs/expr.hpp"

#include "rvs/special.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace rvs {

namespace {

struct FunctionInfo {
    std::string_view name;
    ExprFunc func;
    std::size_t arity;
};

constexpr std::array<FunctionInfo, 10> kFunctions{{
    {"log", ExprFunc::Log, 1},
    {"exp", ExprFunc::Exp, 1},
    {"sin", ExprFunc::Sin, 1},
    {"cos", ExprFunc::Cos, 1},
    {"abs", ExprFunc::Abs, 1},
    {"pow", ExprFunc::Pow, 2},
    {"fact", ExprFunc::Fact, 1},
    {"dfact", ExprFunc::Dfact, 1},
    {"loggamma", ExprFunc::LogGamma, 1},
    {"sqrt", ExprFunc::Sqrt, 1},
}};

ExprPtr make_node(ExprOp op, std::vector<ExprPtr> args = {}, double value = 0.0,
                  ExprFunc func = ExprFunc::Log)
{
    auto node = std::make_shared<ExprNode>();
    node->op = op;
    node->args = std::move(args);
    node->value = value;
    node->func = func;
    return node;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse_all()
    {
        skip_space();
        if (pos_ == text_.size()) {
            throw ParseError("empty expression", pos_);
        }
        auto e = parse_expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ == text_.size()) {
                throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            }
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    ExprPtr parse_expr()
    {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(ExprOp::Add, {lhs, parse_term()});
            } else if (accept('-')) {
                lhs = make_node(ExprOp::Sub, {lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(ExprOp::Mul, {lhs, parse_unary()});
            } else if (accept('/')) {
                lhs = make_node(ExprOp::Div, {lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary()
    {
        if (accept('-')) {
            return make_node(ExprOp::Neg, {parse_unary()});
        }
        return parse_power();
    }

    ExprPtr parse_power()
    {
        auto base = parse_primary();
        if (accept('^')) {
            return make_node(ExprOp::Pow, {base, parse_unary()});
        }
        return base;
    }

    ExprPtr parse_primary()
    {
        skip_space();
        if (pos_ == text_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return parse_identifier();
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    ExprPtr parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) {
                ++p;
            }
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            throw ParseError("malformed number", start);
        }
        return make_node(ExprOp::Literal, {}, value);
    }

    ExprPtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view id = text_.substr(start, pos_ - start);
        if (id == "n") {
            return make_node(ExprOp::VarN);
        }
        if (id == "x") {
            return make_node(ExprOp::VarX);
        }
        for (const auto& info : kFunctions) {
            if (info.name != id) {
                continue;
            }
            expect('(');
            std::vector<ExprPtr> args;
            args.push_back(parse_expr());
            while (accept(',')) {
                args.push_back(parse_expr());
            }
            if (args.size() != info.arity) {
                throw ParseError(std::string(id) + " takes " + std::to_string(info.arity) +
                                     " argument(s)",
                                 start);
            }
            expect(')');
            return make_node(ExprOp::Call, std::move(args), 0.0, info.func);
        }
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

bool nodes_equal(const ExprNode& a, const ExprNode& b)
{
    if (a.op != b.op || a.args.size() != b.args.size()) {
        return false;
    }
    if (a.op == ExprOp::Literal && !(a.value == b.value)) {
        return false;
    }
    if (a.op == ExprOp::Call && a.func != b.func) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!nodes_equal(*a.args[i], *b.args[i])) {
            return false;
        }
    }
    return true;
}

bool node_uses_x(const ExprNode& node)
{
    if (node.op == ExprOp::VarX) {
        return true;
    }
    for (const auto& a : node.args) {
        if (node_uses_x(*a)) {
            return true;
        }
    }
    return false;
}

// Log-domain value with an optional plain-double shadow. The shadow keeps
// small integers exact so (-1)^n and fact(n) see integral arguments, and it
// feeds trigonometric arguments without an exp/log round trip.
struct Value {
    SignedLogValue lv;
    std::optional<double> real;
};

class Evaluator {
public:
    Evaluator(Index n, std::optional<SignedLogValue> x) : n_(n), x_(x) {}

    Value eval(const ExprNode& node)
    {
        switch (node.op) {
        case ExprOp::Literal:
            return {SignedLogValue::from_real(node.value), node.value};
        case ExprOp::VarN: {
            const auto v = static_cast<double>(n_);
            return {SignedLogValue::from_real(v), v};
        }
        case ExprOp::VarX:
            if (!x_) {
                fail("variable x is not bound", node);
            }
            return {*x_, std::nullopt};
        case ExprOp::Neg: {
            auto a = eval(*node.args[0]);
            return {-a.lv, a.real ? std::optional<double>(-*a.real) : std::nullopt};
        }
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div:
            return binary(node);
        case ExprOp::Pow:
            return power(node, eval(*node.args[0]), eval(*node.args[1]));
        case ExprOp::Call:
            return call(node);
        }
        fail("bad node", node);
    }

private:
    [[noreturn]] void fail(const std::string& msg, const ExprNode& node) const
    {
        throw DomainError(msg, to_string(node), n_);
    }

    double real_of(const Value& v, const ExprNode& node) const
    {
        if (v.real) {
            return *v.real;
        }
        const double r = v.lv.to_real();
        if (!std::isfinite(r)) {
            fail("value outside the real range", node);
        }
        return r;
    }

    static std::optional<double> shadow(double r)
    {
        if (std::isfinite(r)) {
            return r;
        }
        return std::nullopt;
    }

    Value binary(const ExprNode& node)
    {
        const Value a = eval(*node.args[0]);
        const Value b = eval(*node.args[1]);
        try {
            switch (node.op) {
            case ExprOp::Add:
                return {a.lv + b.lv, a.real && b.real ? shadow(*a.real + *b.real) : std::nullopt};
            case ExprOp::Sub:
                return {a.lv - b.lv, a.real && b.real ? shadow(*a.real - *b.real) : std::nullopt};
            case ExprOp::Mul:
                return {a.lv * b.lv, a.real && b.real ? shadow(*a.real * *b.real) : std::nullopt};
            default:
                if (b.lv.is_zero()) {
                    fail("division by zero", node);
                }
                return {a.lv / b.lv, a.real && b.real ? shadow(*a.real / *b.real) : std::nullopt};
            }
        } catch (const std::domain_error& e) {
            fail(e.what(), node);
        }
    }

    Value power(const ExprNode& node, const Value& base, const Value& exponent)
    {
        const double y = real_of(exponent, node);
        SignedLogValue r;
        try {
            r = pow(base.lv, y);
        } catch (const std::domain_error& e) {
            fail(e.what(), node);
        }
        std::optional<double> re;
        if (base.real && y == std::floor(y) && std::fabs(y) <= 64) {
            re = shadow(std::pow(*base.real, y));
        }
        return {r, re};
    }

    Value call(const ExprNode& node)
    {
        if (node.func == ExprFunc::Pow) {
            return power(node, eval(*node.args[0]), eval(*node.args[1]));
        }
        const Value a = eval(*node.args[0]);
        switch (node.func) {
        case ExprFunc::Log:
            if (a.lv.sign <= 0) {
                fail("log of a non-positive value", node);
            }
            return {SignedLogValue::from_real(a.lv.logmag), a.lv.logmag};
        case ExprFunc::Exp: {
            const double y = real_of(a, node);
            return {SignedLogValue::from_log(1, y), shadow(std::exp(y))};
        }
        case ExprFunc::Sin: {
            const double s = std::sin(real_of(a, node));
            return {SignedLogValue::from_real(s), s};
        }
        case ExprFunc::Cos: {
            const double c = std::cos(real_of(a, node));
            return {SignedLogValue::from_real(c), c};
        }
        case ExprFunc::Abs:
            return {a.lv.abs(), a.real ? std::optional<double>(std::fabs(*a.real)) : std::nullopt};
        case ExprFunc::Fact: {
            const double y = real_of(a, node);
            if (y < 0 || y != std::floor(y)) {
                fail("factorial needs a non-negative integer", node);
            }
            return {SignedLogValue::from_log(1, log_factorial(static_cast<Index>(y))), std::nullopt};
        }
        case ExprFunc::Dfact: {
            const double y = real_of(a, node);
            if (y < -1 || y != std::floor(y)) {
                fail("double factorial needs an integer >= -1", node);
            }
            return {SignedLogValue::from_log(1, log_double_factorial(static_cast<Index>(y))),
                    std::nullopt};
        }
        case ExprFunc::Sqrt:
            if (a.lv.sign < 0) {
                fail("sqrt of a negative value", node);
            }
            return {a.lv.is_zero() ? a.lv : SignedLogValue::from_log(1, 0.5 * a.lv.logmag),
                    a.real ? std::optional<double>(std::sqrt(*a.real)) : std::nullopt};
        case ExprFunc::LogGamma: {
            const double y = real_of(a, node);
            if (!(y > 0)) {
                fail("loggamma needs a positive argument", node);
            }
            const double g = std::lgamma(y);
            return {SignedLogValue::from_real(g), g};
        }
        default:
            fail("bad function", node);
        }
    }

    Index n_;
    std::optional<SignedLogValue> x_;
};

std::string format_literal(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void probe(const TermSource& src, Index probe_max)
{
    std::vector<Index> idx;
    for (Index k = 0; k < 32; ++k) {
        idx.push_back(src.first_index() + k);
    }
    for (Index p = 32; p <= probe_max; p *= 2) {
        idx.push_back(p);
        idx.push_back(p + 1);
    }
    for (Index n : idx) {
        if (n < src.first_index()) {
            continue;
        }
        SignedLogValue v;
        try {
            v = src.term(n);
        } catch (const DomainError& e) {
            throw TermError(e.what(), n);
        }
        if (v.is_zero()) {
            throw TermError("expression evaluates to zero", n);
        }
        if (!v.is_finite()) {
            throw TermError("expression is not finite", n);
        }
    }
}

} // namespace

std::string function_name(ExprFunc f)
{
    for (const auto& info : kFunctions) {
        if (info.func == f) {
            return std::string(info.name);
        }
    }
    return "?";
}

std::string to_string(const ExprNode& node)
{
    switch (node.op) {
    case ExprOp::Literal:
        return format_literal(node.value);
    case ExprOp::VarN:
        return "n";
    case ExprOp::VarX:
        return "x";
    case ExprOp::Neg:
        return "(-" + to_string(*node.args[0]) + ")";
    case ExprOp::Add:
        return "(" + to_string(*node.args[0]) + " + " + to_string(*node.args[1]) + ")";
    case ExprOp::Sub:
        return "(" + to_string(*node.args[0]) + " - " + to_string(*node.args[1]) + ")";
    case ExprOp::Mul:
        return "(" + to_string(*node.args[0]) + " * " + to_string(*node.args[1]) + ")";
    case ExprOp::Div:
        return "(" + to_string(*node.args[0]) + " / " + to_string(*node.args[1]) + ")";
    case ExprOp::Pow:
        return "(" + to_string(*node.args[0]) + " ^ " + to_string(*node.args[1]) + ")";
    case ExprOp::Call: {
        std::string s = function_name(node.func) + "(";
        for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i > 0) {
                s += ", ";
            }
            s += to_string(*node.args[i]);
        }
        return s + ")";
    }
    }
    return "?";
}

bool Expr::uses_x() const { return node_uses_x(*root_); }

std::string Expr::to_string() const { return rvs::to_string(*root_); }

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(*a.root_, *b.root_); }

Expr parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

SignedLogValue eval_logdomain(const Expr& e, Index n, std::optional<SignedLogValue> x)
{
    return Evaluator(n, x).eval(e.root()).lv;
}

TermSource expression_source(const Expr& e, std::string text, Index first_index, Index probe_max)
{
    auto src = TermSource::from_terms(text, first_index,
                                      [e](Index n) { return eval_logdomain(e, n); })
                   .with_formula(text);
    probe(src, probe_max);
    return src;
}

std::optional<Index> first_valid_index(const Expr& e, Index from, Index limit)
{
    for (Index n = from; n <= limit; ++n) {
        try {
            const auto v = eval_logdomain(e, n);
            if (!v.is_zero() && v.is_finite()) {
                return n;
            }
        } catch (const DomainError&) {
        }
    }
    return std::nullopt;
}

TermSource ratio_expression_source(const Expr& e, std::string text, Index probe_max)
{
    auto ratio = [e](Index n) {
        const auto v = eval_logdomain(e, n);
        const double r = v.to_real();
        if (!std::isfinite(r)) {
            throw TermError("ratio expression is not finite", n);
        }
        return r;
    };
    for (Index n = 1; n <= 32; ++n) {
        if (1.0 + ratio(n) == 0.0) {
            throw TermError("ratio expression gives a zero term", n + 1);
        }
    }
    for (Index p = 32; p <= probe_max; p *= 2) {
        if (1.0 + ratio(p) == 0.0) {
            throw TermError("ratio expression gives a zero term", p + 1);
        }
    }
    return TermSource::from_signed_ratio("ratio:" + text, 1, SignedLogValue::one(), ratio)
        .with_formula("a(n+1)/a(n) - 1 = " + text);
}

TermSource compose_terms(const TermSource& src, const Expr& f, std::string text)
{
    return TermSource::from_terms(src.name() + " | " + text, src.first_index(),
                                  [src, f](Index n) { return eval_logdomain(f, n, src.term(n)); })
        .with_formula(text);
}

} // namespace rvs
