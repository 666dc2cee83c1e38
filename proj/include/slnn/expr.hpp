#pragma once

// Small arithmetic expressions in the variables `eta` and `xi`, used for the
// nonlinearity g(eta, xi), the forcing f(eta) and exact solutions.
//
// Grammar (lowest to highest precedence):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative, exponent must be constant
//   primary := number | 'eta' | 'xi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | ln | sqrt
//
// Exponents are folded to a literal at parse time, so "(1 + eta^2/3)^(-1/2)"
// is accepted while "xi^eta" is rejected.

#include "errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <variant>

namespace slnn::expr {

enum class Var { Eta, Xi };
enum class BinaryOp { Add, Sub, Mul, Div };
enum class Func { Sin, Cos, Exp, Ln, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Variable {
    Var var;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs, rhs;
};
struct Power {
    NodePtr base;
    double exponent;
};
struct Call {
    Func func;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Power, Call> data;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(std::size_t offset, std::string identifier)
        : ParseError(offset, "unknown identifier '" + identifier + "'"), identifier_(std::move(identifier)) {}

    const std::string& identifier() const noexcept { return identifier_; }

private:
    std::string identifier_;
};

class EvalError : public DomainError {
public:
    enum class Kind { DivisionByZero, LogDomain, SqrtDomain, PowerDomain };

    EvalError(Kind kind, const std::string& message, std::string subtree)
        : DomainError(message + " in '" + subtree + "'"), kind_(kind), subtree_(std::move(subtree)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& subtree() const noexcept { return subtree_; }

private:
    Kind kind_;
    std::string subtree_;
};

/// Immutable expression tree. Copies share nodes.
class Expr {
public:
    Expr() : root_(std::make_shared<const Node>(Node{Number{0.0}})) {}
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    static Expr constant(double v) { return Expr(std::make_shared<const Node>(Node{Number{v}})); }

    const Node& root() const noexcept { return *root_; }
    const NodePtr& ptr() const noexcept { return root_; }

    bool depends_on(Var v) const { return depends(*root_, v); }

    friend bool operator==(const Expr& a, const Expr& b) { return equal(*a.root_, *b.root_); }

private:
    static bool depends(const Node& n, Var v) {
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Number>) return false;
                else if constexpr (std::is_same_v<T, Variable>) return x.var == v;
                else if constexpr (std::is_same_v<T, Negate>) return depends(*x.operand, v);
                else if constexpr (std::is_same_v<T, Binary>) return depends(*x.lhs, v) || depends(*x.rhs, v);
                else if constexpr (std::is_same_v<T, Power>) return depends(*x.base, v);
                else return depends(*x.arg, v);
            },
            n.data);
    }

    static bool equal(const Node& a, const Node& b) {
        if (a.data.index() != b.data.index()) return false;
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                const auto& y = std::get<T>(b.data);
                if constexpr (std::is_same_v<T, Number>) return x.value == y.value;
                else if constexpr (std::is_same_v<T, Variable>) return x.var == y.var;
                else if constexpr (std::is_same_v<T, Negate>) return equal(*x.operand, *y.operand);
                else if constexpr (std::is_same_v<T, Binary>)
                    return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
                else if constexpr (std::is_same_v<T, Power>)
                    return x.exponent == y.exponent && equal(*x.base, *y.base);
                else return x.func == y.func && equal(*x.arg, *y.arg);
            },
            a.data);
    }

    NodePtr root_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string_view func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    }
    return "?";
}

inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return std::to_string(v);
    return std::string(buf, end);
}

// Binding strength used to decide parenthesization.
inline int precedence(const Node& n) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Binary>)
                return (x.op == BinaryOp::Add || x.op == BinaryOp::Sub) ? 1 : 2;
            else if constexpr (std::is_same_v<T, Negate>) return 3;
            else if constexpr (std::is_same_v<T, Number>) return x.value < 0 || std::signbit(x.value) ? 3 : 5;
            else if constexpr (std::is_same_v<T, Power>) return 4;
            else return 5;
        },
        n.data);
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(n, out);
    if (wrap) out += ')';
}

inline void print(const Node& n, std::string& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                out += format_number(x.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += x.var == Var::Eta ? "eta" : "xi";
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print_wrapped(*x.operand, precedence(*x.operand) < 3, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const int p = precedence(n);
                print_wrapped(*x.lhs, precedence(*x.lhs) < p, out);
                static constexpr std::string_view ops[] = {" + ", " - ", " * ", " / "};
                out += ops[static_cast<int>(x.op)];
                print_wrapped(*x.rhs, precedence(*x.rhs) <= p, out);
            } else if constexpr (std::is_same_v<T, Power>) {
                print_wrapped(*x.base, precedence(*x.base) <= 4, out);
                out += '^';
                const bool neg = x.exponent < 0 || std::signbit(x.exponent);
                if (neg) out += '(';
                out += format_number(x.exponent);
                if (neg) out += ')';
            } else {
                out += func_name(x.func);
                out += '(';
                print(*x.arg, out);
                out += ')';
            }
        },
        n.data);
}

} // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e.root(), out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline std::string subtree(const Node& n) {
    std::string s;
    print(n, s);
    return s;
}

inline double eval_node(const Node& n, double eta, double xi) {
    return std::visit(
        [&](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.var == Var::Eta ? eta : xi;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -eval_node(*x.operand, eta, xi);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double l = eval_node(*x.lhs, eta, xi);
                const double r = eval_node(*x.rhs, eta, xi);
                switch (x.op) {
                case BinaryOp::Add: return l + r;
                case BinaryOp::Sub: return l - r;
                case BinaryOp::Mul: return l * r;
                case BinaryOp::Div:
                    if (r == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero", subtree(n));
                    return l / r;
                }
                return 0.0;
            } else if constexpr (std::is_same_v<T, Power>) {
                const double b = eval_node(*x.base, eta, xi);
                if (b == 0.0 && x.exponent < 0)
                    throw EvalError(EvalError::Kind::DivisionByZero, "zero raised to a negative power", subtree(n));
                if (b < 0.0 && std::trunc(x.exponent) != x.exponent)
                    throw EvalError(EvalError::Kind::PowerDomain, "negative base with non-integer exponent",
                                    subtree(n));
                return std::pow(b, x.exponent);
            } else {
                const double a = eval_node(*x.arg, eta, xi);
                switch (x.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return std::exp(a);
                case Func::Ln:
                    if (!(a > 0.0)) throw EvalError(EvalError::Kind::LogDomain, "ln of non-positive value", subtree(n));
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0) throw EvalError(EvalError::Kind::SqrtDomain, "sqrt of negative value", subtree(n));
                    return std::sqrt(a);
                }
                return 0.0;
            }
        },
        n.data);
}

} // namespace detail

inline double eval(const Expr& e, double eta, double xi) {
    return detail::eval_node(e.root(), eta, xi);
}

// ---------------------------------------------------------------------------
// Construction with constant folding

namespace build {

inline NodePtr make(auto&& v) { return std::make_shared<const Node>(Node{std::forward<decltype(v)>(v)}); }

inline const Number* as_number(const NodePtr& n) { return std::get_if<Number>(&n->data); }

inline bool is_value(const NodePtr& n, double v) {
    const auto* p = as_number(n);
    return p && p->value == v;
}

inline NodePtr num(double v) { return make(Number{v}); }
inline NodePtr var(Var v) { return make(Variable{v}); }

inline NodePtr neg(NodePtr a) {
    if (const auto* p = as_number(a)) return num(-p->value);
    if (const auto* p = std::get_if<Negate>(&a->data)) return p->operand;
    return make(Negate{std::move(a)});
}

inline NodePtr add(NodePtr a, NodePtr b) {
    const auto *x = as_number(a), *y = as_number(b);
    if (x && y) return num(x->value + y->value);
    if (is_value(a, 0.0)) return b;
    if (is_value(b, 0.0)) return a;
    return make(Binary{BinaryOp::Add, std::move(a), std::move(b)});
}

inline NodePtr sub(NodePtr a, NodePtr b) {
    const auto *x = as_number(a), *y = as_number(b);
    if (x && y) return num(x->value - y->value);
    if (is_value(b, 0.0)) return a;
    if (is_value(a, 0.0)) return neg(std::move(b));
    return make(Binary{BinaryOp::Sub, std::move(a), std::move(b)});
}

inline NodePtr mul(NodePtr a, NodePtr b) {
    const auto *x = as_number(a), *y = as_number(b);
    if (x && y) return num(x->value * y->value);
    if (is_value(a, 0.0) || is_value(b, 0.0)) return num(0.0);
    if (is_value(a, 1.0)) return b;
    if (is_value(b, 1.0)) return a;
    return make(Binary{BinaryOp::Mul, std::move(a), std::move(b)});
}

inline NodePtr div(NodePtr a, NodePtr b) {
    const auto *x = as_number(a), *y = as_number(b);
    if (x && y && y->value != 0.0) return num(x->value / y->value);
    if (is_value(a, 0.0) && !is_value(b, 0.0)) return num(0.0);
    if (is_value(b, 1.0)) return a;
    return make(Binary{BinaryOp::Div, std::move(a), std::move(b)});
}

inline NodePtr pow(NodePtr base, double exponent) {
    if (exponent == 0.0) return num(1.0);
    if (exponent == 1.0) return base;
    if (const auto* x = as_number(base)) {
        const double v = std::pow(x->value, exponent);
        if (std::isfinite(v)) return num(v);
    }
    return make(Power{std::move(base), exponent});
}

inline NodePtr call(Func f, NodePtr arg) { return make(Call{f, std::move(arg)}); }

} // namespace build

// ---------------------------------------------------------------------------
// Symbolic d/dxi

namespace detail {

inline NodePtr d_dxi(const NodePtr& p) {
    using namespace build;
    const Node& n = *p;
    return std::visit(
        [&](const auto& x) -> NodePtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                return num(0.0);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return num(x.var == Var::Xi ? 1.0 : 0.0);
            } else if constexpr (std::is_same_v<T, Negate>) {
                return neg(d_dxi(x.operand));
            } else if constexpr (std::is_same_v<T, Binary>) {
                const NodePtr du = d_dxi(x.lhs);
                const NodePtr dv = d_dxi(x.rhs);
                switch (x.op) {
                case BinaryOp::Add: return add(du, dv);
                case BinaryOp::Sub: return sub(du, dv);
                case BinaryOp::Mul: return add(mul(du, x.rhs), mul(x.lhs, dv));
                case BinaryOp::Div:
                    if (is_value(dv, 0.0)) return div(du, x.rhs);
                    return div(sub(mul(du, x.rhs), mul(x.lhs, dv)), pow(x.rhs, 2.0));
                }
                return num(0.0);
            } else if constexpr (std::is_same_v<T, Power>) {
                const NodePtr du = d_dxi(x.base);
                return mul(mul(num(x.exponent), pow(x.base, x.exponent - 1.0)), du);
            } else {
                const NodePtr du = d_dxi(x.arg);
                if (is_value(du, 0.0)) return num(0.0);
                switch (x.func) {
                case Func::Sin: return mul(call(Func::Cos, x.arg), du);
                case Func::Cos: return neg(mul(call(Func::Sin, x.arg), du));
                case Func::Exp: return mul(p, du);
                case Func::Ln: return div(du, x.arg);
                case Func::Sqrt: return div(du, mul(num(2.0), p));
                }
                return num(0.0);
            }
        },
        n.data);
}

} // namespace detail

/// Partial derivative with respect to xi. Constants are folded; no other
/// simplification is attempted.
inline Expr differentiate_xi(const Expr& e) {
    return Expr(detail::d_dxi(e.ptr()));
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "expected expression, got end of input");
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(pos_, std::string("expected operator or end of input, got '") + src_[pos_] + "'");
        return Expr(std::move(root));
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_expected(std::string_view what) {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "expected " + std::string(what) + ", got end of input");
        throw ParseError(pos_, "expected " + std::string(what) + ", got '" + src_[pos_] + "'");
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = build::make(Binary{BinaryOp::Add, lhs, parse_term()});
            else if (accept('-')) lhs = build::make(Binary{BinaryOp::Sub, lhs, parse_term()});
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = build::make(Binary{BinaryOp::Mul, lhs, parse_unary()});
            else if (accept('/')) lhs = build::make(Binary{BinaryOp::Div, lhs, parse_unary()});
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return build::make(Negate{parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t exp_at = pos_;
        const Expr exponent(parse_unary());
        if (exponent.depends_on(Var::Eta) || exponent.depends_on(Var::Xi))
            throw ParseError(exp_at, "exponent must be a constant");
        double value = 0.0;
        try {
            value = eval(exponent, 0.0, 0.0);
        } catch (const EvalError& e) {
            throw ParseError(exp_at, std::string("invalid constant exponent: ") + e.what());
        }
        if (!std::isfinite(value)) throw ParseError(exp_at, "exponent is not finite");
        return build::make(Power{std::move(base), value});
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail_expected("number, identifier or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!accept(')')) fail_expected("')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail_expected("number, identifier or '('");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            return pos_ - s;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError(start, "malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc{} || ptr != src_.data() + pos_) throw ParseError(start, "malformed number");
        return build::num(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') ++pos_;
            else break;
        }
        const std::string_view id = src_.substr(start, pos_ - start);
        if (id == "eta") return build::var(Var::Eta);
        if (id == "xi") return build::var(Var::Xi);

        static constexpr std::pair<std::string_view, Func> funcs[] = {
            {"sin", Func::Sin}, {"cos", Func::Cos}, {"exp", Func::Exp}, {"ln", Func::Ln}, {"sqrt", Func::Sqrt}};
        for (const auto& [name, f] : funcs) {
            if (id != name) continue;
            if (!accept('(')) fail_expected("'(' after " + std::string(name));
            NodePtr arg = parse_expr();
            if (!accept(')')) fail_expected("')'");
            return build::call(f, std::move(arg));
        }
        throw UnknownIdentifierError(start, std::string(id));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expr parse(std::string_view source) {
    return detail::Parser(source).parse();
}

} // namespace slnn::expr
