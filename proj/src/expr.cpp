#include "ksub/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

namespace ksub {

namespace {

using Kind = ExprNode::Kind;

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr number_node(double v) {
    ExprNode n;
    n.kind = Kind::Number;
    n.number = v;
    return make_node(std::move(n));
}

bool is_number(const ExprPtr& e, double v) {
    return e->kind == Kind::Number && e->number == v;
}

double checked_pow(double base, double expo) {
    if (base == 0.0 && expo < 0.0) throw EvalError("zero raised to a negative power");
    double r = std::rint(expo);
    bool integral = (r == expo) && std::abs(expo) < 9.007199254740992e15;
    if (base < 0.0 && !integral) throw EvalError("negative base raised to a non-integer power");
    if (base == 0.0 && !integral) throw EvalError("zero raised to a non-integer power");
    return std::pow(base, expo);
}

double apply_fun(ExprFun f, double v) {
    switch (f) {
        case ExprFun::Sin: return std::sin(v);
        case ExprFun::Cos: return std::cos(v);
        case ExprFun::Exp: return std::exp(v);
        case ExprFun::Log:
            if (v <= 0.0) throw EvalError("log of a non-positive value");
            return std::log(v);
        case ExprFun::Sqrt:
            if (v < 0.0) throw EvalError("sqrt of a negative value");
            return std::sqrt(v);
        case ExprFun::Tanh: return std::tanh(v);
    }
    throw EvalError("unknown function");
}

// Smart constructors: fold constants, absorb 0 and 1. Nothing deeper, so the
// printed form stays recognizably related to the input.

ExprPtr neg_node(ExprPtr a) {
    if (a->kind == Kind::Number) return number_node(-a->number);
    if (a->kind == Kind::Neg) return a->lhs;
    ExprNode n;
    n.kind = Kind::Neg;
    n.lhs = std::move(a);
    return make_node(std::move(n));
}

ExprPtr binary_node(Kind k, ExprPtr a, ExprPtr b) {
    if (a->kind == Kind::Number && b->kind == Kind::Number) {
        double l = a->number, r = b->number;
        switch (k) {
            case Kind::Add: return number_node(l + r);
            case Kind::Sub: return number_node(l - r);
            case Kind::Mul: return number_node(l * r);
            case Kind::Div:
                if (r != 0.0) return number_node(l / r);
                break;  // keep the node; evaluation reports the error
            case Kind::Pow:
                try {
                    return number_node(checked_pow(l, r));
                } catch (const EvalError&) {
                    break;
                }
            default: break;
        }
    }
    switch (k) {
        case Kind::Add:
            if (is_number(a, 0.0)) return b;
            if (is_number(b, 0.0)) return a;
            break;
        case Kind::Sub:
            if (is_number(b, 0.0)) return a;
            if (is_number(a, 0.0)) return neg_node(std::move(b));
            break;
        case Kind::Mul:
            if (is_number(a, 0.0) || is_number(b, 0.0)) return number_node(0.0);
            if (is_number(a, 1.0)) return b;
            if (is_number(b, 1.0)) return a;
            break;
        case Kind::Div:
            if (is_number(a, 0.0)) return number_node(0.0);
            if (is_number(b, 1.0)) return a;
            break;
        case Kind::Pow:
            if (is_number(b, 1.0)) return a;
            if (is_number(b, 0.0)) return number_node(1.0);
            break;
        default: break;
    }
    ExprNode n;
    n.kind = k;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}

ExprPtr fun_node(ExprFun f, ExprPtr a) {
    if (a->kind == Kind::Number) {
        try {
            return number_node(apply_fun(f, a->number));
        } catch (const EvalError&) {
            // keep symbolic; evaluation reports the domain error
        }
    }
    ExprNode n;
    n.kind = Kind::Fun;
    n.fun = f;
    n.lhs = std::move(a);
    return make_node(std::move(n));
}

double eval_node(const ExprNode& n, std::span<const double> vals) {
    switch (n.kind) {
        case Kind::Number: return n.number;
        case Kind::Var: return vals[static_cast<std::size_t>(n.var)];
        case Kind::Neg: return -eval_node(*n.lhs, vals);
        case Kind::Add: return eval_node(*n.lhs, vals) + eval_node(*n.rhs, vals);
        case Kind::Sub: return eval_node(*n.lhs, vals) - eval_node(*n.rhs, vals);
        case Kind::Mul: return eval_node(*n.lhs, vals) * eval_node(*n.rhs, vals);
        case Kind::Div: {
            double den = eval_node(*n.rhs, vals);
            if (den == 0.0) throw EvalError("division by zero");
            return eval_node(*n.lhs, vals) / den;
        }
        case Kind::Pow: return checked_pow(eval_node(*n.lhs, vals), eval_node(*n.rhs, vals));
        case Kind::Fun: return apply_fun(n.fun, eval_node(*n.lhs, vals));
    }
    throw EvalError("malformed expression node");
}

ExprPtr diff_node(const ExprPtr& e, int var) {
    switch (e->kind) {
        case Kind::Number: return number_node(0.0);
        case Kind::Var: return number_node(e->var == var ? 1.0 : 0.0);
        case Kind::Neg: return neg_node(diff_node(e->lhs, var));
        case Kind::Add: return binary_node(Kind::Add, diff_node(e->lhs, var), diff_node(e->rhs, var));
        case Kind::Sub: return binary_node(Kind::Sub, diff_node(e->lhs, var), diff_node(e->rhs, var));
        case Kind::Mul: {
            auto du = diff_node(e->lhs, var);
            auto dv = diff_node(e->rhs, var);
            return binary_node(Kind::Add,
                               binary_node(Kind::Mul, std::move(du), e->rhs),
                               binary_node(Kind::Mul, e->lhs, std::move(dv)));
        }
        case Kind::Div: {
            // (u/v)' = (u'v - uv') / v^2
            auto du = diff_node(e->lhs, var);
            auto dv = diff_node(e->rhs, var);
            auto num = binary_node(Kind::Sub,
                                   binary_node(Kind::Mul, std::move(du), e->rhs),
                                   binary_node(Kind::Mul, e->lhs, std::move(dv)));
            auto den = binary_node(Kind::Mul, e->rhs, e->rhs);
            return binary_node(Kind::Div, std::move(num), std::move(den));
        }
        case Kind::Pow: {
            if (e->rhs->kind == Kind::Number) {
                // c constant: (u^c)' = c u^(c-1) u'
                double c = e->rhs->number;
                auto p = binary_node(Kind::Pow, e->lhs, number_node(c - 1.0));
                auto cu = binary_node(Kind::Mul, number_node(c), std::move(p));
                return binary_node(Kind::Mul, std::move(cu), diff_node(e->lhs, var));
            }
            // General: (u^v)' = u^v (v' log u + v u'/u); needs u > 0 to evaluate.
            auto du = diff_node(e->lhs, var);
            auto dv = diff_node(e->rhs, var);
            auto t1 = binary_node(Kind::Mul, std::move(dv), fun_node(ExprFun::Log, e->lhs));
            auto t2 = binary_node(Kind::Div, binary_node(Kind::Mul, e->rhs, std::move(du)), e->lhs);
            return binary_node(Kind::Mul, e, binary_node(Kind::Add, std::move(t1), std::move(t2)));
        }
        case Kind::Fun: {
            auto du = diff_node(e->lhs, var);
            ExprPtr outer;
            switch (e->fun) {
                case ExprFun::Sin: outer = fun_node(ExprFun::Cos, e->lhs); break;
                case ExprFun::Cos: outer = neg_node(fun_node(ExprFun::Sin, e->lhs)); break;
                case ExprFun::Exp: outer = e; break;
                case ExprFun::Log: outer = binary_node(Kind::Div, number_node(1.0), e->lhs); break;
                case ExprFun::Sqrt:
                    outer = binary_node(Kind::Div, number_node(0.5), e);
                    break;
                case ExprFun::Tanh:
                    outer = binary_node(Kind::Sub, number_node(1.0),
                                        binary_node(Kind::Mul, e, e));
                    break;
            }
            return binary_node(Kind::Mul, std::move(outer), std::move(du));
        }
    }
    throw EvalError("malformed expression node");
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over a byte string. Offsets index the original
// input so error messages can point at the failure.

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    std::span<const std::string_view> vars;
    std::shared_ptr<const std::vector<std::string>> names;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) { throw ParseError(msg, at); }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (consume('+')) {
                e = binary_node(Kind::Add, std::move(e), parse_term());
            } else if (consume('-')) {
                e = binary_node(Kind::Sub, std::move(e), parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (consume('*')) {
                e = binary_node(Kind::Mul, std::move(e), parse_unary());
            } else if (consume('/')) {
                e = binary_node(Kind::Div, std::move(e), parse_unary());
            } else {
                return e;
            }
        }
    }

    // Unary minus binds looser than ^, so -x^2 reads as -(x^2).
    ExprPtr parse_unary() {
        if (consume('-')) return neg_node(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (consume('^')) {
            // Right associative; the exponent may carry its own unary minus.
            return binary_node(Kind::Pow, std::move(base), parse_unary());
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_sum();
            if (!consume(')')) fail("expected ')'", pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'", pos);
    }

    ExprPtr parse_number() {
        std::size_t start = pos;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc()) fail("malformed numeric literal", start);
        pos = static_cast<std::size_t>(ptr - text.data());
        return number_node(value);
    }

    ExprPtr parse_ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string_view name = text.substr(start, pos - start);

        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (name == vars[i]) {
                ExprNode n;
                n.kind = Kind::Var;
                n.var = static_cast<int>(i);
                return make_node(std::move(n));
            }
        }
        if (name == "pi") return number_node(M_PI);

        static constexpr std::array<std::pair<std::string_view, ExprFun>, 6> funs{{
            {"sin", ExprFun::Sin},
            {"cos", ExprFun::Cos},
            {"exp", ExprFun::Exp},
            {"log", ExprFun::Log},
            {"sqrt", ExprFun::Sqrt},
            {"tanh", ExprFun::Tanh},
        }};
        for (const auto& [fname, f] : funs) {
            if (name == fname) {
                if (!consume('(')) fail("expected '(' after function name", pos);
                ExprPtr arg = parse_sum();
                if (!consume(')')) fail("expected ')'", pos);
                return fun_node(f, std::move(arg));
            }
        }
        fail("unknown identifier '" + std::string(name) + "'", start);
    }
};

// ---------------------------------------------------------------------------
// Printer. Precedence levels mirror the parser; a node is parenthesized when
// its level is below what the context requires.

constexpr int PREC_SUM = 1;
constexpr int PREC_TERM = 2;
constexpr int PREC_NEG = 3;
constexpr int PREC_POW = 4;
constexpr int PREC_ATOM = 5;

int node_prec(const ExprNode& n) {
    switch (n.kind) {
        case Kind::Add:
        case Kind::Sub: return PREC_SUM;
        case Kind::Mul:
        case Kind::Div: return PREC_TERM;
        case Kind::Neg: return PREC_NEG;
        case Kind::Pow: return PREC_POW;
        case Kind::Number: return n.number < 0.0 ? PREC_NEG : PREC_ATOM;
        default: return PREC_ATOM;
    }
}

void print_node(const ExprNode& n, const std::vector<std::string>& names, int min_prec,
                std::string& out) {
    bool wrap = node_prec(n) < min_prec;
    if (wrap) out += '(';
    switch (n.kind) {
        case Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case Kind::Var: out += names[static_cast<std::size_t>(n.var)]; break;
        case Kind::Neg:
            out += '-';
            print_node(*n.lhs, names, PREC_POW, out);
            break;
        case Kind::Add:
            print_node(*n.lhs, names, PREC_SUM, out);
            out += " + ";
            print_node(*n.rhs, names, PREC_TERM, out);
            break;
        case Kind::Sub:
            print_node(*n.lhs, names, PREC_SUM, out);
            out += " - ";
            print_node(*n.rhs, names, PREC_TERM, out);
            break;
        case Kind::Mul:
            print_node(*n.lhs, names, PREC_TERM, out);
            out += " * ";
            print_node(*n.rhs, names, PREC_NEG, out);
            break;
        case Kind::Div:
            print_node(*n.lhs, names, PREC_TERM, out);
            out += " / ";
            print_node(*n.rhs, names, PREC_NEG, out);
            break;
        case Kind::Pow:
            print_node(*n.lhs, names, PREC_ATOM, out);
            out += '^';
            print_node(*n.rhs, names, PREC_NEG, out);
            break;
        case Kind::Fun: {
            switch (n.fun) {
                case ExprFun::Sin: out += "sin"; break;
                case ExprFun::Cos: out += "cos"; break;
                case ExprFun::Exp: out += "exp"; break;
                case ExprFun::Log: out += "log"; break;
                case ExprFun::Sqrt: out += "sqrt"; break;
                case ExprFun::Tanh: out += "tanh"; break;
            }
            out += '(';
            print_node(*n.lhs, names, 0, out);
            out += ')';
            break;
        }
    }
    if (wrap) out += ')';
}

std::shared_ptr<const std::vector<std::string>> make_names(std::span<const std::string_view> vars) {
    auto v = std::make_shared<std::vector<std::string>>();
    v->reserve(vars.size());
    for (auto s : vars) v->emplace_back(s);
    return v;
}

}  // namespace

const std::vector<std::string>& Expr::var_names() const {
    static const std::vector<std::string> empty;
    return vars_ ? *vars_ : empty;
}

double Expr::eval(std::span<const double> values) const {
    if (!root_) throw EvalError("empty expression");
    // Constants carry the default two-name list; extra values are harmless.
    if (static_cast<int>(values.size()) < num_vars())
        throw EvalError("too few variable values");
    double r = eval_node(*root_, values);
    if (!std::isfinite(r)) throw EvalError("non-finite result");
    return r;
}

double Expr::eval(double x, double y) const {
    const double v[2] = {x, y};
    return eval(std::span<const double>(v, 2));
}

double Expr::eval(double x, double y, double z) const {
    const double v[3] = {x, y, z};
    return eval(std::span<const double>(v, 3));
}

Expr Expr::derivative(int var) const {
    if (!root_) throw EvalError("empty expression");
    return Expr(diff_node(root_, var), vars_);
}

std::string Expr::to_string() const {
    if (!root_) return "";
    std::string out;
    print_node(*root_, var_names(), 0, out);
    return out;
}

std::shared_ptr<const std::vector<std::string>> Expr::vars_xy() {
    static const auto names =
        std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"x", "y"});
    return names;
}

std::shared_ptr<const std::vector<std::string>> Expr::vars_xyz() {
    static const auto names =
        std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"x", "y", "z"});
    return names;
}

Expr Expr::number(double v) { return Expr(number_node(v), vars_xy()); }

Expr Expr::var(int index, std::shared_ptr<const std::vector<std::string>> names) {
    if (!names || index < 0 || index >= static_cast<int>(names->size()))
        throw EvalError("variable index out of range");
    ExprNode n;
    n.kind = Kind::Var;
    n.var = index;
    return Expr(make_node(std::move(n)), std::move(names));
}

Expr Expr::call(ExprFun f, Expr arg) {
    return Expr(fun_node(f, arg.root_), arg.vars_);
}

namespace {

// A constant operand adopts the other side's variable list; otherwise the
// lists must agree.
void check_operands(const Expr& a, const Expr& b) {
    if (!a.valid() || !b.valid()) throw EvalError("empty expression");
    if (a.root()->kind != Kind::Number && b.root()->kind != Kind::Number &&
        a.var_names() != b.var_names())
        throw EvalError("operands use different variable lists");
}

}  // namespace

#define KSUB_EXPR_BINARY_OP(op, node_kind)                                     \
    Expr operator op(const Expr& a, const Expr& b) {                          \
        check_operands(a, b);                                                 \
        const Expr& carrier = (a.root()->kind == Kind::Number) ? b : a;       \
        return Expr(binary_node(node_kind, a.root(), b.root()), carrier.vars_); \
    }

KSUB_EXPR_BINARY_OP(+, Kind::Add)
KSUB_EXPR_BINARY_OP(-, Kind::Sub)
KSUB_EXPR_BINARY_OP(*, Kind::Mul)
KSUB_EXPR_BINARY_OP(/, Kind::Div)

#undef KSUB_EXPR_BINARY_OP

Expr Expr::operator-() const {
    if (!root_) throw EvalError("empty expression");
    return Expr(neg_node(root_), vars_);
}

Expr parse_expr(std::string_view text) {
    static constexpr std::string_view xy[] = {"x", "y"};
    return parse_expr(text, std::span<const std::string_view>(xy, 2));
}

Expr parse_expr(std::string_view text, std::span<const std::string_view> vars) {
    Parser p{text, 0, vars, nullptr};
    if (p.eof()) throw ParseError("empty expression", 0);
    ExprPtr root = p.parse_sum();
    if (!p.eof()) p.fail("unexpected trailing input", p.pos);
    std::shared_ptr<const std::vector<std::string>> names;
    if (vars.size() == 2 && vars[0] == "x" && vars[1] == "y") {
        names = Expr::vars_xy();
    } else if (vars.size() == 3 && vars[0] == "x" && vars[1] == "y" && vars[2] == "z") {
        names = Expr::vars_xyz();
    } else {
        names = make_names(vars);
    }
    return Expr(std::move(root), std::move(names));
}

Expr differentiate(const Expr& e, int var) { return e.derivative(var); }

}  // namespace ksub
