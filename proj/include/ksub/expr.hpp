#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ksub/errors.hpp"

namespace ksub {

enum class ExprFun { Sin, Cos, Exp, Log, Sqrt, Tanh };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Fun };

    Kind kind = Kind::Number;
    double number = 0.0;        // Kind::Number
    int var = -1;               // Kind::Var, index into the variable list
    ExprFun fun = ExprFun::Sin; // Kind::Fun
    ExprPtr lhs;                // operand (unary) or left operand
    ExprPtr rhs;                // right operand, null for unary nodes
};

/// Immutable symbolic expression over a fixed, ordered variable list.
/// Nodes are shared; copies are cheap and all operations are thread-safe.
class Expr {
public:
    Expr() = default;

    bool valid() const noexcept { return root_ != nullptr; }
    const ExprPtr& root() const noexcept { return root_; }
    int num_vars() const noexcept { return static_cast<int>(vars_ ? vars_->size() : 0); }
    const std::vector<std::string>& var_names() const;

    /// Evaluate at the given variable values (size must equal num_vars()).
    /// Throws EvalError outside the real domain or on a non-finite result.
    double eval(std::span<const double> values) const;
    double eval(double x, double y) const;
    double eval(double x, double y, double z) const;

    /// Exact partial derivative with respect to variable `var`.
    /// Simplification is limited to constant folding and the 0/1 identities.
    Expr derivative(int var) const;

    /// Render with minimal parentheses; reparsing yields an expression that
    /// evaluates identically.
    std::string to_string() const;

    // Programmatic builders. Both operands must share a variable list.
    static Expr number(double v);
    static Expr var(int index, std::shared_ptr<const std::vector<std::string>> names);
    static Expr call(ExprFun f, Expr arg);
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;

    /// Shared variable lists used by the builders and parsers.
    static std::shared_ptr<const std::vector<std::string>> vars_xy();
    static std::shared_ptr<const std::vector<std::string>> vars_xyz();

private:
    Expr(ExprPtr root, std::shared_ptr<const std::vector<std::string>> vars)
        : root_(std::move(root)), vars_(std::move(vars)) {}

    ExprPtr root_;
    std::shared_ptr<const std::vector<std::string>> vars_;

    friend Expr parse_expr(std::string_view, std::span<const std::string_view>);
};

/// Parse an expression over variables x, y.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// decimal literals, the constant pi, and sin cos exp log sqrt tanh.
/// Precedence, loosest first: + -, * /, unary minus, ^.
/// Throws ParseError with a byte offset on malformed input or unknown names.
Expr parse_expr(std::string_view text);

/// Parse over an explicit variable list (e.g. {"x","y","z"} for ambient fields).
Expr parse_expr(std::string_view text, std::span<const std::string_view> vars);

/// Convenience wrapper for Expr::derivative.
Expr differentiate(const Expr& e, int var);

}  // namespace ksub
