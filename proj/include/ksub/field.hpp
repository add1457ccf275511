#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include "ksub/expr.hpp"

namespace ksub {

/// Smooth real function of (x, y) carrying exact first partials.
///
/// Expression-backed fields differentiate symbolically, so every derivative
/// order stays exact. Native fields supply value and first partials as
/// callables; differentiating one of those a second time falls back to
/// central differences of the exact first partials. Arithmetic on fields
/// propagates partials by the product, quotient and chain rules, so a
/// composite of exact fields is still exact to first order.
///
/// Fields are immutable; copies share state and evaluation is thread-safe
/// as long as the wrapped callables are.
class ScalarField {
public:
    using Fn = std::function<double(double, double)>;

    ScalarField();  // the zero field

    static ScalarField from_expr(Expr e);
    static ScalarField from_expr_text(std::string_view text);
    static ScalarField constant(double c);
    static ScalarField coordinate(int var);  // 0 = x, 1 = y
    static ScalarField native(Fn value, Fn dx, Fn dy);
    /// Value only; partials by central differences with the default step.
    static ScalarField native_fd(Fn value);

    double operator()(double x, double y) const;
    double dx(double x, double y) const;
    double dy(double x, double y) const;

    /// The partial derivative as a field of its own (symbolic when possible).
    ScalarField derivative(int var) const;

    bool expression_backed() const;
    const Expr* expr() const;  // nullptr for native fields

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
    ScalarField operator-() const;
    friend ScalarField operator*(double c, const ScalarField& f);

    struct Impl;  // opaque; public so the combinators can share it

private:
    explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Smooth real function of an ambient point (x, y, z) with exact or
/// finite-difference first partials. Used for vector fields given in space.
class ScalarField3 {
public:
    using Fn = std::function<double(double, double, double)>;

    ScalarField3();

    static ScalarField3 from_expr(Expr e);  // expression over x, y, z
    static ScalarField3 from_expr_text(std::string_view text);
    static ScalarField3 constant(double c);
    static ScalarField3 native(Fn value, Fn dx, Fn dy, Fn dz);
    /// Value only; partials by central differences with step 1e-5 * (1 + |p|).
    static ScalarField3 native_fd(Fn value);

    double operator()(double x, double y, double z) const;
    double dx(double x, double y, double z) const;
    double dy(double x, double y, double z) const;
    double dz(double x, double y, double z) const;

    struct Impl;  // opaque

private:
    explicit ScalarField3(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

}  // namespace ksub
