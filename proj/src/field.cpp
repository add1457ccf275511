#include "ksub/field.hpp"

#include <cmath>
#include <optional>

#include "ksub/numerics.hpp"

namespace ksub {

struct ScalarField::Impl {
    Fn v, dvx, dvy;
    std::optional<Expr> e;  // present iff the field is expression-backed
};

namespace {

using Impl = ScalarField::Impl;
using Fn = ScalarField::Fn;

std::shared_ptr<const Impl> make_expr_impl(Expr e) {
    auto impl = std::make_shared<Impl>();
    Expr ex = e.derivative(0);
    Expr ey = e.derivative(1);
    impl->v = [e](double x, double y) { return e.eval(x, y); };
    impl->dvx = [ex](double x, double y) { return ex.eval(x, y); };
    impl->dvy = [ey](double x, double y) { return ey.eval(x, y); };
    impl->e = std::move(e);
    return impl;
}

std::shared_ptr<const Impl> make_native_impl(Fn v, Fn dx, Fn dy) {
    auto impl = std::make_shared<Impl>();
    impl->v = std::move(v);
    impl->dvx = std::move(dx);
    impl->dvy = std::move(dy);
    return impl;
}

Fn fd_of(Fn f, int var) {
    return [f = std::move(f), var](double x, double y) {
        return central_diff(f, x, y, var, default_fd_step(x, y));
    };
}

}  // namespace

ScalarField::ScalarField() : impl_(make_expr_impl(Expr::number(0.0))) {}

ScalarField ScalarField::from_expr(Expr e) { return ScalarField(make_expr_impl(std::move(e))); }

ScalarField ScalarField::from_expr_text(std::string_view text) {
    return from_expr(parse_expr(text));
}

ScalarField ScalarField::constant(double c) { return from_expr(Expr::number(c)); }

ScalarField ScalarField::coordinate(int var) {
    return from_expr(Expr::var(var, Expr::vars_xy()));
}

ScalarField ScalarField::native(Fn value, Fn dx, Fn dy) {
    return ScalarField(make_native_impl(std::move(value), std::move(dx), std::move(dy)));
}

ScalarField ScalarField::native_fd(Fn value) {
    Fn dx = fd_of(value, 0);
    Fn dy = fd_of(value, 1);
    return native(std::move(value), std::move(dx), std::move(dy));
}

double ScalarField::operator()(double x, double y) const { return impl_->v(x, y); }
double ScalarField::dx(double x, double y) const { return impl_->dvx(x, y); }
double ScalarField::dy(double x, double y) const { return impl_->dvy(x, y); }

ScalarField ScalarField::derivative(int var) const {
    if (impl_->e) return from_expr(impl_->e->derivative(var));
    // The first partial is exact; its own partials fall back to differences.
    Fn d = (var == 0) ? impl_->dvx : impl_->dvy;
    return native_fd(std::move(d));
}

bool ScalarField::expression_backed() const { return impl_->e.has_value(); }

const Expr* ScalarField::expr() const { return impl_->e ? &*impl_->e : nullptr; }

namespace {

const Expr* expr_of(const ScalarField& f) { return f.expr(); }

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    if (expr_of(a) && expr_of(b)) return ScalarField::from_expr(*a.expr() + *b.expr());
    auto ai = a.impl_, bi = b.impl_;
    return ScalarField::native(
        [ai, bi](double x, double y) { return ai->v(x, y) + bi->v(x, y); },
        [ai, bi](double x, double y) { return ai->dvx(x, y) + bi->dvx(x, y); },
        [ai, bi](double x, double y) { return ai->dvy(x, y) + bi->dvy(x, y); });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    if (expr_of(a) && expr_of(b)) return ScalarField::from_expr(*a.expr() - *b.expr());
    auto ai = a.impl_, bi = b.impl_;
    return ScalarField::native(
        [ai, bi](double x, double y) { return ai->v(x, y) - bi->v(x, y); },
        [ai, bi](double x, double y) { return ai->dvx(x, y) - bi->dvx(x, y); },
        [ai, bi](double x, double y) { return ai->dvy(x, y) - bi->dvy(x, y); });
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    if (expr_of(a) && expr_of(b)) return ScalarField::from_expr(*a.expr() * *b.expr());
    auto ai = a.impl_, bi = b.impl_;
    return ScalarField::native(
        [ai, bi](double x, double y) { return ai->v(x, y) * bi->v(x, y); },
        [ai, bi](double x, double y) {
            return ai->dvx(x, y) * bi->v(x, y) + ai->v(x, y) * bi->dvx(x, y);
        },
        [ai, bi](double x, double y) {
            return ai->dvy(x, y) * bi->v(x, y) + ai->v(x, y) * bi->dvy(x, y);
        });
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    if (expr_of(a) && expr_of(b)) return ScalarField::from_expr(*a.expr() / *b.expr());
    auto ai = a.impl_, bi = b.impl_;
    auto den = [bi](double x, double y) {
        double g = bi->v(x, y);
        if (g == 0.0) throw EvalError("field division by zero");
        return g;
    };
    return ScalarField::native(
        [ai, den](double x, double y) { return ai->v(x, y) / den(x, y); },
        [ai, bi, den](double x, double y) {
            double g = den(x, y);
            return (ai->dvx(x, y) * g - ai->v(x, y) * bi->dvx(x, y)) / (g * g);
        },
        [ai, bi, den](double x, double y) {
            double g = den(x, y);
            return (ai->dvy(x, y) * g - ai->v(x, y) * bi->dvy(x, y)) / (g * g);
        });
}

ScalarField ScalarField::operator-() const {
    if (impl_->e) return from_expr(-*impl_->e);
    auto i = impl_;
    return native([i](double x, double y) { return -i->v(x, y); },
                  [i](double x, double y) { return -i->dvx(x, y); },
                  [i](double x, double y) { return -i->dvy(x, y); });
}

ScalarField operator*(double c, const ScalarField& f) {
    return ScalarField::constant(c) * f;
}

// ---------------------------------------------------------------------------

struct ScalarField3::Impl {
    Fn v, dvx, dvy, dvz;
};

namespace {

ScalarField3::Fn fd3_of(ScalarField3::Fn f, int var) {
    return [f = std::move(f), var](double x, double y, double z) {
        const double h = 1e-5 * (1.0 + std::sqrt(x * x + y * y + z * z));
        double p[3] = {x, y, z};
        p[var] += h;
        const double hi = f(p[0], p[1], p[2]);
        p[var] -= 2.0 * h;
        const double lo = f(p[0], p[1], p[2]);
        return (hi - lo) / (2.0 * h);
    };
}

}  // namespace

ScalarField3::ScalarField3() : ScalarField3(constant(0.0)) {}

ScalarField3 ScalarField3::from_expr(Expr e) {
    if (e.num_vars() > 3) throw EvalError("ambient field needs variables x, y, z");
    auto impl = std::make_shared<Impl>();
    Expr ex = e.derivative(0), ey = e.derivative(1), ez = e.derivative(2);
    impl->v = [e](double x, double y, double z) { return e.eval(x, y, z); };
    impl->dvx = [ex](double x, double y, double z) { return ex.eval(x, y, z); };
    impl->dvy = [ey](double x, double y, double z) { return ey.eval(x, y, z); };
    impl->dvz = [ez](double x, double y, double z) { return ez.eval(x, y, z); };
    return ScalarField3(std::move(impl));
}

ScalarField3 ScalarField3::from_expr_text(std::string_view text) {
    static constexpr std::string_view xyz[] = {"x", "y", "z"};
    return from_expr(parse_expr(text, std::span<const std::string_view>(xyz, 3)));
}

ScalarField3 ScalarField3::constant(double c) {
    auto impl = std::make_shared<Impl>();
    impl->v = [c](double, double, double) { return c; };
    impl->dvx = impl->dvy = impl->dvz = [](double, double, double) { return 0.0; };
    return ScalarField3(std::move(impl));
}

ScalarField3 ScalarField3::native(Fn value, Fn dx, Fn dy, Fn dz) {
    auto impl = std::make_shared<Impl>();
    impl->v = std::move(value);
    impl->dvx = std::move(dx);
    impl->dvy = std::move(dy);
    impl->dvz = std::move(dz);
    return ScalarField3(std::move(impl));
}

ScalarField3 ScalarField3::native_fd(Fn value) {
    Fn dx = fd3_of(value, 0), dy = fd3_of(value, 1), dz = fd3_of(value, 2);
    return native(std::move(value), std::move(dx), std::move(dy), std::move(dz));
}

double ScalarField3::operator()(double x, double y, double z) const { return impl_->v(x, y, z); }
double ScalarField3::dx(double x, double y, double z) const { return impl_->dvx(x, y, z); }
double ScalarField3::dy(double x, double y, double z) const { return impl_->dvy(x, y, z); }
double ScalarField3::dz(double x, double y, double z) const { return impl_->dvz(x, y, z); }

}  // namespace ksub
