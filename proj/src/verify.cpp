#include "ksub/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "ksub/curvature.hpp"
#include "ksub/errors.hpp"
#include "ksub/field.hpp"
#include "ksub/model.hpp"
#include "ksub/model_io.hpp"
#include "ksub/numerics.hpp"
#include "ksub/paths.hpp"
#include "ksub/sphere.hpp"
#include "ksub/surface.hpp"

namespace ksub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic across compilers, unlike uniform_real_distribution.
double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

int irand(std::mt19937_64& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

class SuiteBuilder {
public:
    explicit SuiteBuilder(std::string name) { result_.suite = std::move(name); }

    void check(const std::string& name, double tol, const std::function<double()>& residual) {
        CheckResult c;
        c.name = name;
        c.tolerance = tol;
        try {
            c.residual = residual();
        } catch (const std::exception& e) {
            c.name += std::string(" [") + e.what() + "]";
            c.residual = kInf;
        }
        if (!std::isfinite(c.residual)) c.residual = std::numeric_limits<double>::max();
        c.passed = c.residual <= tol;
        result_.checks.push_back(std::move(c));
    }

    SuiteResult take() { return std::move(result_); }

private:
    SuiteResult result_;
};

// Five model families behind the randomized draws; `t` scales the bundle
// curvature. Sample points are kept in [-0.8, 0.8]^2, interior to every
// family's domain (the kappa = -1 disk has radius 2).
KillingModel family_model(int which, double t) {
    switch (which) {
        case 0: return eck_preset(0.0, t);
        case 1: return eck_preset(-1.0, t);
        case 2: return eck_preset(1.0, t);
        case 3: {
            ConformalSurface s(Domain::full_plane(), ScalarField::constant(1.0));
            return KillingModel(s, ScalarField::constant(0.0),
                                ScalarField::from_expr_text("x^2"));  // tau = x
        }
        default: {
            ConformalSurface s(Domain::full_plane(),
                               ScalarField::from_expr_text("1 + 0.25*(x^2 + y^2)"));
            return KillingModel(s, ScalarField::from_expr_text("0.2*sin(y)"),
                                ScalarField::from_expr_text("0.3*x^2 - 0.1*y"));
        }
    }
}

Expr random_polynomial_expr(std::mt19937_64& rng) {
    const auto vars = Expr::vars_xy();
    const Expr x = Expr::var(0, vars), y = Expr::var(1, vars);
    const auto c = [&] { return Expr::number(urand(rng, -1.0, 1.0)); };
    return c() * x + c() * y + c() * x * y + c() * x * x + c() * y * y + c() * x * x * y;
}

Expr random_node(std::mt19937_64& rng, int depth) {
    const auto vars = Expr::vars_xy();
    if (depth <= 0) {
        switch (irand(rng, 3)) {
            case 0: return Expr::number(urand(rng, -2.0, 2.0));
            case 1: return Expr::var(0, vars);
            default: return Expr::var(1, vars);
        }
    }
    switch (irand(rng, 8)) {
        case 0: return random_node(rng, depth - 1) + random_node(rng, depth - 1);
        case 1: return random_node(rng, depth - 1) - random_node(rng, depth - 1);
        case 2: return random_node(rng, depth - 1) * random_node(rng, depth - 1);
        case 3:
            // denominator structurally in [0.5, 4]
            return random_node(rng, depth - 1) /
                   (Expr::number(urand(rng, 1.5, 3.0)) +
                    Expr::call(ExprFun::Sin, random_node(rng, depth - 1)));
        case 4: return Expr::call(ExprFun::Sin, random_node(rng, depth - 1));
        case 5: return Expr::call(ExprFun::Cos, random_node(rng, depth - 1));
        case 6: return Expr::call(ExprFun::Tanh, random_node(rng, depth - 1));
        default:
            switch (irand(rng, 3)) {
                case 0:
                    return Expr::call(ExprFun::Exp,
                                      Expr::call(ExprFun::Sin, random_node(rng, depth - 1)));
                case 1:  // argument in [0.5, 4]
                    return Expr::call(ExprFun::Log,
                                      Expr::number(urand(rng, 1.5, 3.0)) +
                                          Expr::call(ExprFun::Cos, random_node(rng, depth - 1)));
                default:  // argument in [0.25, 3.25]
                    return Expr::call(ExprFun::Sqrt,
                                      Expr::number(urand(rng, 1.25, 2.25)) +
                                          Expr::call(ExprFun::Sin, random_node(rng, depth - 1)));
            }
    }
}

// --- exprs ------------------------------------------------------------

SuiteResult suite_exprs() {
    SuiteBuilder sb("exprs");

    sb.check("symbolic derivatives match central differences", 1e-5, [] {
        std::mt19937_64 rng(kVerifySeed);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Expr e = random_expression(rng, 4);
            Expr dx = e.derivative(0), dy = e.derivative(1);
            const auto f = [&](double u, double v) { return e.eval(u, v); };
            for (int k = 0; k < 10; ++k) {
                double x = urand(rng, -1.2, 1.2), y = urand(rng, -1.2, 1.2);
                double fdx = central_diff(f, x, y, 0, default_fd_step(x, y));
                double fdy = central_diff(f, x, y, 1, default_fd_step(x, y));
                worst = std::max(worst, std::abs(dx.eval(x, y) - fdx) / (1.0 + std::abs(fdx)));
                worst = std::max(worst, std::abs(dy.eval(x, y) - fdy) / (1.0 + std::abs(fdy)));
            }
        }
        return worst;
    });

    sb.check("parse of the printed form evaluates identically", 1e-12, [] {
        std::mt19937_64 rng(kVerifySeed + 1);
        double worst = 0.0;
        for (int i = 0; i < 60; ++i) {
            Expr e = random_expression(rng, 4);
            Expr back = parse_expr(parse_expr(e.to_string()).to_string());
            for (int k = 0; k < 6; ++k) {
                double x = urand(rng, -1.2, 1.2), y = urand(rng, -1.2, 1.2);
                worst = std::max(worst, std::abs(e.eval(x, y) - back.eval(x, y)));
            }
        }
        return worst;
    });

    return sb.take();
}

// --- numerics ---------------------------------------------------------

SuiteResult suite_numerics() {
    SuiteBuilder sb("numerics");

    sb.check("step halving cuts the rk4 error by a fourth-order factor", 0.0, [] {
        const OdeRhs rhs = [](double, std::span<const double> s, std::span<double> d) {
            d[0] = -s[1];
            d[1] = s[0];
        };
        const auto err_with = [&](double step) {
            const std::vector<double> s0{1.0, 0.0};
            OdeTrajectory tr = rk4(rhs, s0, 0.0, 2 * M_PI, step);
            const auto& last = tr.states.back();
            return std::hypot(last[0] - 1.0, last[1]);
        };
        const double ratio = err_with(2 * M_PI / 200) / err_with(2 * M_PI / 400);
        return std::max(0.0, std::max(12.0 - ratio, ratio - 20.0));
    });

    sb.check("disk quadrature integrates constants exactly", 1e-12, [] {
        double worst = 0.0;
        for (double c : {1.0, -3.5, 0.25})
            for (double r : {0.5, 1.0, 3.0}) {
                const double v =
                    quad_disk([&](double, double) { return c; }, DiskRegion{0.3, -0.2, r}, 16, 16);
                worst = std::max(worst, std::abs(v / (c * M_PI * r * r) - 1.0));
            }
        return worst;
    });

    sb.check("adaptive quadrature is exact on cubics", 1e-13, [] {
        const auto F = [](double x) {
            return x * x * x * x / 4 - 2 * x * x * x / 3 + 3 * x * x / 2 - 5 * x;
        };
        const double v =
            quad1d([](double x) { return ((x - 2) * x + 3) * x - 5; }, -1.0, 2.0);
        return std::abs(v - (F(2.0) - F(-1.0)));
    });

    return sb.take();
}

// --- frames -----------------------------------------------------------

SuiteResult suite_frames() {
    SuiteBuilder sb("frames");

    sb.check("constant-curvature factors hit their kappa", 1e-6, [] {
        std::mt19937_64 rng(kVerifySeed + 10);
        double worst = 0.0;
        for (double kappa : {-1.0, -0.25, 0.0, 1.0, 4.0}) {
            ConformalSurface s = lambda_kappa_surface(kappa);
            const double R = kappa < 0 ? 0.85 * 2.0 / std::sqrt(-kappa) : 3.0;
            for (int i = 0; i < 50; ++i) {
                const double rho = R * std::sqrt(urand(rng, 0.0, 1.0));
                const double phi = urand(rng, 0.0, 2 * M_PI);
                worst = std::max(worst, std::abs(s.gaussian_curvature(rho * std::cos(phi),
                                                                      rho * std::sin(phi)) -
                                                 kappa));
            }
        }
        return worst;
    });

    sb.check("curvature of the radial factors is rotation invariant", 1e-10, [] {
        std::mt19937_64 rng(kVerifySeed + 11);
        double worst = 0.0;
        for (double kappa : {-1.0, 1.0}) {
            ConformalSurface s = lambda_kappa_surface(kappa);
            for (int i = 0; i < 20; ++i) {
                const double r = urand(rng, 0.1, 1.5);
                const double t = urand(rng, 0.0, 2 * M_PI);
                worst = std::max(worst, std::abs(s.gaussian_curvature(r, 0.0) -
                                                 s.gaussian_curvature(r * std::cos(t),
                                                                      r * std::sin(t))));
            }
        }
        return worst;
    });

    sb.check("canonical frame is orthonormal", 1e-12, [] {
        std::mt19937_64 rng(kVerifySeed + 12);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            Point3 p{urand(rng, -0.8, 0.8), urand(rng, -0.8, 0.8), urand(rng, -2.0, 2.0)};
            Metric3 g = m.metric_at(p);
            Frame3 f = m.frame_at(p);
            const Vec3* e[3] = {&f.e1, &f.e2, &f.e3};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst,
                                     std::abs(g.inner(*e[r], *e[c]) - (r == c ? 1.0 : 0.0)));
        }
        return worst;
    });

    sb.check("gauge changes preserve the bundle curvature", 1e-8, [] {
        std::mt19937_64 rng(kVerifySeed + 13);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            KillingModel shifted = gauge_shift(m, ScalarField::from_expr(random_polynomial_expr(rng)));
            for (int k = 0; k < 12; ++k) {
                const double x = urand(rng, -0.8, 0.8), y = urand(rng, -0.8, 0.8);
                worst = std::max(worst,
                                 std::abs(shifted.bundle_curvature(x, y) - m.bundle_curvature(x, y)));
            }
        }
        return worst;
    });

    sb.check("gauge shear pulls the metric back", 1e-9, [] {
        std::mt19937_64 rng(kVerifySeed + 14);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            ScalarField d = ScalarField::from_expr(random_polynomial_expr(rng));
            KillingModel shifted = gauge_shift(m, d);
            for (int k = 0; k < 20; ++k) {
                Point3 p{urand(rng, -0.8, 0.8), urand(rng, -0.8, 0.8), urand(rng, -1.0, 1.0)};
                Vec3 u{urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1)};
                Vec3 v{urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1)};
                // the shear (x,y,z) -> (x,y,z-d) carries the shifted model
                // isometrically onto the original
                Vec3 du = gauge_shear_differential(d, p, u);
                Vec3 dv = gauge_shear_differential(d, p, v);
                Point3 q{p.x, p.y, p.z - d(p.x, p.y)};
                worst = std::max(worst, std::abs(m.metric_at(q).inner(du, dv) -
                                                 shifted.metric_at(p).inner(u, v)));
            }
        }
        return worst;
    });

    sb.check("prescribed bundle curvature round trips", 1e-6, [] {
        std::mt19937_64 rng(kVerifySeed + 15);
        double worst = 0.0;
        for (const char* txt : {"0", "0.5", "x", "x^2 - y", "sin(x)*cos(y)"}) {
            ConformalSurface s(Domain::full_plane(), ScalarField::constant(1.0));
            ScalarField tau = ScalarField::from_expr_text(txt);
            KillingModel m = model_from_tau(s, tau);
            for (int k = 0; k < 20; ++k) {
                const double x = urand(rng, -0.8, 0.8), y = urand(rng, -0.8, 0.8);
                worst = std::max(worst, std::abs(m.bundle_curvature(x, y) - tau(x, y)));
            }
        }
        return worst;
    });

    sb.check("metric ignores the fiber coordinate and has unit vertical norm", 1e-15, [] {
        std::mt19937_64 rng(kVerifySeed + 16);
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            const double x = urand(rng, -0.8, 0.8), y = urand(rng, -0.8, 0.8);
            Metric3 g0 = m.metric_at({x, y, urand(rng, -5.0, 5.0)});
            Metric3 g1 = m.metric_at({x, y, urand(rng, -5.0, 5.0)});
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(g0.g[r][c] - g1.g[r][c]));
            worst = std::max(worst, std::abs(g0.g[2][2] - 1.0));
        }
        return worst;
    });

    return sb.take();
}

// --- holonomy ---------------------------------------------------------

SuiteResult suite_holonomy() {
    SuiteBuilder sb("holonomy");

    sb.check("unit circle at half bundle curvature lifts to gap pi", 1e-5, [] {
        KillingModel m = eck_preset(0.0, 0.5);
        return std::abs(holonomy_gap(m, circle_curve(0.0, 0.0, 1.0), 1e-4) - M_PI);
    });

    sb.check("flat product has zero holonomy", 1e-12, [] {
        KillingModel m = eck_preset(0.0, 0.0);
        return holonomy_gap(m, circle_curve(0.3, -0.4, 0.8), 1e-3);
    });

    sb.check("lift gap matches twice the curvature integral", 1e-4, [] {
        std::mt19937_64 rng(kVerifySeed + 20);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            const double cx = urand(rng, -0.5, 0.5), cy = urand(rng, -0.5, 0.5);
            const double r = urand(rng, 0.2, 0.6);
            worst = std::max(worst, verify_holonomy(m, circle_curve(cx, cy, r), 1e-4));
        }
        return worst;
    });

    sb.check("lift velocity stays horizontal", 1e-6, [] {
        std::mt19937_64 rng(kVerifySeed + 21);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            ClosedCurve2 c = circle_curve(urand(rng, -0.4, 0.4), urand(rng, -0.4, 0.4),
                                          urand(rng, 0.3, 0.7));
            const double h = 1e-3;
            Path3 path = horizontal_lift(m, c.curve, 0.0, h);
            const auto& s = path.samples;
            const Vec3 xi{0.0, 0.0, 1.0};
            // five-point differences; stay clear of the shortened final step
            for (std::size_t k = 2; k + 3 < s.size(); k += 25) {
                const auto d1 = [&](auto get) {
                    return (-get(s[k + 2].p) + 8 * get(s[k + 1].p) - 8 * get(s[k - 1].p) +
                            get(s[k - 2].p)) /
                           (12 * h);
                };
                Vec3 v{d1([](const Point3& q) { return q.x; }),
                       d1([](const Point3& q) { return q.y; }),
                       d1([](const Point3& q) { return q.z; })};
                worst = std::max(worst, std::abs(m.metric_at(s[k].p).inner(v, xi)));
            }
        }
        return worst;
    });

    return sb.take();
}

// --- curvature ----------------------------------------------------------

// Spanning pair for the plane with g-unit normal n: project the coordinate
// axes onto the plane and keep the two largest images.
std::pair<Vec3, Vec3> plane_spanners(const Metric3& g, const Vec3& n) {
    Vec3 w[3];
    double q[3];
    for (int j = 0; j < 3; ++j) {
        Vec3 e{};
        e[j] = 1.0;
        const double c = g.inner(e, n);
        for (int k = 0; k < 3; ++k) w[j][k] = e[k] - c * n[k];
        q[j] = g.norm2(w[j]);
    }
    int smallest = 0;
    for (int j = 1; j < 3; ++j)
        if (q[j] < q[smallest]) smallest = j;
    return {w[(smallest + 1) % 3], w[(smallest + 2) % 3]};
}

SuiteResult suite_curvature() {
    SuiteBuilder sb("curvature");

    sb.check("connection table is antisymmetric in the last two slots", 0.0, [] {
        std::mt19937_64 rng(kVerifySeed + 30);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            ConnectionTable t =
                connection_table(m, {urand(rng, -0.8, 0.8), urand(rng, -0.8, 0.8), 0.0});
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        worst = std::max(worst, std::abs(t.c[a][b][c] + t.c[a][c][b]));
        }
        return worst;
    });

    sb.check("closed-form sectional matches the finite-difference oracle", 1e-3, [] {
        std::mt19937_64 rng(kVerifySeed + 31);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            KillingModel m = family_model(i % 5, urand(rng, -1.0, 1.0));
            Point3 p{urand(rng, -0.7, 0.7), urand(rng, -0.7, 0.7), urand(rng, -1.0, 1.0)};
            Vec3 dir{urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1)};
            if (std::abs(dir[0]) + std::abs(dir[1]) + std::abs(dir[2]) < 0.2) dir[0] += 1.0;
            PlaneSpec plane = plane_from_normal(m, p, dir);
            auto [u, v] = plane_spanners(m.metric_at(p), plane.normal);
            const double oracle = fd_riemann_oracle(m, p, u, v);
            const double closed = sectional(m, plane);
            worst = std::max(worst, std::abs(closed - oracle) / (1.0 + std::abs(oracle)));
        }
        return worst;
    });

    sb.check("horizontal and vertical planes in closed form", 1e-12, [] {
        std::mt19937_64 rng(kVerifySeed + 32);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            const double x = urand(rng, -0.7, 0.7), y = urand(rng, -0.7, 0.7);
            Point3 p{x, y, 0.0};
            const double km = m.surface().gaussian_curvature(x, y);
            const double tau = m.bundle_curvature(x, y);
            Frame3 f = m.frame_at(p);
            const double kh = sectional(m, plane_from_normal(m, p, Vec3{0, 0, 1}));
            const double kv1 = sectional(m, plane_from_normal(m, p, f.e1));
            const double kv2 = sectional(m, plane_from_normal(m, p, f.e2));
            worst = std::max({worst, std::abs(kh - (km - 3 * tau * tau)),
                              std::abs(kv1 - tau * tau), std::abs(kv2 - tau * tau)});
        }
        return worst;
    });

    sb.check("vertical planes never curve negatively", 0.0, [] {
        std::mt19937_64 rng(kVerifySeed + 33);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            Point3 p{urand(rng, -0.7, 0.7), urand(rng, -0.7, 0.7), 0.0};
            // any horizontal normal gives a vertical plane
            const double phi = urand(rng, 0.0, 2 * M_PI);
            Frame3 f = m.frame_at(p);
            Vec3 n{};
            for (int k = 0; k < 3; ++k)
                n[k] = std::cos(phi) * f.e1[k] + std::sin(phi) * f.e2[k];
            worst = std::max(worst, -std::min(0.0, sectional(m, plane_from_normal(m, p, n))));
        }
        return worst;
    });

    sb.check("scalar curvature equals the Ricci trace", 1e-6, [] {
        std::mt19937_64 rng(kVerifySeed + 34);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            KillingModel m = family_model(irand(rng, 5), urand(rng, -1.0, 1.0));
            Point3 p{urand(rng, -0.7, 0.7), urand(rng, -0.7, 0.7), 0.0};
            Frame3 f = m.frame_at(p);
            const double trace =
                ricci(m, p, f.e1) + ricci(m, p, f.e2) + ricci(m, p, f.e3);
            worst = std::max(worst, std::abs(scalar_curvature(m, p) - trace));
        }
        return worst;
    });

    sb.check("reference space curvatures", 1e-12, [] {
        double worst = 0.0;
        KillingModel nil = eck_preset(0.0, 0.5);
        Point3 o{0.1, -0.2, 0.3};
        worst = std::max(worst,
                         std::abs(sectional(nil, plane_from_normal(nil, o, Vec3{0, 0, 1})) + 0.75));
        worst = std::max(worst,
                         std::abs(sectional(nil, plane_from_normal(nil, o, nil.frame_at(o).e1)) - 0.25));
        KillingModel round = eck_preset(4.0, 1.0);
        worst = std::max(worst, std::abs(scalar_curvature(round, {0.05, 0.1, 0.0}) - 6.0));
        KillingModel generic = family_model(4, 0.0);
        Point3 p{0.2, 0.3, 0.0};
        const double tau = generic.bundle_curvature(p.x, p.y);
        worst = std::max(worst,
                         std::abs(ricci(generic, p, generic.frame_at(p).e3) - 2 * tau * tau));
        return worst;
    });

    sb.check("homogeneous presets classify by their constants", 1e-6, [] {
        std::vector<std::array<double, 2>> grid;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) grid.push_back({-0.75 + 0.3 * i, -0.75 + 0.3 * j});
        double worst = 0.0;
        const double pairs[][2] = {{0, 0.5}, {-1, 0.3}, {1, 1}, {4, 1}, {-0.25, 0}, {0, 0}};
        for (const auto& kt : pairs) {
            HomogeneityResult h =
                classify_homogeneous(eck_preset(kt[0], kt[1]), grid, 1e-6);
            if (!h.homogeneous) return kInf;
            worst = std::max({worst, std::abs(h.kappa_mean - kt[0]),
                              std::abs(h.tau_mean - kt[1]), h.kappa_range, h.tau_range});
        }
        HomogeneityResult h = classify_homogeneous(family_model(3, 0.0), grid, 1e-6);
        if (h.homogeneous || h.tau_constant) return kInf;
        return worst;
    });

    return sb.take();
}

// --- geodesics ----------------------------------------------------------

SuiteResult suite_geodesics() {
    SuiteBuilder sb("geodesics");

    sb.check("speed and vertical momentum are conserved", 1e-6, [] {
        std::mt19937_64 rng(kVerifySeed + 40);
        double worst = 0.0;
        const double h = 1e-3;
        for (int i = 0; i < 8; ++i) {
            KillingModel m = i % 4 == 0   ? eck_preset(0.0, 0.5)
                             : i % 4 == 1 ? eck_preset(-1.0, 0.0)
                             : i % 4 == 2 ? eck_preset(4.0, 1.0)
                                          : family_model(3, 0.0);
            const double mu = (i < 4) ? 0.0 : urand(rng, -1.5, 1.5);
            GeodesicRun run =
                geodesic_run(m, {urand(rng, -0.3, 0.3), urand(rng, -0.3, 0.3), 0.0},
                             urand(rng, 0.0, 2 * M_PI), mu, 10.0, h);
            const auto& s = run.samples;
            const Vec3 xi{0.0, 0.0, 1.0};
            for (std::size_t k = 2; k + 3 < s.size(); k += 25) {
                const auto d1 = [&](auto get) {
                    return (-get(s[k + 2]) + 8 * get(s[k + 1]) - 8 * get(s[k - 1]) +
                            get(s[k - 2])) /
                           (12 * h);
                };
                Vec3 v{d1([](const GeodesicSample& q) { return q.x; }),
                       d1([](const GeodesicSample& q) { return q.y; }),
                       d1([](const GeodesicSample& q) { return q.z; })};
                Metric3 g = m.metric_at({s[k].x, s[k].y, s[k].z});
                worst = std::max(worst, std::abs(g.inner(v, xi) - run.mu));
                worst = std::max(worst, std::abs(g.norm2(v) - (1.0 + run.mu * run.mu)));
            }
        }
        return worst;
    });

    sb.check("projected curves bend by twice the slope times tau", 1e-4, [] {
        std::mt19937_64 rng(kVerifySeed + 41);
        double worst = 0.0;
        const double h = 1e-3;
        for (int i = 0; i < 4; ++i) {
            KillingModel m = (i % 2 == 0) ? eck_preset(0.0, 0.5) : family_model(3, 0.0);
            const double mu = urand(rng, -1.5, 1.5);
            GeodesicRun run =
                geodesic_run(m, {urand(rng, -0.3, 0.3), urand(rng, -0.3, 0.3), 0.0},
                             urand(rng, 0.0, 2 * M_PI), mu, 6.0, h);
            const auto& s = run.samples;
            const ScalarField& lam = m.surface().lambda();
            for (std::size_t k = 2; k + 3 < s.size(); k += 40) {
                const auto d1 = [&](auto get) {
                    return (-get(s[k + 2]) + 8 * get(s[k + 1]) - 8 * get(s[k - 1]) +
                            get(s[k - 2])) /
                           (12 * h);
                };
                const auto d2 = [&](auto get) {
                    return (-get(s[k + 2]) + 16 * get(s[k + 1]) - 30 * get(s[k]) +
                            16 * get(s[k - 1]) - get(s[k - 2])) /
                           (12 * h * h);
                };
                const auto X = [](const GeodesicSample& q) { return q.x; };
                const auto Y = [](const GeodesicSample& q) { return q.y; };
                const double xp = d1(X), yp = d1(Y), xpp = d2(X), ypp = d2(Y);
                const double thetap = (xp * ypp - yp * xpp) / (xp * xp + yp * yp);
                const double l = lam(s[k].x, s[k].y);
                const double lx = lam.dx(s[k].x, s[k].y), ly = lam.dy(s[k].x, s[k].y);
                const double kg = thetap + (lx / (l * l)) * (l * yp) - (ly / (l * l)) * (l * xp);
                worst = std::max(worst,
                                 std::abs(kg - 2 * mu * m.bundle_curvature(s[k].x, s[k].y)));
            }
        }
        return worst;
    });

    sb.check("slope-one circle at half bundle curvature closes", 1e-5, [] {
        GeodesicRun run = geodesic_run(eck_preset(0.0, 0.5), {0, 0, 0}, 0.0, 1.0, 2 * M_PI, 1e-3);
        const auto& last = run.samples.back();
        return std::hypot(last.x, last.y);
    });

    sb.check("repeated integration is bitwise identical", 0.0, [] {
        KillingModel m = eck_preset(-1.0, 0.3);
        GeodesicRun a = geodesic_run(m, {0.1, 0.2, 0.0}, 0.7, 0.4, 5.0, 1e-3);
        GeodesicRun b = geodesic_run(m, {0.1, 0.2, 0.0}, 0.7, 0.4, 5.0, 1e-3);
        if (a.samples.size() != b.samples.size()) return kInf;
        double worst = 0.0;
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            worst = std::max({worst, std::abs(a.samples[k].x - b.samples[k].x),
                              std::abs(a.samples[k].y - b.samples[k].y),
                              std::abs(a.samples[k].theta - b.samples[k].theta),
                              std::abs(a.samples[k].z - b.samples[k].z)});
        }
        return worst;
    });

    sb.check("vertical geodesics run straight up the fiber", 0.0, [] {
        KillingModel m = family_model(4, 0.0);
        Path3 p = vertical_geodesic(m, {0.3, -0.2, 0.5}, 3.0, 0.1);
        double worst = 0.0;
        for (const auto& s : p.samples)
            worst = std::max({worst, std::abs(s.p.x - 0.3), std::abs(s.p.y + 0.2),
                              std::abs(s.p.z - (0.5 + s.t))});
        return worst;
    });

    sb.check("slope classification extremes", 1e-15, [] {
        GeodesicClass v = classify_geodesic(0.0, true);
        GeodesicClass hz = classify_geodesic(0.0, false);
        GeodesicClass sl = classify_geodesic(1.0, false);
        if (v.type != GeodesicType::Vertical || hz.type != GeodesicType::Horizontal ||
            sl.type != GeodesicType::Slanted)
            return kInf;
        return std::max({std::abs(v.vertical_component - 1.0), std::abs(hz.vertical_component),
                         std::abs(sl.vertical_component - 1.0 / std::sqrt(2.0))});
    });

    return sb.take();
}

// --- sphere -------------------------------------------------------------

S3Point random_s3(std::mt19937_64& rng, double min_w2) {
    for (;;) {
        double q[4];
        double n2 = 0.0;
        for (double& c : q) {
            c = urand(rng, -1.0, 1.0);
            n2 += c * c;
        }
        if (n2 < 0.04 || n2 > 1.0) continue;
        const double inv = 1.0 / std::sqrt(n2);
        S3Point p{q[0] * inv, q[1] * inv, q[2] * inv, q[3] * inv};
        if (p.w1 * p.w1 + p.w2 * p.w2 < min_w2) continue;
        return p;
    }
}

Vec4 random_tangent(std::mt19937_64& rng, const S3Point& p) {
    const Vec4 pos{p.z1, p.z2, p.w1, p.w2};
    for (;;) {
        Vec4 v;
        for (double& c : v) c = urand(rng, -1.0, 1.0);
        double d = 0.0, n2 = 0.0;
        for (int k = 0; k < 4; ++k) d += v[k] * pos[k];
        for (int k = 0; k < 4; ++k) {
            v[k] -= d * pos[k];
            n2 += v[k] * v[k];
        }
        if (n2 > 0.1) return v;
    }
}

double dot4(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

SuiteResult suite_sphere() {
    SuiteBuilder sb("sphere");

    sb.check("chart points satisfy the radius constraint", 1e-12, [] {
        std::mt19937_64 rng(kVerifySeed + 50);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double kappa = (i % 2) ? 1.0 : 4.0;
            SpherePoint p = stereographic(kappa, urand(rng, -20, 20), urand(rng, -20, 20));
            worst = std::max(worst,
                             std::abs(p.p1 * p.p1 + p.p2 * p.p2 + p.p3 * p.p3 - 1.0 / kappa));
        }
        SpherePoint south = stereographic(1.0, 0.0, 0.0);
        worst = std::max(worst, std::hypot(south.p1, south.p2, south.p3 + 1.0));
        return worst;
    });

    sb.check("far chart points approach the missing pole", 1e-5, [] {
        SpherePoint p = stereographic(1.0, 1e6, 0.0);
        return std::hypot(p.p1, p.p2, p.p3 - 1.0);
    });

    sb.check("chart inverse round trips", 1e-10, [] {
        std::mt19937_64 rng(kVerifySeed + 51);
        double worst = 0.0;
        for (int i = 0; i < 60; ++i) {
            const double kappa = (i % 2) ? 1.0 : 4.0;
            const double x = urand(rng, -10, 10), y = urand(rng, -10, 10);
            const auto back = sphere_to_chart(kappa, chart_to_sphere(kappa, x, y));
            worst = std::max({worst, std::abs(back[0] - x), std::abs(back[1] - y)});
        }
        return worst;
    });

    sb.check("ambient curvature formula on reference fields", 1e-12, [] {
        ScalarField3 zero = ScalarField3::constant(0.0);
        SpherePoint p = stereographic(1.0, 0.4, -0.3);
        double worst = std::abs(tau_ambient(1.0, zero, zero, zero, p));
        ScalarField3 a1 = ScalarField3::from_expr_text("-y");
        ScalarField3 a2 = ScalarField3::from_expr_text("x");
        worst = std::max(worst, std::abs(tau_ambient(1.0, a1, a2, zero, p) + p.p3));
        return worst;
    });

    sb.check("total curvature of constant fields is the area multiple", 1e-5, [] {
        double worst = 0.0;
        for (double kappa : {1.0, 4.0})
            for (double tau0 : {1.0, -0.5})
                worst = std::max(worst,
                                 std::abs(total_bundle_curvature(kappa, ScalarField::constant(tau0)) -
                                          tau0 * 4.0 * M_PI / kappa));
        return worst;
    });

    sb.check("odd curvature integrates to zero", 1e-6, [] {
        ScalarField tz = ScalarField::native_fd([](double x, double y) {
            return -chart_to_sphere(1.0, x, y).p3;
        });
        return std::abs(total_bundle_curvature(1.0, tz));
    });

    sb.check("fiber rotation fixes the projection", 1e-14, [] {
        std::mt19937_64 rng(kVerifySeed + 52);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            S3Point p = random_s3(rng, 0.0);
            const double kappa = (i % 2) ? 1.0 : 4.0;
            SpherePoint q0 = hopf_projection(p, kappa);
            SpherePoint q1 = hopf_projection(fiber_rotate(p, urand(rng, 0.0, 2 * M_PI)), kappa);
            worst = std::max({worst, std::abs(q0.p1 - q1.p1), std::abs(q0.p2 - q1.p2),
                              std::abs(q0.p3 - q1.p3)});
        }
        return worst;
    });

    sb.check("projection of the reference fiber point", 1e-15, [] {
        SpherePoint q = hopf_projection(S3Point{1, 0, 0, 0}, 1.0);
        return std::hypot(q.p1, q.p2, q.p3 - 1.0);
    });

    sb.check("declared frame is orthonormal in its metric", 1e-10, [] {
        std::mt19937_64 rng(kVerifySeed + 53);
        // a non-constant curvature profile; any smooth eta defines a metric
        ScalarField eta = ScalarField::from_expr_text(
            "0.6/(1 + 0.25*(x^2 + y^2)) + 0.05*sin(x)*y/(1 + x^2 + y^2)");
        const double T = 4 * M_PI * 0.6;
        double worst = 0.0;
        for (int i = 0; i < 25; ++i) {
            S3Point p = random_s3(rng, 0.05);
            YFrame f = y_frame(1.0, T, eta, p);
            const Vec4 pos{p.z1, p.z2, p.w1, p.w2};
            const Vec4* y[3] = {&f.y1, &f.y2, &f.y3};
            for (int r = 0; r < 3; ++r) {
                worst = std::max(worst, std::abs(dot4(*y[r], pos)));
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(s3_metric_at(f, *y[r], *y[c]) -
                                                     (r == c ? 1.0 : 0.0)));
            }
        }
        return worst;
    });

    sb.check("constant curvature frame reproduces the round metric", 1e-9, [] {
        std::mt19937_64 rng(kVerifySeed + 54);
        // kappa = 4, tau = 1: T = pi and eta equals the conformal factor
        ScalarField eta = ScalarField::from_expr_text("1/(1 + x^2 + y^2)");
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            S3Point p = random_s3(rng, 0.05);
            YFrame f = y_frame(4.0, M_PI, eta, p);
            Vec4 u = random_tangent(rng, p), v = random_tangent(rng, p);
            const double ghat = s3_metric_at(f, u, v);
            worst = std::max(worst, std::abs(ghat - dot4(u, v)) /
                                        std::sqrt(dot4(u, u) * dot4(v, v)));
        }
        return worst;
    });

    sb.check("horizontal lengths survive the projection", 1e-5, [] {
        std::mt19937_64 rng(kVerifySeed + 55);
        double worst = 0.0;
        // one constant profile (Berger) and one varying profile
        const struct {
            double kappa, T;
            const char* eta;
        } cases[] = {
            {1.0, 4 * M_PI * 0.8, "0.8/(1 + 0.25*(x^2 + y^2))"},
            {1.0, 4 * M_PI * 0.6,
             "0.6/(1 + 0.25*(x^2 + y^2)) + 0.05*sin(x)*y/(1 + x^2 + y^2)"},
        };
        for (const auto& c : cases) {
            ScalarField eta = ScalarField::from_expr_text(c.eta);
            for (int i = 0; i < 15; ++i) {
                S3Point p = random_s3(rng, 0.05);
                YFrame f = y_frame(c.kappa, c.T, eta, p);
                Vec4 u = random_tangent(rng, p);
                // make u horizontal: remove its fiber component
                const double c3 = s3_metric_at(f, u, f.y3);
                for (int k = 0; k < 4; ++k) u[k] -= c3 * f.y3[k];
                const double nu = std::sqrt(s3_metric_at(f, u, u));
                // push p +- h u back to the sphere and project
                const double h = 1e-6;
                const Vec4 pos{p.z1, p.z2, p.w1, p.w2};
                const auto at = [&](double t) {
                    Vec4 q;
                    double n2 = 0.0;
                    for (int k = 0; k < 4; ++k) {
                        q[k] = pos[k] + t * u[k];
                        n2 += q[k] * q[k];
                    }
                    const double inv = 1.0 / std::sqrt(n2);
                    return hopf_projection(
                        S3Point{q[0] * inv, q[1] * inv, q[2] * inv, q[3] * inv}, c.kappa);
                };
                SpherePoint plus = at(h), minus = at(-h);
                const double len = std::hypot(plus.p1 - minus.p1, plus.p2 - minus.p2,
                                              plus.p3 - minus.p3) /
                                   (2 * h);
                worst = std::max(worst, std::abs(len - nu) / nu);
            }
        }
        return worst;
    });

    sb.check("pole fibers are rejected by the chart frame", 0.0, [] {
        try {
            y_frame(1.0, 4 * M_PI, ScalarField::constant(1.0), S3Point{1, 0, 0, 0});
        } catch (const DomainError&) {
            return 0.0;
        }
        return kInf;
    });

    return sb.take();
}

}  // namespace

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"exprs",     "numerics",  "frames", "holonomy",
                                                "curvature", "geodesics", "sphere"};
    return names;
}

SuiteResult run_suite(const std::string& name) {
    if (name == "exprs") return suite_exprs();
    if (name == "numerics") return suite_numerics();
    if (name == "frames") return suite_frames();
    if (name == "holonomy") return suite_holonomy();
    if (name == "curvature") return suite_curvature();
    if (name == "geodesics") return suite_geodesics();
    if (name == "sphere") return suite_sphere();
    throw std::invalid_argument("unknown verify suite: " + name);
}

Expr random_expression(std::mt19937_64& rng, int max_depth) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Expr e = random_node(rng, max_depth);
        Expr ex = e.derivative(0), ey = e.derivative(1);
        bool ok = true;
        for (double x : {-1.6, -0.8, 0.0, 0.8, 1.6}) {
            for (double y : {-1.6, -0.8, 0.0, 0.8, 1.6}) {
                try {
                    if (std::abs(e.eval(x, y)) > 100.0 || std::abs(ex.eval(x, y)) > 100.0 ||
                        std::abs(ey.eval(x, y)) > 100.0)
                        ok = false;
                } catch (const EvalError&) {
                    ok = false;
                }
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) return e;
    }
    throw std::logic_error("random_expression: generator starved");
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string verify_report_json(const std::vector<SuiteResult>& suites) {
    bool all = true;
    for (const auto& s : suites) all = all && s.passed();
    std::string out = "{\"seed\":" + std::to_string(kVerifySeed) +
                      ",\"passed\":" + (all ? "true" : "false") + ",\"suites\":[";
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const auto& s = suites[i];
        if (i) out += ',';
        out += "{\"suite\":\"" + json_escape(s.suite) + "\",\"passed\":";
        out += s.passed() ? "true" : "false";
        out += ",\"checks\":[";
        for (std::size_t k = 0; k < s.checks.size(); ++k) {
            const auto& c = s.checks[k];
            if (k) out += ',';
            out += "{\"name\":\"" + json_escape(c.name) + "\",\"passed\":";
            out += c.passed ? "true" : "false";
            out += ",\"residual\":" + format_double(c.residual);
            out += ",\"tolerance\":" + format_double(c.tolerance) + "}";
        }
        out += "]}";
    }
    return out + "]}";
}

}  // namespace ksub
