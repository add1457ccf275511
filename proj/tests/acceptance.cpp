// Acceptance gate: one line per criterion, tolerances pinned inline.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ksub/curvature.hpp"
#include "ksub/expr.hpp"
#include "ksub/field.hpp"
#include "ksub/model.hpp"
#include "ksub/paths.hpp"
#include "ksub/sphere.hpp"
#include "ksub/surface.hpp"
#include "ksub/verify.hpp"

using namespace ksub;

namespace {

std::mt19937_64 rng(kVerifySeed);

double urand(double lo, double hi) { return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53); }

double dot4(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

S3Point random_s3(double min_w2) {
    for (;;) {
        double c[4] = {urand(-1, 1), urand(-1, 1), urand(-1, 1), urand(-1, 1)};
        const double n2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
        if (n2 < 0.04 || n2 > 1.0) continue;
        const double n = std::sqrt(n2);
        const S3Point p{c[0] / n, c[1] / n, c[2] / n, c[3] / n};
        if (p.w1 * p.w1 + p.w2 * p.w2 >= min_w2) return p;
    }
}

Vec4 random_tangent(const S3Point& p) {
    const Vec4 pos{p.z1, p.z2, p.w1, p.w2};
    for (;;) {
        Vec4 v{urand(-1, 1), urand(-1, 1), urand(-1, 1), urand(-1, 1)};
        const double proj = dot4(v, pos);
        for (int i = 0; i < 4; ++i) v[i] -= proj * pos[i];
        if (dot4(v, v) > 0.1) return v;
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Polynomial bundle curvature tau = c0 + c1 x + c2 y + c3 x y + c4 x^2 with
// its antiderivative gauge b = 2 * Int tau dx (a = 0, lambda = 1), so the
// model realizes tau exactly and symbolically.
KillingModel polynomial_tau_model(const double c[5]) {
    const std::string b = "2*(" + fmt(c[0]) + "*x + " + fmt(c[1] / 2.0) + "*x^2 + " + fmt(c[2]) +
                          "*x*y + " + fmt(c[3] / 2.0) + "*x^2*y + " + fmt(c[4] / 3.0) + "*x^3)";
    return KillingModel(ConformalSurface(Domain::full_plane(), ScalarField::constant(1.0)),
                        ScalarField::constant(0.0), ScalarField::from_expr_text(b));
}

KillingModel tau_x_model() {
    return KillingModel(ConformalSurface(Domain::full_plane(), ScalarField::constant(1.0)),
                        ScalarField::constant(0.0), ScalarField::from_expr_text("x^2"));
}

// Two g-independent vectors spanning the plane with normal `n`: coordinate
// axes projected off the normal, the two largest kept.
void plane_spanners(const Metric3& g, const Vec3& n, Vec3& s1, Vec3& s2) {
    const double nn = g.norm2(n);
    Vec3 cand[3];
    double size[3];
    for (int axis = 0; axis < 3; ++axis) {
        Vec3 e{};
        e[axis] = 1.0;
        const double c = g.inner(e, n) / nn;
        for (int i = 0; i < 3; ++i) e[i] -= c * n[i];
        cand[axis] = e;
        size[axis] = g.norm2(e);
    }
    int smallest = 0;
    for (int axis = 1; axis < 3; ++axis)
        if (size[axis] < size[smallest]) smallest = axis;
    int k = 0;
    for (int axis = 0; axis < 3; ++axis)
        if (axis != smallest) (k++ == 0 ? s1 : s2) = cand[axis];
}

int failures = 0;

template <typename F>
void criterion(int idx, const char* what, double budget_s, F body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body(note);
    } catch (const std::exception& e) {
        note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
    if (secs > budget_s) {
        ok = false;
        note += (note.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s criterion %d: %s (%.2fs%s%s)\n", ok ? "PASS" : "FAIL", idx, what, secs,
                note.empty() ? "" : " - ", note.c_str());
    if (!ok) ++failures;
}

}  // namespace

int main() {
    criterion(1, "constant-curvature presets", 1.0, [](std::string& note) {
        double worst = 0.0;
        for (double kappa : {-1.0, -0.25, 0.0, 1.0, 4.0}) {
            const ConformalSurface s = lambda_kappa_surface(kappa);
            const double half = kappa < 0.0 ? 0.6 * 2.0 / std::sqrt(-kappa) : 2.0;
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j) {
                    const double x = -half + 2.0 * half * i / 9.0;
                    const double y = -half + 2.0 * half * j / 9.0;
                    worst = std::max(worst, std::abs(s.gaussian_curvature(x, y) - kappa));
                }
        }
        note = "max |K - kappa| = " + fmt(worst);
        return worst <= 1e-6;
    });

    criterion(2, "bundle-curvature round trip", 5.0, [](std::string& note) {
        double worst = 0.0;
        const ConformalSurface bases[] = {
            ConformalSurface(Domain::full_plane(), ScalarField::constant(1.0)),
            lambda_kappa_surface(-1.0), lambda_kappa_surface(1.0)};
        for (const auto& s : bases) {
            const double rmax = s.domain().kind == DomainKind::Disk ? 0.8 * s.domain().radius
                                                                    : 2.0;
            for (const char* text : {"0", "0.5", "x", "x^2 - y", "sin(x)*cos(y)"}) {
                const ScalarField tau = ScalarField::from_expr_text(text);
                const KillingModel m = model_from_tau(s, tau);
                for (int i = 0; i < 50; ++i) {
                    const double r = rmax * std::sqrt(urand(0, 1));
                    const double t = urand(0, 2.0 * M_PI);
                    const double x = r * std::cos(t), y = r * std::sin(t);
                    worst = std::max(worst, std::abs(m.bundle_curvature(x, y) - tau(x, y)));
                }
            }
        }
        note = "max |tau recovered - tau| = " + fmt(worst);
        return worst <= 1e-6;
    });

    criterion(3, "holonomy identity", 30.0, [](std::string& note) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            KillingModel m = [&] {
                switch (i % 3) {
                    case 0: return eck_preset(0.0, urand(-1.0, 1.0));
                    case 1: return eck_preset(-1.0, urand(-1.0, 1.0));
                    default: {
                        double c[5];
                        for (double& v : c) v = urand(-1.0, 1.0);
                        return polynomial_tau_model(c);
                    }
                }
            }();
            const double cx = urand(-0.5, 0.5), cy = urand(-0.5, 0.5);
            const double r = urand(0.2, 0.6);
            worst = std::max(worst, verify_holonomy(m, circle_curve(cx, cy, r), 1e-4));
        }
        const double gap = holonomy_gap(eck_preset(0.0, 0.5), circle_curve(0.0, 0.0, 1.0), 1e-4);
        note = "max residual = " + fmt(worst) + ", unit-circle gap = " + fmt(gap);
        return worst <= 1e-4 && std::abs(gap - M_PI) <= 1e-5;
    });

    criterion(4, "geodesic conservation", 10.0, [](std::string& note) {
        double worst_mu = 0.0, worst_speed = 0.0;
        for (int i = 0; i < 30; ++i) {
            const int fam = i % 4;
            // The kappa = 4 chart sends antipodes of the start to infinity;
            // slopes >= 0.5 keep those projections on small spherical circles
            // well inside the chart.
            const double mu = fam == 2 ? (i % 2 ? 1.0 : -1.0) * urand(0.5, 1.5)
                                       : urand(-1.5, 1.5);
            const KillingModel m = fam == 0   ? eck_preset(0.0, 0.5)
                                   : fam == 1 ? eck_preset(-1.0, 0.0)
                                   : fam == 2 ? eck_preset(4.0, 1.0)
                                              : tau_x_model();
            const double h = 1e-3;
            const GeodesicRun run =
                geodesic_run(m, {urand(-0.3, 0.3), urand(-0.3, 0.3), 0.0}, urand(0, 2.0 * M_PI),
                             mu, 10.0, h);
            if (run.exited) {
                note = "unexpected domain exit";
                return false;
            }
            for (std::size_t k = 2; k + 3 < run.samples.size(); k += 25) {
                const auto& sm2 = run.samples[k - 2];
                const auto& sm1 = run.samples[k - 1];
                const auto& s0 = run.samples[k];
                const auto& sp1 = run.samples[k + 1];
                const auto& sp2 = run.samples[k + 2];
                auto d1 = [&](double a, double b, double c, double d) {
                    return (-d + 8.0 * c - 8.0 * b + a) / (12.0 * h);
                };
                const Vec3 vel{d1(sm2.x, sm1.x, sp1.x, sp2.x), d1(sm2.y, sm1.y, sp1.y, sp2.y),
                               d1(sm2.z, sm1.z, sp1.z, sp2.z)};
                const Metric3 g = m.metric_at({s0.x, s0.y, s0.z});
                worst_mu = std::max(worst_mu,
                                    std::abs(g.inner(vel, Vec3{0.0, 0.0, 1.0}) - mu));
                worst_speed = std::max(worst_speed,
                                       std::abs(g.norm2(vel) - (1.0 + mu * mu)));
            }
        }
        note = "max <g',xi> drift = " + fmt(worst_mu) + ", max speed drift = " + fmt(worst_speed);
        return worst_mu <= 1e-6 && worst_speed <= 1e-6;
    });

    criterion(5, "closed-form vs oracle curvature", 20.0, [](std::string& note) {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const int fam = i % 5;
            const double t = urand(-1.0, 1.0);
            const KillingModel m = fam == 0   ? eck_preset(0.0, t)
                                   : fam == 1 ? eck_preset(-1.0, t)
                                   : fam == 2 ? eck_preset(1.0, t)
                                   : fam == 3 ? tau_x_model()
                                              : KillingModel(
                                                    ConformalSurface(
                                                        Domain::full_plane(),
                                                        ScalarField::from_expr_text(
                                                            "1 + 0.25*(x^2 + y^2)")),
                                                    ScalarField::from_expr_text("0.2*sin(y)"),
                                                    ScalarField::from_expr_text(
                                                        "0.3*x^2 - 0.1*y"));
            const Point3 p{urand(-0.8, 0.8), urand(-0.8, 0.8), urand(-1.0, 1.0)};
            const Vec3 dir{urand(-1.0, 1.0), urand(-1.0, 1.0), urand(-1.0, 1.0)};
            PlaneSpec plane;
            try {
                plane = plane_from_normal(m, p, dir);
            } catch (const std::invalid_argument&) {
                --i;
                continue;
            }
            Vec3 s1, s2;
            plane_spanners(m.metric_at(p), plane.normal, s1, s2);
            const double oracle = fd_riemann_oracle(m, p, s1, s2);
            const double closed = sectional(m, plane);
            worst = std::max(worst, std::abs(closed - oracle) / (1.0 + std::abs(oracle)));
            if (std::abs(closed - oracle) > 1e-3 * (1.0 + std::abs(oracle))) {
                note = "mismatch at sample " + std::to_string(i);
                return false;
            }
        }

        // Special planes in closed form: nu = 1 and nu = 0 collapse the
        // sectional formula to K_M - 3 tau^2 and tau^2.
        double worst_special = 0.0;
        for (const KillingModel& m : {eck_preset(-1.0, 0.3), tau_x_model()}) {
            for (int i = 0; i < 10; ++i) {
                const Point3 p{urand(-0.7, 0.7), urand(-0.7, 0.7), urand(-1.0, 1.0)};
                const double km = m.surface().gaussian_curvature(p.x, p.y);
                const double tau = m.bundle_curvature(p.x, p.y);
                const double horiz = sectional(m, plane_from_normal(m, p, Vec3{0.0, 0.0, 1.0}));
                worst_special = std::max(worst_special,
                                         std::abs(horiz - (km - 3.0 * tau * tau)));
                const Frame3 f = m.frame_at(p);
                const double vert = sectional(m, plane_from_normal(m, p, f.e2));
                worst_special = std::max(worst_special, std::abs(vert - tau * tau));
            }
        }
        note = "max oracle gap = " + fmt(worst) + ", special-plane residual = " +
               fmt(worst_special);
        return worst_special <= 1e-12;
    });

    criterion(6, "homogeneity classifier", 2.0, [](std::string& note) {
        std::vector<std::array<double, 2>> grid;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                grid.push_back({-0.75 + 0.3 * i, -0.75 + 0.3 * j});
        const std::pair<double, double> pairs[] = {{0.0, 0.5}, {-1.0, 0.3}, {1.0, 1.0},
                                                   {4.0, 1.0}, {-0.25, 0.0}, {0.0, 0.0}};
        for (const auto& [kappa, tau0] : pairs) {
            const HomogeneityResult h = classify_homogeneous(eck_preset(kappa, tau0), grid, 1e-6);
            if (!h.homogeneous || std::abs(h.kappa_mean - kappa) > 1e-6 ||
                std::abs(h.tau_mean - tau0) > 1e-6) {
                note = "preset (" + fmt(kappa) + ", " + fmt(tau0) + ") misclassified";
                return false;
            }
        }
        const HomogeneityResult r = classify_homogeneous(tau_x_model(), grid, 1e-6);
        note = "tau = x rejected with tau range " + fmt(r.tau_range);
        return !r.homogeneous && !r.tau_constant && r.tau_range > 1.0;
    });

    criterion(7, "gauge invariance", 2.0, [](std::string& note) {
        double worst_tau = 0.0, worst_metric = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            std::string text = fmt(urand(-1.0, 1.0)) + "*x + " + fmt(urand(-1.0, 1.0)) +
                               "*y + " + fmt(urand(-1.0, 1.0)) + "*x*y + " +
                               fmt(urand(-1.0, 1.0)) + "*x^2 + " + fmt(urand(-1.0, 1.0)) +
                               "*y^2";
            const ScalarField d = ScalarField::from_expr_text(text);
            const KillingModel m0 = trial % 2 ? eck_preset(1.0, 0.5) : eck_preset(0.0, 0.3);
            const KillingModel m1 = gauge_shift(m0, d);
            for (int i = 0; i < 15; ++i) {
                const double x = urand(-1.0, 1.0), y = urand(-1.0, 1.0);
                worst_tau = std::max(worst_tau, std::abs(m1.bundle_curvature(x, y) -
                                                         m0.bundle_curvature(x, y)));
            }
            for (int i = 0; i < 20; ++i) {
                const Point3 p{urand(-1.0, 1.0), urand(-1.0, 1.0), urand(-1.0, 1.0)};
                const Vec3 u{urand(-1.0, 1.0), urand(-1.0, 1.0), urand(-1.0, 1.0)};
                const Vec3 v{urand(-1.0, 1.0), urand(-1.0, 1.0), urand(-1.0, 1.0)};
                const Vec3 du = gauge_shear_differential(d, p, u);
                const Vec3 dv = gauge_shear_differential(d, p, v);
                const Point3 fp{p.x, p.y, p.z - d(p.x, p.y)};
                const double lhs = m0.metric_at(fp).inner(du, dv);
                const double rhs = m1.metric_at(p).inner(u, v);
                worst_metric = std::max(worst_metric, std::abs(lhs - rhs));
            }
        }
        note = "max tau drift = " + fmt(worst_tau) + ", max pull-back gap = " + fmt(worst_metric);
        return worst_tau <= 1e-8 && worst_metric <= 1e-9;
    });

    criterion(8, "sphere suite", 10.0, [](std::string& note) {
        for (int i = 0; i < 20; ++i) {
            const S3Point p = random_s3(0.0);
            const double t = urand(0.0, 2.0 * M_PI);
            const SpherePoint q0 = hopf_projection(p, 1.0);
            const SpherePoint q1 = hopf_projection(fiber_rotate(p, t), 1.0);
            if (std::abs(q0.p1 - q1.p1) > 1e-14 || std::abs(q0.p2 - q1.p2) > 1e-14 ||
                std::abs(q0.p3 - q1.p3) > 1e-14) {
                note = "fiber invariance broken";
                return false;
            }
        }

        for (const auto& [kappa, tau0] : {std::pair{1.0, 1.0}, {4.0, -0.5}}) {
            const double T = total_bundle_curvature(kappa, ScalarField::constant(tau0));
            if (std::abs(T - 4.0 * M_PI * tau0 / kappa) > 1e-5) {
                note = "total curvature off for kappa " + fmt(kappa);
                return false;
            }
        }

        const ScalarField eta4 = ScalarField::from_expr_text("1/(1 + x^2 + y^2)");
        double worst_round = 0.0;
        for (int i = 0; i < 30; ++i) {
            const S3Point p = random_s3(0.05);
            const YFrame f = y_frame(4.0, M_PI, eta4, p);
            const Vec4 u = random_tangent(p);
            const Vec4 v = random_tangent(p);
            const double scale = std::sqrt(dot4(u, u) * dot4(v, v));
            worst_round = std::max(worst_round,
                                   std::abs(s3_metric_at(f, u, v) - dot4(u, v)) / scale);
        }
        if (worst_round > 1e-9) {
            note = "round-metric deviation " + fmt(worst_round);
            return false;
        }

        const ScalarField eta1 = ScalarField::from_expr_text("0.8/(1 + 0.25*(x^2 + y^2))");
        double worst_sub = 0.0;
        for (int i = 0; i < 10; ++i) {
            const S3Point p = random_s3(0.05);
            const YFrame f = y_frame(1.0, 4.0 * M_PI * 0.8, eta1, p);
            Vec4 u = random_tangent(p);
            const double mu = s3_metric_at(f, u, f.y3);
            for (int k = 0; k < 4; ++k) u[k] -= mu * f.y3[k];
            const double h = 1e-6;
            const Vec4 pos{p.z1, p.z2, p.w1, p.w2};
            const double un = std::sqrt(dot4(u, u));
            auto project = [&](double t) {
                Vec4 q{};
                for (int k = 0; k < 4; ++k) q[k] = pos[k] + t * u[k] / un;
                const double n = std::sqrt(dot4(q, q));
                return hopf_projection(S3Point{q[0] / n, q[1] / n, q[2] / n, q[3] / n}, 1.0);
            };
            const SpherePoint fp = project(h), fm = project(-h);
            const double dx = (fp.p1 - fm.p1) / (2.0 * h) * un;
            const double dy = (fp.p2 - fm.p2) / (2.0 * h) * un;
            const double dz = (fp.p3 - fm.p3) / (2.0 * h) * un;
            const double base = std::sqrt(dx * dx + dy * dy + dz * dz);
            const double total = std::sqrt(s3_metric_at(f, u, u));
            worst_sub = std::max(worst_sub, std::abs(base - total) / (1.0 + total));
        }
        note = "round dev = " + fmt(worst_round) + ", submersion dev = " + fmt(worst_sub);
        return worst_sub <= 1e-5;
    });

    criterion(9, "parser and derivative suite", 2.0, [](std::string& note) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Expr e = random_expression(rng);
            const Expr dx = e.derivative(0);
            const Expr dy = e.derivative(1);
            for (int j = 0; j < 10; ++j) {
                const double x = urand(-0.8, 0.8), y = urand(-0.8, 0.8);
                const double h = 1e-5;
                const double fdx = (e.eval(x + h, y) - e.eval(x - h, y)) / (2.0 * h);
                const double fdy = (e.eval(x, y + h) - e.eval(x, y - h)) / (2.0 * h);
                worst = std::max(worst,
                                 std::abs(dx.eval(x, y) - fdx) / (1.0 + std::abs(fdx)));
                worst = std::max(worst,
                                 std::abs(dy.eval(x, y) - fdy) / (1.0 + std::abs(fdy)));
            }
        }
        note = "max relative derivative gap = " + fmt(worst);
        return worst <= 1e-5;
    });

    if (failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
