#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ksub/errors.hpp"
#include "ksub/field.hpp"
#include "ksub/model.hpp"
#include "ksub/paths.hpp"
#include "ksub/surface.hpp"

using namespace ksub;

namespace {

KillingModel flat_product() {
    return KillingModel(ConformalSurface(Domain::full_plane(), ScalarField::constant(1.0)),
                        ScalarField::constant(0.0), ScalarField::constant(0.0));
}

// Velocity of a sampled trajectory by the five-point stencil; avoids the
// shortened final step by staying clear of both ends.
double d1(double fm2, double fm1, double fp1, double fp2, double h) {
    return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

double d2(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
    return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
}

}  // namespace

TEST_CASE("lift over a trivial gauge keeps its height") {
    const KillingModel m = flat_product();
    const Path3 path = horizontal_lift(m, circle_curve(0.5, -1.0, 2.0).curve, 3.25, 1e-3);
    for (const auto& s : path.samples) CHECK(s.p.z == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("unit circle at half bundle curvature lifts to a gap of pi") {
    // Enclosed curvature integral: tau0 * area = 0.5 * pi, gap = 2 * that.
    const KillingModel m = eck_preset(0.0, 0.5);
    const ClosedCurve2 circle = circle_curve(0.0, 0.0, 1.0);
    const Path3 path = horizontal_lift(m, circle.curve, 0.0, 1e-4);
    CHECK(std::abs(std::abs(path.samples.back().p.z) - M_PI) < 1e-5);
    CHECK(std::abs(holonomy_gap(m, circle, 1e-4) - M_PI) < 1e-5);

    SUBCASE("radius two quadruples the gap") {
        CHECK(std::abs(holonomy_gap(m, circle_curve(0.0, 0.0, 2.0), 1e-4) - 4.0 * M_PI) < 1e-4);
    }
}

TEST_CASE("repeated lifts are bitwise identical") {
    const KillingModel m = eck_preset(0.0, 0.5);
    const Curve2 c = circle_curve(0.2, 0.1, 0.8).curve;
    const Path3 p1 = horizontal_lift(m, c, 0.0, 1e-3);
    const Path3 p2 = horizontal_lift(m, c, 0.0, 1e-3);
    REQUIRE(p1.samples.size() == p2.samples.size());
    for (std::size_t i = 0; i < p1.samples.size(); ++i) {
        CHECK(p1.samples[i].p.x == p2.samples[i].p.x);
        CHECK(p1.samples[i].p.y == p2.samples[i].p.y);
        CHECK(p1.samples[i].p.z == p2.samples[i].p.z);
    }
}

TEST_CASE("lift velocity stays horizontal") {
    const KillingModel m(
        ConformalSurface(Domain::full_plane(), ScalarField::from_expr_text("1 + 0.25*(x^2+y^2)")),
        ScalarField::from_expr_text("0.2*sin(y)"), ScalarField::from_expr_text("0.3*x^2"));
    const Path3 path = horizontal_lift(m, circle_curve(0.3, -0.2, 0.7).curve, 0.0, 1e-4);
    const double h = path.samples[1].t - path.samples[0].t;
    for (std::size_t k = 2; k + 3 < path.samples.size(); k += 40) {
        const auto& sm2 = path.samples[k - 2];
        const auto& sm1 = path.samples[k - 1];
        const auto& s0 = path.samples[k];
        const auto& sp1 = path.samples[k + 1];
        const auto& sp2 = path.samples[k + 2];
        const Vec3 vel{d1(sm2.p.x, sm1.p.x, sp1.p.x, sp2.p.x, h),
                       d1(sm2.p.y, sm1.p.y, sp1.p.y, sp2.p.y, h),
                       d1(sm2.p.z, sm1.p.z, sp1.p.z, sp2.p.z, h)};
        const Metric3 g = m.metric_at(s0.p);
        CHECK(std::abs(g.inner(vel, Vec3{0.0, 0.0, 1.0})) < 1e-6);
    }
}

TEST_CASE("holonomy of a flat product vanishes") {
    CHECK(holonomy_gap(flat_product(), circle_curve(1.0, 1.0, 0.5), 1e-3) <
          1e-12);
    CHECK(verify_holonomy(flat_product(), circle_curve(1.0, 1.0, 0.5), 1e-3) < 1e-12);
}

TEST_CASE("holonomy residual stays small across models") {
    // Gap from the lift ODE, the curvature integral from disk quadrature:
    // two independent routes to the same number.
    const ConformalSurface flat(Domain::full_plane(), ScalarField::constant(1.0));
    const KillingModel linear = model_from_tau(flat, ScalarField::from_expr_text("x"));
    CHECK(verify_holonomy(linear, circle_curve(1.0, 0.5, 0.5), 1e-4) <= 1e-4);

    const KillingModel hyp = eck_preset(-1.0, 0.4);
    CHECK(verify_holonomy(hyp, circle_curve(0.3, -0.1, 0.6), 1e-4) <= 1e-5);

    std::mt19937_64 rng(29);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 5; ++i) {
        const KillingModel m = eck_preset(0.0, -1.0 + 2.0 * unit());
        const double cx = unit() - 0.5, cy = unit() - 0.5, r = 0.2 + 0.4 * unit();
        CHECK(verify_holonomy(m, circle_curve(cx, cy, r), 1e-4) <= 1e-4);
    }
}

TEST_CASE("signed holonomy flips with orientation") {
    const KillingModel m = eck_preset(0.0, 0.5);
    const ClosedCurve2 ccw = circle_curve(0.0, 0.0, 1.0);
    Curve2 reversed = ccw.curve;
    reversed.position = [inner = ccw.curve.position, t1 = ccw.curve.t1,
                         t0 = ccw.curve.t0](double t) { return inner(t1 + t0 - t); };
    reversed.velocity = nullptr;
    ClosedCurve2 cw = make_closed(reversed);
    cw.enclosed = ccw.enclosed;
    const double s1 = signed_holonomy(m, ccw, 1e-4);
    const double s2 = signed_holonomy(m, cw, 1e-4);
    CHECK(std::abs(s1 + s2) < 1e-5);
    CHECK(std::abs(std::abs(s1) - M_PI) < 1e-5);
}

TEST_CASE("make_closed rejects open curves") {
    Curve2 open;
    open.position = [](double t) { return std::array<double, 2>{t, 0.0}; };
    open.t0 = 0.0;
    open.t1 = 1.0;
    CHECK_THROWS_AS(make_closed(open), std::invalid_argument);
}

TEST_CASE("lifting a curve that exits the domain is an error") {
    const KillingModel hyp = eck_preset(-1.0, 0.0);
    CHECK_THROWS_AS(horizontal_lift(hyp, circle_curve(1.5, 0.0, 1.0).curve, 0.0, 1e-3),
                    DomainError);
}

TEST_CASE("flat geodesics run straight") {
    const KillingModel m = flat_product();
    const GeodesicRun run = geodesic_run(m, {0.0, 0.0, 0.0}, 0.7, 0.0, 5.0, 1e-3);
    CHECK_FALSE(run.exited);
    for (const auto& s : run.samples) {
        CHECK(s.theta == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(s.z == doctest::Approx(0.0).epsilon(1e-12));
    }
    const auto& last = run.samples.back();
    CHECK(last.x == doctest::Approx(5.0 * std::cos(0.7)).epsilon(1e-9));
    CHECK(last.y == doctest::Approx(5.0 * std::sin(0.7)).epsilon(1e-9));
}

TEST_CASE("slope-one geodesic at half curvature closes its projection") {
    // kappa_g = 2 mu tau = 1: a unit circle, so length 2 pi returns home.
    const KillingModel m = eck_preset(0.0, 0.5);
    const GeodesicRun run = geodesic_run(m, {0.0, 0.0, 0.0}, 0.0, 1.0, 2.0 * M_PI, 1e-3);
    const auto& last = run.samples.back();
    CHECK(std::hypot(last.x, last.y) < 1e-5);
}

TEST_CASE("geodesics conserve speed and vertical momentum") {
    const KillingModel m = eck_preset(-1.0, 0.3);
    const double mu = 0.8, h = 1e-3;
    const GeodesicRun run = geodesic_run(m, {0.2, -0.1, 0.0}, 1.1, mu, 6.0, h);
    REQUIRE_FALSE(run.exited);
    for (std::size_t k = 2; k + 3 < run.samples.size(); k += 50) {
        const auto& sm2 = run.samples[k - 2];
        const auto& sm1 = run.samples[k - 1];
        const auto& s0 = run.samples[k];
        const auto& sp1 = run.samples[k + 1];
        const auto& sp2 = run.samples[k + 2];
        const Vec3 vel{d1(sm2.x, sm1.x, sp1.x, sp2.x, h), d1(sm2.y, sm1.y, sp1.y, sp2.y, h),
                       d1(sm2.z, sm1.z, sp1.z, sp2.z, h)};
        const Metric3 g = m.metric_at({s0.x, s0.y, s0.z});
        CHECK(std::abs(g.norm2(vel) - (1.0 + mu * mu)) < 1e-6);
        CHECK(std::abs(g.inner(vel, Vec3{0.0, 0.0, 1.0}) - mu) < 1e-6);
    }
}

TEST_CASE("projected geodesics bend by twice the slope times tau") {
    const ConformalSurface flat(Domain::full_plane(), ScalarField::constant(1.0));
    const KillingModel m(flat, ScalarField::constant(0.0), ScalarField::from_expr_text("x^2"));
    const double mu = 0.6, h = 1e-3;
    const GeodesicRun run = geodesic_project(m, {0.1, -0.3}, 0.4, mu, 4.0, h);
    REQUIRE_FALSE(run.exited);
    for (std::size_t k = 2; k + 3 < run.samples.size(); k += 100) {
        const auto& sm2 = run.samples[k - 2];
        const auto& sm1 = run.samples[k - 1];
        const auto& s0 = run.samples[k];
        const auto& sp1 = run.samples[k + 1];
        const auto& sp2 = run.samples[k + 2];
        const double xd = d1(sm2.x, sm1.x, sp1.x, sp2.x, h);
        const double yd = d1(sm2.y, sm1.y, sp1.y, sp2.y, h);
        const double xdd = d2(sm2.x, sm1.x, s0.x, sp1.x, sp2.x, h);
        const double ydd = d2(sm2.y, sm1.y, s0.y, sp1.y, sp2.y, h);
        // Unit-speed planar curvature (lambda = 1 here).
        const double kg = (xd * ydd - yd * xdd) / std::pow(xd * xd + yd * yd, 1.5);
        const double tau = m.bundle_curvature(s0.x, s0.y);
        CHECK(std::abs(kg - 2.0 * mu * tau) < 1e-4);
    }
}

TEST_CASE("hyperbolic projections with zero slope do not bend") {
    const KillingModel hyp = eck_preset(-1.0, 0.0);
    const double h = 1e-3;
    const GeodesicRun run = geodesic_project(hyp, {0.3, 0.0}, 2.0, 0.7, 3.0, h);
    REQUIRE_FALSE(run.exited);
    // tau = 0 makes every slope's projection a base geodesic; check the
    // heading obeys theta' = -(lambda_x sin - lambda_y cos)/lambda^2, i.e.
    // the geodesic curvature 2 mu tau = 0 via the conformal formula.
    for (std::size_t k = 2; k + 3 < run.samples.size(); k += 50) {
        const auto& sm2 = run.samples[k - 2];
        const auto& sm1 = run.samples[k - 1];
        const auto& s0 = run.samples[k];
        const auto& sp1 = run.samples[k + 1];
        const auto& sp2 = run.samples[k + 2];
        const double xd = d1(sm2.x, sm1.x, sp1.x, sp2.x, h);
        const double yd = d1(sm2.y, sm1.y, sp1.y, sp2.y, h);
        const double xdd = d2(sm2.x, sm1.x, s0.x, sp1.x, sp2.x, h);
        const double ydd = d2(sm2.y, sm1.y, s0.y, sp1.y, sp2.y, h);
        const double thetad = (xd * ydd - yd * xdd) / (xd * xd + yd * yd);
        const auto& s = hyp.surface();
        const double l = s.lambda()(s0.x, s0.y);
        const double lx = s.lambda().dx(s0.x, s0.y);
        const double ly = s.lambda().dy(s0.x, s0.y);
        const double ct = std::cos(s0.theta), st = std::sin(s0.theta);
        CHECK(std::abs(thetad - (-(lx / (l * l)) * st + (ly / (l * l)) * ct)) < 1e-4);
    }
}

TEST_CASE("starting outside the domain is rejected") {
    const KillingModel hyp = eck_preset(-1.0, 0.0);
    CHECK_THROWS_AS(geodesic_run(hyp, {2.5, 0.0, 0.0}, 0.0, 0.0, 1.0, 1e-3), DomainError);
    CHECK_THROWS_AS(vertical_geodesic(hyp, {2.5, 0.0, 0.0}, 1.0, 1e-3), DomainError);
}

TEST_CASE("leaving the domain mid-run preserves the partial trajectory") {
    // Flat strip: a straight geodesic from the center hits x = 1 at time 1.
    const KillingModel strip(
        ConformalSurface(Domain::rect(-1.0, 1.0, -1.0, 1.0), ScalarField::constant(1.0)),
        ScalarField::constant(0.0), ScalarField::constant(0.0));
    const GeodesicRun run = geodesic_run(strip, {0.0, 0.0, 0.0}, 0.0, 0.0, 10.0, 1e-3);
    CHECK(run.exited);
    CHECK(run.exit_time > 0.5);
    CHECK(run.exit_time <= 1.0 + 1e-9);
    CHECK_FALSE(run.samples.empty());
    const auto& last = run.samples.back();
    CHECK(last.x < 1.0);
    CHECK(last.x > 0.9);
}

TEST_CASE("vertical geodesics run straight up the fiber") {
    const KillingModel m = eck_preset(1.0, 0.7);
    const Path3 path = vertical_geodesic(m, {0.2, 0.3, -1.0}, 2.0, 0.1);
    for (const auto& s : path.samples) {
        CHECK(s.p.x == 0.2);
        CHECK(s.p.y == 0.3);
        CHECK(s.p.z == doctest::Approx(-1.0 + s.t).epsilon(1e-15));
    }
    CHECK(path.samples.back().t == doctest::Approx(2.0));
}

TEST_CASE("slope classification covers the taxonomy") {
    CHECK(classify_geodesic(0.0, false).type == GeodesicType::Horizontal);
    CHECK(classify_geodesic(0.0, false).vertical_component == 0.0);

    const GeodesicClass slanted = classify_geodesic(1.0, false);
    CHECK(slanted.type == GeodesicType::Slanted);
    CHECK(slanted.vertical_component == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    CHECK(classify_geodesic(5.0, true).type == GeodesicType::Vertical);
    CHECK(std::abs(classify_geodesic(5.0, true).vertical_component) == 1.0);
}

TEST_CASE("csv export carries the full sample set") {
    const KillingModel m = eck_preset(0.0, 0.5);
    const GeodesicRun run = geodesic_run(m, {0.0, 0.0, 0.0}, 0.0, 1.0, 0.01, 1e-3);
    std::ostringstream out;
    write_geodesic_csv(out, run);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,z,theta");
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == run.samples.size());

    std::ostringstream out2;
    write_path_csv(out2, horizontal_lift(m, circle_curve(0, 0, 0.5).curve, 0.0, 0.1));
    std::istringstream in2(out2.str());
    std::getline(in2, line);
    CHECK(line == "t,x,y,z");
}
