#include "ksub/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ksub {

namespace {

std::array<double, 2> curve_velocity(const Curve2& c, double t, double fd_step) {
    if (c.velocity) return c.velocity(t);
    const auto plus = c.position(t + fd_step);
    const auto minus = c.position(t - fd_step);
    return {(plus[0] - minus[0]) / (2.0 * fd_step), (plus[1] - minus[1]) / (2.0 * fd_step)};
}

void require_step(double step) {
    if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
}

char* fmt17(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.17g", v);
    return buf;
}

}  // namespace

ClosedCurve2 circle_curve(double cx, double cy, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("circle_curve: radius must be positive");
    Curve2 c;
    c.position = [cx, cy, r](double t) {
        return std::array<double, 2>{cx + r * std::cos(t), cy + r * std::sin(t)};
    };
    c.velocity = [r](double t) {
        return std::array<double, 2>{-r * std::sin(t), r * std::cos(t)};
    };
    c.t0 = 0.0;
    c.t1 = 2.0 * M_PI;
    return ClosedCurve2{std::move(c), DiskRegion{cx, cy, r}};
}

ClosedCurve2 make_closed(Curve2 curve) {
    const auto p0 = curve.position(curve.t0);
    const auto p1 = curve.position(curve.t1);
    if (std::hypot(p1[0] - p0[0], p1[1] - p0[1]) > 1e-9)
        throw std::invalid_argument("make_closed: endpoints do not match");
    return ClosedCurve2{std::move(curve), std::nullopt};
}

Path3 horizontal_lift(const KillingModel& m, const Curve2& curve, double z0, double step) {
    require_step(step);
    if (!(curve.t1 > curve.t0)) throw std::invalid_argument("horizontal_lift: empty parameter range");
    const double fd_step = step / 10.0;
    const ConformalSurface& s = m.surface();

    OdeRhs rhs = [&](double t, std::span<const double>, std::span<double> out) {
        const auto p = curve.position(t);
        if (!s.contains(p[0], p[1]))
            throw DomainError("horizontal_lift: curve leaves the surface domain");
        const auto v = curve_velocity(curve, t, fd_step);
        const double l = s.lambda()(p[0], p[1]);
        out[0] = l * (m.a()(p[0], p[1]) * v[0] + m.b()(p[0], p[1]) * v[1]);
    };

    const double state0[1] = {z0};
    OdeTrajectory traj = rk4(rhs, std::span<const double>(state0, 1), curve.t0, curve.t1, step);

    Path3 path;
    path.samples.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const auto p = curve.position(t);
        path.samples.push_back({t, Point3{p[0], p[1], traj.states[i][0]}});
    }
    return path;
}

double holonomy_gap(const KillingModel& m, const ClosedCurve2& curve, double step) {
    return std::abs(signed_holonomy(m, curve, step));
}

double signed_holonomy(const KillingModel& m, const ClosedCurve2& curve, double step) {
    const Path3 lift = horizontal_lift(m, curve.curve, 0.0, step);
    return lift.samples.back().p.z - lift.samples.front().p.z;
}

double tau_disk_integral(const KillingModel& m, const DiskRegion& region) {
    const ScalarField& lam = m.surface().lambda();
    const ScalarField& tau = m.tau_field();
    return quad_disk(
        [&](double x, double y) {
            const double l = lam(x, y);
            return tau(x, y) * l * l;
        },
        region, 64, 64);
}

double verify_holonomy(const KillingModel& m, const ClosedCurve2& curve, double step) {
    if (!curve.enclosed)
        throw std::invalid_argument("verify_holonomy: curve carries no enclosed disk");
    // The boundary circle must stay in the domain; since every domain kind is
    // convex, the open disk is then contained as well.
    const double gap = holonomy_gap(m, curve, step);
    const double integral = tau_disk_integral(m, *curve.enclosed);
    return std::abs(gap - 2.0 * std::abs(integral));
}

namespace {

// Shared stepping loop for the projected and the full system. State layout:
// (x, y, theta) or (x, y, theta, z). A stage evaluation outside the domain
// aborts the step and flags the run as exited, keeping every accepted sample.
GeodesicRun integrate_geodesic(const KillingModel& m, double x0, double y0, double theta0,
                               double z0, double mu, double length, double step, bool with_z) {
    require_step(step);
    if (!(length > 0.0)) throw std::invalid_argument("geodesic: length must be positive");
    const ConformalSurface& s = m.surface();
    if (!s.contains(x0, y0)) throw DomainError("geodesic: start outside the surface domain");

    OdeRhs rhs = [&](double, std::span<const double> st, std::span<double> out) {
        const double x = st[0], y = st[1], theta = st[2];
        if (!s.contains(x, y)) throw DomainError("geodesic: left the surface domain");
        const double l = s.lambda()(x, y);
        const double lx = s.lambda().dx(x, y);
        const double ly = s.lambda().dy(x, y);
        const double tau = m.bundle_curvature(x, y);
        const double ct = std::cos(theta), st_ = std::sin(theta);
        const double l2 = l * l;
        out[0] = ct / l;
        out[1] = st_ / l;
        out[2] = 2.0 * mu * tau - (lx / l2) * st_ + (ly / l2) * ct;
        if (with_z) out[3] = l * (m.a()(x, y) * out[0] + m.b()(x, y) * out[1]) + mu;
    };

    GeodesicRun run;
    run.mu = mu;
    std::vector<double> state = with_z ? std::vector<double>{x0, y0, theta0, z0}
                                       : std::vector<double>{x0, y0, theta0};
    run.samples.push_back({0.0, x0, y0, theta0, with_z ? z0 : 0.0});

    Rk4Workspace ws;
    double t = 0.0;
    std::size_t i = 0;
    while (t < length) {
        double next = static_cast<double>(++i) * step;
        if (next > length - 1e-9 * step) next = length;
        std::vector<double> trial = state;
        try {
            rk4_step(rhs, t, next - t, trial, ws);
        } catch (const DomainError&) {
            run.exited = true;
            run.exit_time = t;
            return run;
        }
        bool finite = true;
        for (double v : trial) finite = finite && std::isfinite(v);
        if (!finite) throw IntegrationError("geodesic: non-finite state", t, 0.0);
        if (!s.contains(trial[0], trial[1])) {
            run.exited = true;
            run.exit_time = t;
            return run;
        }
        state = std::move(trial);
        t = next;
        run.samples.push_back({t, state[0], state[1], state[2], with_z ? state[3] : 0.0});
    }
    return run;
}

}  // namespace

GeodesicRun geodesic_project(const KillingModel& m, std::array<double, 2> p0, double theta0,
                             double mu, double length, double step) {
    return integrate_geodesic(m, p0[0], p0[1], theta0, 0.0, mu, length, step, false);
}

GeodesicRun geodesic_run(const KillingModel& m, const Point3& start, double theta0, double mu,
                         double length, double step) {
    return integrate_geodesic(m, start.x, start.y, theta0, start.z, mu, length, step, true);
}

Path3 geodesic(const KillingModel& m, const Point3& start, double theta0, double mu,
               double length, double step) {
    const GeodesicRun run = geodesic_run(m, start, theta0, mu, length, step);
    Path3 path;
    path.samples.reserve(run.samples.size());
    for (const auto& gs : run.samples)
        path.samples.push_back({gs.t, Point3{gs.x, gs.y, gs.z}});
    return path;
}

Path3 vertical_geodesic(const KillingModel& m, const Point3& start, double length, double step) {
    require_step(step);
    if (!(length > 0.0)) throw std::invalid_argument("vertical_geodesic: length must be positive");
    if (!m.surface().contains(start.x, start.y))
        throw DomainError("vertical_geodesic: start outside the surface domain");
    Path3 path;
    double t = 0.0;
    std::size_t i = 0;
    path.samples.push_back({0.0, start});
    while (t < length) {
        double next = static_cast<double>(++i) * step;
        if (next > length - 1e-9 * step) next = length;
        t = next;
        path.samples.push_back({t, Point3{start.x, start.y, start.z + t}});
    }
    return path;
}

GeodesicClass classify_geodesic(double mu, bool is_vertical) {
    if (is_vertical) return {GeodesicType::Vertical, 1.0};
    if (mu == 0.0) return {GeodesicType::Horizontal, 0.0};
    return {GeodesicType::Slanted, mu / std::sqrt(1.0 + mu * mu)};
}

void write_path_csv(std::ostream& out, const Path3& path) {
    out << "t,x,y,z\n";
    char b[4][40];
    for (const auto& s : path.samples) {
        out << fmt17(b[0], 40, s.t) << ',' << fmt17(b[1], 40, s.p.x) << ','
            << fmt17(b[2], 40, s.p.y) << ',' << fmt17(b[3], 40, s.p.z) << '\n';
    }
}

void write_geodesic_csv(std::ostream& out, const GeodesicRun& run) {
    out << "t,x,y,z,theta\n";
    char b[5][40];
    for (const auto& s : run.samples) {
        out << fmt17(b[0], 40, s.t) << ',' << fmt17(b[1], 40, s.x) << ','
            << fmt17(b[2], 40, s.y) << ',' << fmt17(b[3], 40, s.z) << ','
            << fmt17(b[4], 40, s.theta) << '\n';
    }
}

}  // namespace ksub
