#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ksub/model.hpp"
#include "ksub/numerics.hpp"

namespace ksub {

/// Parametrized curve in the base domain.
struct Curve2 {
    std::function<std::array<double, 2>(double)> position;
    /// Optional analytic derivative; when absent the lift differentiates the
    /// position by central differences with step = (integration step) / 10.
    std::function<std::array<double, 2>(double)> velocity;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Closed curve: position(t0) == position(t1) within 1e-9. When the curve
/// bounds a known disk, `enclosed` feeds the holonomy cross-check.
struct ClosedCurve2 {
    Curve2 curve;
    std::optional<DiskRegion> enclosed;
};

/// Circle of radius r about (cx, cy), parametrized by angle on [0, 2pi],
/// counterclockwise, with analytic velocity and the enclosed disk attached.
ClosedCurve2 circle_curve(double cx, double cy, double r);

/// Validate closure and wrap a general curve.
ClosedCurve2 make_closed(Curve2 curve);

struct Path3 {
    struct Sample {
        double t;
        Point3 p;
    };
    std::vector<Sample> samples;
};

/// Horizontal lift: z' = lambda (a x' + b y') starting from height z0.
/// Throws DomainError if the curve leaves the surface domain.
Path3 horizontal_lift(const KillingModel& m, const Curve2& curve, double z0, double step);

/// Unsigned vertical holonomy gap |z(end) - z(start)| of the closed lift.
double holonomy_gap(const KillingModel& m, const ClosedCurve2& curve, double step);

/// Signed version; the sign depends on the curve's orientation.
double signed_holonomy(const KillingModel& m, const ClosedCurve2& curve, double step);

/// | gap - 2 | integral of tau over the enclosed disk | |, the holonomy
/// residual. The integral uses the base area element lambda^2 dx dy.
/// Requires `enclosed`; throws std::invalid_argument without it.
double verify_holonomy(const KillingModel& m, const ClosedCurve2& curve, double step);

/// Integral of tau over a disk against lambda^2 dx dy (Gauss-Legendre 64x64).
double tau_disk_integral(const KillingModel& m, const DiskRegion& region);

/// State along a non-vertical geodesic: base position, heading theta of the
/// unit-speed projection (x' = cos(theta)/lambda, y' = sin(theta)/lambda,
/// kept unwrapped), and fiber coordinate z.
struct GeodesicSample {
    double t;
    double x, y, theta, z;
};

/// Integration result. When the trajectory reaches the domain boundary the
/// run stops: `exited` is set, `exit_time` is the time of the last valid
/// sample, and all samples up to it are retained.
struct GeodesicRun {
    std::vector<GeodesicSample> samples;
    double mu = 0.0;
    bool exited = false;
    double exit_time = 0.0;
};

/// Projected geodesic equation on the base (no fiber coordinate):
///   theta' = 2 mu tau - (lambda_x/lambda^2) sin(theta) + (lambda_y/lambda^2) cos(theta).
/// The z entries of the samples are all zero.
GeodesicRun geodesic_project(const KillingModel& m, std::array<double, 2> p0, double theta0,
                             double mu, double length, double step);

/// Full geodesic through `start`: the projected system plus
/// z' = lambda (a x' + b y') + mu. Speed is sqrt(1 + mu^2); the parameter is
/// arc length of the projection.
GeodesicRun geodesic_run(const KillingModel& m, const Point3& start, double theta0, double mu,
                         double length, double step);

/// Same trajectory reduced to positions.
Path3 geodesic(const KillingModel& m, const Point3& start, double theta0, double mu,
               double length, double step);

/// Fiber line through `start` (unit speed, upward).
Path3 vertical_geodesic(const KillingModel& m, const Point3& start, double length, double step);

enum class GeodesicType { Vertical, Horizontal, Slanted };

struct GeodesicClass {
    GeodesicType type;
    /// <gamma', xi> / |gamma'| : 0 horizontal, +-1 vertical, mu/sqrt(1+mu^2) else.
    double vertical_component;
};

GeodesicClass classify_geodesic(double mu, bool is_vertical);

/// CSV writers, header included, 17 significant digits.
void write_path_csv(std::ostream& out, const Path3& path);
void write_geodesic_csv(std::ostream& out, const GeodesicRun& run);

}  // namespace ksub
