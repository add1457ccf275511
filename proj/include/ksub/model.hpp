#pragma once

#include <array>

#include "ksub/surface.hpp"

namespace ksub {

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

using Vec3 = std::array<double, 3>;

/// Symmetric 3x3 metric tensor in the coordinates (x, y, z).
struct Metric3 {
    std::array<std::array<double, 3>, 3> g{};

    double operator()(int i, int j) const { return g[i][j]; }
    double inner(const Vec3& u, const Vec3& v) const;
    double norm2(const Vec3& u) const { return inner(u, u); }
};

/// Orthonormal frame, coordinate components of E1, E2, E3 = xi.
struct Frame3 {
    Vec3 e1{}, e2{}, e3{};
};

/// Total space of a Killing submersion over a conformal surface, written as
/// Omega x R with metric
///
///   lambda^2 (dx^2 + dy^2) + (dz - lambda (a dx + b dy))^2.
///
/// The unit Killing field is xi = d/dz; the bundle curvature is
///
///   tau = ((lambda b)_x - (lambda a)_y) / (2 lambda^2).
class KillingModel {
public:
    KillingModel(ConformalSurface surface, ScalarField a, ScalarField b);

    const ConformalSurface& surface() const noexcept { return surface_; }
    const ScalarField& a() const noexcept { return a_; }
    const ScalarField& b() const noexcept { return b_; }

    /// The bundle curvature as a field; its partials are exact when the
    /// inputs are expression-backed and finite-difference based otherwise.
    const ScalarField& tau_field() const noexcept { return tau_; }
    double bundle_curvature(double x, double y) const { return tau_(x, y); }

    /// Metric tensor at p; z-independent by construction. Requires (p.x, p.y)
    /// interior to the domain (throws DomainError otherwise).
    Metric3 metric_at(const Point3& p) const;

    /// The orthonormal frame E1 = (1/lambda) dx + a dz, E2 = (1/lambda) dy + b dz,
    /// E3 = dz. Positively oriented; E3 is the unit Killing field.
    Frame3 frame_at(const Point3& p) const;

    /// Frame components of a coordinate vector: c_i = <v, E_i>_g.
    Vec3 frame_components(const Point3& p, const Vec3& v) const;

private:
    ConformalSurface surface_;
    ScalarField a_, b_, tau_;
};

/// eta(x, y) = 2 * Integral_0^1 s tau(sx, sy) lambda(sx, sy)^2 ds, the
/// potential whose rotational gauge realizes a prescribed bundle curvature.
/// The domain must be star-shaped about the origin (full plane or a disk
/// centered at 0). Values are memoized; evaluation is thread-safe.
ScalarField eta_field(const ConformalSurface& s, const ScalarField& tau);

/// Model with bundle curvature tau over s, via a = -eta y / lambda,
/// b = eta x / lambda.
KillingModel model_from_tau(const ConformalSurface& s, const ScalarField& tau);

/// The homogeneous model E(kappa, tau0): lambda = lambda_kappa with the
/// rotational gauge in closed form (a = -tau0 y, b = tau0 x; no quadrature).
KillingModel eck_preset(double kappa, double tau0);

/// Gauge change by d: a -> a + d_x / lambda, b -> b + d_y / lambda. The shear
/// (x, y, z) -> (x, y, z - d(x, y)) carries the result isometrically onto m;
/// the bundle curvature is unchanged.
KillingModel gauge_shift(const KillingModel& m, const ScalarField& d);

/// Differential of the gauge shear: (u1, u2, u3) -> (u1, u2, u3 - d_x u1 - d_y u2).
Vec3 gauge_shear_differential(const ScalarField& d, const Point3& p, const Vec3& u);

/// Flow of the Killing field: translation in z.
Point3 vertical_translate(const Point3& p, double t);

}  // namespace ksub
