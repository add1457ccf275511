#pragma once

#include <span>

#include "ksub/model.hpp"

namespace ksub {

/// Levi-Civita coefficients in the canonical orthonormal frame:
/// c[i][j][k] = <nabla_{E_i} E_j, E_k>_g. Metric compatibility makes the
/// table antisymmetric in (j, k).
struct ConnectionTable {
    double c[3][3][3] = {};
    double tau = 0.0;       // bundle curvature at the point
    double lambda_x = 0.0;  // first partials entering the rotation terms
    double lambda_y = 0.0;
    double lambda = 0.0;
};

ConnectionTable connection_table(const KillingModel& m, const Point3& p);

/// Tangent plane through a point, described by its coordinate normal.
/// The normal must be unit for the metric within 1e-6; construction through
/// plane_from_normal normalizes any non-degenerate direction.
struct PlaneSpec {
    Point3 point;
    Vec3 normal{};
};

PlaneSpec plane_from_normal(const KillingModel& m, const Point3& p, const Vec3& direction);

/// Sectional curvature of the plane with unit normal N:
///   K = nu^2 (K_M - 3 tau^2) + (1 - nu^2) tau^2 - 2 nu <N x xi, grad tau>,
/// with nu = <N, xi>_g. Throws if the normal is further than 1e-6 from unit.
double sectional(const KillingModel& m, const PlaneSpec& plane);

/// Independent check: sectional curvature of span{u, v} from the coordinate
/// metric alone, by finite-difference Christoffel symbols (step h_metric)
/// and their derivatives (step h_christoffel). No frame, no closed form.
/// Throws std::invalid_argument when u, v are linearly dependent.
double fd_riemann_oracle(const KillingModel& m, const Point3& p, const Vec3& u, const Vec3& v,
                         double h_metric = 1e-4, double h_christoffel = 1e-3);

/// Ricci curvature of a unit vector (within 1e-10, else std::invalid_argument):
///   Ric(v) = (K_M - 2 tau^2) - <v,xi>^2 (K_M - 4 tau^2) + 2 <v,xi> <v x xi, grad tau>.
double ricci(const KillingModel& m, const Point3& p, const Vec3& v);

/// Scalar curvature 2 (K_M - tau^2).
double scalar_curvature(const KillingModel& m, const Point3& p);

struct HomogeneityResult {
    bool homogeneous = false;      // both quantities constant within tol
    bool kappa_constant = false;
    bool tau_constant = false;
    double kappa_mean = 0.0;       // grid means (the classification when homogeneous)
    double tau_mean = 0.0;
    double kappa_range = 0.0;      // max - min over the grid
    double tau_range = 0.0;
};

/// Decide whether the model is a homogeneous space E(kappa, tau) by sampling
/// Gauss and bundle curvature on the grid (at least 25 interior points).
/// Never guesses: a non-constant quantity yields homogeneous = false together
/// with the measured spreads.
HomogeneityResult classify_homogeneous(const KillingModel& m,
                                       std::span<const std::array<double, 2>> grid, double tol);

}  // namespace ksub
