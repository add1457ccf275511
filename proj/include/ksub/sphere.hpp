#pragma once

#include <array>

#include "ksub/field.hpp"

namespace ksub {

/// Point of S^2(kappa) = { p in R^3 : |p|^2 = 1/kappa }, kappa > 0.
struct SpherePoint {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
};

/// Point of the unit S^3 in C^2 ~ R^4, stored as (Re z, Im z, Re w, Im w).
struct S3Point {
    double z1 = 0.0, z2 = 0.0, w1 = 0.0, w2 = 0.0;
};

using Vec4 = std::array<double, 4>;

/// Stereographic parametrization of S^2(kappa) minus the north pole:
///   X(u,v) = (2u/D, 2v/D, (kappa(u^2+v^2)-1)/(sqrt(kappa) D)),
///   D = kappa(u^2+v^2)+1.
SpherePoint stereographic(double kappa, double u, double v);

/// Conformal chart with factor lambda_kappa: (x, y) = (2u, 2v). Fields over
/// the base sphere (tau, eta) are expressed in these coordinates, where the
/// area element is lambda_kappa(x,y)^2 dx dy.
SpherePoint chart_to_sphere(double kappa, double x, double y);

/// Inverse of chart_to_sphere; throws DomainError within 1e-12 of the north pole.
std::array<double, 2> sphere_to_chart(double kappa, const SpherePoint& p);

/// Bundle curvature of the product S^2(kappa) x R metric written with ambient
/// coefficient functions a_k(x,y,z):
///   2 tau = sqrt(kappa) ((y a3 - z a2)_x + (z a1 - x a3)_y + (x a2 - y a1)_z).
double tau_ambient(double kappa, const ScalarField3& a1, const ScalarField3& a2,
                   const ScalarField3& a3, const SpherePoint& p);

/// T = integral of tau over S^2(kappa), computed in the chart as
/// Int tau(x,y) lambda_kappa(x,y)^2 dx dy over disks of doubling radius until
/// two successive values differ by less than 1e-6. Node counts double
/// internally until each disk integral settles. Throws IntegrationError if
/// the radius exceeds 1e4 * (2/sqrt(kappa)) without converging.
double total_bundle_curvature(double kappa, const ScalarField& tau_chart);

/// Hopf projection (z, w) -> (2 z conj(w), |z|^2 - |w|^2) / sqrt(kappa).
SpherePoint hopf_projection(const S3Point& p, double kappa);

/// One-parameter fiber rotation (z, w) -> (e^{it} z, e^{it} w).
S3Point fiber_rotate(const S3Point& p, double t);

/// Declared-orthonormal frame of the Killing submersion metric on S^3 with
/// total bundle curvature T != 0 and potential eta (chart field):
///   Y1 = (sqrt(kappa)/2) E1 - C E3,  Y2 = (sqrt(kappa)/2) E2 + C E3,
///   Y3 = (pi/T) E3,
///   C  = Im(zw) (kappa T |w|^2 - 4 pi eta(hopf(z,w))) / (2 pi sqrt(kappa) |w|^4),
/// with E1 = (-conj w, conj z), E2 = (-i conj w, i conj z), E3 = (iz, iw).
/// The formula is singular along w = 0; points with |w|^2 < 1e-6 are rejected
/// with DomainError (chart limitation, no second chart is provided).
struct YFrame {
    S3Point p;
    Vec4 y1{}, y2{}, y3{};
};

YFrame y_frame(double kappa, double T, const ScalarField& eta_chart, const S3Point& p);

/// Metric determined by declaring (Y1, Y2, Y3) orthonormal: expands u and v
/// in the frame (3x3 normal equations in the tangent space) and returns the
/// dot product of coefficient vectors. u, v must be R^4-tangent to S^3 at p
/// within 1e-10; a frame Gram condition number above 1e8 is an error.
double s3_metric_at(const YFrame& frame, const Vec4& u, const Vec4& v);

}  // namespace ksub
