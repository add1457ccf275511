#include "ksub/curvature.hpp"

#include <cmath>
#include <stdexcept>

namespace ksub {

ConnectionTable connection_table(const KillingModel& m, const Point3& p) {
    ConnectionTable t;
    const ConformalSurface& s = m.surface();
    if (!s.contains(p.x, p.y))
        throw DomainError("connection_table: point outside the surface domain");
    const double l = s.lambda()(p.x, p.y);
    const double lx = s.lambda().dx(p.x, p.y);
    const double ly = s.lambda().dy(p.x, p.y);
    const double tau = m.bundle_curvature(p.x, p.y);
    const double rx = lx / (l * l);
    const double ry = ly / (l * l);

    t.tau = tau;
    t.lambda = l;
    t.lambda_x = lx;
    t.lambda_y = ly;

    // nabla_{E1} E1 = -ry E2            nabla_{E1} E2 = ry E1 + tau E3
    // nabla_{E2} E1 = rx E2 - tau E3    nabla_{E2} E2 = -rx E1
    // nabla_{E1} E3 = -tau E2           nabla_{E2} E3 = tau E1
    // nabla_{E3} E1 = -tau E2           nabla_{E3} E2 = tau E1
    // nabla_{E3} E3 = 0
    t.c[0][0][1] = -ry;
    t.c[0][1][0] = ry;
    t.c[0][1][2] = tau;
    t.c[0][2][1] = -tau;
    t.c[1][0][1] = rx;
    t.c[1][0][2] = -tau;
    t.c[1][1][0] = -rx;
    t.c[1][2][0] = tau;
    t.c[2][0][1] = -tau;
    t.c[2][1][0] = tau;
    return t;
}

namespace {

// Frame derivatives of tau: E1(tau) = tau_x / lambda, E2(tau) = tau_y / lambda,
// E3(tau) = 0 (tau does not depend on z).
void grad_tau_frame(const KillingModel& m, const Point3& p, double& g1, double& g2) {
    const double l = m.surface().lambda()(p.x, p.y);
    g1 = m.tau_field().dx(p.x, p.y) / l;
    g2 = m.tau_field().dy(p.x, p.y) / l;
}

}  // namespace

PlaneSpec plane_from_normal(const KillingModel& m, const Point3& p, const Vec3& direction) {
    const Metric3 g = m.metric_at(p);
    const double n2 = g.norm2(direction);
    if (!(n2 > 1e-24)) throw std::invalid_argument("plane_from_normal: degenerate direction");
    const double inv = 1.0 / std::sqrt(n2);
    return PlaneSpec{p, {direction[0] * inv, direction[1] * inv, direction[2] * inv}};
}

double sectional(const KillingModel& m, const PlaneSpec& plane) {
    const Point3& p = plane.point;
    Vec3 c = m.frame_components(p, plane.normal);
    const double n2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-6)
        throw std::invalid_argument("sectional: plane normal is not unit length");
    const double inv = 1.0 / std::sqrt(n2);
    for (double& ci : c) ci *= inv;

    const double nu = c[2];
    const double tau = m.bundle_curvature(p.x, p.y);
    const double km = m.surface().gaussian_curvature(p.x, p.y);
    double g1, g2;
    grad_tau_frame(m, p, g1, g2);
    // N x xi = c2 E1 - c1 E2 for N = c1 E1 + c2 E2 + nu E3.
    const double cross = c[1] * g1 - c[0] * g2;
    return nu * nu * (km - 3.0 * tau * tau) + (1.0 - nu * nu) * tau * tau - 2.0 * nu * cross;
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert3(const Mat3& a) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) < 1e-300) throw std::invalid_argument("singular 3x3 matrix");
    const double id = 1.0 / det;
    Mat3 r;
    r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * id;
    r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * id;
    r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * id;
    r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * id;
    r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * id;
    r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * id;
    r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * id;
    r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * id;
    r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * id;
    return r;
}

Point3 shift(const Point3& p, int axis, double h) {
    Point3 q = p;
    if (axis == 0) q.x += h;
    if (axis == 1) q.y += h;
    if (axis == 2) q.z += h;
    return q;
}

using Christoffel = std::array<Mat3, 3>;  // [l][i][j] = Gamma^l_ij

Christoffel christoffel_fd(const KillingModel& m, const Point3& p, double h) {
    const Mat3 ginv = invert3(m.metric_at(p).g);
    std::array<Mat3, 3> dg;  // dg[k][i][j] = d g_ij / d x^k
    for (int k = 0; k < 3; ++k) {
        const Mat3 gp = m.metric_at(shift(p, k, h)).g;
        const Mat3 gm = m.metric_at(shift(p, k, -h)).g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
    }
    Christoffel gamma{};
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    s += ginv[l][k] * (dg[i][k][j] + dg[j][i][k] - dg[k][i][j]);
                gamma[l][i][j] = 0.5 * s;
            }
    return gamma;
}

}  // namespace

double fd_riemann_oracle(const KillingModel& m, const Point3& p, const Vec3& u, const Vec3& v,
                         double h_metric, double h_christoffel) {
    const Metric3 g = m.metric_at(p);
    const double uu = g.norm2(u);
    const double vv = g.norm2(v);
    const double uv = g.inner(u, v);
    const double gram = uu * vv - uv * uv;
    if (!(gram > 1e-12))
        throw std::invalid_argument("fd_riemann_oracle: vectors do not span a plane");

    const Christoffel gamma0 = christoffel_fd(m, p, h_metric);
    std::array<Christoffel, 3> dgamma;  // [k][l][i][j] = d Gamma^l_ij / d x^k
    for (int k = 0; k < 3; ++k) {
        const Christoffel gp = christoffel_fd(m, shift(p, k, h_christoffel), h_metric);
        const Christoffel gm = christoffel_fd(m, shift(p, k, -h_christoffel), h_metric);
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    dgamma[k][l][i][j] = (gp[l][i][j] - gm[l][i][j]) / (2.0 * h_christoffel);
    }

    // R(e_i, e_j) e_k = [d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik] e_l
    double riem[3][3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double r = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for (int mm = 0; mm < 3; ++mm)
                        r += gamma0[l][i][mm] * gamma0[mm][j][k] -
                             gamma0[l][j][mm] * gamma0[mm][i][k];
                    riem[i][j][k][l] = r;
                }

    // w = R(u, v) v in coordinates, then K = <w, u>_g / Gram(u, v).
    Vec3 w{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) w[l] += u[i] * v[j] * v[k] * riem[i][j][k][l];
    return g.inner(w, u) / gram;
}

double ricci(const KillingModel& m, const Point3& p, const Vec3& v) {
    Vec3 c = m.frame_components(p, v);
    const double n2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    if (std::abs(n2 - 1.0) > 1e-10)
        throw std::invalid_argument("ricci: vector must be unit length");

    const double tau = m.bundle_curvature(p.x, p.y);
    const double km = m.surface().gaussian_curvature(p.x, p.y);
    double g1, g2;
    grad_tau_frame(m, p, g1, g2);
    const double cz = c[2];
    const double cross = c[1] * g1 - c[0] * g2;  // <v x xi, grad tau>
    return (km - 2.0 * tau * tau) - cz * cz * (km - 4.0 * tau * tau) + 2.0 * cz * cross;
}

double scalar_curvature(const KillingModel& m, const Point3& p) {
    const double tau = m.bundle_curvature(p.x, p.y);
    const double km = m.surface().gaussian_curvature(p.x, p.y);
    return 2.0 * (km - tau * tau);
}

HomogeneityResult classify_homogeneous(const KillingModel& m,
                                       std::span<const std::array<double, 2>> grid, double tol) {
    if (grid.size() < 25)
        throw std::invalid_argument("classify_homogeneous: need at least 25 grid points");
    if (!(tol > 0.0)) throw std::invalid_argument("classify_homogeneous: tol must be positive");

    double kmin = 0, kmax = 0, ksum = 0;
    double tmin = 0, tmax = 0, tsum = 0;
    bool first = true;
    for (const auto& [x, y] : grid) {
        const double k = m.surface().gaussian_curvature(x, y);  // throws if not interior
        const double t = m.bundle_curvature(x, y);
        if (first) {
            kmin = kmax = k;
            tmin = tmax = t;
            first = false;
        } else {
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
        ksum += k;
        tsum += t;
    }
    const double n = static_cast<double>(grid.size());
    HomogeneityResult r;
    r.kappa_mean = ksum / n;
    r.tau_mean = tsum / n;
    r.kappa_range = kmax - kmin;
    r.tau_range = tmax - tmin;
    r.kappa_constant = r.kappa_range <= tol;
    r.tau_constant = r.tau_range <= tol;
    r.homogeneous = r.kappa_constant && r.tau_constant;
    return r;
}

}  // namespace ksub
