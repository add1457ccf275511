#include "ksub/sphere.hpp"

#include <cmath>
#include <stdexcept>

#include "ksub/numerics.hpp"

namespace ksub {

namespace {

void require_kappa(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("sphere: kappa must be positive");
}

double dot4(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

Vec4 as_vec(const S3Point& p) { return {p.z1, p.z2, p.w1, p.w2}; }

}  // namespace

SpherePoint stereographic(double kappa, double u, double v) {
    require_kappa(kappa);
    const double d = kappa * (u * u + v * v) + 1.0;
    return SpherePoint{2.0 * u / d, 2.0 * v / d,
                       (kappa * (u * u + v * v) - 1.0) / (std::sqrt(kappa) * d)};
}

SpherePoint chart_to_sphere(double kappa, double x, double y) {
    return stereographic(kappa, 0.5 * x, 0.5 * y);
}

std::array<double, 2> sphere_to_chart(double kappa, const SpherePoint& p) {
    require_kappa(kappa);
    const double denom = 1.0 - std::sqrt(kappa) * p.p3;
    if (std::abs(denom) < 1e-12)
        throw DomainError("sphere_to_chart: point at the north pole");
    return {2.0 * p.p1 / denom, 2.0 * p.p2 / denom};
}

double tau_ambient(double kappa, const ScalarField3& a1, const ScalarField3& a2,
                   const ScalarField3& a3, const SpherePoint& p) {
    require_kappa(kappa);
    const double x = p.p1, y = p.p2, z = p.p3;
    // (y a3 - z a2)_x + (z a1 - x a3)_y + (x a2 - y a1)_z, expanded so each
    // coefficient function is differentiated in place.
    const double term_x = y * a3.dx(x, y, z) - z * a2.dx(x, y, z);
    const double term_y = z * a1.dy(x, y, z) - x * a3.dy(x, y, z);
    const double term_z = x * a2.dz(x, y, z) - y * a1.dz(x, y, z);
    return 0.5 * std::sqrt(kappa) * (term_x + term_y + term_z);
}

double total_bundle_curvature(double kappa, const ScalarField& tau_chart) {
    require_kappa(kappa);
    const auto integrand = [&](double x, double y) {
        const double l = 1.0 / (1.0 + 0.25 * kappa * (x * x + y * y));
        return tau_chart(x, y) * l * l;
    };

    // One disk, with node counts doubled until the value settles. The
    // integrand is analytic but concentrated near the origin, so wide disks
    // need denser radial rules.
    const auto disk_value = [&](double radius) {
        int n_r = 64, n_t = 64;
        double prev = quad_disk(integrand, DiskRegion{0.0, 0.0, radius}, n_r, n_t);
        for (int iter = 0; iter < 9; ++iter) {
            n_r *= 2;
            if (n_t < 256) n_t *= 2;
            const double next = quad_disk(integrand, DiskRegion{0.0, 0.0, radius}, n_r, n_t);
            if (std::abs(next - prev) < 1e-7) return next;
            prev = next;
        }
        return prev;
    };

    const double scale = 2.0 / std::sqrt(kappa);
    const double radius_cap = 1e4 * scale;
    double radius = scale;
    double t_prev = disk_value(radius);
    while (true) {
        radius *= 2.0;
        if (radius > radius_cap)
            throw IntegrationError("total_bundle_curvature: no convergence within the radius cap",
                                   radius / 2.0, t_prev);
        const double t_next = disk_value(radius);
        if (std::abs(t_next - t_prev) < 1e-6) return t_next;
        t_prev = t_next;
    }
}

SpherePoint hopf_projection(const S3Point& p, double kappa) {
    require_kappa(kappa);
    const double inv = 1.0 / std::sqrt(kappa);
    // 2 z conj(w) = 2 (z1 + i z2)(w1 - i w2)
    const double re = 2.0 * (p.z1 * p.w1 + p.z2 * p.w2);
    const double im = 2.0 * (p.z2 * p.w1 - p.z1 * p.w2);
    const double t = (p.z1 * p.z1 + p.z2 * p.z2) - (p.w1 * p.w1 + p.w2 * p.w2);
    return SpherePoint{re * inv, im * inv, t * inv};
}

S3Point fiber_rotate(const S3Point& p, double t) {
    const double c = std::cos(t), s = std::sin(t);
    return S3Point{c * p.z1 - s * p.z2, s * p.z1 + c * p.z2,
                   c * p.w1 - s * p.w2, s * p.w1 + c * p.w2};
}

YFrame y_frame(double kappa, double T, const ScalarField& eta_chart, const S3Point& p) {
    require_kappa(kappa);
    if (T == 0.0) throw std::invalid_argument("y_frame: total bundle curvature must be nonzero");
    const double norm = p.z1 * p.z1 + p.z2 * p.z2 + p.w1 * p.w1 + p.w2 * p.w2;
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("y_frame: point does not satisfy |z|^2 + |w|^2 = 1");
    const double w2 = p.w1 * p.w1 + p.w2 * p.w2;
    if (w2 < 1e-6)
        throw DomainError("y_frame: |w|^2 below the chart threshold (formula singular at w = 0)");

    // E1 = (-conj w, conj z), E2 = (-i conj w, i conj z), E3 = (iz, iw).
    const Vec4 e1{-p.w1, p.w2, p.z1, -p.z2};
    const Vec4 e2{-p.w2, -p.w1, p.z2, p.z1};
    const Vec4 e3{-p.z2, p.z1, -p.w2, p.w1};

    const SpherePoint base = hopf_projection(p, kappa);
    const auto chart = sphere_to_chart(kappa, base);  // |w|^2 bound keeps this off the pole
    const double eta = eta_chart(chart[0], chart[1]);

    const double im_zw = p.z1 * p.w2 + p.z2 * p.w1;  // Im((z1+iz2)(w1+iw2))
    const double sk = std::sqrt(kappa);
    const double coeff = im_zw * (kappa * T * w2 - 4.0 * M_PI * eta) / (2.0 * M_PI * sk * w2 * w2);

    YFrame f;
    f.p = p;
    for (int i = 0; i < 4; ++i) {
        f.y1[i] = 0.5 * sk * e1[i] - coeff * e3[i];
        f.y2[i] = 0.5 * sk * e2[i] + coeff * e3[i];
        f.y3[i] = (M_PI / T) * e3[i];
    }
    return f;
}

double s3_metric_at(const YFrame& frame, const Vec4& u, const Vec4& v) {
    const Vec4 pos = as_vec(frame.p);
    if (std::abs(dot4(u, pos)) > 1e-10 || std::abs(dot4(v, pos)) > 1e-10)
        throw std::invalid_argument("s3_metric_at: vectors must be tangent to the sphere");

    const Vec4* y[3] = {&frame.y1, &frame.y2, &frame.y3};
    double gram[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gram[i][j] = dot4(*y[i], *y[j]);

    const double det = gram[0][0] * (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1]) -
                       gram[0][1] * (gram[1][0] * gram[2][2] - gram[1][2] * gram[2][0]) +
                       gram[0][2] * (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0]);
    if (det == 0.0) throw std::invalid_argument("s3_metric_at: frame numerically degenerate");

    double inv[3][3];
    inv[0][0] = (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1]) / det;
    inv[0][1] = (gram[0][2] * gram[2][1] - gram[0][1] * gram[2][2]) / det;
    inv[0][2] = (gram[0][1] * gram[1][2] - gram[0][2] * gram[1][1]) / det;
    inv[1][0] = (gram[1][2] * gram[2][0] - gram[1][0] * gram[2][2]) / det;
    inv[1][1] = (gram[0][0] * gram[2][2] - gram[0][2] * gram[2][0]) / det;
    inv[1][2] = (gram[0][2] * gram[1][0] - gram[0][0] * gram[1][2]) / det;
    inv[2][0] = (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0]) / det;
    inv[2][1] = (gram[0][1] * gram[2][0] - gram[0][0] * gram[2][1]) / det;
    inv[2][2] = (gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]) / det;

    // Frobenius condition estimate of the Gram system.
    double nf = 0.0, nfi = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            nf += gram[i][j] * gram[i][j];
            nfi += inv[i][j] * inv[i][j];
        }
    if (std::sqrt(nf * nfi) > 1e8)
        throw std::invalid_argument("s3_metric_at: frame numerically degenerate");

    double cu[3], cv[3];
    for (int i = 0; i < 3; ++i) {
        double ru = 0.0, rv = 0.0;
        for (int j = 0; j < 3; ++j) {
            ru += inv[i][j] * dot4(*y[j], u);
            rv += inv[i][j] * dot4(*y[j], v);
        }
        cu[i] = ru;
        cv[i] = rv;
    }
    return cu[0] * cv[0] + cu[1] * cv[1] + cu[2] * cv[2];
}

}  // namespace ksub
