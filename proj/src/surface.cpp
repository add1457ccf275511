#include "ksub/surface.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ksub/numerics.hpp"

namespace ksub {

Domain Domain::full_plane() { return Domain{}; }

Domain Domain::disk(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("Domain::disk: radius must be positive");
    Domain d;
    d.kind = DomainKind::Disk;
    d.radius = radius;
    return d;
}

Domain Domain::rect(double x0, double x1, double y0, double y1) {
    if (!(x0 < x1) || !(y0 < y1))
        throw std::invalid_argument("Domain::rect: need x0 < x1 and y0 < y1");
    Domain d;
    d.kind = DomainKind::Rect;
    d.x0 = x0;
    d.x1 = x1;
    d.y0 = y0;
    d.y1 = y1;
    return d;
}

bool Domain::contains(double x, double y, double margin) const {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    switch (kind) {
        case DomainKind::FullPlane: return true;
        case DomainKind::Disk: return std::hypot(x, y) < radius - margin;
        case DomainKind::Rect:
            return x > x0 + margin && x < x1 - margin && y > y0 + margin && y < y1 - margin;
    }
    return false;
}

void Domain::bounding_box(double& bx0, double& bx1, double& by0, double& by1) const {
    switch (kind) {
        case DomainKind::FullPlane:
            bx0 = by0 = -8.0;
            bx1 = by1 = 8.0;
            return;
        case DomainKind::Disk:
            bx0 = by0 = -radius;
            bx1 = by1 = radius;
            return;
        case DomainKind::Rect:
            bx0 = x0;
            bx1 = x1;
            by0 = y0;
            by1 = y1;
            return;
    }
}

ConformalSurface::ConformalSurface(Domain domain, ScalarField lambda)
    : domain_(domain), lambda_(std::move(lambda)) {
    if (lambda_.expression_backed()) {
        lxx_ = lambda_.derivative(0).derivative(0);
        lyy_ = lambda_.derivative(1).derivative(1);
    }
    probe_positive();
}

ConformalSurface::ConformalSurface(Domain domain, ScalarField lambda, ScalarField lambda_xx,
                                   ScalarField lambda_yy)
    : domain_(domain),
      lambda_(std::move(lambda)),
      lxx_(std::move(lambda_xx)),
      lyy_(std::move(lambda_yy)) {
    probe_positive();
}

void ConformalSurface::probe_positive() const {
    double bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;
    domain_.bounding_box(bx0, bx1, by0, by1);
    constexpr int n = 64;
    const double dx = (bx1 - bx0) / n;
    const double dy = (by1 - by0) / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Cell centers keep every probe strictly interior to the box.
            const double x = bx0 + (i + 0.5) * dx;
            const double y = by0 + (j + 0.5) * dy;
            if (!domain_.contains(x, y)) continue;
            double v;
            try {
                v = lambda_(x, y);
            } catch (const EvalError& err) {
                throw DomainError(std::string("conformal factor failed to evaluate at (") +
                                  std::to_string(x) + ", " + std::to_string(y) + "): " +
                                  err.what());
            }
            if (!(v > 0.0))
                throw DomainError("conformal factor must be positive on the domain (probe at (" +
                                  std::to_string(x) + ", " + std::to_string(y) + ") gave " +
                                  std::to_string(v) + ")");
        }
    }
}

double ConformalSurface::lambda_xx(double x, double y) const {
    if (lxx_) return (*lxx_)(x, y);
    const ScalarField& l = lambda_;
    return central_diff([&l](double u, double v) { return l.dx(u, v); }, x, y, 0,
                        default_fd_step(x, y));
}

double ConformalSurface::lambda_yy(double x, double y) const {
    if (lyy_) return (*lyy_)(x, y);
    const ScalarField& l = lambda_;
    return central_diff([&l](double u, double v) { return l.dy(u, v); }, x, y, 1,
                        default_fd_step(x, y));
}

double ConformalSurface::gaussian_curvature(double x, double y) const {
    const double h = default_fd_step(x, y);
    if (!domain_.contains(x, y, 2.0 * h))
        throw DomainError("gaussian_curvature: point too close to the domain boundary");
    const double l = lambda_(x, y);
    if (!(l > 0.0)) throw DomainError("gaussian_curvature: conformal factor not positive");
    const double lx = lambda_.dx(x, y);
    const double ly = lambda_.dy(x, y);
    const double l2 = l * l;
    return (lx * lx + ly * ly) / (l2 * l2) - (lambda_xx(x, y) + lambda_yy(x, y)) / (l2 * l);
}

ConformalSurface lambda_kappa_surface(double kappa) {
    // 1 / (1 + kappa r^2 / 4), built symbolically so second partials are exact.
    Expr x = Expr::var(0, Expr::vars_xy());
    Expr y = Expr::var(1, Expr::vars_xy());
    Expr lam = Expr::number(1.0) /
               (Expr::number(1.0) + Expr::number(kappa / 4.0) * (x * x + y * y));
    Domain dom = (kappa < 0.0) ? Domain::disk(2.0 / std::sqrt(-kappa)) : Domain::full_plane();
    return ConformalSurface(dom, ScalarField::from_expr(std::move(lam)));
}

bool domain_contains(const ConformalSurface& s, double x, double y) { return s.contains(x, y); }

}  // namespace ksub
