#pragma once

#include <optional>

#include "ksub/field.hpp"

namespace ksub {

enum class DomainKind { FullPlane, Disk, Rect };

/// Open planar domain: the whole plane, a disk centered at the origin, or an
/// axis-aligned rectangle. Membership means the strict interior.
struct Domain {
    DomainKind kind = DomainKind::FullPlane;
    double radius = 0.0;                        // Disk
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;      // Rect

    static Domain full_plane();
    static Domain disk(double radius);
    static Domain rect(double x0, double x1, double y0, double y1);

    /// Strict interior test; `margin` > 0 additionally requires that distance
    /// to the boundary (finite domains only).
    bool contains(double x, double y, double margin = 0.0) const;

    /// Finite box covering the domain; the full plane reports [-8, 8]^2,
    /// which is what construction-time probing uses.
    void bounding_box(double& bx0, double& bx1, double& by0, double& by1) const;
};

/// Conformally flat metric lambda(x,y)^2 (dx^2 + dy^2) on an open domain.
/// lambda must be positive; construction probes a 64 x 64 grid of cell
/// centers over the bounding box and rejects any non-positive sample.
class ConformalSurface {
public:
    ConformalSurface(Domain domain, ScalarField lambda);
    /// Supply exact second partials when lambda is native but they are known.
    ConformalSurface(Domain domain, ScalarField lambda, ScalarField lambda_xx,
                     ScalarField lambda_yy);

    const Domain& domain() const noexcept { return domain_; }
    const ScalarField& lambda() const noexcept { return lambda_; }

    bool contains(double x, double y) const { return domain_.contains(x, y); }

    double lambda_xx(double x, double y) const;
    double lambda_yy(double x, double y) const;

    /// Gauss curvature K = (lambda_x^2 + lambda_y^2)/lambda^4
    ///                     - (lambda_xx + lambda_yy)/lambda^3.
    /// Requires distance >= 2 * default_fd_step from the boundary so the
    /// difference stencils stay inside; throws DomainError otherwise.
    double gaussian_curvature(double x, double y) const;

private:
    void probe_positive() const;

    Domain domain_;
    ScalarField lambda_;
    std::optional<ScalarField> lxx_, lyy_;
};

/// lambda_kappa(x,y) = 1 / (1 + kappa (x^2+y^2) / 4), the comparison factor
/// of constant curvature kappa. Domain: disk of radius 2/sqrt(-kappa) for
/// kappa < 0, the whole plane otherwise.
ConformalSurface lambda_kappa_surface(double kappa);

/// Free-function form of the strict interior test.
bool domain_contains(const ConformalSurface& s, double x, double y);

}  // namespace ksub
