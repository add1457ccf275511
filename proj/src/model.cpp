#include "ksub/model.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "ksub/numerics.hpp"

namespace ksub {

double Metric3::inner(const Vec3& u, const Vec3& v) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += g[i][j] * u[i] * v[j];
    return s;
}

KillingModel::KillingModel(ConformalSurface surface, ScalarField a, ScalarField b)
    : surface_(std::move(surface)), a_(std::move(a)), b_(std::move(b)) {
    // 2 tau lambda^2 = (lambda b)_x - (lambda a)_y; the field combinators keep
    // the value exact and push inexactness (if any) into second derivatives.
    const ScalarField& lam = surface_.lambda();
    ScalarField lb = lam * b_;
    ScalarField la = lam * a_;
    tau_ = (lb.derivative(0) - la.derivative(1)) / (ScalarField::constant(2.0) * lam * lam);
}

Metric3 KillingModel::metric_at(const Point3& p) const {
    if (!surface_.contains(p.x, p.y))
        throw DomainError("metric_at: point outside the surface domain");
    const double l = surface_.lambda()(p.x, p.y);
    const double av = a_(p.x, p.y);
    const double bv = b_(p.x, p.y);
    const double l2 = l * l;
    Metric3 m;
    m.g[0][0] = l2 + l2 * av * av;
    m.g[0][1] = l2 * av * bv;
    m.g[0][2] = -l * av;
    m.g[1][0] = m.g[0][1];
    m.g[1][1] = l2 + l2 * bv * bv;
    m.g[1][2] = -l * bv;
    m.g[2][0] = m.g[0][2];
    m.g[2][1] = m.g[1][2];
    m.g[2][2] = 1.0;
    return m;
}

Frame3 KillingModel::frame_at(const Point3& p) const {
    if (!surface_.contains(p.x, p.y))
        throw DomainError("frame_at: point outside the surface domain");
    const double l = surface_.lambda()(p.x, p.y);
    if (!(l > 0.0)) throw DomainError("frame_at: conformal factor not positive");
    Frame3 f;
    f.e1 = {1.0 / l, 0.0, a_(p.x, p.y)};
    f.e2 = {0.0, 1.0 / l, b_(p.x, p.y)};
    f.e3 = {0.0, 0.0, 1.0};
    return f;
}

Vec3 KillingModel::frame_components(const Point3& p, const Vec3& v) const {
    const Metric3 g = metric_at(p);
    const Frame3 f = frame_at(p);
    return {g.inner(v, f.e1), g.inner(v, f.e2), g.inner(v, f.e3)};
}

namespace {

struct PairHash {
    std::size_t operator()(const std::pair<double, double>& p) const noexcept {
        std::size_t h1 = std::hash<double>{}(p.first);
        std::size_t h2 = std::hash<double>{}(p.second);
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
};

// Memoized radial quadrature shared by the field and its difference stencils.
struct EtaCache {
    std::mutex mutex;
    std::unordered_map<std::pair<double, double>, double, PairHash> values;
    static constexpr std::size_t kMaxEntries = 1 << 20;
};

bool star_shaped_about_origin(const Domain& d) {
    if (d.kind == DomainKind::FullPlane) return true;
    return d.kind == DomainKind::Disk;  // disks are centered at the origin
}

}  // namespace

ScalarField eta_field(const ConformalSurface& s, const ScalarField& tau) {
    if (!star_shaped_about_origin(s.domain()))
        throw DomainError("eta_field: domain must be star-shaped about the origin");

    auto cache = std::make_shared<EtaCache>();
    const ScalarField lam = s.lambda();
    const ScalarField t = tau;

    // Radial integrals are smooth, so the quadrature runs well below the
    // module default; the slack is what keeps difference quotients of eta
    // accurate to ~1e-7.
    auto value = [cache, lam, t](double x, double y) {
        {
            std::scoped_lock lock(cache->mutex);
            auto it = cache->values.find({x, y});
            if (it != cache->values.end()) return it->second;
        }
        double v = 2.0 * quad1d(
                             [&](double sc) {
                                 const double px = sc * x, py = sc * y;
                                 const double l = lam(px, py);
                                 return sc * t(px, py) * l * l;
                             },
                             0.0, 1.0, 1e-12);
        std::scoped_lock lock(cache->mutex);
        if (cache->values.size() < EtaCache::kMaxEntries) cache->values.emplace(std::pair{x, y}, v);
        return v;
    };
    return ScalarField::native_fd(value);
}

KillingModel model_from_tau(const ConformalSurface& s, const ScalarField& tau) {
    ScalarField eta = eta_field(s, tau);
    ScalarField x = ScalarField::coordinate(0);
    ScalarField y = ScalarField::coordinate(1);
    ScalarField a = -(eta * y) / s.lambda();
    ScalarField b = (eta * x) / s.lambda();
    return KillingModel(s, std::move(a), std::move(b));
}

KillingModel eck_preset(double kappa, double tau0) {
    // eta = tau0 * lambda_kappa in closed form, so a = -tau0 y, b = tau0 x.
    ConformalSurface s = lambda_kappa_surface(kappa);
    Expr x = Expr::var(0, Expr::vars_xy());
    Expr y = Expr::var(1, Expr::vars_xy());
    ScalarField a = ScalarField::from_expr(Expr::number(-tau0) * y);
    ScalarField b = ScalarField::from_expr(Expr::number(tau0) * x);
    return KillingModel(std::move(s), std::move(a), std::move(b));
}

KillingModel gauge_shift(const KillingModel& m, const ScalarField& d) {
    const ScalarField& lam = m.surface().lambda();
    ScalarField a1 = m.a() + d.derivative(0) / lam;
    ScalarField b1 = m.b() + d.derivative(1) / lam;
    return KillingModel(m.surface(), std::move(a1), std::move(b1));
}

Vec3 gauge_shear_differential(const ScalarField& d, const Point3& p, const Vec3& u) {
    const double dx = d.dx(p.x, p.y);
    const double dy = d.dy(p.x, p.y);
    return {u[0], u[1], u[2] - dx * u[0] - dy * u[1]};
}

Point3 vertical_translate(const Point3& p, double t) { return {p.x, p.y, p.z + t}; }

}  // namespace ksub
