#include "ksub/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ksub {

void Rk4Workspace::resize(std::size_t n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    mid.resize(n);
}

void rk4_step(const OdeRhs& f, double t, double h, std::vector<double>& state, Rk4Workspace& ws) {
    const std::size_t n = state.size();
    ws.resize(n);
    f(t, state, ws.k1);
    for (std::size_t i = 0; i < n; ++i) ws.mid[i] = state[i] + 0.5 * h * ws.k1[i];
    f(t + 0.5 * h, ws.mid, ws.k2);
    for (std::size_t i = 0; i < n; ++i) ws.mid[i] = state[i] + 0.5 * h * ws.k2[i];
    f(t + 0.5 * h, ws.mid, ws.k3);
    for (std::size_t i = 0; i < n; ++i) ws.mid[i] = state[i] + h * ws.k3[i];
    f(t + h, ws.mid, ws.k4);
    for (std::size_t i = 0; i < n; ++i)
        state[i] += (h / 6.0) * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

OdeTrajectory rk4(const OdeRhs& f, std::span<const double> state0, double t0, double t1,
                  double step) {
    if (!(step > 0.0)) throw std::invalid_argument("rk4: step must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("rk4: t1 must exceed t0");

    OdeTrajectory traj;
    traj.step = step;
    std::vector<double> state(state0.begin(), state0.end());
    traj.times.push_back(t0);
    traj.states.push_back(state);

    Rk4Workspace ws;
    double t = t0;
    std::size_t i = 0;
    while (t < t1) {
        // Times come from the index so rounding does not accumulate; the last
        // step is shortened (or snapped) to land exactly on t1.
        double next = t0 + static_cast<double>(++i) * step;
        if (next > t1 - 1e-9 * step) next = t1;
        rk4_step(f, t, next - t, state, ws);
        t = next;
        for (double v : state) {
            if (!std::isfinite(v))
                throw IntegrationError("rk4: non-finite state", traj.times.back(), 0.0);
        }
        traj.times.push_back(t);
        traj.states.push_back(state);
    }
    return traj;
}

namespace {

struct SimpsonCtx {
    const std::function<double(double)>& f;
    int max_depth;
};

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const SimpsonCtx& ctx, double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = ctx.f(lm);
    const double frm = ctx.f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    // |delta|/15 estimates the error of the refined value (Richardson).
    if (std::abs(delta) <= 15.0 * tol || depth >= ctx.max_depth) {
        if (depth >= ctx.max_depth && std::abs(delta) > 15.0 * tol)
            throw IntegrationError("quad1d: tolerance not reached", m,
                                   left + right + delta / 15.0);
        return left + right + delta / 15.0;
    }
    return adaptive(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double quad1d(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("quad1d: tol must be positive");
    if (a == b) return 0.0;
    const double sign = (b >= a) ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    SimpsonCtx ctx{f, 48};
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = simpson(fa, fm, fb, lo, hi);
    const double value = adaptive(ctx, lo, hi, fa, fm, fb, whole, tol, 0);
    if (!std::isfinite(value)) throw IntegrationError("quad1d: non-finite result", m, value);
    return sign * value;
}

const std::vector<GaussNode>& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    static std::mutex mutex;
    static std::map<int, std::vector<GaussNode>> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<GaussNode> nodes(static_cast<std::size_t>(n));
    // Newton iteration on P_n with the Chebyshev guess; symmetric pairs mirrored.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[static_cast<std::size_t>(i)] = {-x, w};
        nodes[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    auto [pos, inserted] = cache.emplace(n, std::move(nodes));
    return pos->second;
}

double quad_disk(const std::function<double(double, double)>& f, const DiskRegion& region,
                 int n_r, int n_theta) {
    if (n_r < 8 || n_theta < 8)
        throw std::invalid_argument("quad_disk: node counts must be at least 8");
    if (!(region.radius > 0.0)) throw std::invalid_argument("quad_disk: radius must be positive");

    const auto& rad = gauss_legendre(n_r);
    const auto& ang = gauss_legendre(n_theta);
    const double R = region.radius;

    double total = 0.0;
    for (const auto& [xr, wr] : rad) {
        const double r = 0.5 * R * (xr + 1.0);
        const double jac_r = 0.5 * R * wr * r;  // radial weight including the Jacobian r
        double ring = 0.0;
        for (const auto& [xt, wt] : ang) {
            const double theta = M_PI * (xt + 1.0);
            ring += wt * f(region.cx + r * std::cos(theta), region.cy + r * std::sin(theta));
        }
        total += jac_r * ring * M_PI;  // dtheta = pi * dxt
    }
    return total;
}

double central_diff(const std::function<double(double, double)>& f, double x, double y, int var,
                    double h) {
    if (!(h > 0.0)) throw std::invalid_argument("central_diff: step must be positive");
    if (var == 0) return (f(x + h, y) - f(x - h, y)) / (2.0 * h);
    if (var == 1) return (f(x, y + h) - f(x, y - h)) / (2.0 * h);
    throw std::invalid_argument("central_diff: var must be 0 or 1");
}

double default_fd_step(double x, double y) { return 1e-5 * (1.0 + std::hypot(x, y)); }

}  // namespace ksub
