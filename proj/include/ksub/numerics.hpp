#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ksub/errors.hpp"

namespace ksub {

/// d/dt state = f(t, state); written into `deriv` (same size as `state`).
using OdeRhs = std::function<void(double t, std::span<const double> state, std::span<double> deriv)>;

struct OdeTrajectory {
    std::vector<double> times;                // strictly increasing, t0 first, t1 last
    std::vector<std::vector<double>> states;  // one entry per time
    double step = 0.0;                        // nominal step (last step may be shorter)
};

/// Reusable stage storage for rk4_step.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, mid;
    void resize(std::size_t n);
};

/// One classical Runge-Kutta step of size h, in place.
void rk4_step(const OdeRhs& f, double t, double h, std::vector<double>& state, Rk4Workspace& ws);

/// Fixed-step integration from t0 to t1 > t0. The final time is exactly t1
/// (the last step is shortened when (t1 - t0) is not a multiple of `step`).
/// Throws IntegrationError on a non-finite state, reporting the last valid time.
OdeTrajectory rk4(const OdeRhs& f, std::span<const double> state0, double t0, double t1,
                  double step);

/// Adaptive Simpson quadrature of f over [a, b]. The returned value carries
/// an error estimate no larger than `tol`; exact on cubics by construction.
/// Throws IntegrationError when the recursion cannot reach the tolerance.
double quad1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

struct DiskRegion {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 1.0;
};

/// Tensor-product Gauss-Legendre rule over a disk in polar form, including
/// the radial Jacobian. Fixed node counts; callers double them to estimate
/// convergence. Requires n_r >= 8 and n_theta >= 8.
double quad_disk(const std::function<double(double, double)>& f, const DiskRegion& region,
                 int n_r, int n_theta);

struct GaussNode {
    double x;  // abscissa on [-1, 1]
    double w;
};

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
const std::vector<GaussNode>& gauss_legendre(int n);

/// Central difference (f(.+h) - f(.-h)) / 2h in coordinate `var` (0 = x, 1 = y).
double central_diff(const std::function<double(double, double)>& f, double x, double y, int var,
                    double h);

/// Default finite-difference step at (x, y): 1e-5 * (1 + |p|).
double default_fd_step(double x, double y);

}  // namespace ksub
