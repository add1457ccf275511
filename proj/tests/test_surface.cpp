#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ksub/errors.hpp"
#include "ksub/field.hpp"
#include "ksub/surface.hpp"

using namespace ksub;

TEST_CASE("curvature presets evaluate the conformal factor") {
    const ConformalSurface hyper = lambda_kappa_surface(-1.0);
    CHECK(hyper.domain().kind == DomainKind::Disk);
    CHECK(hyper.domain().radius == doctest::Approx(2.0));
    CHECK(hyper.lambda()(0.0, 0.0) == doctest::Approx(1.0));

    const ConformalSurface flat = lambda_kappa_surface(0.0);
    CHECK(flat.domain().kind == DomainKind::FullPlane);
    CHECK(flat.lambda()(3.0, -7.0) == doctest::Approx(1.0));

    const ConformalSurface round = lambda_kappa_surface(4.0);
    CHECK(round.lambda()(1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("gaussian curvature of the presets is the defining constant") {
    CHECK(std::abs(lambda_kappa_surface(-1.0).gaussian_curvature(0.3, -0.2) - (-1.0)) < 1e-6);
    CHECK(std::abs(lambda_kappa_surface(0.0).gaussian_curvature(0.9, 2.7)) < 1e-12);
    CHECK(std::abs(lambda_kappa_surface(4.0).gaussian_curvature(0.5, 0.5) - 4.0) < 1e-6);
}

TEST_CASE("gaussian curvature stays within tolerance across sample clouds") {
    std::mt19937_64 rng(11);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (double kappa : {-1.0, -0.25, 0.0, 1.0, 4.0}) {
        const ConformalSurface s = lambda_kappa_surface(kappa);
        const double rmax = kappa < 0.0 ? 0.85 * 2.0 / std::sqrt(-kappa) : 3.0;
        for (int i = 0; i < 50; ++i) {
            const double r = rmax * std::sqrt(unit());
            const double t = 2.0 * M_PI * unit();
            CHECK(std::abs(s.gaussian_curvature(r * std::cos(t), r * std::sin(t)) - kappa) <=
                  1e-6);
        }
    }
}

TEST_CASE("radial factors have rotation-invariant curvature") {
    const ConformalSurface s = lambda_kappa_surface(-0.25);
    for (double r : {0.4, 1.7, 3.0}) {
        const double base = s.gaussian_curvature(r, 0.0);
        for (double t : {0.7, 2.1, 4.4}) {
            const double rotated = s.gaussian_curvature(r * std::cos(t), r * std::sin(t));
            CHECK(std::abs(rotated - base) < 1e-10);
        }
    }
}

TEST_CASE("interior membership is strict") {
    const ConformalSurface hyper = lambda_kappa_surface(-1.0);
    CHECK(domain_contains(hyper, 1.9, 0.0));
    CHECK_FALSE(domain_contains(hyper, 2.1, 0.0));
    CHECK_FALSE(domain_contains(hyper, 2.0, 0.0));

    const ConformalSurface flat = lambda_kappa_surface(0.0);
    CHECK(domain_contains(flat, 1e6, -1e6));

    const Domain box = Domain::rect(-1.0, 1.0, 0.0, 2.0);
    CHECK(box.contains(0.0, 1.0));
    CHECK_FALSE(box.contains(0.0, 2.0));
    CHECK_FALSE(box.contains(-1.5, 1.0));
    CHECK(box.contains(0.0, 1.0, 0.5));
    CHECK_FALSE(box.contains(0.9, 1.0, 0.5));
}

TEST_CASE("evaluating curvature near the boundary fails loudly") {
    const ConformalSurface hyper = lambda_kappa_surface(-1.0);
    CHECK_THROWS_AS(hyper.gaussian_curvature(2.0 - 1e-9, 0.0), DomainError);
    CHECK_THROWS_AS(hyper.gaussian_curvature(2.5, 0.0), DomainError);
}

TEST_CASE("non-positive conformal factors are rejected at construction") {
    CHECK_THROWS_AS(ConformalSurface(Domain::rect(-1.0, 1.0, -1.0, 1.0),
                                     ScalarField::from_expr_text("x")),
                    DomainError);
    CHECK_NOTHROW(ConformalSurface(Domain::rect(0.5, 1.0, -1.0, 1.0),
                                   ScalarField::from_expr_text("x")));
}

TEST_CASE("supplied second partials are used for the curvature") {
    // lambda = exp(x): K = (lambda_x^2)/lambda^4 - lambda_xx/lambda^3
    //                    = e^{2x}/e^{4x} - e^x/e^{3x} = 0.
    auto ex = [](double x, double) { return std::exp(x); };
    const ConformalSurface s(Domain::rect(-1.0, 1.0, -1.0, 1.0),
                             ScalarField::native(ex, ex, [](double, double) { return 0.0; }),
                             ScalarField::native_fd(ex), ScalarField::constant(0.0));
    CHECK(std::abs(s.gaussian_curvature(0.2, 0.0)) < 1e-9);
}
