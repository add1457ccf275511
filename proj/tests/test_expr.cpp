#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <random>
#include <string_view>

#include "ksub/errors.hpp"
#include "ksub/expr.hpp"
#include "ksub/verify.hpp"

using namespace ksub;

namespace {

// Independent derivative oracle: plain central difference of the parsed
// expression, h = 1e-5 as in the reference examples.
double fd_partial(const Expr& e, double x, double y, int var, double h = 1e-5) {
    const double xp = var == 0 ? x + h : x, xm = var == 0 ? x - h : x;
    const double yp = var == 1 ? y + h : y, ym = var == 1 ? y - h : y;
    return (e.eval(xp, yp) - e.eval(xm, ym)) / (2.0 * h);
}

}  // namespace

TEST_CASE("parsing evaluates reference expressions") {
    CHECK(parse_expr("1/(1 + (x^2+y^2)/4)").eval(1.0, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(parse_expr("x*y - sin(x)").eval(0.0, 5.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(parse_expr("2/(1+x^2+y^2)").eval(1.0, 1.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(parse_expr("pi").eval(0.0, 0.0) == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(parse_expr("-x^2").eval(2.0, 0.0) == doctest::Approx(-4.0));   // ^ binds tighter
    CHECK(parse_expr("2^3^2").eval(0.0, 0.0) == doctest::Approx(512.0)); // right-assoc
    CHECK(parse_expr(" tanh( x ) + exp(0) ").eval(0.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("symbolic derivatives match the reference examples") {
    CHECK(parse_expr("x^2*y").derivative(0).eval(3.0, 2.0) == doctest::Approx(12.0));

    const Expr siny = parse_expr("sin(x)").derivative(1);
    for (double x : {-1.0, 0.0, 2.5}) CHECK(siny.eval(x, 7.0) == 0.0);

    // The bump derivative, checked against the finite-difference oracle first
    // and then against the closed form -(x/2)/(1+(x^2+y^2)/4)^2 = -2/9.
    const Expr bump = parse_expr("1/(1+(x^2+y^2)/4)");
    const double oracle = fd_partial(bump, 1.0, 1.0, 0);
    const double sym = bump.derivative(0).eval(1.0, 1.0);
    CHECK(sym == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(sym == doctest::Approx(-2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("random derivatives agree with central differences") {
    std::mt19937_64 rng(kVerifySeed);
    auto coord = [&] { return 1.6 * ((rng() >> 11) * 0x1.0p-53) - 0.8; };
    for (int i = 0; i < 100; ++i) {
        const Expr e = random_expression(rng);
        const Expr dx = e.derivative(0);
        const Expr dy = e.derivative(1);
        for (int j = 0; j < 10; ++j) {
            const double x = coord(), y = coord();
            const double fdx = fd_partial(e, x, y, 0);
            const double fdy = fd_partial(e, x, y, 1);
            CHECK(std::abs(dx.eval(x, y) - fdx) <= 1e-5 * (1.0 + std::abs(fdx)));
            CHECK(std::abs(dy.eval(x, y) - fdy) <= 1e-5 * (1.0 + std::abs(fdy)));
        }
    }
}

TEST_CASE("printing round-trips through the parser") {
    std::mt19937_64 rng(kVerifySeed ^ 0x5bul);
    auto coord = [&] { return 1.6 * ((rng() >> 11) * 0x1.0p-53) - 0.8; };
    for (int i = 0; i < 40; ++i) {
        const Expr e = random_expression(rng);
        const Expr back = parse_expr(e.to_string());
        for (int j = 0; j < 5; ++j) {
            const double x = coord(), y = coord();
            CHECK(back.eval(x, y) == doctest::Approx(e.eval(x, y)).epsilon(1e-12));
        }
    }
    // Derivatives print and reparse too.
    const Expr d = parse_expr("x^2*sin(y)/(1+x^2)").derivative(0);
    CHECK(parse_expr(d.to_string()).eval(0.7, -0.3) ==
          doctest::Approx(d.eval(0.7, -0.3)).epsilon(1e-15));
}

TEST_CASE("malformed input is rejected with a byte offset") {
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("x +"), ParseError);
    CHECK_THROWS_AS(parse_expr("(x"), ParseError);
    CHECK_THROWS_AS(parse_expr("x ** y"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(x)"), ParseError);
    CHECK_THROWS_AS(parse_expr("x + z"), ParseError);  // z is not a variable here
    CHECK_THROWS_AS(parse_expr("1..5"), ParseError);

    try {
        parse_expr("x + + y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
}

TEST_CASE("evaluation outside the real domain reports an error") {
    CHECK_THROWS_AS(parse_expr("log(x)").eval(-1.0, 0.0), EvalError);
    CHECK_THROWS_AS(parse_expr("log(x)").eval(0.0, 0.0), EvalError);
    CHECK_THROWS_AS(parse_expr("sqrt(x)").eval(-0.5, 0.0), EvalError);
    CHECK_THROWS_AS(parse_expr("x^0.5").eval(-1.0, 0.0), EvalError);
    CHECK_THROWS_AS(parse_expr("1/x").eval(0.0, 0.0), EvalError);
    CHECK(parse_expr("x^3").eval(-2.0, 0.0) == doctest::Approx(-8.0));  // integer powers fine
}

TEST_CASE("three-variable expressions differentiate in z") {
    const Expr e = parse_expr("x*z - y^2", std::array<std::string_view, 3>{"x", "y", "z"});
    CHECK(e.eval(2.0, 3.0, 4.0) == doctest::Approx(-1.0));
    CHECK(e.derivative(2).eval(2.0, 3.0, 4.0) == doctest::Approx(2.0));
}
