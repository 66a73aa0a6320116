#include <cmath>
#include <random>

#include "doctest.h"
#include "noembed/fields.hpp"

using namespace noembed;

TEST_SUITE("fields") {

TEST_CASE("log-scaled arithmetic round trips across a wide range")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-500.0, 500.0);
    std::uniform_int_distribution<int> sg(0, 1);
    for (int k = 0; k < 1000; ++k) {
        const LogScaledReal a(sg(rng) ? 1 : -1, mag(rng)), b(sg(rng) ? 1 : -1, mag(rng));
        const LogScaledReal back = (a + b) - b;
        // cancellation loses digits in proportion to |b| / |a|
        const double allowed = 1e-12 * std::max(1.0, std::exp(b.logmag() - a.logmag()));
        if (allowed < 1e-3) CHECK(LogScaledReal::relative_difference(back, a) <= allowed);
    }
    CHECK(LogScaledReal::from_double(3.5).to_double() == 3.5);
    CHECK(LogScaledReal::from_double(0.0).is_zero());
    CHECK((LogScaledReal(1, 800.0) * LogScaledReal(1, -799.0)).to_double() == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(std::isinf(LogScaledReal(1, 800.0).to_double()));
    CHECK(LogScaledReal(-1, 2.0) < LogScaledReal(1, -3.0));
}

TEST_CASE("u vanishes on the unit circle and at the tree vertex")
{
    for (int k = 1; k < 50; ++k) CHECK(eval_u(PolarPoint(1.0, kTwoPi * k / 50.0)).to_double() == 0.0);
    CHECK(std::abs(eval_u(PolarPoint(1.0, 0.7)).to_double()) == 0.0);
    for (int K = 1; K <= 6; ++K) {
        // sin(-2 pi K) rounds to about 1e-15 relative to the field's size there
        const LogScaledReal v = eval_u(PolarPoint(std::exp(-static_cast<double>(K)), kPi));
        CHECK(std::abs(v.to_double()) <= 1e-14 * std::exp(K * K - kPi * kPi) * 10.0);
    }
}

TEST_CASE("u matches the high-precision sample")
{
    const double v = eval_u(PolarPoint(std::exp(-0.25), kPi / 2.0)).to_double();
    CHECK(v == doctest::Approx(0.06383365687195001129).epsilon(1e-14));
}

TEST_CASE("u beyond double range stays finite in log form")
{
    const LogScaledReal v = eval_u(PolarPoint(std::exp(-40.0), 0.5));
    CHECK_FALSE(v.fits_double());
    CHECK(v.logmag() == doctest::Approx(1600.0 - 0.25 + std::log(std::abs(std::sin(-40.0)))).epsilon(1e-12));
}

TEST_CASE("polar points outside the slit plane are rejected")
{
    CHECK_THROWS_AS(PolarPoint(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(PolarPoint(1.0, kTwoPi), DomainError);
    CHECK_THROWS_AS(PolarPoint(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(PolarPoint::from_cartesian({1.0, 0.0}), DomainError);
}

TEST_CASE("radial derivative on the circle")
{
    CHECK(radial_derivative_u(kPi) == doctest::Approx(-0.0003249863635963073741).epsilon(1e-13));
    for (int k = 1; k < 100; ++k) {
        const double th = kTwoPi * k / 100.0;
        CHECK(radial_derivative_u(th) < 0.0);
        const double step = 1e-4;
        const double fd = (eval_u(PolarPoint(1.0 + step, th)) - eval_u(PolarPoint(1.0 - step, th))).to_double() / (2 * step);
        CHECK(std::abs(fd - radial_derivative_u(th)) <= 1e-6 * std::abs(radial_derivative_u(th)));
    }
    CHECK(radial_derivative_u(1e-9) < 0.0);
    CHECK(radial_derivative_u(1e-9) > -1e-8);
}

TEST_CASE("five-point Laplacian")
{
    FunctionField lin([](Vec2 p) { return 3.0 * p.x - 2.0 * p.y + 1.0; });
    CHECK(std::abs(laplacian_residual(lin, {0.3, 0.4}, 1e-3)) < 1e-7);
    FunctionField sq([](Vec2 p) { return dot(p, p); });
    CHECK(laplacian_residual(sq, {0.3, -0.2}, 1e-2) == doctest::Approx(4.0).epsilon(1e-10));
    MoonField u;
    const Vec2 p = PolarPoint(0.5, kPi).cartesian();
    const double ratio = laplacian_residual(u, p, 1.0 / 64.0) / laplacian_residual(u, p, 1.0 / 128.0);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("analytic gradient of u agrees with differences")
{
    MoonField u;
    for (Vec2 p : {Vec2{-0.3, 0.4}, Vec2{0.2, -0.7}, Vec2{-0.8, -0.1}}) {
        const Vec2 g = u.gradient(p);
        const double e = 1e-6;
        const double gx = (u.value(p + Vec2{e, 0}) - u.value(p - Vec2{e, 0})) / (2 * e);
        const double gy = (u.value(p + Vec2{0, e}) - u.value(p - Vec2{0, e})) / (2 * e);
        CHECK(g.x == doctest::Approx(gx).epsilon(1e-7));
        CHECK(g.y == doctest::Approx(gy).epsilon(1e-7));
    }
}

TEST_CASE("angle field")
{
    const Vec2 a{-0.2, 0.0};
    const Vec2 a1 = a + Vec2{std::cos(kPi / 3), std::sin(kPi / 3)};
    CHECK(eval_angle_field(a, a1, a + (a1 - a) * 0.5) == doctest::Approx(0.0));
    CHECK(eval_angle_field(a, a1, {-1.0, 0.0}) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
    CHECK(eval_angle_field(a, a1, a + Vec2{std::cos(-kPi / 3), std::sin(-kPi / 3)}) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
    AngleField phi(a, a1);
    const Vec2 p{-0.5, 0.3};
    CHECK(std::abs(laplacian_residual(phi, p, 1e-3)) < 1e-5);
}

}
