#include <cmath>

#include "doctest.h"
#include "noembed/assembly.hpp"

using namespace noembed;

TEST_SUITE("assembly") {

TEST_CASE("cutoff profile and its Laplacian")
{
    CHECK(cutoff_profile(2, 0.4) == 0.0);
    CHECK(cutoff_profile(2, 0.5) == 0.0);
    CHECK(cutoff_profile(2, 0.8) == doctest::Approx(std::exp(-1.0 / 0.3)).epsilon(1e-15));
    CHECK(cutoff_laplacian(2, 0.8) == doctest::Approx(2.257150813637883182).epsilon(1e-12));
    CHECK(cutoff_laplacian(2, 0.3) == 0.0);
}

TEST_CASE("step-one bump")
{
    CHECK(step_one_bump(1.0, 1e-3) == 0.0);
    CHECK(step_one_bump(1.5, 1e-3) == 0.0);
    CHECK(step_one_bump(0.0, 1e-3) == doctest::Approx(-std::exp(-1e-3)));
    CHECK(step_one_bump(0.5, 1.0) < 0.0);
}

TEST_CASE("measured derivatives of a polynomial")
{
    const GridSpec s = GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 64.0, 0);
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Vec2 p = s.node(k);
        f[k] = p.x * p.x * p.y; // d^{2,1} = 2
    }
    const auto m = measured_derivative_maxima(s, f, 4, [](Vec2 p) { return norm(p) < 0.5; });
    REQUIRE(m.size() == 5);
    CHECK(m[3] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(m[4] < 1e-3);
}

TEST_CASE("origin derivatives")
{
    const auto d = origin_derivatives([](Vec2 p) { return p.x * p.x + 0.5 * p.y; });
    REQUIRE(d.size() == 5);
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(d[2] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(d[3] < 1e-4);
    const auto z = origin_derivatives([](Vec2) { return 0.0; });
    for (int k = 1; k <= 4; ++k) CHECK(z[k] == 0.0);
}

TEST_CASE("mu schedule satisfies the tail bound")
{
    const MuSchedule mu = measure_mu_schedule(5);
    REQUIRE(mu.mu.size() == 5);
    for (int n = 1; n <= 5; ++n) {
        CHECK(mu.mu[n - 1] > 0.0);
        CHECK(mu.mu[n - 1] * mu.c4[n - 1] <= std::ldexp(1.0, -n));
    }
}

TEST_CASE("step-one metric on a coarse grid")
{
    const StepOneMetric g = build_g1(2, 1.0 / 128.0);
    REQUIRE(g.centers.size() == 2);
    CHECK(g.centers[0].x == doctest::Approx(0.5));
    CHECK(g.radii[0] == doctest::Approx(0.25));
    CHECK(g.radii[1] == doctest::Approx(1.0 / 16.0));
    const CurvatureField K = gaussian_curvature(g.metric());
    double in0 = -1e300;
    for (std::size_t k = 0; k < K.K.values.size(); ++k)
        if (K.K.mask[k] == NodeKind::Interior && norm(K.K.spec.node(k) - g.centers[0]) < 0.5 * g.radii[0])
            in0 = std::max(in0, K.K.values[k]);
    CHECK(in0 < 0.0);
    CHECK(g.in_bump(g.centers[1]));
    CHECK_FALSE(g.in_bump({-0.5, -0.5}));
}

TEST_CASE("annulus stack is flat at the origin and negative on the rings")
{
    const MuSchedule mu = measure_mu_schedule(4);
    const AnnulusStack st = build_annulus_stack(std::vector<double>(4, 1.0), 4, mu);
    CHECK(st.curvature({0.0, 0.0}) == 0.0);
    for (int n = 1; n <= 3; ++n) {
        const double r = 0.5 * (1.0 / n + 1.0 / (n + 1));
        CHECK(st.curvature({r, 0.0}) < 0.0);
        CHECK(st.curvature({0.0, -r}) < 0.0);
    }
    const auto d = origin_derivatives([&](Vec2 p) { return st.factor(p); });
    for (int k = 1; k <= 4; ++k) CHECK(d[k] <= 1e-8);
}

}
