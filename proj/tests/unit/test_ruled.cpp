#include <cmath>

#include "doctest.h"
#include "noembed/fields.hpp"
#include "noembed/ruled.hpp"

using namespace noembed;

namespace {

double max_recovery_error(const RuledSurface& r, const RuledGenerator& g)
{
    double e = 0.0;
    for (std::size_t i = 0; i < r.s.size(); ++i) e = std::max({e, (r.c[i] - g.c(r.s[i])).norm(), (r.d[i] - g.d(r.s[i])).norm()});
    return e;
}

RuledSurface plane_surface()
{
    RuledSurface r;
    for (int k = 0; k < 21; ++k) {
        const double s = -1.0 + 0.1 * k;
        r.s.push_back(s);
        r.c.push_back({0.0, s, 0.2 * s});
        r.d.push_back({1.0, 0.0, 0.3});
    }
    r.t_min = -1.0;
    r.t_max = 2.0;
    return r;
}

} // namespace

TEST_SUITE("ruled") {

TEST_CASE("cylinder level sets are vertical lines")
{
    const RuledGenerator g = RuledGenerator::cylinder(0.5);
    const FlatGraph f = sample_graph(g, pi_grid(0.02));
    const std::size_t k = f.spec.index(10, 40);
    CHECK(f.f2[k] == doctest::Approx(-0.5 * f.spec.node(k).y).epsilon(1e-14));
    CHECK(f.f[k] == doctest::Approx(-0.25 * std::pow(f.spec.node(k).y, 2)).epsilon(1e-14));
    const LegendreChart ch = legendre_coords(f, 21);
    CHECK(ch.max_straightness < 1e-12);
    for (const LevelSet& L : ch.levels)
        for (double x2 : L.x2) CHECK(x2 == doctest::Approx(-L.s / 0.5).epsilon(1e-10));
}

TEST_CASE("cylinder rulings point along x1")
{
    const RuledGenerator g = RuledGenerator::cylinder(0.5);
    const RuledSurface r = extract_rulings(sample_graph(g, pi_grid(0.01)));
    for (const Vec3& d : r.d) CHECK((d - Vec3(1, 0, 0)).norm() < 1e-10);
    CHECK(max_recovery_error(r, g) < 1e-10);
    CHECK(r.independence_spread < 1e-12);
}

TEST_CASE("generated graphs round trip")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const RuledGenerator g = RuledGenerator::random(0.5, 0.05, seed);
        const FlatGraph f = sample_graph(g, pi_grid(0.01));
        const GraphHypotheses h = check_hypotheses(f);
        CHECK(h.flat);
        CHECK(h.close);
        const LegendreChart ch = legendre_coords(f);
        CHECK(ch.max_straightness <= 1e-8);
        const RuledSurface r = extract_rulings(f);
        CHECK(max_recovery_error(r, g) <= 1e-6);
        CHECK(r.independence_spread <= 1e-8);
    }
}

TEST_CASE("generator normalisation")
{
    const RuledGenerator g = RuledGenerator::random(0.5, 0.1, 11);
    CHECK(g.a(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.solve_s(2.0, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    // envelope: the ruling through (x1, x2) satisfies a'(s) x1 + x2 + b'(s) = 0
    const double s = g.solve_s(0.7, -1.3);
    CHECK(g.a(s, 1) * 0.7 - 1.3 + g.b(s, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("non-flat graphs are rejected")
{
    const FlatGraph f = sample_function(
        [](Vec2 x) { return GraphDerivatives{x.x * x.y, x.y, x.x, 0.0, 1.0, 0.0}; }, pi_grid(0.05), 0.5, 0.05);
    CHECK_FALSE(check_hypotheses(f).flat);
    CHECK_THROWS_AS(legendre_coords(f), HypothesisError);
}

TEST_CASE("extension keeps the cylinder and rejects crossing rulings")
{
    const RuledGenerator g = RuledGenerator::cylinder(0.5);
    const RuledSurface e = extend_ruled(extract_rulings(sample_graph(g, pi_grid(0.02)), 41));
    CHECK(e.t_min == -1.0);
    CHECK(e.t_max == 2.0);
    CHECK(max_recovery_error(e, g) < 1e-10);

    RuledSurface bad = plane_surface();
    // rulings fan out so projected lines cross for t < 0
    for (std::size_t i = 0; i < bad.s.size(); ++i) bad.d[i] = {1.0, -bad.s[i] * 2.0, 0.0};
    CHECK_THROWS_AS(extend_ruled(bad), HypothesisError);
}

TEST_CASE("near-cylinder extension keeps its normal close to the cylinder's")
{
    const RuledGenerator g = RuledGenerator::random(0.5, 0.05, 5);
    const RuledSurface e = extend_ruled(extract_rulings(sample_graph(g, pi_grid(0.01))));
    const RuledGenerator cyl = RuledGenerator::cylinder(0.5);
    const RuledSurface rc = ruled_from_generator(cyl, e.s_min(), e.s_max(), 101, -1.0, 2.0);
    double worst = 0.0;
    for (double t : {-1.0, 0.5, 2.0})
        for (double s : {-0.8, 0.0, 0.8}) {
            // compare at the same planar point
            const Vec3 p = e.point(t, s);
            const double sc = -0.5 * p.y();
            worst = std::max(worst, std::acos(std::min(1.0, upward_normal(e, t, s).dot(upward_normal(rc, p.x(), sc)))));
        }
    CHECK(worst < 10.0 * kPi / 180.0);
}

TEST_CASE("fundamental forms")
{
    const RuledGenerator g = RuledGenerator::cylinder(0.5);
    const RuledSurface r = ruled_from_generator(g, -1.0, 1.0, 201, -1.0, 2.0);
    for (std::size_t i : {10u, 100u, 190u}) {
        const FundamentalForms F = second_fundamental_form(r, 0.5, i);
        CHECK(std::abs(F.II(0, 0)) < 1e-14);
        CHECK(std::abs(F.II(0, 1)) < 1e-12);
        CHECK(F.gaussian() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(F.principal() == doctest::Approx(-0.5 / std::pow(1 + r.s[i] * r.s[i], 1.5)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(second_fundamental_form(r, 0.0, 1), DomainError);
    const RuledSurface p = plane_surface();
    CHECK(second_fundamental_form(p, 0.3, 10).II.norm() < 1e-12);
}

TEST_CASE("concavity")
{
    const RuledSurface cyl = ruled_from_generator(RuledGenerator::cylinder(0.5), -1.0, 1.0, 41, -1.0, 2.0);
    const ConcavityReport c = concavity_check(cyl);
    CHECK(c.concave);
    CHECK(c.fit_residual <= 1e-12);
    for (const auto& a : c.coeffs) {
        CHECK(a(0) == doctest::Approx(-4.0).epsilon(1e-6));
        CHECK(std::abs(a(1)) < 1e-8);
        CHECK(std::abs(a(2)) < 1e-8);
    }
    RuledGenerator flip = RuledGenerator::cylinder(0.5);
    flip.sign = -1.0;
    CHECK_FALSE(concavity_check(ruled_from_generator(flip, -1.0, 1.0, 41, -1.0, 2.0)).concave);
    RuledSurface bent = cyl; // c'' flipped, rulings kept
    for (Vec3& c : bent.c) c.z() = -c.z();
    CHECK_FALSE(concavity_check(bent).concave);

    // deviation from the cylinder shrinks with eps
    double prev = 1e300;
    for (double eps : {0.1, 0.05, 0.025}) {
        const RuledGenerator g = RuledGenerator::random(0.5, eps, 9);
        const ConcavityReport r = concavity_check(ruled_from_generator(g, -1.0, 1.0, 41, -1.0, 2.0));
        double dev = 0.0;
        for (const auto& a : r.coeffs)
            for (double t : {-1.0, 0.0, 1.0, 2.0}) dev = std::max(dev, std::abs(a(0) + a(1) * t + a(2) * t * t + 4.0));
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("comparison")
{
    const GridSpec spec = pi_grid(0.01);
    const GridSpec pspec = pi_grid(0.05, 0.0, 0.0);
    const RuledGenerator g = RuledGenerator::random(0.5, 0.05, 4);
    const RuledSurface e = extend_ruled(extract_rulings(sample_graph(g, spec)));
    const FlatGraph fe = sample_extension(e, pspec, 0.5, 0.05);
    const ComparisonResult self = comparison_check(fe, fe, 1e-9);
    CHECK(self.hypothesis_ok);
    CHECK(self.margin == 0.0);
    const ComparisonResult up = comparison_check(fe, comparison_instance(g, pspec, 0.05), 1e-9);
    CHECK(up.hypothesis_ok);
    CHECK(up.margin >= -1e-8);
    const ComparisonResult down = comparison_check(fe, comparison_instance(g, pspec, -0.05), 1e-9);
    CHECK_FALSE(down.hypothesis_ok);
    CHECK(down.max_det > 0.0);
}

TEST_CASE("projection")
{
    const RuledSurface plane = plane_surface();
    // constant lift along the plane normal: lengths agree
    std::vector<Vec3> lifted, on;
    for (int k = 0; k <= 50; ++k) {
        const double t = 0.2 + 0.02 * k, s = -0.5 + 0.015 * k;
        on.push_back(plane.point(t, s));
        lifted.push_back(plane.point(t, s) + 0.3 * upward_normal(plane, t, s));
    }
    const ProjectionResult a = project_and_compare(lifted, plane);
    CHECK(a.len_curve == doctest::Approx(a.len_projected).epsilon(1e-10));
    CHECK(a.min_height == doctest::Approx(0.3).epsilon(1e-10));
    const ProjectionResult b = project_and_compare(on, plane);
    CHECK(b.len_curve == doctest::Approx(b.len_projected).epsilon(1e-10));

    const RuledSurface r = ruled_from_generator(RuledGenerator::random(0.5, 0.05, 2), -1.5, 1.5, 301, -1.0, 2.0);
    for (int k = 0; k < 10; ++k) {
        const ProjectionResult p = project_and_compare(lifted_curve(r, 77 + k), r);
        CHECK(p.len_curve >= p.len_projected - 1e-8);
    }
    std::vector<Vec3> below{r.point(0.5, 0.0) - 0.1 * upward_normal(r, 0.5, 0.0), r.point(0.6, 0.1)};
    CHECK_THROWS_AS(project_and_compare(below, r), HypothesisError);
}

}
