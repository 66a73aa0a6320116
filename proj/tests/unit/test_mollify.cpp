#include <cmath>

#include "doctest.h"
#include "noembed/mollify.hpp"

using namespace noembed;

namespace {

ScalarField plain(const GridSpec& s, const std::function<double(Vec2)>& f)
{
    std::vector<double> v(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = f(s.node(k));
    return ScalarField(s, std::vector<NodeKind>(s.size(), NodeKind::Interior), std::move(v));
}

} // namespace

TEST_SUITE("mollify") {

TEST_CASE("mollifier profile and mass")
{
    const Mollifier m = make_mollifier(0.1);
    // continuous normalisation against the high-precision bump mass
    CHECK(m.scale == doctest::Approx(1.0 / (0.4665123931783300689 * 0.01)).epsilon(1e-10));
    CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m(0.1) == 0.0);
    CHECK(m(0.2) == 0.0);
    CHECK(m(0.0) > m(0.05));
    CHECK_THROWS_AS(make_mollifier(0.0), DomainError);
}

TEST_CASE("convolution preserves affine functions and drops the border")
{
    const GridSpec s = GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 64.0, 0);
    const ScalarField f = plain(s, [](Vec2 p) { return 2.0 * p.x - 3.0 * p.y + 1.0; });
    const ScalarField g = convolve(f, make_mollifier(0.1));
    std::size_t kept = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (g.mask[k] == NodeKind::Exterior) {
            CHECK(g.values[k] == 0.0);
            continue;
        }
        ++kept;
        CHECK(g.values[k] == doctest::Approx(f.values[k]).epsilon(1e-12));
    }
    CHECK(kept > 0);
    CHECK(kept < s.size());
    CHECK(g.mask[s.index(0, 0)] == NodeKind::Exterior);
}

TEST_CASE("convolution of a quadratic adds the second moment")
{
    const GridSpec s = GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 128.0, 0);
    const ScalarField f = plain(s, [](Vec2 p) { return dot(p, p); });
    const ScalarField g = convolve(f, make_mollifier(0.2));
    const std::size_t c = s.index(s.nx / 2, s.ny / 2);
    // the discrete kernel has unit sum, so the shift equals its second moment (positive)
    CHECK(g.values[c] > f.values[c]);
    CHECK(g.values[c] - f.values[c] < 0.04);
}

TEST_CASE("subharmonic defect")
{
    const GridSpec s = GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 32.0, 0);
    const ScalarField f = plain(s, [](Vec2 p) { return dot(p, p); });
    const SubharmonicReport r = subharmonic_defect(f, [](Vec2 p) { return norm(p) < 0.9; });
    CHECK(r.min_laplacian == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(r.nodes > 100);
    const ScalarField g = plain(s, [](Vec2 p) { return -dot(p, p); });
    CHECK(subharmonic_defect(g, [](Vec2 p) { return norm(p) < 0.9; }).relative() < 0.0);
}

TEST_CASE("grid line integral is exact for bilinear data")
{
    const GridSpec s = GridSpec::covering({-1, -1}, {1, 1}, 0.1, 0);
    const ScalarField f = plain(s, [](Vec2 p) { return 1.0 + p.x + 2.0 * p.y + p.x * p.y; });
    // along y = x from (-0.53, -0.53) to (0.61, 0.61): integrand 1 + 3t + t^2, ds = sqrt 2 dt
    const double a = -0.53, b = 0.61;
    const double exact = std::sqrt(2.0) * ((b - a) + 1.5 * (b * b - a * a) + (b * b * b - a * a * a) / 3.0);
    CHECK(grid_line_integral(f, Segment({a, a}, {b, b})) == doctest::Approx(exact).epsilon(1e-13));
    CHECK(grid_line_integral(f, Segment({2.0, 2.0}, {3.0, 3.0})) == 0.0);
}

TEST_CASE("tail tree and delta schedule")
{
    const SteinerTree T = tail_tree(1);
    CHECK(T.a.x == doctest::Approx(-std::exp(-1.0) / 10.0 - 0.8).epsilon(1e-14));
    const double h = 0.0036;
    const auto sch = default_delta_schedule(1, h, 4);
    REQUIRE_FALSE(sch.empty());
    for (std::size_t k = 0; k < sch.size(); ++k) {
        CHECK(sch[k] < std::exp(-2.0));
        CHECK(sch[k] >= 2.0 * h);
        if (k) CHECK(sch[k] < sch[k - 1]);
    }
}

TEST_CASE("tail function on a coarse grid")
{
    TailGridOptions o;
    o.K = 1;
    o.h = PentagonGeometry::from_K(1).short_side() / 64.0;
    const auto sch = default_delta_schedule(1, o.h, 2);
    REQUIRE_FALSE(sch.empty());
    o.pad_nodes = static_cast<int>(std::ceil(sch.front() / o.h)) + 4;
    const TailSolution sol = solve_tail_problems(o);
    const NSelection n = select_N(sol, geometric_schedule(1.0, 2.0, 80), 1e-8);
    REQUIRE(n.N.has_value());
    const TailFunction v = build_tail_v(sol, *n.N, sch.front());
    // supported inside the image of the construction region
    CHECK(v.max_outside_support() == 0.0);
    CHECK(v.value({5.0, 5.0}) == 0.0);
    const GridSpec xs = v.x_spec();
    CHECK(xs.h == doctest::Approx(o.h / 10.0));
    // harmonic away from interfaces: interior Laplacian is small relative to the field scale
    const SubharmonicReport sh = v.subharmonic_on_unit_disc();
    CHECK(sh.relative() >= -1e-8);
    // mollification does not change the sign structure of the tree integral
    const DeltaSelection sel = select_tail_delta(sol, *n.N, sch);
    CHECK(sel.scan.size() >= 1);
    CHECK(sel.v.has_value());
    CHECK_THROWS_AS(build_tail_v(sol, *n.N, 50.0 * o.h * (o.pad_nodes + 1)), std::exception);
}

}
