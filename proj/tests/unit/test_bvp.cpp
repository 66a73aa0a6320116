#include <cmath>

#include "doctest.h"
#include "noembed/bvp.hpp"

using namespace noembed;

namespace {

std::shared_ptr<Region> unit_disc()
{
    auto r = std::make_shared<Region>();
    r->inside = [](Vec2 p) { return norm(p) < 1.0; };
    BoundaryPiece arc;
    arc.kind = BoundaryPiece::Kind::Arc;
    arc.radius = 1.0;
    r->pieces = {arc};
    return r;
}

double disc_error(double h)
{
    // harmonic data e^x cos y on the unit disc
    auto exact = [](Vec2 p) { return std::exp(p.x) * std::cos(p.y); };
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({-1, -1}, {1, 1}, h), unit_disc(),
                                                   [&](Vec2 p, int) { return exact(p); });
    const ScalarField u = solve_laplace_dirichlet(grid, {1e-13, 100000, true});
    double err = 0.0;
    for (std::size_t k : grid->interior()) err = std::max(err, std::abs(u.values[k] - exact(u.spec.node(k))));
    return err;
}

} // namespace

TEST_SUITE("bvp") {

TEST_CASE("linear data is reproduced exactly on a cut-cell disc")
{
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 32.0), unit_disc(),
                                                   [](Vec2 p, int) { return 2.0 * p.x - p.y + 0.5; });
    SolveStats st;
    const ScalarField u = solve_laplace_dirichlet(grid, {1e-13, 100000, true}, &st);
    double err = 0.0;
    for (std::size_t k : grid->interior()) {
        const Vec2 p = u.spec.node(k);
        err = std::max(err, std::abs(u.values[k] - (2.0 * p.x - p.y + 0.5)));
    }
    CHECK(err < 1e-10);
    CHECK(st.relative_residual <= 1e-13);
    CHECK(st.levels > 1);
}

TEST_CASE("harmonic data converges at second order")
{
    const double e1 = disc_error(1.0 / 32.0), e2 = disc_error(1.0 / 64.0);
    CHECK(e1 < 1.0 / (32.0 * 32.0));
    CHECK(e1 / e2 > 3.0);
}

TEST_CASE("Poisson sign convention")
{
    // Delta_h u = -rhs with u = (1 - |x|^2) / 4 for rhs = 1
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 32.0), unit_disc(),
                                                   [](Vec2, int) { return 0.0; });
    ScalarField rhs(grid, 1.0);
    const ScalarField u = solve_poisson(grid, rhs, {1e-13, 100000, true});
    // the cut-cell stencil is exact for linear data only; quadratics carry an O(h^2) error
    double err = 0.0;
    for (std::size_t k : grid->interior()) {
        const Vec2 p = u.spec.node(k);
        CHECK(u.values[k] > 0.0);
        err = std::max(err, std::abs(u.values[k] - 0.25 * (1.0 - dot(p, p))));
    }
    CHECK(err < 0.1 / (32.0 * 32.0));
}

TEST_CASE("multigrid and plain CG agree")
{
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 32.0), unit_disc(),
                                                   [](Vec2 p, int) { return p.x * p.x - p.y * p.y + p.x * p.y; });
    const ScalarField a = solve_laplace_dirichlet(grid, {1e-13, 100000, true});
    const ScalarField b = solve_laplace_dirichlet(grid, {1e-13, 100000, false});
    for (std::size_t k : grid->interior()) CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-10));
}

TEST_CASE("solver reports non-convergence")
{
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 64.0), unit_disc(),
                                                   [](Vec2 p, int) { return std::sin(5 * p.x); });
    CHECK_THROWS_AS(solve_laplace_dirichlet(grid, {1e-14, 3, false}), ConvergenceError);
}

TEST_CASE("normal derivative of a linear field")
{
    auto box = std::make_shared<Region>(Region::box({0, 0}, {1, 1}));
    auto f = [](Vec2 p) { return 3.0 * p.x + 2.0 * p.y; };
    auto grid = std::make_shared<const MaskedGrid>(GridSpec::covering({0, 0}, {1, 1}, 1.0 / 40.0), box,
                                                   [&](Vec2 p, int) { return f(p); });
    const ScalarField u = solve_laplace_dirichlet(grid);
    // bottom edge, inward normal +y
    const auto s = normal_derivative(u, Segment({0.0, 0.0}, {1.0, 0.0}), NormalSide::Inward, f);
    REQUIRE(s.size() > 10);
    for (const EdgeSample& e : s) CHECK(e.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("pentagon geometry")
{
    const PentagonGeometry g = PentagonGeometry::from_K(1);
    CHECK(g.D.x == doctest::Approx(-std::exp(-2.0)));
    CHECK(norm(g.D1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm(g.D3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.D4.x == 20.0);
    CHECK(g.D5.x == 20.0);
    // slants at +-60 degrees from D
    const Vec2 up = normalized(g.D1 - g.D), lo = normalized(g.D3 - g.D);
    CHECK(std::acos(dot(up, lo)) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
    for (auto e : {PentagonGeometry::LowerSlant, PentagonGeometry::Bottom, PentagonGeometry::End, PentagonGeometry::Top,
                   PentagonGeometry::UpperSlant}) {
        const Segment s = g.edge(e);
        const Vec2 mid = s.at(0.5) + g.inward_normal(e) * 1e-6;
        CHECK(g.pentagon()->inside(mid));
    }
    CHECK(g.in_closed_sector({0.0, 0.0}));
    CHECK_FALSE(g.in_closed_sector({-0.5, 0.0}));
}

TEST_CASE("N selection on a coarse grid")
{
    TailGridOptions o;
    o.K = 1;
    o.h = PentagonGeometry::from_K(1).short_side() / 64.0;
    const TailSolution sol = solve_tail_problems(o);
    const NSelection sel = select_N(sol, geometric_schedule(1.0, 2.0, 80), 1e-8);
    REQUIRE(sel.N.has_value());
    const MarginRecord& r = sel.sweep.back();
    CHECK(r.min_slant > 0.0);
    CHECK(r.min_side > 0.0);
    CHECK(sel.slant_samples > 0);
    CHECK(sel.side_samples > 0);
    // every earlier candidate failed
    for (std::size_t k = 0; k + 1 < sel.sweep.size(); ++k) CHECK_FALSE(sel.sweep[k].ok);
    // too short a schedule cannot succeed
    CHECK_FALSE(select_N(sol, geometric_schedule(1.0, 2.0, 3), 1e-8).N.has_value());
}

TEST_CASE("geometric schedule")
{
    const auto s = geometric_schedule(1.0, 2.0, 4);
    CHECK(s == std::vector<double>{1.0, 2.0, 4.0, 8.0});
    CHECK_THROWS_AS(geometric_schedule(1.0, 1.0, 4), DomainError);
}

}
