#include <cmath>

#include "doctest.h"
#include "noembed/conformal.hpp"

using namespace noembed;

namespace {

double poincare_error(double h)
{
    const ConformalMetric g = ConformalMetric::from_function([](Vec2 p) { return std::log(2.0 / (1.0 - dot(p, p))); });
    const CurvatureField K = gaussian_curvature(g, GridSpec::covering({-1, -1}, {1, 1}, h, 2), [](Vec2 p) { return norm(p) < 0.95; });
    double e = 0.0;
    for (std::size_t k = 0; k < K.K.values.size(); ++k)
        if (K.K.mask[k] == NodeKind::Interior) e = std::max(e, std::abs(K.K.values[k] + 1.0));
    return e;
}

} // namespace

TEST_SUITE("conformal") {

TEST_CASE("flat metric lengths")
{
    const ConformalMetric flat = ConformalMetric::from_function([](Vec2) { return 0.0; });
    CHECK(curve_length(flat, Segment({0, 0}, {3, 4})) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(curve_length(flat, build_steiner_tree(0.5)) == doctest::Approx(2.802775637731994647).epsilon(1e-13));
    CHECK(curve_length(flat, std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("scaling law")
{
    const ConformalMetric g = ConformalMetric::from_function([](Vec2 p) { return 0.3 * p.x * p.y + std::sin(p.x); });
    const SteinerTree T = build_steiner_tree(0.2);
    for (double c : {-1.0, 0.25, 2.0})
        CHECK(curve_length(g.shifted(c), T) == doctest::Approx(std::exp(c) * curve_length(g, T)).epsilon(1e-13));
}

TEST_CASE("curvature of radial factors")
{
    // phi = |x|^2 / 4: Delta phi = 1, K = -e^{-2 phi}
    const ConformalMetric g = ConformalMetric::from_function([](Vec2 p) { return 0.25 * dot(p, p); });
    const CurvatureField K = gaussian_curvature(g, GridSpec::covering({-1, -1}, {1, 1}, 1.0 / 32.0, 2),
                                                [](Vec2 p) { return norm(p) < 0.8; });
    std::size_t n = 0;
    for (std::size_t k = 0; k < K.K.values.size(); ++k) {
        if (K.K.mask[k] != NodeKind::Interior) continue;
        const Vec2 p = K.K.spec.node(k);
        CHECK(K.K.values[k] == doctest::Approx(-std::exp(-0.5 * dot(p, p))).epsilon(1e-12));
        ++n;
    }
    CHECK(n > 100);
    CHECK(K.stencil == "5-point");
}

TEST_CASE("Poincare disc converges at second order")
{
    const double e1 = poincare_error(1.0 / 64.0), e2 = poincare_error(1.0 / 128.0);
    CHECK(e2 < e1);
    CHECK(e2 / e1 < 0.35);
}

TEST_CASE("sampled metrics read through the affine map")
{
    const GridSpec s = GridSpec::covering({-2, -2}, {2, 2}, 1.0 / 16.0, 0);
    std::vector<double> v(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = s.node(k).x;
    ConformalMetric g = ConformalMetric::from_samples(ScalarField(s, std::vector<NodeKind>(s.size(), NodeKind::Interior), v));
    g.center = {1.0, 0.0};
    g.scale = 2.0;
    g.amplitude = 0.5;
    // factor = 0.5 * (2 (x - 1))
    CHECK(g.factor({1.5, 0.3}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("delta scan")
{
    const auto s = log_delta_scan(1.0, 4);
    CHECK(s == std::vector<double>{0.125, 0.25, 0.5, 1.0});
    CHECK_THROWS_AS(log_delta_scan(-1.0, 3), DomainError);
}

}
