#include "noembed/conformal.hpp"

#include <cmath>
#include <limits>

#include "noembed/quadrature.hpp"

namespace noembed {

ConformalMetric ConformalMetric::from_function(std::function<double(Vec2)> phi)
{
    if (!phi) throw DomainError("ConformalMetric: empty factor");
    ConformalMetric g;
    g.analytic = std::move(phi);
    return g;
}

ConformalMetric ConformalMetric::from_samples(ScalarField phi)
{
    ConformalMetric g;
    g.samples = std::make_shared<const ScalarField>(std::move(phi));
    return g;
}

ConformalMetric ConformalMetric::tail(const TailFunction& v, double delta)
{
    ConformalMetric g;
    g.samples = std::make_shared<const ScalarField>(v.W);
    g.amplitude = delta;
    g.center = kTailCenter;
    g.scale = kTailScale;
    return g;
}

double ConformalMetric::factor(Vec2 x) const
{
    if (analytic) return analytic(x) + shift;
    const Vec2 y = (x - center) * scale;
    return amplitude * (samples->covers(y) ? samples->interpolate(y) : 0.0) + shift;
}

ConformalMetric ConformalMetric::shifted(double c) const
{
    ConformalMetric g = *this;
    g.shift += c;
    return g;
}

CurvatureField gaussian_curvature(const ConformalMetric& g, const GridSpec& spec, const std::function<bool(Vec2)>& domain)
{
    CurvatureField out;
    if (g.samples) {
        const ScalarField& f = *g.samples;
        const GridSpec& s = f.spec;
        GridSpec xs = s;
        xs.origin = g.center + s.origin / g.scale;
        xs.h = s.h / g.scale;
        out.h = xs.h;
        out.K = ScalarField(xs, std::vector<NodeKind>(s.size(), NodeKind::Exterior), std::vector<double>(s.size(), 0.0));
        const double lap_scale = g.amplitude * g.scale * g.scale;
        for (int j = 1; j < s.ny - 1; ++j)
            for (int i = 1; i < s.nx - 1; ++i) {
                const std::size_t k = s.index(i, j);
                if (f.mask[k] == NodeKind::Exterior || f.mask[k + 1] == NodeKind::Exterior || f.mask[k - 1] == NodeKind::Exterior
                    || f.mask[k + s.nx] == NodeKind::Exterior || f.mask[k - s.nx] == NodeKind::Exterior)
                    continue;
                if (domain && !domain(xs.node(i, j))) continue;
                const double phi = g.amplitude * f.values[k] + g.shift;
                out.K.values[k] = -std::exp(-2.0 * phi) * lap_scale * laplacian_5pt(s, f.values, i, j);
                out.K.mask[k] = NodeKind::Interior;
            }
        return out;
    }
    if (!(spec.h > 0.0) || spec.nx < 3 || spec.ny < 3) throw DomainError("gaussian_curvature: analytic metric needs a grid");
    out.h = spec.h;
    std::vector<double> phi(spec.size(), 0.0);
    std::vector<char> ok(spec.size(), 0);
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            const Vec2 p = spec.node(i, j);
            if (domain && !domain(p)) continue;
            const std::size_t k = spec.index(i, j);
            phi[k] = g.factor(p);
            ok[k] = std::isfinite(phi[k]);
        }
    out.K = ScalarField(spec, std::vector<NodeKind>(spec.size(), NodeKind::Exterior), std::vector<double>(spec.size(), 0.0));
    for (int j = 1; j < spec.ny - 1; ++j)
        for (int i = 1; i < spec.nx - 1; ++i) {
            const std::size_t k = spec.index(i, j);
            if (!ok[k] || !ok[k + 1] || !ok[k - 1] || !ok[k + spec.nx] || !ok[k - spec.nx]) continue;
            out.K.values[k] = -std::exp(-2.0 * phi[k]) * laplacian_5pt(spec, phi, i, j);
            out.K.mask[k] = NodeKind::Interior;
        }
    return out;
}

double curve_length(const ConformalMetric& g, const Segment& seg, double tol)
{
    if (g.samples) {
        const Segment ys{(seg.p - g.center) * g.scale, (seg.q - g.center) * g.scale};
        const double a = g.amplitude, c = g.shift;
        return grid_line_integral(*g.samples, ys, [a, c](double v) { return std::exp(a * v + c); }) / g.scale;
    }
    QuadratureOptions o;
    o.tol = tol;
    const double len = seg.length();
    const auto q = integrate([&](double t) { return LogScaledReal{1, g.factor(seg.at(t))} * len; }, 0.0, 1.0, o);
    return q.value.to_double();
}

double curve_length(const ConformalMetric& g, const std::vector<Vec2>& polyline, double tol)
{
    if (polyline.size() < 2) throw DomainError("curve_length: polyline needs two points");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < polyline.size(); ++k) acc += curve_length(g, Segment{polyline[k], polyline[k + 1]}, tol);
    return acc;
}

double curve_length(const ConformalMetric& g, const SteinerTree& tree, double tol)
{
    double acc = 0.0;
    for (const auto& leg : tree.legs()) acc += curve_length(g, leg, tol);
    return acc;
}

LengthDerivative length_derivative_check(const TailFunction& v, const SteinerTree& T, double step)
{
    if (!(step > 0.0)) throw DomainError("length_derivative_check: step must be positive");
    LengthDerivative r;
    const double Lp = curve_length(ConformalMetric::tail(v, step), T);
    const double Lm = curve_length(ConformalMetric::tail(v, -step), T);
    r.lhs = (Lp - Lm) / (2.0 * step);
    r.rhs = v.tree_integral(T);
    return r;
}

Delta0Scan find_delta0(const TailFunction& v, const SteinerTree& T, const std::vector<double>& scan)
{
    if (scan.empty()) throw DomainError("find_delta0: empty scan");
    for (std::size_t k = 0; k < scan.size(); ++k)
        if (!(scan[k] > 0.0) || (k > 0 && scan[k] <= scan[k - 1])) throw DomainError("find_delta0: scan must increase from 0");
    const double L0 = curve_length(ConformalMetric::from_function([](Vec2) { return 0.0; }), T);
    Delta0Scan out;
    for (std::size_t k = 0; k < scan.size(); ++k) {
        const double d = curve_length(ConformalMetric::tail(v, scan[k]), T) - L0;
        out.scan.emplace_back(scan[k], d);
        if (!(d < 0.0)) {
            if (k > 0) out.delta0 = scan[k - 1];
            return out;
        }
    }
    out.delta0 = scan.back();
    return out;
}

std::vector<double> log_delta_scan(double delta_max, int count)
{
    if (!(delta_max > 0.0) || count < 1) throw DomainError("log_delta_scan: bad parameters");
    std::vector<double> v;
    for (int k = count - 1; k >= 0; --k) v.push_back(std::ldexp(delta_max, -k));
    return v;
}

} // namespace noembed
