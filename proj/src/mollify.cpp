#include "noembed/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noembed/quadrature.hpp"

namespace noembed {

namespace {

double bump(double s) // s = r / delta
{
    if (s >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

} // namespace

double Mollifier::operator()(double r) const { return scale * bump(std::abs(r) / delta); }

double Mollifier::mass(double tol) const
{
    QuadratureOptions o;
    o.tol = tol;
    const auto q = integrate([this](double r) { return LogScaledReal::from_double(2.0 * kPi * r * (*this)(r)); }, 0.0, delta, o);
    return q.value.to_double();
}

Mollifier make_mollifier(double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("make_mollifier: delta must be positive");
    QuadratureOptions o;
    o.tol = 1e-14;
    // mass of the unit-radius bump; scales with delta^2
    const auto q = integrate([](double s) { return LogScaledReal::from_double(2.0 * kPi * s * bump(s)); }, 0.0, 1.0, o);
    return {delta, 1.0 / (q.value.to_double() * delta * delta)};
}

ScalarField convolve(const ScalarField& f, const Mollifier& m, const ConvolveOptions& opt)
{
    const GridSpec& s = f.spec;
    const double h = s.h;
    const int R = static_cast<int>(std::floor(m.delta / h));
    if (m.delta < 2.0 * h) throw ResolutionError("convolve: mollifier radius below two grid cells");

    // kernel rows: offsets dj in [-R, R], each a contiguous run [-w, w]
    std::vector<int> width(2 * R + 1);
    std::vector<std::vector<double>> rows(2 * R + 1);
    double total = 0.0;
    for (int dj = -R; dj <= R; ++dj) {
        auto& row = rows[dj + R];
        int w = 0;
        while (w + 1 <= R && std::hypot((w + 1) * h, dj * h) < m.delta) ++w;
        width[dj + R] = w;
        row.resize(2 * w + 1);
        for (int di = -w; di <= w; ++di) {
            row[di + w] = m(std::hypot(di * h, dj * h));
            total += row[di + w];
        }
    }
    for (auto& row : rows)
        for (auto& x : row) x /= total;

    // summed-area tables: nonzero inputs, and nodes that are not usable
    const int nx = s.nx, ny = s.ny;
    std::vector<long> nz((nx + 1) * static_cast<std::size_t>(ny + 1), 0), bad(nz.size(), 0);
    auto at = [nx](std::vector<long>& t, int i, int j) -> long& { return t[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = s.index(i, j);
            const long a = f.values[k] != 0.0 ? 1 : 0;
            const long b = (opt.respect_mask && f.mask[k] == NodeKind::Exterior) ? 1 : 0;
            at(nz, i + 1, j + 1) = a + at(nz, i, j + 1) + at(nz, i + 1, j) - at(nz, i, j);
            at(bad, i + 1, j + 1) = b + at(bad, i, j + 1) + at(bad, i + 1, j) - at(bad, i, j);
        }
    auto box = [&](std::vector<long>& t, int i0, int j0, int i1, int j1) {
        return at(t, i1 + 1, j1 + 1) - at(t, i0, j1 + 1) - at(t, i1 + 1, j0) + at(t, i0, j0);
    };

    ScalarField out(s, std::vector<NodeKind>(s.size(), NodeKind::Exterior), std::vector<double>(s.size(), 0.0));
    for (int j = R; j < ny - R; ++j)
        for (int i = R; i < nx - R; ++i) {
            if (box(bad, i - R, j - R, i + R, j + R) > 0) continue;
            const std::size_t k = s.index(i, j);
            out.mask[k] = NodeKind::Interior;
            if (box(nz, i - R, j - R, i + R, j + R) == 0) continue;
            double acc = 0.0;
            for (int dj = -R; dj <= R; ++dj) {
                const int w = width[dj + R];
                const double* src = &f.values[s.index(i - w, j + dj)];
                const auto& row = rows[dj + R];
                for (int t = 0; t <= 2 * w; ++t) acc += row[t] * src[t];
            }
            out.values[k] = acc;
        }
    return out;
}

SubharmonicReport subharmonic_defect(const ScalarField& f, const std::function<bool(Vec2)>& region)
{
    const GridSpec& s = f.spec;
    SubharmonicReport rep;
    rep.min_laplacian = std::numeric_limits<double>::infinity();
    for (int j = 1; j < s.ny - 1; ++j)
        for (int i = 1; i < s.nx - 1; ++i) {
            const Vec2 p = s.node(i, j);
            if (!region(p)) continue;
            const std::size_t k = s.index(i, j);
            if (f.mask[k] == NodeKind::Exterior || f.mask[k + 1] == NodeKind::Exterior || f.mask[k - 1] == NodeKind::Exterior
                || f.mask[k + s.nx] == NodeKind::Exterior || f.mask[k - s.nx] == NodeKind::Exterior)
                continue;
            const double L = laplacian_5pt(s, f.values, i, j);
            ++rep.nodes;
            rep.max_abs = std::max(rep.max_abs, std::abs(L));
            if (L < rep.min_laplacian) {
                rep.min_laplacian = L;
                rep.worst = p;
            }
        }
    if (rep.nodes == 0) throw DomainError("subharmonic_defect: region contains no usable nodes");
    return rep;
}

double grid_line_integral(const ScalarField& f, const Segment& seg, const std::function<double(double)>& transform)
{
    const GridSpec& s = f.spec;
    const Vec2 d = seg.q - seg.p;
    std::vector<double> ts{0.0, 1.0};
    auto add_crossings = [&](double p0, double dp, double o, int n) {
        if (dp == 0.0) return;
        for (int k = 0; k < n; ++k) {
            const double t = (o + k * s.h - p0) / dp;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    };
    add_crossings(seg.p.x, d.x, s.origin.x, s.nx);
    add_crossings(seg.p.y, d.y, s.origin.y, s.ny);
    std::sort(ts.begin(), ts.end());
    const GaussRule& g = gauss_legendre(5);
    const double len = seg.length();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double a = ts[k], b = ts[k + 1];
        if (b - a <= 0.0) continue;
        double piece = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
            const Vec2 p = seg.at(t);
            const double v = f.covers(p) ? f.interpolate(p) : 0.0;
            piece += g.weights[q] * (transform ? transform(v) : v);
        }
        acc += 0.5 * (b - a) * piece;
    }
    return acc * len;
}

double TailFunction::value(Vec2 x) const
{
    const Vec2 y = to_construction(x);
    return W.covers(y) ? W.interpolate(y) : 0.0;
}

GridSpec TailFunction::x_spec() const
{
    GridSpec s = W.spec;
    s.origin = kTailCenter + W.spec.origin / kTailScale;
    s.h = W.spec.h / kTailScale;
    return s;
}

double TailFunction::laplacian(int i, int j) const
{
    return kTailScale * kTailScale * laplacian_5pt(W.spec, W.values, i, j);
}

double TailFunction::line_integral(const Segment& seg) const
{
    return grid_line_integral(W, Segment{to_construction(seg.p), to_construction(seg.q)}) / kTailScale;
}

double TailFunction::tree_integral(const SteinerTree& t) const
{
    double acc = 0.0;
    for (const auto& leg : t.legs()) acc += line_integral(leg);
    return acc;
}

SubharmonicReport TailFunction::subharmonic_on_unit_disc() const
{
    const Vec2 c = to_construction({0.0, 0.0});
    const double R = kTailScale;
    auto rep = subharmonic_defect(W, [c, R](Vec2 y) { return norm(y - c) < R; });
    rep.min_laplacian *= kTailScale * kTailScale;
    rep.max_abs *= kTailScale * kTailScale;
    rep.worst = kTailCenter + rep.worst / kTailScale;
    return rep;
}

double TailFunction::max_outside_support() const
{
    const GridSpec xs = x_spec();
    double m = 0.0;
    for (int j = 0; j < xs.ny; ++j)
        for (int i = 0; i < xs.nx; ++i) {
            const Vec2 x = xs.node(i, j);
            if (x.x < 0.9 && norm(x) > 1.0) m = std::max(m, std::abs(W.at(i, j)));
        }
    return m;
}

SteinerTree tail_tree(int K)
{
    if (K < 1) throw DomainError("tail_tree: K must be >= 1");
    return build_steiner_tree(std::exp(-static_cast<double>(K)) / kTailScale + 0.8);
}

TailFunction build_tail_v(const TailSolution& sol, double N, double delta)
{
    if (!(delta > 0.0) || delta >= std::exp(-2.0 * sol.geo.K)) throw DomainError("build_tail_v: need 0 < delta < e^{-2K}");
    const ScalarField glued = sol.glued(N);
    const GridSpec& s = glued.spec;
    const int R = static_cast<int>(std::floor(delta / s.h)) + 1;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            if ((i <= R || j <= R || i >= s.nx - 1 - R || j >= s.ny - 1 - R) && glued.at(i, j) != 0.0)
                throw ResolutionError("build_tail_v: grid padding smaller than the mollifier radius");
    ConvolveOptions o;
    o.respect_mask = false; // the glued field is 0 off the closed domains
    TailFunction t;
    t.W = convolve(glued, make_mollifier(delta), o);
    t.K = sol.geo.K;
    t.N = N;
    t.delta = delta;
    return t;
}

std::vector<double> default_delta_schedule(int K, double h, int count)
{
    std::vector<double> v;
    double d = std::exp(-2.0 * K);
    for (int k = 0; k < count; ++k) {
        d *= 0.5;
        if (d >= 2.0 * h) v.push_back(d);
    }
    return v;
}

DeltaSelection select_tail_delta(const TailSolution& sol, double N, const std::vector<double>& schedule)
{
    if (schedule.empty()) throw DomainError("select_tail_delta: empty schedule");
    const double cap = std::exp(-2.0 * sol.geo.K);
    for (std::size_t k = 0; k < schedule.size(); ++k)
        if (!(schedule[k] > 0.0) || schedule[k] >= cap || (k > 0 && schedule[k] >= schedule[k - 1]))
            throw DomainError("select_tail_delta: schedule must decrease within (0, e^{-2K})");
    const SteinerTree T = tail_tree(sol.geo.K);
    DeltaSelection sel;
    {
        TailFunction raw;
        raw.W = sol.glued(N);
        sel.unmollified_integral = raw.tree_integral(T);
    }
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        TailFunction v = build_tail_v(sol, N, schedule[k]);
        DeltaRecord r;
        r.delta = schedule[k];
        r.tree_integral = v.tree_integral(T);
        double abs_int = 0.0;
        for (const auto& leg : T.legs())
            abs_int += grid_line_integral(v.W, Segment{v.to_construction(leg.p), v.to_construction(leg.q)},
                                          [](double x) { return std::abs(x); }) / kTailScale;
        r.error_margin = 1e-12 * abs_int;
        r.subharmonic = v.subharmonic_on_unit_disc();
        sel.scan.push_back(r);
        if (r.tree_integral < -r.error_margin) {
            sel.selected = k;
            sel.v = std::move(v);
            break;
        }
        if (k + 1 == schedule.size()) sel.v = std::move(v);
    }
    return sel;
}

} // namespace noembed
