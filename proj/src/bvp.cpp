#include "noembed/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace noembed {

ScalarField solve_laplace_dirichlet(std::shared_ptr<const MaskedGrid> domain, const SolverOptions& opt, SolveStats* stats)
{
    ScalarField out(domain);
    out.values = solve_dirichlet_system(*domain, {}, opt, stats);
    return out;
}

ScalarField solve_poisson(std::shared_ptr<const MaskedGrid> domain, const ScalarField& rhs, const SolverOptions& opt,
                          SolveStats* stats)
{
    if (!(rhs.spec == domain->spec())) throw DomainError("solve_poisson: rhs lives on a different grid");
    ScalarField out(domain);
    out.values = solve_dirichlet_system(*domain, rhs.values, opt, stats);
    return out;
}

namespace {

// Quadratic through (0, g), (a, f1), (b, f2); derivative at 0.
double one_sided_derivative(double g, double a, double f1, double b, double f2)
{
    const double d1 = (f1 - g) / a, d2 = (f2 - g) / b;
    return (d1 * b - d2 * a) / (b - a);
}

} // namespace

std::vector<EdgeSample> normal_derivative(const ScalarField& f, const Segment& edge, NormalSide side,
                                          const std::function<double(Vec2)>& edge_data, double corner_margin)
{
    if (!f.grid) throw DomainError("normal_derivative: field has no domain");
    const GridSpec& s = f.spec;
    const double h = s.h;
    const Vec2 e = edge.q - edge.p;
    const double len = norm(e);
    const Vec2 tau = e / len;
    Vec2 n = perp(tau);
    const Vec2 mid = edge.at(0.5);
    const auto& region = *f.grid->region();
    if (!region.inside(mid + n * (1e-3 * h))) n = n * -1.0;
    if (!region.inside(mid + n * (1e-3 * h))) throw DomainError("normal_derivative: edge is not on the domain boundary");

    const bool horizontal = std::abs(n.x) >= std::abs(n.y); // walk along x on lines y = const
    const Vec2 g = horizontal ? Vec2{n.x > 0 ? 1.0 : -1.0, 0.0} : Vec2{0.0, n.y > 0 ? 1.0 : -1.0};
    const double ng = dot(n, g), tg = dot(tau, g);
    const double dt = 1e-5 * len;

    std::vector<EdgeSample> out;
    const double lo = horizontal ? std::min(edge.p.y, edge.q.y) : std::min(edge.p.x, edge.q.x);
    const double hi = horizontal ? std::max(edge.p.y, edge.q.y) : std::max(edge.p.x, edge.q.x);
    const double o = horizontal ? s.origin.y : s.origin.x;
    const int kmax = horizontal ? s.ny : s.nx;
    const double excl = corner_margin * h;
    for (int k = std::max(0, static_cast<int>(std::ceil((lo - o) / h))); k < kmax; ++k) {
        const double c = o + k * h;
        if (c > hi) break;
        const double t = horizontal ? (c - edge.p.y) / e.y : (c - edge.p.x) / e.x;
        if (t * len < excl || (1.0 - t) * len < excl) continue;
        const Vec2 P = edge.at(t);
        // nodes along the line beyond P in direction g
        const double along = horizontal ? (P.x - s.origin.x) / h : (P.y - s.origin.y) / h;
        const int step = (horizontal ? g.x : g.y) > 0 ? 1 : -1;
        int m = step > 0 ? static_cast<int>(std::floor(along)) + 1 : static_cast<int>(std::ceil(along)) - 1;
        double a = std::abs(m - along) * h;
        if (a < 0.5 * h) {
            m += step;
            a += h;
        }
        auto node_value = [&](int mm) {
            const int i = horizontal ? mm : k, j = horizontal ? k : mm;
            if (i < 0 || j < 0 || i >= s.nx || j >= s.ny) throw DomainError("normal_derivative: stencil leaves the grid");
            const std::size_t idx = s.index(i, j);
            if (s.size() != f.mask.size() || f.mask[idx] != NodeKind::Interior)
                throw DomainError("normal_derivative: stencil leaves the domain");
            return f.values[idx];
        };
        const double f1 = node_value(m), f2 = node_value(m + step);
        const double gP = edge_data(P);
        const double wg = one_sided_derivative(gP, a, f1, a + h, f2);
        const double gt = (edge_data(P + tau * dt) - edge_data(P - tau * dt)) / (2.0 * dt);
        double wn = (wg - gt * tg) / ng;
        if (side == NormalSide::Outward) wn = -wn;
        out.push_back({P, wn});
    }
    return out;
}

PentagonGeometry PentagonGeometry::from_K(int K)
{
    if (K < 1) throw DomainError("pentagon: K must be >= 1");
    PentagonGeometry g;
    g.K = K;
    const double d = std::exp(-2.0 * K);
    g.D = {-d, 0.0};
    // distance t from D along +-60 degrees to the unit circle: t^2 - d t + d^2 - 1 = 0
    const double t = 0.5 * d + std::sqrt(1.0 - 0.75 * d * d);
    const double c = std::cos(kPi / 3.0), sn = std::sin(kPi / 3.0);
    g.D1 = g.D + Vec2{c, sn} * t;
    g.D3 = g.D + Vec2{c, -sn} * t;
    g.D5 = {20.0, g.D1.y};
    g.D4 = {20.0, g.D3.y};
    return g;
}

Segment PentagonGeometry::edge(Edge e) const
{
    switch (e) {
    case LowerSlant: return {D, D3};
    case Bottom: return {D3, D4};
    case End: return {D4, D5};
    case Top: return {D5, D1};
    case UpperSlant: return {D1, D};
    }
    throw DomainError("pentagon: bad edge");
}

Vec2 PentagonGeometry::inward_normal(Edge e) const
{
    const Segment s = edge(e);
    return normalized(perp(s.q - s.p)); // ccw polygon: interior on the left
}

std::shared_ptr<Region> PentagonGeometry::pentagon() const
{
    return std::make_shared<Region>(Region::polygon({D, D3, D4, D5, D1}, {LowerSlant, Bottom, End, Top, UpperSlant}));
}

bool PentagonGeometry::in_closed_sector(Vec2 p, double eps) const
{
    const Vec2 r = p - D;
    return cross(D3 - D, r) >= -eps && cross(r, D1 - D) >= -eps;
}

std::shared_ptr<Region> PentagonGeometry::inner() const
{
    auto r = std::make_shared<Region>();
    const PentagonGeometry self = *this;
    r->inside = [self](Vec2 p) { return norm(p) < 1.0 - 1e-12 && !self.in_closed_sector(p, 1e-12); };
    BoundaryPiece arc;
    arc.kind = BoundaryPiece::Kind::Arc;
    arc.id = 5;
    arc.center = {0.0, 0.0};
    arc.radius = 1.0;
    arc.on_arc = [self](Vec2 p) { return !self.in_closed_sector(p, -1e-12); };
    BoundaryPiece up;
    up.id = UpperSlant;
    up.a = D;
    up.b = D1;
    BoundaryPiece low;
    low.id = LowerSlant;
    low.a = D;
    low.b = D3;
    r->pieces = {arc, up, low};
    return r;
}

ScalarField TailSolution::pentagon_solution(double N) const
{
    ScalarField w(pentagon_grid);
    for (std::size_t k = 0; k < w.values.size(); ++k) w.values[k] = w0.values[k] + N * unit_end.values[k];
    return w;
}

namespace {

double pentagon_datum(const PentagonGeometry& g, Vec2 p, int piece, double N)
{
    static const MoonField u;
    switch (piece) {
    case PentagonGeometry::LowerSlant:
    case PentagonGeometry::UpperSlant: return u.value(p);
    case PentagonGeometry::End: return N;
    default: return 0.0;
    }
    (void)g;
}

bool on_segment(Vec2 p, const Segment& s, double tol)
{
    const Vec2 e = s.q - s.p;
    const double t = dot(p - s.p, e) / dot(e, e);
    if (t < -1e-12 || t > 1.0 + 1e-12) return false;
    return norm(p - s.at(t)) <= tol;
}

} // namespace

ScalarField TailSolution::glued(double N) const
{
    static const MoonField u;
    ScalarField out(spec, std::vector<NodeKind>(spec.size(), NodeKind::Exterior), std::vector<double>(spec.size(), 0.0));
    const auto& pm = pentagon_grid->mask();
    const auto& im = inner_grid->mask();
    const double tol = 1e-9 * spec.h;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (pm[k] == NodeKind::Interior) {
            out.values[k] = w0.values[k] + N * unit_end.values[k];
            out.mask[k] = NodeKind::Interior;
        } else if (im[k] == NodeKind::Interior) {
            out.values[k] = inner.values[k];
            out.mask[k] = NodeKind::Interior;
        } else {
            const Vec2 p = spec.node(k);
            if (on_segment(p, geo.edge(PentagonGeometry::LowerSlant), tol) ||
                on_segment(p, geo.edge(PentagonGeometry::UpperSlant), tol)) {
                out.values[k] = (norm(p - geo.D) < tol) ? 0.0 : u.value(p);
                out.mask[k] = NodeKind::Boundary;
            } else if (on_segment(p, geo.edge(PentagonGeometry::End), tol)) {
                out.values[k] = N;
                out.mask[k] = NodeKind::Boundary;
            }
        }
    }
    return out;
}

namespace {

// Solution with datum 1 on the end edge. It decays like exp(-pi (20 - x) / L) towards the
// slants, far below the solver's absolute accuracy, so it is computed by a cascade: each stage
// solves on the pentagon truncated at a grid line x = c with the previous stage's values on that
// line (renormalised) as data. Restricted to x < c the discrete solution is exactly that stage's
// solution times the accumulated scale.
ScalarField solve_unit_end(TailSolution& sol, const std::shared_ptr<const MaskedGrid>& pent, const TailGridOptions& opt)
{
    const PentagonGeometry& g = sol.geo;
    const GridSpec& s = sol.spec;
    auto end_grid = std::make_shared<const MaskedGrid>(
        pent->with_data([](Vec2, int piece) { return piece == PentagonGeometry::End ? 1.0 : 0.0; }));
    ScalarField H = solve_laplace_dirichlet(end_grid, opt.solver, &sol.stats_end);
    H.grid = pent;

    const double L = g.D1.y - g.D3.y;
    ScalarField prev = H;
    double scale = 1.0;
    for (double cut = 20.0 - 2.0 * L; cut > g.D1.x + L; cut -= 2.0 * L) {
        const int ic = static_cast<int>(std::lround((cut - s.origin.x) / s.h));
        const double xc = s.origin.x + ic * s.h;
        double peak = 0.0;
        for (int j = 0; j < s.ny; ++j) peak = std::max(peak, std::abs(prev.at(ic, j)));
        if (!(peak > 0.0)) throw ConvergenceError("tail: end-datum solution vanished on a cascade cut");
        auto region = std::make_shared<Region>(Region::polygon(
            {g.D, g.D3, {xc, g.D3.y}, {xc, g.D1.y}, g.D1},
            {PentagonGeometry::LowerSlant, PentagonGeometry::Bottom, PentagonGeometry::End, PentagonGeometry::Top,
             PentagonGeometry::UpperSlant}));
        const ScalarField data = prev;
        auto stage_grid = std::make_shared<const MaskedGrid>(s, region, [data, peak](Vec2 p, int piece) {
            return piece == PentagonGeometry::End ? data.interpolate(p) / peak : 0.0;
        });
        SolveStats st;
        ScalarField next = solve_laplace_dirichlet(stage_grid, opt.solver, &st);
        sol.stats_end.iterations += st.iterations;
        scale *= peak;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (stage_grid->kind(k) == NodeKind::Interior) H.values[k] = scale * next.values[k];
        prev = next;
    }
    return H;
}

} // namespace

TailSolution solve_tail_problems(const TailGridOptions& opt)
{
    TailSolution sol;
    sol.geo = PentagonGeometry::from_K(opt.K);
    const PentagonGeometry& g = sol.geo;
    const double h = opt.h > 0.0 ? opt.h : g.short_side() / 512.0;
    sol.spec = GridSpec::covering({-1.0, -1.0}, {20.0, 1.0}, h, std::max(2, opt.pad_nodes));
    const PentagonGeometry geo = g;
    auto pent = std::make_shared<const MaskedGrid>(sol.spec, g.pentagon(),
                                                   [geo](Vec2 p, int piece) { return pentagon_datum(geo, p, piece, 0.0); });
    sol.pentagon_grid = pent;
    sol.w0 = solve_laplace_dirichlet(pent, opt.solver, &sol.stats_w0);
    sol.unit_end = solve_unit_end(sol, pent, opt);
    static const MoonField u;
    auto inner = std::make_shared<const MaskedGrid>(sol.spec, g.inner(), [](Vec2 p, int piece) {
        return (piece == PentagonGeometry::LowerSlant || piece == PentagonGeometry::UpperSlant) ? u.value(p) : 0.0;
    });
    sol.inner_grid = inner;
    sol.inner = solve_laplace_dirichlet(inner, opt.solver, &sol.stats_inner);
    return sol;
}

std::vector<double> geometric_schedule(double first, double ratio, int count)
{
    if (!(first > 0.0) || !(ratio > 1.0) || count < 1) throw DomainError("geometric_schedule: bad parameters");
    std::vector<double> v;
    double x = first;
    for (int i = 0; i < count; ++i, x *= ratio) v.push_back(x);
    return v;
}

NSelection select_N(const TailSolution& sol, const std::vector<double>& N_schedule, double margin_fraction)
{
    if (N_schedule.empty()) throw DomainError("select_N: empty schedule");
    if (margin_fraction < 0.0) throw DomainError("select_N: negative margin fraction");
    static const MoonField u;
    const PentagonGeometry& g = sol.geo;
    auto u_data = [](Vec2 p) { return u.value(p); };
    auto zero = [](Vec2) { return 0.0; };

    struct Slant {
        double w0, H, un;
    };
    std::vector<Slant> slant;
    std::vector<std::pair<double, double>> side;
    for (auto e : {PentagonGeometry::LowerSlant, PentagonGeometry::UpperSlant}) {
        const auto a = normal_derivative(sol.w0, g.edge(e), NormalSide::Inward, u_data);
        const auto b = normal_derivative(sol.unit_end, g.edge(e), NormalSide::Inward, zero);
        const Vec2 n = g.inward_normal(e);
        for (std::size_t i = 0; i < a.size(); ++i) slant.push_back({a[i].value, b[i].value, dot(u.gradient(a[i].point), n)});
    }
    for (auto e : {PentagonGeometry::Bottom, PentagonGeometry::Top}) {
        const auto a = normal_derivative(sol.w0, g.edge(e), NormalSide::Inward, zero);
        const auto b = normal_derivative(sol.unit_end, g.edge(e), NormalSide::Inward, zero);
        for (std::size_t i = 0; i < a.size(); ++i) side.emplace_back(a[i].value, b[i].value);
    }
    if (slant.empty() || side.empty()) throw ResolutionError("select_N: no edge samples; grid too coarse");
    double scale = 0.0;
    for (const auto& s : slant) scale = std::max(scale, std::abs(s.un));

    NSelection res;
    res.slant_samples = slant.size();
    res.side_samples = side.size();
    const double floor = margin_fraction * scale;
    for (double N : N_schedule) {
        MarginRecord r;
        r.N = N;
        r.scale = scale;
        r.min_slant = std::numeric_limits<double>::infinity();
        r.min_side = std::numeric_limits<double>::infinity();
        for (const auto& s : slant) r.min_slant = std::min(r.min_slant, s.w0 + N * s.H - s.un);
        for (const auto& s : side) r.min_side = std::min(r.min_side, s.first + N * s.second);
        r.ok = r.min_slant > 0.0 && r.min_side > 0.0 && r.min_slant >= floor && r.min_side >= floor;
        res.sweep.push_back(r);
        if (r.ok) {
            res.N = N;
            break;
        }
    }
    return res;
}

} // namespace noembed
