#include "noembed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace noembed {

GridSpec GridSpec::covering(Vec2 lo, Vec2 hi, double h, int pad)
{
    if (!(h > 0.0)) throw DomainError("GridSpec: h must be positive");
    GridSpec s;
    s.h = h;
    const int i0 = static_cast<int>(std::floor(lo.x / h)) - pad;
    const int j0 = static_cast<int>(std::floor(lo.y / h)) - pad;
    const int i1 = static_cast<int>(std::ceil(hi.x / h)) + pad;
    const int j1 = static_cast<int>(std::ceil(hi.y / h)) + pad;
    s.origin = {i0 * h, j0 * h};
    s.nx = i1 - i0 + 1;
    s.ny = j1 - j0 + 1;
    // Odd counts coarsen cleanly.
    if (s.nx % 2 == 0) ++s.nx;
    if (s.ny % 2 == 0) ++s.ny;
    return s;
}

namespace {

// Smallest s in [0, 1] where segment p + s d meets the piece; returns >1 if none.
double intersect(const BoundaryPiece& piece, Vec2 p, Vec2 d)
{
    constexpr double none = 2.0;
    if (piece.kind == BoundaryPiece::Kind::Segment) {
        const Vec2 e = piece.b - piece.a;
        const double den = cross(d, e);
        if (std::fabs(den) < 1e-300) return none;
        const Vec2 w = piece.a - p;
        const double s = cross(w, e) / den;
        const double u = cross(w, d) / den;
        const double tol = 1e-12;
        if (s < -tol || s > 1.0 + tol || u < -tol || u > 1.0 + tol) return none;
        return std::clamp(s, 0.0, 1.0);
    }
    const Vec2 w = p - piece.center;
    const double A = dot(d, d), B = 2.0 * dot(w, d), C = dot(w, w) - piece.radius * piece.radius;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return none;
    const double sq = std::sqrt(disc);
    double best = none;
    for (double s : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
        if (s < -1e-12 || s > 1.0 + 1e-12) continue;
        const Vec2 x = p + d * s;
        if (piece.on_arc && !piece.on_arc(x)) continue;
        best = std::min(best, std::clamp(s, 0.0, 1.0));
    }
    return best;
}

} // namespace

std::pair<double, int> Region::crossing(Vec2 in, Vec2 out) const
{
    const Vec2 d = out - in;
    double best = 2.0;
    int id = -1;
    for (const BoundaryPiece& piece : pieces) {
        const double s = intersect(piece, in, d);
        if (s < best) { best = s; id = piece.id; }
    }
    if (best > 1.0) {
        // Fallback: bisection on the indicator, attributed to the nearest piece id.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (lo + hi);
            (inside(in + d * m) ? lo : hi) = m;
        }
        best = hi;
        id = pieces.empty() ? -1 : pieces.front().id;
    }
    return {best, id};
}

Region Region::polygon(const std::vector<Vec2>& v, const std::vector<int>& ids)
{
    Region r;
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
        BoundaryPiece p;
        p.kind = BoundaryPiece::Kind::Segment;
        p.id = ids.empty() ? static_cast<int>(k) : ids[k];
        p.a = v[k];
        p.b = v[(k + 1) % n];
        r.pieces.push_back(p);
    }
    r.inside = [v](Vec2 x) {
        const std::size_t m = v.size();
        for (std::size_t k = 0; k < m; ++k) {
            const Vec2 a = v[k], b = v[(k + 1) % m];
            const double len = norm(b - a);
            if (cross(b - a, x - a) <= 1e-12 * len) return false;
        }
        return true;
    };
    return r;
}

Region Region::box(Vec2 lo, Vec2 hi)
{
    return polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}, {0, 1, 2, 3});
}

MaskedGrid::MaskedGrid(GridSpec spec, std::shared_ptr<const Region> region, const BoundaryData& data)
    : spec_(spec), region_(std::move(region))
{
    if (!(spec_.h > 0.0) || spec_.nx < 3 || spec_.ny < 3) throw DomainError("MaskedGrid: degenerate grid");
    const std::size_t n = spec_.size();
    mask_.assign(n, NodeKind::Exterior);
    boundary_values_.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < spec_.ny; ++j)
        for (int i = 0; i < spec_.nx; ++i)
            if (region_->inside(spec_.node(i, j))) {
                if (i == 0 || j == 0 || i == spec_.nx - 1 || j == spec_.ny - 1)
                    throw DomainError("MaskedGrid: domain touches the grid edge");
                mask_[spec_.index(i, j)] = NodeKind::Interior;
            }
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    std::vector<double> best_frac(n, 2.0);
    for (int j = 1; j + 1 < spec_.ny; ++j)
        for (int i = 1; i + 1 < spec_.nx; ++i) {
            const std::size_t k = spec_.index(i, j);
            if (mask_[k] != NodeKind::Interior) continue;
            interior_.push_back(k);
            for (int d = 0; d < 4; ++d) {
                const std::size_t nb = spec_.index(i + di[d], j + dj[d]);
                if (mask_[nb] == NodeKind::Interior) continue;
                const Vec2 p = spec_.node(i, j), q = spec_.node(i + di[d], j + dj[d]);
                auto [s, id] = region_->crossing(p, q);
                s = std::clamp(s, 1e-6, 1.0);
                const Vec2 x = p + (q - p) * s;
                const double g = data ? data(x, id) : 0.0;
                links_.push_back({k, d, s, g, id});
                if (mask_[nb] == NodeKind::Exterior) mask_[nb] = NodeKind::Boundary;
                // Node value: datum of the crossing closest to the node.
                if (1.0 - s < best_frac[nb]) {
                    best_frac[nb] = 1.0 - s;
                    boundary_values_[nb] = g;
                }
            }
        }
}

MaskedGrid MaskedGrid::with_data(const BoundaryData& data) const
{
    MaskedGrid g = *this;
    std::vector<double> best(spec_.size(), 2.0);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (BoundaryLink& l : g.links_) {
        const int i = static_cast<int>(l.node % spec_.nx), j = static_cast<int>(l.node / spec_.nx);
        const Vec2 p = spec_.node(i, j), q = spec_.node(i + di[l.dir], j + dj[l.dir]);
        l.value = data ? data(p + (q - p) * l.frac, l.piece) : 0.0;
        const std::size_t nb = spec_.index(i + di[l.dir], j + dj[l.dir]);
        if (1.0 - l.frac < best[nb]) {
            best[nb] = 1.0 - l.frac;
            g.boundary_values_[nb] = l.value;
        }
    }
    return g;
}

ScalarField::ScalarField(std::shared_ptr<const MaskedGrid> g, double fill)
    : grid(std::move(g)), spec(grid->spec()), mask(grid->mask()), values(spec.size(), fill)
{
}

ScalarField::ScalarField(GridSpec s, std::vector<NodeKind> m, std::vector<double> v)
    : spec(s), mask(std::move(m)), values(std::move(v))
{
    if (values.size() != spec.size() || mask.size() != spec.size())
        throw DomainError("ScalarField: size mismatch");
}

bool ScalarField::covers(Vec2 p) const
{
    const double fx = (p.x - spec.origin.x) / spec.h, fy = (p.y - spec.origin.y) / spec.h;
    return fx >= 0.0 && fy >= 0.0 && fx <= spec.nx - 1 && fy <= spec.ny - 1;
}

double ScalarField::interpolate(Vec2 p) const
{
    if (!covers(p)) throw DomainError("ScalarField: point outside the grid");
    const double fx = (p.x - spec.origin.x) / spec.h, fy = (p.y - spec.origin.y) / spec.h;
    int i = std::min(static_cast<int>(fx), spec.nx - 2);
    int j = std::min(static_cast<int>(fy), spec.ny - 2);
    const double ax = fx - i, ay = fy - j;
    return (1 - ax) * (1 - ay) * at(i, j) + ax * (1 - ay) * at(i + 1, j) + (1 - ax) * ay * at(i, j + 1)
           + ax * ay * at(i + 1, j + 1);
}

double laplacian_5pt(const GridSpec& s, const std::vector<double>& v, int i, int j)
{
    const std::size_t k = s.index(i, j);
    return (v[k + 1] + v[k - 1] + v[k + s.nx] + v[k - s.nx] - 4.0 * v[k]) / (s.h * s.h);
}

} // namespace noembed
