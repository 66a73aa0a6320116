#include "noembed/ruled.hpp"
#include "noembed/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace noembed {

namespace {

double mode_sum(const std::vector<RuledGenerator::Mode>& modes, double s, int k)
{
    double acc = 0.0;
    for (const auto& m : modes) acc += m.amp * std::pow(m.freq, k) * std::sin(m.freq * s + m.phase + k * kPi / 2.0);
    return acc;
}

} // namespace

RuledGenerator RuledGenerator::cylinder(double tau)
{
    if (!(tau > 0.0)) throw DomainError("RuledGenerator: tau must be positive");
    RuledGenerator g;
    g.tau = tau;
    return g;
}

RuledGenerator RuledGenerator::random(double tau, double eps, std::uint64_t seed, int modes)
{
    if (!(tau > 0.0) || eps < 0.0 || modes < 1) throw DomainError("RuledGenerator: bad parameters");
    RuledGenerator g;
    g.tau = tau;
    g.eps = eps;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), fr(0.5, 2.0), ph(0.0, 2.0 * kPi);
    for (int k = 0; k < modes; ++k) {
        // |A'|, |A''| <= 0.4 and |B''| <= 0.3 keep |D^2 f - diag(0, -tau)| near 0.55 eps tau
        const double fa = fr(rng), fb = fr(rng);
        g.A.push_back({unit(rng) * 0.4 / (modes * std::max(fa, fa * fa)), fa, ph(rng)});
        g.B.push_back({unit(rng) * 0.3 / (modes * fb * fb), fb, ph(rng)});
    }
    g.A_shift = mode_sum(g.A, 0.0, 0);
    g.B_slope = mode_sum(g.B, 0.0, 1) + 2.0 * tau * tau * mode_sum(g.A, 0.0, 1);
    return g;
}

double RuledGenerator::a(double s, int k) const
{
    double A0 = mode_sum(A, s, k);
    if (k == 0) A0 -= A_shift;
    return eps * tau * A0;
}

double RuledGenerator::b(double s, int k) const
{
    double q = 0.0;
    if (k == 0) q = s * s / (2.0 * tau);
    else if (k == 1) q = s / tau;
    else if (k == 2) q = 1.0 / tau;
    double B0 = mode_sum(B, s, k);
    if (k == 0) B0 -= B_slope * s;
    else if (k == 1) B0 -= B_slope;
    return sign * q + eps * B0 / tau;
}

Vec3 RuledGenerator::c(double s, int k) const
{
    switch (k) {
    case 0: return {0.0, -b(s, 1), b(s) - s * b(s, 1)};
    case 1: return {0.0, -b(s, 2), -s * b(s, 2)};
    case 2: return {0.0, -b(s, 3), -b(s, 2) - s * b(s, 3)};
    }
    throw DomainError("RuledGenerator: derivative order above 2");
}

Vec3 RuledGenerator::d(double s, int k) const
{
    switch (k) {
    case 0: return {1.0, -a(s, 1), a(s) - s * a(s, 1)};
    case 1: return {0.0, -a(s, 2), -s * a(s, 2)};
    case 2: return {0.0, -a(s, 3), -a(s, 2) - s * a(s, 3)};
    }
    throw DomainError("RuledGenerator: derivative order above 2");
}

double RuledGenerator::solve_s(double x1, double x2) const
{
    double s = -sign * tau * x2;
    for (int it = 0; it < 60; ++it) {
        const double F = a(s, 1) * x1 + x2 + b(s, 1);
        const double dF = a(s, 2) * x1 + b(s, 2);
        if (dF == 0.0) break;
        const double step = F / dF;
        s -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) return s;
    }
    const double F = a(s, 1) * x1 + x2 + b(s, 1);
    if (std::abs(F) > 1e-12) throw ConvergenceError("RuledGenerator: ruling parameter did not converge");
    return s;
}

double default_psi(double x2) { return std::max(0.0, 1.0 - x2 * x2); }

GridSpec pi_grid(double h, double x1_lo, double margin)
{
    if (!(h > 0.0) || x1_lo > 2.0 || margin < 0.0) throw DomainError("pi_grid: bad parameters");
    GridSpec s;
    s.h = h;
    const int ny_half = static_cast<int>(std::ceil((2.0 + margin) / h - 1e-9));
    s.origin = {x1_lo, -ny_half * h};
    s.nx = static_cast<int>(std::lround((2.0 - x1_lo) / h)) + 1;
    s.ny = 2 * ny_half + 1;
    if (std::abs(x1_lo + (s.nx - 1) * h - 2.0) > 1e-9) throw DomainError("pi_grid: h must divide 2 - x1_lo");
    return s;
}

bool FlatGraph::in_F(Vec2 x) const
{
    const double p = psi ? psi(x.y) : default_psi(x.y);
    return !(p > 0.0 && x.x < p);
}

FlatGraph sample_graph(const RuledGenerator& g, const GridSpec& spec)
{
    FlatGraph out;
    out.spec = spec;
    out.tau = g.tau;
    out.eps = g.eps;
    const std::size_t n = spec.size();
    for (auto* v : {&out.f, &out.f1, &out.f2, &out.f11, &out.f12, &out.f22}) v->assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 x = spec.node(k);
        const double s = g.solve_s(x.x, x.y);
        const double D = g.a(s, 2) * x.x + g.b(s, 2);
        const double a1 = g.a(s, 1);
        out.f[k] = g.a(s) * x.x + s * x.y + g.b(s);
        out.f1[k] = g.a(s);
        out.f2[k] = s;
        out.f22[k] = -1.0 / D;
        out.f12[k] = -a1 / D;
        out.f11[k] = -a1 * a1 / D;
    }
    return out;
}

FlatGraph sample_function(const std::function<GraphDerivatives(Vec2)>& fn, const GridSpec& spec, double tau, double eps)
{
    FlatGraph out;
    out.spec = spec;
    out.tau = tau;
    out.eps = eps;
    const std::size_t n = spec.size();
    for (auto* v : {&out.f, &out.f1, &out.f2, &out.f11, &out.f12, &out.f22}) v->assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const GraphDerivatives d = fn(spec.node(k));
        out.f[k] = d.f;
        out.f1[k] = d.f1;
        out.f2[k] = d.f2;
        out.f11[k] = d.f11;
        out.f12[k] = d.f12;
        out.f22[k] = d.f22;
    }
    return out;
}

namespace {

double spectral_norm(double a, double b, double c) // [[a, b], [b, c]]
{
    const double m = 0.5 * (a + c), r = std::hypot(0.5 * (a - c), b);
    return std::max(std::abs(m + r), std::abs(m - r));
}

} // namespace

GraphHypotheses check_hypotheses(const FlatGraph& f, double det_tol)
{
    GraphHypotheses h;
    h.min_hessian = std::numeric_limits<double>::infinity();
    h.min_abs_f22 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.spec.size(); ++k) {
        const Vec2 x = f.spec.node(k);
        if (!f.in_F(x)) continue;
        const double nrm = spectral_norm(f.f11[k], f.f12[k], f.f22[k]);
        const double det = f.f11[k] * f.f22[k] - f.f12[k] * f.f12[k];
        h.min_hessian = std::min(h.min_hessian, nrm);
        if (nrm > 0.0) h.max_det = std::max(h.max_det, std::abs(det) / (nrm * nrm));
        h.max_deviation = std::max(h.max_deviation, spectral_norm(f.f11[k], f.f12[k], f.f22[k] + f.tau) / f.tau);
        h.min_abs_f22 = std::min(h.min_abs_f22, std::abs(f.f22[k]));
    }
    h.flat = h.max_det <= det_tol && h.min_hessian > 0.0;
    h.close = h.max_deviation <= f.eps;
    return h;
}

namespace {

// Cubic Hermite on [0, 1] with values p0, p1 and scaled slopes m0, m1.
double hermite(double u, double p0, double p1, double m0, double m1)
{
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
}

double hermite_slope(double u, double p0, double p1, double m0, double m1)
{
    const double u2 = u * u;
    return (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1;
}

struct ColumnRoot {
    bool found{false};
    double x2{0.0}, x3{0.0}, f1{0.0};
};

// Root of f2(x1_i, .) = s along column i.
ColumnRoot column_root(const FlatGraph& f, int i, double s)
{
    const GridSpec& g = f.spec;
    const double h = g.h;
    ColumnRoot r;
    for (int j = 0; j + 1 < g.ny; ++j) {
        const double a = f.at(f.f2, i, j) - s, b = f.at(f.f2, i, j + 1) - s;
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
            const double m0 = h * f.at(f.f22, i, j), m1 = h * f.at(f.f22, i, j + 1);
            const double p0 = f.at(f.f2, i, j), p1 = f.at(f.f2, i, j + 1);
            double lo = 0.0, hi = 1.0, u = a / (a - b);
            for (int it = 0; it < 100; ++it) {
                const double F = hermite(u, p0, p1, m0, m1) - s;
                if ((F < 0.0) == (a < 0.0)) lo = u;
                else hi = u;
                const double dF = hermite_slope(u, p0, p1, m0, m1);
                double next = dF != 0.0 ? u - F / dF : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (std::abs(next - u) < 1e-16) {
                    u = next;
                    break;
                }
                u = next;
            }
            r.found = true;
            r.x2 = g.origin.y + (j + u) * h;
            r.x3 = hermite(u, f.at(f.f, i, j), f.at(f.f, i, j + 1), h * f.at(f.f2, i, j), h * f.at(f.f2, i, j + 1));
            r.f1 = hermite(u, f.at(f.f1, i, j), f.at(f.f1, i, j + 1), h * f.at(f.f12, i, j), h * f.at(f.f12, i, j + 1));
            return r;
        }
    }
    return r;
}

// Least-squares line y = p + q t; returns max abs residual.
double fit_line(const std::vector<double>& t, const std::vector<double>& y, double& p, double& q)
{
    const std::size_t n = t.size();
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < n; ++k) {
        st += t[k];
        sy += y[k];
        stt += t[k] * t[k];
        sty += t[k] * y[k];
    }
    const double den = n * stt - st * st;
    q = (n * sty - st * sy) / den;
    p = (sy - q * st) / n;
    double r = 0.0;
    for (std::size_t k = 0; k < n; ++k) r = std::max(r, std::abs(y[k] - p - q * t[k]));
    return r;
}

std::pair<double, double> level_range(const FlatGraph& f)
{
    // every column must reach x2 = +-2: S spans the column values of f2 at both ends
    const GridSpec& g = f.spec;
    const int jlo = static_cast<int>(std::lround((-2.0 - g.origin.y) / g.h));
    const int jhi = static_cast<int>(std::lround((2.0 - g.origin.y) / g.h));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < g.nx; ++i)
        for (int j : {jlo, jhi}) {
            lo = std::min(lo, f.at(f.f2, i, j));
            hi = std::max(hi, f.at(f.f2, i, j));
        }
    return {lo, hi};
}

} // namespace

LegendreChart legendre_coords(const FlatGraph& f, int n_levels)
{
    if (n_levels < 2) throw DomainError("legendre_coords: need at least two levels");
    const GridSpec& g = f.spec;
    LegendreChart ch;
    ch.t.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
    ch.s = ch.t;
    const double thr = f.tau * (1.0 - f.eps);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec2 x = g.node(k);
        if (!f.in_F(x)) continue;
        const double det = f.f11[k] * f.f22[k] - f.f12[k] * f.f12[k];
        const double nrm = spectral_norm(f.f11[k], f.f12[k], f.f22[k]);
        if (!(nrm > 0.0) || std::abs(det) > 1e-8 * nrm * nrm)
            throw HypothesisError("legendre_coords: graph is not flat (det D^2 f != 0)");
        if (std::abs(f.f22[k]) < thr * (1.0 - 1e-12))
            throw HypothesisError("legendre_coords: |f22| below tau (1 - eps); chart degenerates");
        ch.t[k] = x.x;
        ch.s[k] = f.f2[k];
    }
    const auto [lo, hi] = level_range(f);
    for (int l = 0; l < n_levels; ++l) {
        LevelSet L;
        L.s = lo + (hi - lo) * l / (n_levels - 1);
        for (int i = 0; i < g.nx; ++i) {
            const ColumnRoot r = column_root(f, i, L.s);
            if (!r.found) continue;
            const double t = g.origin.x + i * g.h;
            if (!f.in_F({t, r.x2})) continue;
            L.t.push_back(t);
            L.x2.push_back(r.x2);
            L.x3.push_back(r.x3);
            L.f1.push_back(r.f1);
        }
        if (L.t.size() < 3) throw ResolutionError("legendre_coords: level set with fewer than three samples");
        double p, q;
        L.straightness = fit_line(L.t, L.x2, p, q);
        ch.max_straightness = std::max(ch.max_straightness, L.straightness);
        ch.levels.push_back(std::move(L));
    }
    return ch;
}

RuledSurface::Local RuledSurface::interpolate(double sv) const
{
    const std::size_t n = s.size();
    if (n < 4) throw DomainError("RuledSurface: need at least four samples");
    std::size_t i = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), sv) - s.begin());
    i = std::clamp<std::size_t>(i, 2, n - 2) - 2; // stencil i..i+3
    double w0[4], w1[4], w2[4];
    for (int a = 0; a < 4; ++a) {
        // Lagrange basis l_a and its first two derivatives at sv
        double val = 1.0, den = 1.0, d1 = 0.0, d2 = 0.0;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            den *= s[i + a] - s[i + b];
        }
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            val *= sv - s[i + b];
        }
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            double p = 1.0;
            for (int c = 0; c < 4; ++c)
                if (c != a && c != b) p *= sv - s[i + c];
            d1 += p;
            for (int c = 0; c < 4; ++c) {
                if (c == a || c == b) continue;
                double q = 1.0;
                for (int e = 0; e < 4; ++e)
                    if (e != a && e != b && e != c) q *= sv - s[i + e];
                d2 += q;
            }
        }
        w0[a] = val / den;
        w1[a] = d1 / den;
        w2[a] = d2 / den;
    }
    Local L;
    L.c = L.c1 = L.c2 = L.d = L.d1 = L.d2 = Vec3::Zero();
    for (int a = 0; a < 4; ++a) {
        L.c += w0[a] * c[i + a];
        L.c1 += w1[a] * c[i + a];
        L.c2 += w2[a] * c[i + a];
        L.d += w0[a] * d[i + a];
        L.d1 += w1[a] * d[i + a];
        L.d2 += w2[a] * d[i + a];
    }
    return L;
}

Vec3 RuledSurface::point(double t, double sv) const
{
    const Local L = interpolate(sv);
    return L.c + t * L.d;
}

RuledSurface ruled_from_generator(const RuledGenerator& g, double s_lo, double s_hi, int n, double t_min, double t_max)
{
    if (n < 5 || !(s_hi > s_lo) || !(t_max > t_min)) throw DomainError("ruled_from_generator: bad ranges");
    RuledSurface r;
    r.t_min = t_min;
    r.t_max = t_max;
    for (int k = 0; k < n; ++k) {
        const double s = s_lo + (s_hi - s_lo) * k / (n - 1);
        r.s.push_back(s);
        r.c.push_back(g.c(s));
        r.d.push_back(g.d(s));
    }
    return r;
}

RuledSurface extract_rulings(const FlatGraph& f, int n_levels, double tol)
{
    const LegendreChart ch = legendre_coords(f, n_levels);
    RuledSurface r;
    r.t_min = std::numeric_limits<double>::infinity();
    r.t_max = -r.t_min;
    for (const LevelSet& L : ch.levels) {
        double c2, d2, c3, d3;
        const double r2 = fit_line(L.t, L.x2, c2, d2);
        const double r3 = fit_line(L.t, L.x3, c3, d3);
        r.fit_residual = std::max({r.fit_residual, r2, r3});
        const auto [mn, mx] = std::minmax_element(L.f1.begin(), L.f1.end());
        r.independence_spread = std::max(r.independence_spread, *mx - *mn);
        r.s.push_back(L.s);
        r.c.push_back({0.0, c2, c3});
        r.d.push_back({1.0, d2, d3});
        r.t_min = std::min(r.t_min, L.t.front());
        r.t_max = std::max(r.t_max, L.t.back());
    }
    if (r.fit_residual > tol) throw HypothesisError("extract_rulings: level sets are not straight; surface is not flat");
    return r;
}

RuledSurface extend_ruled(const RuledSurface& r)
{
    RuledSurface e = r;
    e.t_min = -1.0;
    e.t_max = 2.0;
    const std::size_t n = r.s.size();
    // projected ruling x2(t, s) must be strictly monotone in s for every t, and span [-2, 2] for t in [0, 2]
    for (int k = 0; k <= 60; ++k) {
        const double t = -1.0 + 3.0 * k / 60.0;
        double prev = 0.0, dir = 0.0;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(r.d[i].x() - 1.0) > 1e-12 || std::abs(r.c[i].x()) > 1e-12)
                throw DomainError("extend_ruled: rulings must use the gauge t = x1");
            const double x2 = r.c[i].y() + t * r.d[i].y();
            lo = std::min(lo, x2);
            hi = std::max(hi, x2);
            if (i > 0) {
                const double step = x2 - prev;
                if (step == 0.0 || (dir != 0.0 && (step > 0.0) != (dir > 0.0)))
                    throw HypothesisError("extend_ruled: projected rulings cross; extension is not a graph");
                dir = step;
            }
            prev = x2;
        }
        if (t >= 0.0 && (lo > -2.0 + 1e-9 || hi < 2.0 - 1e-9))
            throw HypothesisError("extend_ruled: extension does not cover Pi");
    }
    return e;
}

namespace {

void stencil(const RuledSurface& r, std::size_t i, Vec3& c1, Vec3& c2, Vec3& d1, Vec3& d2)
{
    const std::size_t n = r.s.size();
    if (i < 2 || i + 2 >= n) throw DomainError("second_fundamental_form: s index too close to the sample range end");
    const double h = r.s[i + 1] - r.s[i];
    for (int k = -2; k < 2; ++k)
        if (std::abs((r.s[i + k + 1] - r.s[i + k]) - h) > 1e-9 * std::abs(h))
            throw DomainError("second_fundamental_form: s samples must be uniform");
    auto D1 = [&](const std::vector<Vec3>& v) {
        return Vec3((-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h));
    };
    auto D2 = [&](const std::vector<Vec3>& v) {
        return Vec3((-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * h * h));
    };
    c1 = D1(r.c);
    c2 = D2(r.c);
    d1 = D1(r.d);
    d2 = D2(r.d);
}

} // namespace

FundamentalForms second_fundamental_form(const RuledSurface& r, double t, std::size_t i)
{
    Vec3 c1, c2, d1, d2;
    stencil(r, i, c1, c2, d1, d2);
    const Vec3 ht = r.d[i], hs = c1 + t * d1;
    Vec3 N = hs.cross(ht);
    if (N.z() < 0.0) N = -N;
    N.normalize();
    FundamentalForms F;
    F.I << ht.dot(ht), ht.dot(hs), ht.dot(hs), hs.dot(hs);
    const double ts = d1.dot(N), ss = (c2 + t * d2).dot(N);
    F.II << 0.0, ts, ts, ss;
    return F;
}

double concavity_integrand(const RuledSurface& r, double t, std::size_t i)
{
    Vec3 c1, c2, d1, d2;
    stencil(r, i, c1, c2, d1, d2);
    const Vec3 n = (c1 + t * d1).cross(r.d[i]);
    return (n.z() < 0.0 ? -1.0 : 1.0) * (c2 + t * d2).dot(n);
}

ConcavityReport concavity_check(const RuledSurface& r)
{
    ConcavityReport rep;
    rep.max_value = -std::numeric_limits<double>::infinity();
    const std::size_t n = r.s.size();
    if (n < 5) throw DomainError("concavity_check: need at least five s samples");
    Eigen::Matrix<double, 5, 3> A;
    for (int k = 0; k < 5; ++k) {
        const double t = 1.0 + 0.25 * k;
        A.row(k) << 1.0, t, t * t;
    }
    const auto qr = A.colPivHouseholderQr();
    if (qr.rank() < 3) throw ConvergenceError("concavity_check: ill-conditioned fit");
    for (std::size_t i = 2; i + 2 < n; ++i) {
        Eigen::Matrix<double, 5, 1> y;
        for (int k = 0; k < 5; ++k) y(k) = concavity_integrand(r, 1.0 + 0.25 * k, i);
        const Eigen::Vector3d a = qr.solve(y);
        rep.fit_residual = std::max(rep.fit_residual, (A * a - y).cwiseAbs().maxCoeff());
        for (int k = 0; k <= 60; ++k) {
            const double t = -1.0 + 3.0 * k / 60.0;
            rep.max_value = std::max(rep.max_value, a(0) + a(1) * t + a(2) * t * t);
        }
        rep.s.push_back(r.s[i]);
        rep.coeffs.push_back(a);
    }
    rep.concave = rep.max_value < 0.0;
    return rep;
}

FlatGraph sample_extension(const RuledSurface& r, const GridSpec& spec, double tau, double eps)
{
    FlatGraph out;
    out.spec = spec;
    out.tau = tau;
    out.eps = eps;
    const std::size_t n = spec.size();
    for (auto* v : {&out.f, &out.f1, &out.f2, &out.f11, &out.f12, &out.f22}) v->assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 x = spec.node(k);
        double s = r.s[r.s.size() / 2];
        RuledSurface::Local L;
        for (int it = 0;; ++it) {
            L = r.interpolate(s);
            const double g = L.c.y() + x.x * L.d.y() - x.y, dg = L.c1.y() + x.x * L.d1.y();
            const double step = g / dg;
            s -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(s))) break;
            if (it > 60 || !std::isfinite(s)) throw ConvergenceError("sample_extension: ruling through node not found");
        }
        if (s < r.s_min() - 1e-9 || s > r.s_max() + 1e-9) throw DomainError("sample_extension: node outside the ruled patch");
        L = r.interpolate(s);
        const double f22 = 1.0 / (L.c1.y() + x.x * L.d1.y());
        const double ap = -L.d.y(); // a'(s)
        out.f[k] = L.c.z() + x.x * L.d.z();
        out.f1[k] = L.d.z() - s * L.d.y();
        out.f2[k] = s;
        out.f22[k] = f22;
        out.f12[k] = ap * f22;
        out.f11[k] = ap * ap * f22;
    }
    return out;
}

FlatGraph comparison_instance(const RuledGenerator& g, const GridSpec& spec, double eta)
{
    FlatGraph w = sample_graph(g, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const Vec2 x = spec.node(k);
        const double p = default_psi(x.y);
        const double r = p - x.x;
        if (!(p > 0.0) || r <= 0.0) continue;
        const double p1 = -2.0 * x.y, p2 = -2.0; // psi', psi''
        const double r2 = r * r;
        w.f[k] += eta * r2 * r2;
        w.f1[k] += -4.0 * eta * r2 * r;
        w.f2[k] += 4.0 * eta * r2 * r * p1;
        w.f11[k] += 12.0 * eta * r2;
        w.f12[k] += -12.0 * eta * r2 * p1;
        w.f22[k] += 12.0 * eta * r2 * p1 * p1 + 4.0 * eta * r2 * r * p2;
    }
    return w;
}

ComparisonResult comparison_check(const FlatGraph& f_ext, const FlatGraph& w, double tol)
{
    if (!(f_ext.spec == w.spec)) throw DomainError("comparison_check: graphs on different lattices");
    ComparisonResult res;
    res.max_det = -std::numeric_limits<double>::infinity();
    res.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < w.spec.size(); ++k) {
        const Vec2 x = w.spec.node(k);
        if (!FlatGraph::in_Pi(x)) continue;
        const double det = w.f11[k] * w.f22[k] - w.f12[k] * w.f12[k];
        res.max_det = std::max(res.max_det, det);
        if (f_ext.in_F(x)) res.agree_on_F = std::max(res.agree_on_F, std::abs(w.f[k] - f_ext.f[k]));
        res.margin = std::min(res.margin, w.f[k] - f_ext.f[k]);
    }
    res.hypothesis_ok = res.max_det <= tol && res.agree_on_F <= tol;
    return res;
}

Vec3 upward_normal(const RuledSurface& r, double t, double s)
{
    const auto L = r.interpolate(s);
    Vec3 N = (L.c1 + t * L.d1).cross(L.d);
    if (N.z() < 0.0) N = -N;
    return N.normalized();
}

Eigen::Vector2d nearest_parameters(const Vec3& p, const RuledSurface& r)
{
    // graph guess: t = x1, s from the projected ruling through (x1, x2)
    double t = p.x(), s = 0.5 * (r.s_min() + r.s_max());
    for (int it = 0; it < 50; ++it) {
        const auto L = r.interpolate(s);
        const double g = L.c.y() + t * L.d.y() - p.y(), dg = L.c1.y() + t * L.d1.y();
        if (dg == 0.0) break;
        s -= g / dg;
        if (std::abs(g) < 1e-15) break;
    }
    auto dist2 = [&](double tt, double ss) { return (r.point(tt, ss) - p).squaredNorm(); };
    for (int it = 0; it < 100; ++it) {
        const auto L = r.interpolate(s);
        const Vec3 h = L.c + t * L.d, ht = L.d, hs = L.c1 + t * L.d1, hts = L.d1, hss = L.c2 + t * L.d2;
        const Vec3 res = h - p;
        Eigen::Vector2d grad(ht.dot(res), hs.dot(res));
        Eigen::Matrix2d H;
        H << ht.dot(ht), ht.dot(hs) + hts.dot(res), ht.dot(hs) + hts.dot(res), hs.dot(hs) + hss.dot(res);
        Eigen::Vector2d step = -H.ldlt().solve(grad);
        if (!step.allFinite()) step = -grad;
        double lam = 1.0;
        const double f0 = res.squaredNorm();
        while (lam > 1e-8 && dist2(t + lam * step(0), s + lam * step(1)) > f0) lam *= 0.5;
        t += lam * step(0);
        s += lam * step(1);
        if (lam * step.norm() < 1e-15 * (1.0 + std::abs(t) + std::abs(s))) break;
    }
    return {t, s};
}

ProjectionResult project_and_compare(const std::vector<Vec3>& curve, const RuledSurface& r, double tol)
{
    if (curve.size() < 2) throw DomainError("project_and_compare: curve needs two samples");
    ProjectionResult out;
    out.min_height = std::numeric_limits<double>::infinity();
    std::vector<Vec3> foot;
    for (const Vec3& p : curve) {
        const Eigen::Vector2d ts = nearest_parameters(p, r);
        const Vec3 q = r.point(ts(0), ts(1));
        const double height = (p - q).dot(upward_normal(r, ts(0), ts(1)));
        out.min_height = std::min(out.min_height, height);
        if (height < -tol) throw HypothesisError("project_and_compare: curve sample below the surface");
        foot.push_back(q);
    }
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
        out.len_curve += (curve[k + 1] - curve[k]).norm();
        out.len_projected += (foot[k + 1] - foot[k]).norm();
    }
    return out;
}

std::vector<Vec3> lifted_curve(const RuledSurface& r, std::uint64_t seed, int samples, double max_height)
{
    if (samples < 2) throw DomainError("lifted_curve: need two samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s_lo = r.s[2], s_hi = r.s[r.s.size() - 3];
    const double t_lo = r.t_min + 0.1 * (r.t_max - r.t_min), t_hi = r.t_max - 0.1 * (r.t_max - r.t_min);
    // random Fourier paths in (t, s, height), each kept inside its range
    double ct[3], cs[3], ch[3], ph[9];
    for (int k = 0; k < 3; ++k) {
        ct[k] = u(rng) / (k + 1);
        cs[k] = u(rng) / (k + 1);
        ch[k] = u(rng) / (k + 1);
    }
    for (double& p : ph) p = 2.0 * kPi * u(rng);
    auto wave = [&](const double* c, const double* phase, double x) {
        double acc = 0.0, tot = 0.0;
        for (int k = 0; k < 3; ++k) {
            acc += c[k] * std::sin((k + 1) * kPi * x + phase[k]);
            tot += c[k];
        }
        return tot > 0.0 ? 0.5 + 0.5 * acc / tot : 0.5;
    };
    std::vector<Vec3> out;
    for (int i = 0; i < samples; ++i) {
        const double x = static_cast<double>(i) / (samples - 1);
        const double t = t_lo + (t_hi - t_lo) * wave(ct, ph, x);
        const double s = s_lo + (s_hi - s_lo) * wave(cs, ph + 3, x);
        const double h = max_height * wave(ch, ph + 6, x);
        out.push_back(r.point(t, s) + h * upward_normal(r, t, s));
    }
    return out;
}

} // namespace noembed
