#include "noembed/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noembed/bvp.hpp"
#include "noembed/quadrature.hpp"

namespace noembed {

double rotation_sum(const TailFunction& v, Vec2 x)
{
    const Vec2 X = x * kRotationScale;
    const double r = norm(X);
    if (std::abs(r - kRotationOffset) > kTailSupportRadius) return 0.0;
    double acc = 0.0;
    for (int i = 1; i <= kRotationCount; ++i) {
        const Vec2 y = rotate(X, i * kPi / 180.0) - Vec2{kRotationOffset, 0.0};
        if (norm(y) < kTailSupportRadius) acc += v.value(y);
    }
    return acc;
}

std::vector<double> measured_derivative_maxima(const GridSpec& s, const std::vector<double>& f, int max_order,
                                               const std::function<bool(Vec2)>& keep)
{
    if (max_order < 0) throw DomainError("derivative maxima: negative order");
    if (f.size() != s.size()) throw DomainError("derivative maxima: size mismatch");
    const int nx = s.nx, ny = s.ny;
    std::vector<char> use(s.size(), 0);
    for (int j = max_order; j < ny - max_order; ++j)
        for (int i = max_order; i < nx - max_order; ++i) use[s.index(i, j)] = !keep || keep(s.node(i, j));

    auto dx = [&](const std::vector<double>& g) {
        std::vector<double> out(g.size(), 0.0);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx - 1; ++i) out[s.index(i, j)] = (g[s.index(i + 1, j)] - g[s.index(i - 1, j)]) / (2.0 * s.h);
        return out;
    };
    auto dy = [&](const std::vector<double>& g) {
        std::vector<double> out(g.size(), 0.0);
        for (int j = 1; j < ny - 1; ++j)
            for (int i = 0; i < nx; ++i) out[s.index(i, j)] = (g[s.index(i, j + 1)] - g[s.index(i, j - 1)]) / (2.0 * s.h);
        return out;
    };
    auto maxabs = [&](const std::vector<double>& g) {
        double m = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (use[k]) m = std::max(m, std::abs(g[k]));
        return m;
    };
    std::vector<double> maxima{maxabs(f)};
    std::vector<std::vector<double>> level{f}; // partials (a, m - a), a = 0..m
    for (int m = 1; m <= max_order; ++m) {
        std::vector<std::vector<double>> next;
        next.push_back(dy(level[0]));
        for (int a = 1; a <= m; ++a) next.push_back(dx(level[a - 1]));
        double mm = 0.0;
        for (const auto& g : next) mm = std::max(mm, maxabs(g));
        maxima.push_back(mm);
        level = std::move(next);
    }
    return maxima;
}

BumpSchedule build_bump_schedule(const TailFunction& v, int n_max)
{
    if (n_max < 1) throw DomainError("build_bump_schedule: n_max must be >= 1");
    BumpSchedule s;
    // derivatives of v in x coordinates: d^m_x = 10^m d^m_y on the construction grid
    auto maxima = measured_derivative_maxima(v.W.spec, v.W.values, n_max, [&v](Vec2 y) {
        return norm(kTailCenter + y / kTailScale) < kTailSupportRadius;
    });
    for (int m = 0; m <= n_max; ++m) maxima[m] *= std::pow(kTailScale, m);
    s.tail_derivative_maxima = maxima;
    for (int n = 1; n <= n_max; ++n) {
        s.z.push_back({std::ldexp(1.0, -n), std::ldexp(1.0, -n - 2)});
        s.rho.push_back(std::ldexp(1.0, -n - 3));
        double D = 0.0;
        for (int m = 0; m <= n; ++m) D = std::max(D, std::pow(kRotationScale / s.rho.back(), m) * maxima[m]);
        s.D.push_back(D);
        s.delta.push_back(D > 0.0 ? std::ldexp(1.0, -n) / D : std::ldexp(1.0, -n));
    }
    return s;
}

double eval_gII_factor(const BumpSchedule& s, const TailFunction& v, Vec2 x)
{
    for (std::size_t n = 0; n < s.z.size(); ++n)
        if (norm(x - s.z[n]) < s.rho[n]) return s.delta[n] * rotation_sum(v, (x - s.z[n]) / s.rho[n]);
    return 0.0;
}

double step_one_bump(double s, double lambda)
{
    if (s >= 1.0) return 0.0;
    return -std::exp(-lambda / (1.0 - s * s));
}

bool StepOneMetric::in_bump(Vec2 x, double pad) const
{
    for (std::size_t n = 0; n < centers.size(); ++n)
        if (norm(x - centers[n]) < radii[n] + pad) return true;
    return false;
}

StepOneMetric build_g1(int n_max, double h, double lambda, const SolverOptions& opt)
{
    if (n_max < 1) throw DomainError("build_g1: n_max must be >= 1");
    if (!(h > 0.0) || !(lambda > 0.0)) throw DomainError("build_g1: h and lambda must be positive");
    StepOneMetric g;
    g.n_max = n_max;
    g.lambda = lambda;
    for (int n = 1; n <= n_max; ++n) {
        g.centers.push_back({std::ldexp(1.0, -n), 0.0});
        g.radii.push_back(std::ldexp(1.0, -2 * n));
        if (g.radii.back() < 4.0 * h) throw ResolutionError("build_g1: ball B^" + std::to_string(n) + " under-resolved");
    }
    // bounding circle of the supports, box of half-width 4 R on grid lines
    const double lo = g.centers.back().x - g.radii.back(), hi = g.centers.front().x + g.radii.front();
    const double cx = 0.5 * (lo + hi), R = 0.5 * (hi - lo);
    const double half = std::ceil(4.0 * R / h) * h;
    const double x0 = std::round((cx - half) / h) * h;
    const Vec2 blo{x0, -half}, bhi{x0 + 2.0 * half, half};
    GridSpec spec;
    spec.h = h;
    spec.origin = blo - Vec2{h, h};
    spec.nx = static_cast<int>(std::lround((bhi.x - blo.x) / h)) + 3;
    spec.ny = static_cast<int>(std::lround((bhi.y - blo.y) / h)) + 3;
    if (spec.nx % 2 == 0) ++spec.nx;
    if (spec.ny % 2 == 0) ++spec.ny;
    auto region = std::make_shared<Region>(Region::box(blo, bhi));
    auto grid = std::make_shared<const MaskedGrid>(spec, region, [](Vec2, int) { return 0.0; });
    g.k = ScalarField(grid);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const Vec2 p = spec.node(k);
        double acc = 0.0;
        for (std::size_t n = 0; n < g.centers.size(); ++n) acc += step_one_bump(norm(p - g.centers[n]) / g.radii[n], lambda);
        g.k.values[k] = acc;
    }
    g.u1 = solve_poisson(grid, g.k, opt, &g.stats);
    return g;
}

double cutoff_profile(int n, double r)
{
    if (n < 1) throw DomainError("cutoff_profile: n must be >= 1");
    const double t = r - 1.0 / n;
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t);
}

double cutoff_laplacian(int n, double r)
{
    const double t = r - 1.0 / n;
    if (t <= 0.0 || r <= 0.0) return 0.0;
    // phi'' + phi' / r with phi' = phi / t^2, phi'' = phi (1/t^4 - 2/t^3)
    const double bracket = 1.0 / (t * t) - 2.0 / t + 1.0 / r;
    return std::exp(-1.0 / t - 2.0 * std::log(t)) * bracket;
}

double measured_c4(const std::function<double(Vec2)>& f, double h)
{
    const GridSpec s = GridSpec::covering({-1.0, -1.0}, {1.0, 1.0}, h, 6);
    std::vector<double> vals(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) vals[k] = f(s.node(k));
    const auto m = measured_derivative_maxima(s, vals, 4, [](Vec2 p) { return norm(p) <= 1.0; });
    return *std::max_element(m.begin(), m.end());
}

MuSchedule measure_mu_schedule(int n_max, double h)
{
    if (n_max < 1) throw DomainError("measure_mu_schedule: n_max must be >= 1");
    MuSchedule s;
    s.h = h;
    for (int n = 1; n <= n_max; ++n) {
        const double c = measured_c4([n](Vec2 p) { return cutoff_profile(n, norm(p)); }, h);
        s.c4.push_back(c);
        s.mu.push_back(std::ldexp(1.0, -n) / (1.0 + c));
    }
    return s;
}

double PlantedBump::density(Vec2 x) const
{
    return -sigma * step_one_bump(norm(x - center) / radius, lambda);
}

double PlantedBump::potential(Vec2 x) const
{
    const double r = norm(x - center);
    if (r >= radius) return sigma * mass / (2.0 * kPi) * std::log(r);
    const double f = r / radius * (table.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(f), table.size() - 2);
    const double a = f - i;
    return sigma * ((1.0 - a) * table[i] + a * table[i + 1]);
}

namespace {

PlantedBump plant(Vec2 center, double radius, double lambda, double sigma_budget)
{
    PlantedBump b;
    b.center = center;
    b.radius = radius;
    b.lambda = lambda;
    auto prof = [lambda](double s) { return -step_one_bump(s, lambda); };
    QuadratureOptions o;
    o.tol = 1e-13;
    // enclosed mass m(r) and the potential (1/2pi)(m(r) log r + int_r^R 2 pi s b(s) log s ds)
    auto enclosed = [&](double r) {
        return integrate([&](double s) { return LogScaledReal::from_double(2.0 * kPi * s * prof(s / radius)); }, 0.0, r, o)
            .value.to_double();
    };
    b.mass = enclosed(radius);
    const int n = 256;
    b.table.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double r = radius * k / n;
        const double outer = integrate([&](double s) {
                                 return LogScaledReal::from_double(2.0 * kPi * s * prof(s / radius) * std::log(s));
                             }, std::max(r, 1e-300), radius, o).value.to_double();
        const double inner = r > 0.0 ? enclosed(r) * std::log(r) : 0.0;
        b.table[k] = (inner + outer) / (2.0 * kPi);
    }
    // k-th partials of (M/2pi) log|x - c| at 0 are bounded by (M/2pi)(k-1)!/|c|^k
    double bound = 0.0, fact = 1.0;
    for (int k = 1; k <= 4; ++k) {
        if (k > 1) fact *= (k - 1);
        bound = std::max(bound, b.mass / (2.0 * kPi) * fact / std::pow(norm(center), k));
    }
    b.sigma = sigma_budget / bound;
    return b;
}

} // namespace

double AnnulusStack::u0(Vec2 x) const
{
    double acc = 0.0;
    for (const auto& b : bumps) acc += b.potential(x);
    return acc - offset;
}

double AnnulusStack::psi(Vec2 x) const
{
    const double r = norm(x);
    double acc = 0.0;
    for (int m = 1; m <= n_max; ++m) acc += eta[m - 1] * mu[m - 1] * cutoff_profile(m, r);
    return acc;
}

double AnnulusStack::laplacian(Vec2 x) const
{
    const double r = norm(x);
    double acc = 0.0;
    for (const auto& b : bumps) acc += b.density(x);
    for (int m = 1; m <= n_max; ++m) acc += eta[m - 1] * mu[m - 1] * cutoff_laplacian(m, r);
    return acc;
}

double AnnulusStack::curvature(Vec2 x) const
{
    return -std::exp(-2.0 * factor(x)) * laplacian(x);
}

ConformalMetric AnnulusStack::metric() const
{
    const AnnulusStack self = *this;
    return ConformalMetric::from_function([self](Vec2 x) { return self.factor(x); });
}

AnnulusStack build_annulus_stack(const std::vector<double>& eta, int n_max, const MuSchedule& mu)
{
    if (n_max < 1) throw DomainError("build_annulus_stack: n_max must be >= 1");
    if (static_cast<int>(mu.mu.size()) < n_max)
        throw DomainError("build_annulus_stack: mu schedule not measured up to n_max; call measure_mu_schedule first");
    if (static_cast<int>(eta.size()) < n_max) throw DomainError("build_annulus_stack: eta shorter than n_max");
    for (int m = 0; m < n_max; ++m)
        if (!(eta[m] > 0.0) || !std::isfinite(eta[m])) throw DomainError("build_annulus_stack: eta must be positive and bounded");
    AnnulusStack s;
    s.n_max = n_max;
    s.eta.assign(eta.begin(), eta.begin() + n_max);
    s.mu.assign(mu.mu.begin(), mu.mu.begin() + n_max);
    for (int n = 1; n <= n_max; ++n) {
        const double ri = 1.0 / (n + 1), ro = 1.0 / n;
        const double mid = 0.5 * (ri + ro), width = 0.5 * (ro - ri);
        s.bumps.push_back(plant({mid, 0.0}, 0.5 * width, 1e-3, 0.5e-8 * std::ldexp(1.0, -n)));
    }
    s.offset = 0.0;
    s.offset = s.u0({0.0, 0.0});
    return s;
}

std::vector<double> origin_derivatives(const std::function<double(Vec2)>& f, double step)
{
    // central-difference grid of radius 4 around the origin
    GridSpec s;
    s.h = step;
    s.nx = s.ny = 9;
    s.origin = {-4.0 * step, -4.0 * step};
    std::vector<double> vals(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) vals[k] = f(s.node(k));
    auto m = measured_derivative_maxima(s, vals, 4, [step](Vec2 p) { return norm(p) < 0.5 * step; });
    m[0] = 0.0; // order 0 is not a derivative
    return m;
}

} // namespace noembed
