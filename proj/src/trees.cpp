#include "noembed/trees.hpp"

#include <cmath>

namespace noembed {

Segment::Segment(Vec2 p_, Vec2 q_) : p(p_), q(q_)
{
    if (p == q) throw DomainError("Segment: endpoints coincide");
}

double SteinerTree::length() const
{
    return norm(a1 - a) + norm(a2 - a) + norm(a3 - a);
}

SteinerTree build_steiner_tree(double a)
{
    if (!(a >= 0.0 && a < 1.0)) throw DomainError("build_steiner_tree: need 0 <= a < 1");
    const Vec2 A{-a, 0.0};
    const double t = a / 2.0 + std::sqrt(1.0 - 0.75 * a * a);
    const Vec2 d1{0.5, std::sqrt(3.0) / 2.0};
    const Vec2 d3{0.5, -std::sqrt(3.0) / 2.0};
    return {A, A + d1 * t, Vec2{-1.0, 0.0}, A + d3 * t};
}

QuadratureResult line_integral_weighted(const AnalyticField& f, const Segment& seg, double tol,
                                        const std::function<LogScaledReal(Vec2)>& weight)
{
    const LogScaledReal len = LogScaledReal::from_double(seg.length());
    QuadratureOptions opt;
    opt.tol = tol;
    opt.breakpoints = {};
    auto g = [&](double s) {
        const Vec2 x = seg.at(s);
        LogScaledReal v = f.value_log(x) * len;
        if (weight) v = v * weight(x);
        return v;
    };
    return integrate(g, 0.0, 1.0, opt);
}

QuadratureResult line_integral(const AnalyticField& f, const Segment& seg, double tol)
{
    return line_integral_weighted(f, seg, tol, {});
}

QuadratureResult tree_integral(const AnalyticField& f, const SteinerTree& t, double tol)
{
    QuadratureResult total;
    double err = 0.0;
    for (const Segment& leg : t.legs()) {
        const QuadratureResult r = line_integral(f, leg, tol);
        total.value += r.value;
        total.l1_norm += r.l1_norm;
        total.n_evals += r.n_evals;
        err += r.est_error;
    }
    total.est_error = err;
    return total;
}

LogScaledReal aa2_integral_scaled(int K, double tol)
{
    if (K < 1) throw DomainError("aa2_integral_scaled: K must be >= 1");
    const double fourpi2 = 4.0 * kPi * kPi;
    auto g = [&](double t) {
        const double s = std::sin(t);
        if (s == 0.0) return LogScaledReal::zero();
        return LogScaledReal(s > 0 ? -1 : 1, t * t / fourpi2 + t / kTwoPi + std::log(std::fabs(s)));
    };
    QuadratureOptions opt;
    opt.tol = tol;
    opt.initial_panels = 1;
    for (int k = 1; k < 2 * K; ++k) opt.breakpoints.push_back(-kPi * k);
    const QuadratureResult r = integrate(g, -kTwoPi * K, 0.0, opt);
    // 1 / (2 pi e^{pi^2})
    return r.value * LogScaledReal(1, -std::log(kTwoPi) - kPi * kPi);
}

namespace {

LogScaledReal arc_integral(const std::function<double(double)>& weight, double a, double b, double tol)
{
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate([&](double th) { return LogScaledReal::from_double(weight(th)); }, a, b, opt).value;
}

GreenIdentity assemble_identity(const AnalyticField& f, int K, double tol,
                                const std::function<double(double)>& minus_fr)
{
    if (K < 1) throw DomainError("green_identity: K must be >= 1");
    const SteinerTree T = build_steiner_tree(std::exp(-static_cast<double>(K)));
    const auto legs = T.legs();
    auto inv_rho = [&](Vec2 x) { return LogScaledReal(1, -std::log(norm(x - T.a))); };

    GreenIdentity g;
    const LogScaledReal l1 = line_integral_weighted(f, legs[0], tol, inv_rho).value;
    const LogScaledReal l2 = line_integral_weighted(f, legs[1], tol, inv_rho).value;
    const LogScaledReal l3 = line_integral_weighted(f, legs[2], tol, inv_rho).value;
    const LogScaledReal d1 = line_integral(f, legs[0], tol).value;
    const LogScaledReal d2 = line_integral(f, legs[1], tol).value;
    const LogScaledReal d3 = line_integral(f, legs[2], tol).value;

    const double th1 = std::atan2(T.a1.y, T.a1.x);
    const double th3 = kTwoPi - th1;
    auto phi = [&](double th) { return eval_angle_field(T.a, T.a1, {std::cos(th), std::sin(th)}); };
    g.arc_upper = arc_integral([&](double th) { return phi(th) * minus_fr(th); }, th1, kPi, tol);
    g.arc_lower = arc_integral([&](double th) { return (4.0 * kPi / 3.0 - phi(th)) * minus_fr(th); }, kPi, th3, tol);

    g.aa2 = d2;
    g.lhs = l1 + l3;
    g.rhs = l2 * 2.0 + g.arc_upper + g.arc_lower;
    g.residual = LogScaledReal::relative_difference(g.lhs, g.rhs);
    g.lhs_ds = d1 + d3;
    g.rhs_ds = d2 * 2.0 + g.arc_upper + g.arc_lower;
    g.residual_ds = LogScaledReal::relative_difference(g.lhs_ds, g.rhs_ds);
    return g;
}

} // namespace

GreenIdentity green_identity_terms(int K, double tol)
{
    MoonField u;
    GreenIdentity g = assemble_identity(u, K, tol, [](double th) { return -radial_derivative_u(th); });
    return g;
}

double green_identity_residual(int K, double tol) { return green_identity_terms(K, tol).residual; }

GreenIdentity green_identity_terms(const AnalyticField& f, int K, double tol)
{
    return assemble_identity(f, K, tol, [&](double th) {
        const Vec2 x{std::cos(th), std::sin(th)};
        return -dot(f.gradient(x), x);
    });
}

MinKResult find_min_K(int K_max, double tol)
{
    if (K_max < 1) throw DomainError("find_min_K: K_max must be >= 1");
    MinKResult res;
    for (int K = 1; K <= K_max; ++K) {
        const LogScaledReal aa2 = aa2_integral_scaled(K, tol);
        const GreenIdentity g = green_identity_terms(K, tol);
        MinKRecord rec{K, aa2, aa2 * 2.0 + g.arc_upper + g.arc_lower, false};
        // The K=1 term cancels exactly; treat values at rounding level as zero.
        const double floor = 1e-12 * std::exp(static_cast<double>(K) * K);
        const bool aa2_neg = aa2.sign() < 0 && aa2.logmag() > std::log(floor);
        rec.satisfied = aa2_neg && rec.rhs.sign() < 0;
        res.scan.push_back(rec);
        if (rec.satisfied && !res.K) res.K = K;
    }
    return res;
}

bool segment_in_sectors(const Segment& seg, const SteinerTree& tree)
{
    const double eps = 1e-12;
    if (norm(seg.p) > 1.0 + eps || norm(seg.q) > 1.0 + eps) return false;
    const Vec2 d1 = normalized(tree.a1 - tree.a), d3 = normalized(tree.a3 - tree.a);
    // Open wedge {cross(d3, x-A) > 0 and cross(x-A, d1) > 0}; find s in [0,1] inside both.
    double lo = 0.0, hi = 1.0;
    auto clip = [&](double c0, double c1) {
        // c0 + s c1 > eps
        if (std::fabs(c1) < 1e-300) {
            if (!(c0 > eps)) hi = -1.0;
            return;
        }
        const double s = (eps - c0) / c1;
        if (c1 > 0) lo = std::max(lo, s);
        else hi = std::min(hi, s);
    };
    const Vec2 pa = seg.p - tree.a, dq = seg.q - seg.p;
    clip(cross(d3, pa), cross(d3, dq));
    clip(cross(pa, d1), cross(dq, d1));
    return !(lo < hi);
}

SegmentSign check_segment_positivity(const Segment& seg, const SteinerTree& tree, double tol)
{
    for (Vec2 e : {seg.p, seg.q})
        if (std::fabs(norm(e) - 1.0) > 1e-12)
            throw DomainError("check_segment_positivity: endpoint not on the unit circle");
    if (!segment_in_sectors(seg, tree))
        throw DomainError("check_segment_positivity: segment exits the sectors");
    MoonField u;
    const QuadratureResult r = line_integral(u, seg, tol);
    return {r.value.sign() >= 0 ? 1 : -1, r.value};
}

} // namespace noembed
