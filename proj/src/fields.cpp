#include "noembed/fields.hpp"

#include <complex>

namespace noembed {

PolarPoint::PolarPoint(double r_, double theta_) : r(r_), theta(theta_)
{
    if (!(r > 0.0)) throw DomainError("PolarPoint: r must be positive");
    if (!(theta > 0.0 && theta < kTwoPi))
        throw DomainError("PolarPoint: theta outside (0, 2pi)");
}

PolarPoint PolarPoint::from_cartesian(Vec2 p)
{
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += kTwoPi;
    return {norm(p), th};
}

Vec2 PolarPoint::cartesian() const { return {r * std::cos(theta), r * std::sin(theta)}; }

FunctionField::FunctionField(Scalar f, Gradient g, Domain d)
    : f_(std::move(f)), g_(std::move(g)), d_(std::move(d))
{
}

Vec2 FunctionField::gradient(Vec2 p) const
{
    if (g_) return g_(p);
    const double h = 1e-6 * std::max(1.0, norm(p));
    return {(f_(p + Vec2{h, 0}) - f_(p - Vec2{h, 0})) / (2 * h),
            (f_(p + Vec2{0, h}) - f_(p - Vec2{0, h})) / (2 * h)};
}

LogScaledReal eval_u(const PolarPoint& p)
{
    const double L = std::log(p.r);
    const double s = std::sin(2.0 * p.theta * L);
    if (s == 0.0) return LogScaledReal::zero();
    return LogScaledReal(s > 0 ? -1 : 1, L * L - p.theta * p.theta + std::log(std::fabs(s)));
}

double radial_derivative_u(double theta)
{
    if (!(theta > 0.0 && theta < kTwoPi))
        throw DomainError("radial_derivative_u: theta outside (0, 2pi)");
    return -2.0 * theta * std::exp(-theta * theta);
}

bool MoonField::contains(Vec2 p) const
{
    return !(p.y == 0.0 && p.x >= 0.0);
}

LogScaledReal MoonField::value_log(Vec2 p) const
{
    if (!contains(p)) throw DomainError("MoonField: point on the slit");
    return eval_u(PolarPoint::from_cartesian(p));
}

Vec2 MoonField::gradient(Vec2 p) const
{
    if (!contains(p)) throw DomainError("MoonField: point on the slit");
    const PolarPoint q = PolarPoint::from_cartesian(p);
    const std::complex<double> lz(std::log(q.r), q.theta);
    // F'(z) = exp(log^2 z) * 2 log z / z
    const std::complex<double> w = lz * lz + std::log(2.0 * lz) - lz;
    const std::complex<double> dF = std::exp(w.real()) * std::complex<double>(std::cos(w.imag()), std::sin(w.imag()));
    return {-dF.imag(), -dF.real()};
}

double laplacian_residual(const AnalyticField& f, Vec2 p, double h)
{
    if (!(h > 0.0)) throw DomainError("laplacian_residual: h must be positive");
    for (int k = 0; k < 16; ++k) {
        const double a = kTwoPi * k / 16.0;
        if (!f.contains(p + Vec2{std::cos(a), std::sin(a)} * (2 * h)))
            throw DomainError("laplacian_residual: stencil leaves the domain");
    }
    if (!f.contains(p)) throw DomainError("laplacian_residual: point outside the domain");
    const double c = f.value(p);
    return (f.value(p + Vec2{h, 0}) + f.value(p - Vec2{h, 0}) + f.value(p + Vec2{0, h})
            + f.value(p - Vec2{0, h}) - 4.0 * c) / (h * h);
}

double eval_angle_field(Vec2 a, Vec2 a1, Vec2 x)
{
    if (x == a) throw DomainError("eval_angle_field: x coincides with the vertex");
    const Vec2 r1 = a1 - a, rx = x - a;
    double ang = std::atan2(cross(r1, rx), dot(r1, rx));
    if (ang < 0.0) ang += kTwoPi;
    return ang;
}

Vec2 AngleField::gradient(Vec2 p) const
{
    const Vec2 d = p - a_;
    const double r2 = dot(d, d);
    return Vec2{-d.y, d.x} / r2;
}

} // namespace noembed
