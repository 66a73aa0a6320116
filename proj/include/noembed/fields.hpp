#pragma once
#include <functional>
#include <memory>

#include "noembed/log_scaled.hpp"
#include "noembed/vec.hpp"

namespace noembed {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Point of the slit plane; theta in the open interval (0, 2pi).
struct PolarPoint {
    double r;
    double theta;

    PolarPoint(double r_, double theta_);
    static PolarPoint from_cartesian(Vec2 p);
    Vec2 cartesian() const;
};

class AnalyticField {
public:
    virtual ~AnalyticField() = default;
    virtual double value(Vec2 p) const = 0;
    virtual Vec2 gradient(Vec2 p) const = 0;
    virtual bool contains(Vec2 p) const { (void)p; return true; }
    /// Value in log-scaled form for fields whose range exceeds double.
    virtual LogScaledReal value_log(Vec2 p) const { return LogScaledReal::from_double(value(p)); }
};

/// Field built from callables; gradient defaults to centered differences.
class FunctionField : public AnalyticField {
public:
    using Scalar = std::function<double(Vec2)>;
    using Gradient = std::function<Vec2(Vec2)>;
    using Domain = std::function<bool(Vec2)>;

    explicit FunctionField(Scalar f, Gradient g = {}, Domain d = {});
    double value(Vec2 p) const override { return f_(p); }
    Vec2 gradient(Vec2 p) const override;
    bool contains(Vec2 p) const override { return d_ ? d_(p) : true; }

private:
    Scalar f_;
    Gradient g_;
    Domain d_;
};

/// u = -Im exp(log^2 z) on the plane slit along the positive x-axis.
class MoonField : public AnalyticField {
public:
    double value(Vec2 p) const override { return value_log(p).to_double(); }
    LogScaledReal value_log(Vec2 p) const override;
    Vec2 gradient(Vec2 p) const override;
    bool contains(Vec2 p) const override;
};

/// Field scaled by a constant, e.g. -u.
class ScaledField : public AnalyticField {
public:
    ScaledField(std::shared_ptr<const AnalyticField> base, double factor)
        : base_(std::move(base)), factor_(factor) {}
    double value(Vec2 p) const override { return factor_ * base_->value(p); }
    LogScaledReal value_log(Vec2 p) const override { return base_->value_log(p) * factor_; }
    Vec2 gradient(Vec2 p) const override { return base_->gradient(p) * factor_; }
    bool contains(Vec2 p) const override { return base_->contains(p); }

private:
    std::shared_ptr<const AnalyticField> base_;
    double factor_;
};

LogScaledReal eval_u(const PolarPoint& p);
/// du/dr on the unit circle.
double radial_derivative_u(double theta);
/// Five-point Laplacian of f at p with step h.
double laplacian_residual(const AnalyticField& f, Vec2 p, double h);
/// Angle at a from ray a->a1 to ray a->x, counter-clockwise, in [0, 2pi).
double eval_angle_field(Vec2 a, Vec2 a1, Vec2 x);

/// The angle field as an AnalyticField (harmonic away from a and its cut).
class AngleField : public AnalyticField {
public:
    AngleField(Vec2 a, Vec2 a1) : a_(a), a1_(a1) {}
    double value(Vec2 p) const override { return eval_angle_field(a_, a1_, p); }
    Vec2 gradient(Vec2 p) const override;
    bool contains(Vec2 p) const override { return !(p == a_); }

private:
    Vec2 a_, a1_;
};

} // namespace noembed
