#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noembed/grid.hpp"
#include "noembed/mollify.hpp"
#include "noembed/trees.hpp"

namespace noembed {

/// Metric e^{2 phi} dx^2. phi is either an analytic function or grid samples read through the
/// affine map x -> (x - center) * scale, multiplied by `amplitude`.
struct ConformalMetric {
    std::function<double(Vec2)> analytic;
    std::shared_ptr<const ScalarField> samples;
    double amplitude{1.0};
    Vec2 center{0.0, 0.0};
    double scale{1.0};
    double shift{0.0}; // constant added to phi

    static ConformalMetric from_function(std::function<double(Vec2)> phi);
    static ConformalMetric from_samples(ScalarField phi);
    /// g_delta = e^{2 delta v}.
    static ConformalMetric tail(const TailFunction& v, double delta);

    double factor(Vec2 x) const;
    /// Same metric with factor phi + c.
    ConformalMetric shifted(double c) const;
};

struct CurvatureField {
    ScalarField K;      // x coordinates; Interior where the stencil was available
    std::string stencil{"5-point"};
    double h{0.0};
};

/// K = -e^{-2 phi} Delta_h phi. Sampled metrics use their own lattice (mapped to x); analytic
/// ones are sampled on `spec` at nodes where `domain` holds for the node and its neighbours.
CurvatureField gaussian_curvature(const ConformalMetric& g, const GridSpec& spec = {},
                                  const std::function<bool(Vec2)>& domain = nullptr);

double curve_length(const ConformalMetric& g, const Segment& seg, double tol = 1e-12);
double curve_length(const ConformalMetric& g, const std::vector<Vec2>& polyline, double tol = 1e-12);
double curve_length(const ConformalMetric& g, const SteinerTree& tree, double tol = 1e-12);

struct LengthDerivative {
    double lhs{0.0}; // centered difference of delta -> L(T, g_delta) at 0
    double rhs{0.0}; // tree integral of v
};

LengthDerivative length_derivative_check(const TailFunction& v, const SteinerTree& T, double step = 1e-4);

struct Delta0Scan {
    std::optional<double> delta0;
    std::vector<std::pair<double, double>> scan; // (delta, L(T, g_delta) - L(T, dx^2))
};

/// Scan must be increasing and positive.
Delta0Scan find_delta0(const TailFunction& v, const SteinerTree& T, const std::vector<double>& scan);

/// delta_max * 2^{-k}, k = count-1..0 (increasing).
std::vector<double> log_delta_scan(double delta_max, int count);

} // namespace noembed
