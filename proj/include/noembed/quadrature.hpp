#pragma once
#include <functional>
#include <vector>

#include "noembed/log_scaled.hpp"

namespace noembed {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached for n = 15).
const GaussRule& gauss_legendre(int n);

struct QuadratureResult {
    LogScaledReal value;
    double est_error{0.0};
    long n_evals{0};
    /// Integral of |f|, the scale used for the absolute stopping test.
    LogScaledReal l1_norm;
};

struct QuadratureOptions {
    double tol{1e-10};
    int max_depth{40};
    long max_panels{400000};
    /// Parameter values where the integrand may be non-smooth; panels never straddle them.
    std::vector<double> breakpoints;
    int initial_panels{4};
};

using LogIntegrand = std::function<LogScaledReal(double)>;

/// Adaptive composite 15-point Gauss-Legendre quadrature on [a, b] with
/// log-scaled accumulation. Stops when est_error <= tol * max(|I|, 1e-3 * int|f|).
QuadratureResult integrate(const LogIntegrand& f, double a, double b, const QuadratureOptions& opt);

/// Fixed rule: n-point Gauss-Legendre on each of the given panels.
LogScaledReal integrate_fixed(const LogIntegrand& f, const std::vector<double>& panel_edges, int n);

} // namespace noembed
