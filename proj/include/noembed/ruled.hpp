#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "noembed/grid.hpp"

namespace noembed {

using Vec3 = Eigen::Vector3d;

/// Developable graph as the envelope of the planes x3 = a(s) x1 + s x2 + b(s):
/// c(s) = (0, -b', b - s b'), d(s) = (1, -a', a - s a'), f2 = s along the ruling.
/// a = eps tau A(s), b = s^2 / (2 tau) + eps B(s) / tau; eps = 0 is the cylinder -tau x2^2 / 2.
struct RuledGenerator {
    double tau{0.5};
    double eps{0.0};
    double sign{1.0}; // -1 flips the cylinder to the convex one
    struct Mode {
        double amp, freq, phase;
    };
    std::vector<Mode> A, B;
    double A_shift{0.0}, B_slope{0.0}; // normalise a(0) = 0 and grad f(2, 0) = 0

    static RuledGenerator cylinder(double tau);
    static RuledGenerator random(double tau, double eps, std::uint64_t seed, int modes = 3);

    /// k-th derivative of a and b (k <= 4).
    double a(double s, int k = 0) const;
    double b(double s, int k = 0) const;
    Vec3 c(double s, int k = 0) const; // k <= 2
    Vec3 d(double s, int k = 0) const;
    /// Ruling parameter through (x1, x2): root of a'(s) x1 + x2 + b'(s) = 0.
    double solve_s(double x1, double x2) const;
};

/// Samples of a graph and its derivatives on a lattice over Pi = [0,2] x [-2,2].
struct FlatGraph {
    GridSpec spec;
    double tau{0.5};
    double eps{0.0};
    std::vector<double> f, f1, f2, f11, f12, f22;
    std::function<double(double)> psi; // Q = {x1 < psi(x2)} inside Pi; the left edge of Pi under the profile is part of Q

    bool in_F(Vec2 x) const;
    static bool in_Pi(Vec2 x) { return x.x >= -1e-12 && x.x <= 2.0 + 1e-12 && std::abs(x.y) <= 2.0 + 1e-12; }
    double at(const std::vector<double>& v, int i, int j) const { return v[spec.index(i, j)]; }
};

/// Default profile (1 - x2^2)_+.
double default_psi(double x2);

/// Lattice over [x1_lo, 2] x [-2 - margin, 2 + margin]; the margin lets every ruling through Pi be sampled.
GridSpec pi_grid(double h, double x1_lo = 0.0, double margin = 0.25);

FlatGraph sample_graph(const RuledGenerator& g, const GridSpec& spec);

struct GraphDerivatives {
    double f, f1, f2, f11, f12, f22;
};
FlatGraph sample_function(const std::function<GraphDerivatives(Vec2)>& fn, const GridSpec& spec, double tau, double eps);

struct GraphHypotheses {
    double max_det{0.0};      // max |det D^2 f| / |D^2 f|^2 over F
    double min_hessian{0.0};  // min |D^2 f| over F
    double max_deviation{0.0}; // max |D^2 f - diag(0, -tau)| / tau over F
    double min_abs_f22{0.0};
    bool flat{false};
    bool close{false};
};

GraphHypotheses check_hypotheses(const FlatGraph& f, double det_tol = 1e-10);

struct LevelSet {
    double s{0.0};
    std::vector<double> t, x2, x3, f1;
    double straightness{0.0}; // max distance of (t, x2) samples from their least-squares line
};

struct LegendreChart {
    std::vector<double> t, s; // per node (NaN outside F)
    std::vector<LevelSet> levels;
    double max_straightness{0.0};
};

/// (t, s) = (x1, f2) and the straight level sets {f2 = s}, located by Hermite interpolation along x2.
LegendreChart legendre_coords(const FlatGraph& f, int n_levels = 161);

struct RuledSurface {
    std::vector<double> s;
    std::vector<Vec3> c, d;
    double t_min{0.0}, t_max{2.0};
    double fit_residual{0.0};
    double independence_spread{0.0};

    Vec3 point(double t, double s) const;
    struct Local {
        Vec3 c, c1, c2, d, d1, d2; // values and s-derivatives
    };
    /// Local cubic interpolation of c, d and their s-derivatives.
    Local interpolate(double s) const;
    double s_min() const { return s.front(); }
    double s_max() const { return s.back(); }
};

RuledSurface ruled_from_generator(const RuledGenerator& g, double s_lo, double s_hi, int n, double t_min, double t_max);
RuledSurface extract_rulings(const FlatGraph& f, int n_levels = 161, double tol = 1e-6);

/// t-range [-1, 2]; checks that the projected rulings form a graph covering Pi.
RuledSurface extend_ruled(const RuledSurface& r);

struct FundamentalForms {
    Eigen::Matrix2d I, II; // (t, s) coordinates, upward normal
    double gaussian() const { return II.determinant() / I.determinant(); }
    double principal() const { return (I.inverse() * II).trace(); }
};

/// Forms at (t, s_index) from 5-point differences of the sampled c, d.
FundamentalForms second_fundamental_form(const RuledSurface& r, double t, std::size_t s_index);

/// <c'' + t d'', (c' + t d') x d> with the cross product turned upward: a quadratic in t, -1/tau^2 on the cylinder.
double concavity_integrand(const RuledSurface& r, double t, std::size_t s_index);

struct ConcavityReport {
    std::vector<double> s;
    std::vector<Eigen::Vector3d> coeffs; // a0, a1, a2 per s
    double fit_residual{0.0};
    double max_value{0.0}; // max of the quadratic over t in [-1, 2]
    bool concave{false};
};

ConcavityReport concavity_check(const RuledSurface& r);

struct ComparisonResult {
    bool hypothesis_ok{false};
    double max_det{0.0};  // max det D^2 w over Pi samples
    double agree_on_F{0.0}; // max |w - f| on F
    double margin{0.0};   // min (w - f_ext) over Pi samples
};

/// Samples of the graph of r over spec (t = x1); derivatives from the ruling geometry.
FlatGraph sample_extension(const RuledSurface& r, const GridSpec& spec, double tau, double eps);

/// w = f + eta (psi(x2) - x1)_+^4 with f the generator's graph: supported in Q, det D^2 w <= 0 for eta >= 0.
FlatGraph comparison_instance(const RuledGenerator& g, const GridSpec& spec, double eta);

/// Comparison: w must satisfy det D^2 w <= 0 on Pi and agree with f on F.
ComparisonResult comparison_check(const FlatGraph& f_ext, const FlatGraph& w, double tol = 1e-10);

struct ProjectionResult {
    double len_curve{0.0};
    double len_projected{0.0};
    double min_height{0.0};
};

/// Nearest-point projection of each sample onto r; samples must lie on the upward side.
ProjectionResult project_and_compare(const std::vector<Vec3>& curve, const RuledSurface& r, double tol = 1e-10);

/// Foot point parameters (t, s) of p on r (damped Newton from the graph guess).
Eigen::Vector2d nearest_parameters(const Vec3& p, const RuledSurface& r);
Vec3 upward_normal(const RuledSurface& r, double t, double s);

/// Smooth random curve lifted off r along the upward normal by heights in [0, max_height].
std::vector<Vec3> lifted_curve(const RuledSurface& r, std::uint64_t seed, int samples = 400, double max_height = 0.3);

} // namespace noembed
