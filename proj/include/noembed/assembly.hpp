#pragma once
#include <functional>
#include <vector>

#include "noembed/conformal.hpp"
#include "noembed/mollify.hpp"
#include "noembed/solver.hpp"

namespace noembed {

inline constexpr int kRotationCount = 360;
inline constexpr double kRotationScale = 1000.0;
inline constexpr double kRotationOffset = 360.0;
/// v is extended by zero outside this radius for the rotation sum.
inline constexpr double kTailSupportRadius = 1.1;

/// w(x) = sum_{i=1}^{360} v(r^i (1000 x) - (360, 0)), r the rotation by one degree.
double rotation_sum(const TailFunction& v, Vec2 x);

/// Maximum over the lattice nodes accepted by `keep` of |d^{a,b} f| for each order a+b = 0..max_order,
/// measured by repeated central differences. Nodes closer than max_order to the lattice edge are skipped.
std::vector<double> measured_derivative_maxima(const GridSpec& spec, const std::vector<double>& f, int max_order,
                                               const std::function<bool(Vec2)>& keep = nullptr);

struct BumpSchedule {
    std::vector<Vec2> z;
    std::vector<double> rho;
    std::vector<double> delta;
    std::vector<double> D; // measured derivative bound of the scaled bump up to order n
    std::vector<double> tail_derivative_maxima; // max |D^m v| over B_{1.1}, m = 0..n_max
};

BumpSchedule build_bump_schedule(const TailFunction& v, int n_max);

/// delta_n w((x - z_n) / rho_n) inside B_{rho_n}(z_n), 0 elsewhere.
double eval_gII_factor(const BumpSchedule& s, const TailFunction& v, Vec2 x);

/// -exp(-lambda / (1 - s^2)) for s < 1, else 0.
double step_one_bump(double s, double lambda);

struct StepOneMetric {
    int n_max{0};
    double lambda{1e-3};
    std::vector<Vec2> centers;
    std::vector<double> radii;
    ScalarField k;  // the bump sum
    ScalarField u1; // Delta_h u1 = -k, zero on the box
    SolveStats stats;
    ConformalMetric metric() const { return ConformalMetric::from_samples(u1); }
    bool in_bump(Vec2 x, double pad = 0.0) const;
};

/// Bumps on B^n = B_{4^{-n}}(2^{-n}, 0), n = 1..n_max, on a grid of spacing h with centres on nodes.
StepOneMetric build_g1(int n_max, double h = 1.0 / 512.0, double lambda = 1e-3, const SolverOptions& opt = {1e-12, 1000000, true});

/// e^{-1/(r - 1/n)} for r > 1/n, else 0.
double cutoff_profile(int n, double r);
/// Radial Laplacian of cutoff_profile.
double cutoff_laplacian(int n, double r);

struct MuSchedule {
    std::vector<double> mu;        // mu_n, n = 1..n_max
    std::vector<double> c4;        // measured C^4 proxy of the unscaled profile
    double h{0.0};
};

MuSchedule measure_mu_schedule(int n_max, double h = 1.0 / 128.0);

/// Measured C^4 proxy (max over orders 0..4 of derivative maxima) of f sampled on the unit disc.
double measured_c4(const std::function<double(Vec2)>& f, double h);

/// Radial Newtonian potential of a step-one bump placed in an annulus.
struct PlantedBump {
    Vec2 center;
    double radius{0.0};
    double sigma{0.0};
    double mass{0.0};  // integral of the unit-amplitude profile
    double lambda{1e-3};
    std::vector<double> table; // potential at radii radius * k / (table.size() - 1)

    double density(Vec2 x) const;   // sigma * (-k~), >= 0
    double potential(Vec2 x) const; // sigma * Newtonian potential
};

struct AnnulusStack {
    int n_max{0};
    std::vector<double> eta, mu;
    std::vector<PlantedBump> bumps;
    double offset{0.0}; // u0(0), subtracted

    double u0(Vec2 x) const;
    double psi(Vec2 x) const;
    double factor(Vec2 x) const { return u0(x) + psi(x); }
    /// Analytic Laplacian of the factor.
    double laplacian(Vec2 x) const;
    double curvature(Vec2 x) const;
    ConformalMetric metric() const;
};

/// Factor u0 + sum_{m <= n_max} eta_m mu_m phi~_m; one planted bump per annulus A^n, n <= n_max,
/// with amplitudes keeping its derivatives at the origin below 1e-8 2^{-n}.
AnnulusStack build_annulus_stack(const std::vector<double>& eta, int n_max, const MuSchedule& mu);

/// Finite-difference derivative magnitudes of f at the origin, orders 1..4 (index = order).
std::vector<double> origin_derivatives(const std::function<double(Vec2)>& f, double step = 0.02);

} // namespace noembed
