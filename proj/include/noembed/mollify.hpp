#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "noembed/bvp.hpp"
#include "noembed/grid.hpp"
#include "noembed/trees.hpp"

namespace noembed {

/// Unit-mass radial bump exp(-1 / (1 - (r/delta)^2)) supported in the open delta-disc.
struct Mollifier {
    double delta{0.0};
    double scale{0.0}; // 1 / continuous mass of the unnormalised bump

    double operator()(double r) const;
    /// 2D integral of the normalised profile (adaptive quadrature in r).
    double mass(double tol = 1e-13) const;
};

Mollifier make_mollifier(double delta);

struct ConvolveOptions {
    /// Output only where every stencil node has a non-exterior mask; otherwise all lattice
    /// values are taken as defined.
    bool respect_mask{true};
};

/// Discrete convolution with the mollifier sampled at the nodes and renormalised to unit
/// sum. Output nodes whose stencil leaves the lattice (or the mask) are Exterior with value 0.
ScalarField convolve(const ScalarField& f, const Mollifier& m, const ConvolveOptions& opt = {});

struct SubharmonicReport {
    double min_laplacian{0.0};
    Vec2 worst;
    double max_abs{0.0};
    std::size_t nodes{0};
    double relative() const { return max_abs > 0.0 ? min_laplacian / max_abs : 0.0; }
};

/// 5-point Laplacian over the nodes accepted by `region` whose stencil is defined.
SubharmonicReport subharmonic_defect(const ScalarField& f, const std::function<bool(Vec2)>& region);

/// Exact integral of the bilinear interpolant of f along a segment; zero outside the lattice.
double grid_line_integral(const ScalarField& f, const Segment& seg,
                          const std::function<double(double)>& transform = nullptr);

inline constexpr double kTailScale = 10.0;
inline const Vec2 kTailCenter{-0.8, 0.0};

/// v(x) = W(10 (x - C0)) with W the mollified glued field on the construction grid.
struct TailFunction {
    ScalarField W;
    int K{1};
    double N{0.0};
    double delta{0.0};

    Vec2 to_construction(Vec2 x) const { return (x - kTailCenter) * kTailScale; }
    double value(Vec2 x) const;
    /// Grid of v: same nodes as W mapped back, spacing h / 10. v vanishes off this lattice.
    GridSpec x_spec() const;
    /// Discrete Laplacian of v at node (i, j) of x_spec().
    double laplacian(int i, int j) const;
    double line_integral(const Segment& seg) const;
    double tree_integral(const SteinerTree& t) const;
    /// Subharmonicity of v over the unit disc (x coordinates).
    SubharmonicReport subharmonic_on_unit_disc() const;
    /// max |v| over x_spec nodes with x1 < 0.9 outside the closed unit disc.
    double max_outside_support() const;
};

/// Tree for the tail function: vertex C = (-e^{-K}/10 - 0.8, 0).
SteinerTree tail_tree(int K);

TailFunction build_tail_v(const TailSolution& sol, double N, double delta);

struct DeltaRecord {
    double delta{0.0};
    double tree_integral{0.0};
    double error_margin{0.0};
    SubharmonicReport subharmonic;
};

struct DeltaSelection {
    std::optional<std::size_t> selected; // index into scan
    std::vector<DeltaRecord> scan;
    std::optional<TailFunction> v;
    double unmollified_integral{0.0}; // same tree integral of the glued field itself
};

/// Walks the decreasing schedule; stops at the first delta with a strictly negative tree
/// integral beyond the rounding margin.
DeltaSelection select_tail_delta(const TailSolution& sol, double N, const std::vector<double>& schedule);

/// Default schedule: e^{-2K} / 2^k, k = 1..count, dropping entries under 2 grid cells.
std::vector<double> default_delta_schedule(int K, double h, int count = 4);

} // namespace noembed
