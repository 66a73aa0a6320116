#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "noembed/fields.hpp"
#include "noembed/grid.hpp"
#include "noembed/solver.hpp"
#include "noembed/trees.hpp"

namespace noembed {

ScalarField solve_laplace_dirichlet(std::shared_ptr<const MaskedGrid> domain, const SolverOptions& opt = {},
                                    SolveStats* stats = nullptr);
/// Returns u with Delta_h u = -rhs on the interior and the grid's Dirichlet data.
ScalarField solve_poisson(std::shared_ptr<const MaskedGrid> domain, const ScalarField& rhs,
                          const SolverOptions& opt = {}, SolveStats* stats = nullptr);

enum class NormalSide { Inward, Outward };

struct EdgeSample {
    Vec2 point;
    double value;
};

/// One-sided second-order normal derivative of f at the crossings of grid lines with the
/// edge, excluding `corner_margin` grid cells around each endpoint. `edge_data` gives the
/// Dirichlet datum on the edge (used at the crossing and for its tangential derivative).
std::vector<EdgeSample> normal_derivative(const ScalarField& f, const Segment& edge, NormalSide side,
                                          const std::function<double(Vec2)>& edge_data,
                                          double corner_margin = 3.0);

/// Pentagon with vertices D, D3, D4, D5, D1 in the plane of the tail construction.
struct PentagonGeometry {
    int K{1};
    Vec2 D, D1, D3, D4, D5;

    static PentagonGeometry from_K(int K);
    enum Edge { LowerSlant = 0, Bottom = 1, End = 2, Top = 3, UpperSlant = 4 };
    Segment edge(Edge e) const;
    /// Unit normal of an edge pointing into the pentagon.
    Vec2 inward_normal(Edge e) const;
    std::shared_ptr<Region> pentagon() const;
    /// Unit disc minus the closed sector D1 D D3.
    std::shared_ptr<Region> inner() const;
    bool in_closed_sector(Vec2 p, double eps = 0.0) const;
    /// Short side of the pentagon's bounding box.
    double short_side() const { return 2.0 * D1.y; }
};

struct TailGridOptions {
    int K{1};
    double h{0.0};          // 0: short side / 512
    int pad_nodes{8};       // beyond the union of pentagon and unit disc
    SolverOptions solver{1e-12, 1000000, true};
};

/// The two pentagon solves (data N = 0 and the unit end datum) and the inner harmonic solve.
struct TailSolution {
    PentagonGeometry geo;
    GridSpec spec;
    std::shared_ptr<const MaskedGrid> pentagon_grid;
    std::shared_ptr<const MaskedGrid> inner_grid;
    ScalarField w0;       // pentagon, data (u, 0, 0)
    ScalarField unit_end; // pentagon, data (0, 0, 1)
    ScalarField inner;    // unit disc minus sector, data (u on slants, 0 on arc)
    SolveStats stats_w0, stats_end, stats_inner;

    /// Pentagon solution for end datum N (superposition).
    ScalarField pentagon_solution(double N) const;
    /// Glued field: inner solution on the disc part, pentagon solution, exact data on
    /// boundary nodes, 0 elsewhere.
    ScalarField glued(double N) const;
};

TailSolution solve_tail_problems(const TailGridOptions& opt);

struct MarginRecord {
    double N{0.0};
    double min_slant{0.0};   // min over slant samples of w_n - u_n
    double min_side{0.0};    // min over top/bottom samples of w_n
    double scale{0.0};       // max |u_n| over slant samples
    bool ok{false};
};

struct NSelection {
    std::optional<double> N;
    std::vector<MarginRecord> sweep;
    std::size_t slant_samples{0}, side_samples{0};
};

std::vector<double> geometric_schedule(double first, double ratio, int count);

/// Sweeps the schedule using the precomputed solves; picks the first N whose margins are
/// all at least margin_fraction * scale (and strictly positive).
NSelection select_N(const TailSolution& sol, const std::vector<double>& N_schedule, double margin_fraction);

} // namespace noembed
