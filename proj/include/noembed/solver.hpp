#pragma once
#include <vector>

#include "noembed/grid.hpp"

namespace noembed {

struct SolverOptions {
    double tol{1e-10};          // relative residual ||b - A u|| / ||b||
    long max_iterations{1000000};
    bool multigrid{true};       // V-cycle preconditioner; plain Jacobi otherwise
};

struct SolveStats {
    long iterations{0};
    double relative_residual{0.0};
    int levels{0};
    bool at_rounding_floor{false}; // stopped above tol because A x cannot be resolved further
};

/// Solves -Delta_h u = f on the interior of g with the grid's Dirichlet data, using the
/// symmetric cut-cell 5-point operator. f is per node (interior entries used); empty means 0.
/// Returns values on every node: interior solved, boundary nodes from boundary_values, exterior 0.
std::vector<double> solve_dirichlet_system(const MaskedGrid& g, const std::vector<double>& f,
                                           const SolverOptions& opt, SolveStats* stats);

/// Residual of -Delta_h u = f at each interior node using the cut-cell operator (same units as f).
std::vector<double> dirichlet_residual(const MaskedGrid& g, const std::vector<double>& u, const std::vector<double>& f);

} // namespace noembed
