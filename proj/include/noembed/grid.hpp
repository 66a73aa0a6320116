#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "noembed/vec.hpp"

namespace noembed {

/// Uniform node lattice: node (i, j) sits at origin + (i h, j h); index j * nx + i.
struct GridSpec {
    Vec2 origin;
    double h{0.0};
    int nx{0};
    int ny{0};

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    Vec2 node(int i, int j) const { return origin + Vec2{i * h, j * h}; }
    Vec2 node(std::size_t k) const { return node(static_cast<int>(k % nx), static_cast<int>(k / nx)); }
    Vec2 extent() const { return {(nx - 1) * h, (ny - 1) * h}; }
    bool operator==(const GridSpec&) const = default;

    /// Smallest grid with spacing h covering [lo, hi] plus `pad` extra nodes on every side.
    static GridSpec covering(Vec2 lo, Vec2 hi, double h, int pad = 2);
};

enum class NodeKind : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

/// Piece of a domain boundary: a straight segment or an arc of a circle.
struct BoundaryPiece {
    enum class Kind { Segment, Arc } kind{Kind::Segment};
    int id{0};
    Vec2 a, b;              // segment endpoints
    Vec2 center;            // arc
    double radius{0.0};
    std::function<bool(Vec2)> on_arc; // accepts circle points belonging to the arc
};

/// Open planar domain with an explicit boundary description.
struct Region {
    std::function<bool(Vec2)> inside;
    std::vector<BoundaryPiece> pieces;

    /// First boundary crossing on the segment from an inside point to an outside point:
    /// parameter in (0, 1] and the piece id.
    std::pair<double, int> crossing(Vec2 in, Vec2 out) const;

    static Region polygon(const std::vector<Vec2>& ccw_vertices, const std::vector<int>& edge_ids);
    static Region box(Vec2 lo, Vec2 hi);
};

/// One cut of the 5-point stencil by the boundary.
struct BoundaryLink {
    std::size_t node;   // interior node
    int dir;            // 0:+x 1:-x 2:+y 3:-y
    double frac;        // crossing distance / h in (0, 1]
    double value;       // Dirichlet datum at the crossing
    int piece;
};

using BoundaryData = std::function<double(Vec2, int piece)>;

class MaskedGrid {
public:
    MaskedGrid(GridSpec spec, std::shared_ptr<const Region> region, const BoundaryData& data);

    const GridSpec& spec() const { return spec_; }
    const std::vector<NodeKind>& mask() const { return mask_; }
    NodeKind kind(std::size_t k) const { return mask_[k]; }
    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<BoundaryLink>& links() const { return links_; }
    /// Per-node Dirichlet value for boundary nodes (NaN elsewhere): the datum of the
    /// nearest crossing reaching that node.
    const std::vector<double>& boundary_values() const { return boundary_values_; }
    const std::shared_ptr<const Region>& region() const { return region_; }
    /// Same geometry with new boundary data.
    MaskedGrid with_data(const BoundaryData& data) const;

private:
    GridSpec spec_;
    std::shared_ptr<const Region> region_;
    std::vector<NodeKind> mask_;
    std::vector<std::size_t> interior_;
    std::vector<BoundaryLink> links_;
    std::vector<double> boundary_values_;
};

/// Grid-sampled real function. Values cover every node; only interior and boundary
/// nodes carry meaning unless the producer states otherwise.
struct ScalarField {
    std::shared_ptr<const MaskedGrid> grid;
    GridSpec spec;
    std::vector<NodeKind> mask;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(std::shared_ptr<const MaskedGrid> g, double fill = 0.0);
    ScalarField(GridSpec s, std::vector<NodeKind> m, std::vector<double> v);

    double at(int i, int j) const { return values[spec.index(i, j)]; }
    /// Bilinear interpolation; throws if p is outside the lattice.
    double interpolate(Vec2 p) const;
    bool covers(Vec2 p) const;
};

/// Plain 5-point Laplacian at node (i, j), using the stored neighbour values.
double laplacian_5pt(const GridSpec& s, const std::vector<double>& v, int i, int j);

} // namespace noembed
