#pragma once
#include <array>
#include <optional>
#include <vector>

#include "noembed/fields.hpp"
#include "noembed/quadrature.hpp"

namespace noembed {

struct Segment {
    Vec2 p, q;
    Segment(Vec2 p_, Vec2 q_);
    double length() const { return norm(q - p); }
    Vec2 at(double s) const { return p + (q - p) * s; }
};

/// Three legs from vertex a to a1, a2, a3 meeting at 120 degrees.
struct SteinerTree {
    Vec2 a, a1, a2, a3;
    std::array<Segment, 3> legs() const { return {Segment{a, a1}, Segment{a, a2}, Segment{a, a3}}; }
    double length() const;
};

/// Vertex (-a, 0), leg to (-1, 0), other legs at +-120 degrees ending on the unit circle.
SteinerTree build_steiner_tree(double a);

QuadratureResult line_integral(const AnalyticField& f, const Segment& seg, double tol);
/// Line integral of f * weight(x) ds; weight given in log-scaled form.
QuadratureResult line_integral_weighted(const AnalyticField& f, const Segment& seg, double tol,
                                        const std::function<LogScaledReal(Vec2)>& weight);
QuadratureResult tree_integral(const AnalyticField& f, const SteinerTree& t, double tol);

/// Integral of u over the leg from (-e^{-K},0) to (-1,0) through the t = 2 pi log r substitution.
LogScaledReal aa2_integral_scaled(int K, double tol = 1e-12);

struct GreenIdentity {
    // Identity with legs weighted by 1/|x - A| (the exact form).
    LogScaledReal lhs, rhs;
    double residual{0.0};
    // Same identity with plain ds on the legs, as used by the K search.
    LogScaledReal lhs_ds, rhs_ds;
    double residual_ds{0.0};
    LogScaledReal aa2, arc_upper, arc_lower;
};

GreenIdentity green_identity_terms(int K, double tol);
/// Relative discrepancy of the weighted identity for u at tree parameter K.
double green_identity_residual(int K, double tol);
/// Same identity for an arbitrary field; arc weights from -df/dr. Holds when f is
/// harmonic on the sectors, vanishes on the unit circle and at the vertex.
GreenIdentity green_identity_terms(const AnalyticField& f, int K, double tol);

struct MinKRecord {
    int K;
    LogScaledReal aa2;
    LogScaledReal rhs; // 2 * aa2 + arcs
    bool satisfied;
};

struct MinKResult {
    std::optional<int> K;
    std::vector<MinKRecord> scan;
};

MinKResult find_min_K(int K_max, double tol = 1e-10);

/// True when the segment stays in the closed disc minus the open 120-degree wedge at the vertex.
bool segment_in_sectors(const Segment& seg, const SteinerTree& tree);

struct SegmentSign {
    int sign;
    LogScaledReal value;
};

SegmentSign check_segment_positivity(const Segment& seg, const SteinerTree& tree, double tol = 1e-10);

} // namespace noembed
