#pragma once

// Graph (holonomy groupoid) of the bundled foliations in explicit cover
// coordinates. A point is stored as one vector
//
//     (y, x1, x2)    transverse coordinates, source leaf coords, target leaf coords
//
// so that p1(z) = (x1, y) and p2(z) = (x2, y) in the base model. For the
// suspension the vector is (u, t, t') modulo the diagonal action
// n.(u, t, t') = (A^n u, t + n, t' + n); for global-chart models leaves are
// simply connected slices and the class is always trivial.

#include "folia/criteria.hpp"
#include "folia/models.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace folia {

struct GraphPoint {
  Vec cover;                   ///< canonical representative
  std::int64_t winding = 0;    ///< holonomy class: loops around a closed leaf, 0 otherwise
};

/// X = X^{(1)} + X^N + X^{(2)}; X^{(1)} is tangent to the p1-fibres (moves x2
/// only), X^{(2)} to the p2-fibres (moves x1 only).
struct GraphTangent {
  Vec first;
  Vec normal;
  Vec second;

  Vec sum() const { return first + normal + second; }
};

struct GraphOptions {
  /// Added to the metric on the first transverse direction of the N block.
  /// Nonzero only for negative-control runs.
  double fault_epsilon = 0.0;
  SamplingOptions gate_sampling{.seed = 7, .points = 40, .geodesics = 12, .completeness_geodesics = 2,
                                .s_max = 2.0, .horizon = 5.0, .step = 1e-2};
};

enum class GraphLeafShape { Plane, Cylinder };

const char* to_string(GraphLeafShape shape);

struct LeafStructure {
  GraphLeafShape shape = GraphLeafShape::Plane;
  LeafKind base_leaf = LeafKind::Slice;
  /// Generator of the deck group acting on the (leaf1, leaf2) cover: the
  /// diagonal shift by this amount; 0 when the group is trivial.
  double deck_shift = 0.0;
  /// The generator moves both leaf parameters equally and fixes the leaf.
  bool deck_is_diagonal = true;
  /// Metric restricted to the graph leaf, in (leaf1, leaf2) coordinates.
  Mat leaf_metric;
  bool flat = false;
  /// Advance of the fibre parameter under the lifted return map of p1
  /// restricted to a p2-fibre (0 when p1 is injective on the fibre).
  double covering_advance = 0.0;
};

struct ProjectionCheck {
  double rank_residual = 0.0;        ///< (a) 0 when dp_i is onto
  double fibre_residual = 0.0;       ///< (b) 0 when the fibre metric is nondegenerate
  double isometry_residual = 0.0;    ///< (c) normal-space scalar products
};

class HolonomyGraph {
 public:
  /// Refuses (NotPseudoRiemannian) unless the criteria engines certify the
  /// base foliation: leaf metric nondegenerate, transversally projectable,
  /// orthogonal geodesics stay orthogonal.
  static HolonomyGraph build(const FoliationModel& base, const GraphOptions& opts = {});

  const FoliationModel& base() const { return *base_; }
  /// 2n - q.
  int dim() const { return 2 * base_->dim() - base_->codim(); }
  int codim() const { return base_->codim(); }
  double fault_epsilon() const { return opts_.fault_epsilon; }

  GraphPoint point(const Vec& x, std::int64_t cls, const Vec& y) const;
  GraphPoint unit(const Vec& x) const;
  /// z1 o z2, defined when target(z1) = source(z2). Throws EndpointMismatch.
  GraphPoint compose(const GraphPoint& z1, const GraphPoint& z2) const;
  GraphPoint inverse(const GraphPoint& z) const;
  /// Canonical graph point for an arbitrary cover vector.
  GraphPoint from_cover(const Vec& cover) const;
  bool equal(const GraphPoint& a, const GraphPoint& b, double tol = 1e-9) const;

  /// p_i(z), i in {1, 2}, as a normalized base point.
  Vec project(const GraphPoint& z, int i) const;
  /// p_i on cover vectors (not normalized).
  Vec project_cover(const Vec& cover, int i) const;
  /// Differential of p_i (constant in cover coordinates), n x (2n - q).
  Mat projection_differential(int i) const;

  GraphTangent decompose(const Vec& cover, const Vec& X) const;
  /// d(X, Y) = g(p1 X, p1 Y) + g(p2 X^{(1)}, p2 Y^{(1)}). Throws
  /// InvalidDecomposition when X or Y violate the splitting invariants.
  double induced_metric_d(const Vec& cover, const GraphTangent& X, const GraphTangent& Y) const;
  /// Sum of the three block contributions; equals induced_metric_d.
  double induced_metric_expanded(const Vec& cover, const GraphTangent& X, const GraphTangent& Y) const;
  /// Matrix of d (with the configured fault) in cover coordinates.
  Mat d_matrix(const Vec& cover) const;
  /// d rebuilt only from the defining properties (both projections are
  /// pseudo-Riemannian submersions, the two fibre foliations are orthogonal).
  Mat reconstruct_d(const Vec& cover) const;

  ProjectionCheck projection_residuals(const Vec& cover, int i) const;
  CheckReport check_prs_axioms(int i, int samples = 200, double tol = 1e-10, std::uint64_t seed = 42) const;

  LeafStructure leaf_structure(const Vec& base_point) const;

  /// The induced foliation on the graph as a model in its own right
  /// (leaves: fixed transverse coordinate, both leaf parameters free).
  const FoliationModel& as_foliation() const { return *foliation_; }

  std::vector<Vec> sample_cover_points(int count, std::uint64_t seed) const;

 private:
  HolonomyGraph(std::shared_ptr<const FoliationModel> base, GraphOptions opts);

  Mat leaf_coupling(const Vec& base_point) const;  // H = -g_xx^{-1} g_xy
  std::int64_t winding_of(const Vec& cover) const;

  std::shared_ptr<const FoliationModel> base_;
  std::shared_ptr<const FoliationModel> foliation_;
  GraphOptions opts_;
};

/// Bundled graph-level checks: dimension count, projectability of d,
/// orthogonal transport and transversal completeness on the graph, and
/// transfer along the induced foliation. Degenerate when the graph cannot
/// be built.
CheckReport check_graph_foliation(const FoliationModel& base, const SamplingOptions& opts = {},
                                  const Tolerances& tol = {});

}  // namespace folia
