#pragma once

// Concrete foliated pseudo-Riemannian manifolds. Every model is described in
// one global set of cover coordinates; leaves are the slices along which the
// transverse coordinates are constant. The suspension model additionally
// carries the Z-action (u, t, n) -> (A^n u, t + n) that produces the closed
// 3-manifold, and all of its point operations respect that quotient.

#include "folia/geometry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace folia {

struct ChartCoords {
  Vec leaf;
  Vec transverse;
};

/// Box chart K^{n-q} x K^q around `center` whose plaques are the
/// transverse = const slices.
struct AdaptedChart {
  Vec center;
  Vec leaf_half_width;
  Vec transverse_half_width;
  /// Chart coordinates -> cover coordinates (continuous, not normalized).
  std::function<Vec(const Vec& leaf, const Vec& transverse)> to_model;
  /// Any cover representative -> chart coordinates, or nullopt outside the box.
  std::function<std::optional<ChartCoords>(const Vec& point)> from_model;

  int leaf_dim() const { return static_cast<int>(leaf_half_width.size()); }
  int codim() const { return static_cast<int>(transverse_half_width.size()); }
};

enum class ModelKind { Product, Warped, Suspension, Graph };

const char* to_string(ModelKind kind);

enum class LeafKind {
  Slice,      ///< global-chart model, leaf labelled by its transverse coordinates
  Circle,     ///< suspension leaf through a periodic point of f_A
  Generic,    ///< suspension leaf through a point not recognised as rational
  Undecided,  ///< rational point whose period exceeds kMaxPeriod
};

const char* to_string(LeafKind kind);

struct LeafId {
  LeafKind kind = LeafKind::Slice;
  int period = 0;  ///< t-advance after which a Circle leaf closes
  Vec anchor;      ///< canonical transverse label
};

/// Exact data of a suspension of a hyperbolic torus automorphism.
struct SuspensionData {
  IntMatrix2 A;
  double eta = 1.0;
  int leaf_dim = 1;  ///< 1 for M itself, 2 for its graph G(F)
};

inline constexpr int kMaxPeriod = 12;
inline constexpr std::int64_t kMaxRationalDenominator = 4096;

class FoliationModel {
 public:
  FoliationModel(std::string name, ModelKind kind, MetricField metric, std::vector<int> leaf_axes,
                 std::vector<int> transverse_axes, Box sampling_box,
                 std::optional<SuspensionData> suspension = std::nullopt);

  const std::string& name() const { return name_; }
  ModelKind kind() const { return kind_; }
  int dim() const { return metric_.dim; }
  int codim() const { return static_cast<int>(transverse_axes_.size()); }
  int leaf_dim() const { return static_cast<int>(leaf_axes_.size()); }

  const MetricField& metric() const { return metric_; }
  const std::vector<int>& leaf_axes() const { return leaf_axes_; }
  const std::vector<int>& transverse_axes() const { return transverse_axes_; }
  const std::optional<SuspensionData>& suspension() const { return suspension_; }
  /// Region from which checkers draw sample points (a fundamental domain
  /// for quotient models).
  const Box& sampling_box() const { return sampling_box_; }

  Vec leaf_part(const Vec& p) const;
  Vec transverse_part(const Vec& p) const;
  Vec assemble(const Vec& leaf, const Vec& transverse) const;

  /// Canonical representative of the point in the fundamental domain.
  Vec normalize(const Vec& p) const;
  LeafId leaf_id(const Vec& p) const;
  bool same_leaf(const Vec& p, const Vec& q, double tol = 1e-9) const;
  /// Cover-coordinate offset from p to q after normalizing both, with
  /// periodic axes taken to the nearest image. Zero iff p and q are the same
  /// point of the model.
  Vec point_difference(const Vec& p, const Vec& q) const;

  AdaptedChart chart_at(const Vec& p) const;

  /// Coordinate vectors along the leaf axes; they span T_pF everywhere.
  std::vector<Vec> leaf_frame() const;
  /// Foliate frame of the orthogonal distribution: columns are the chart
  /// fields d/dy^b projected along TF onto M (leaf rows -g_xx^{-1} g_xy).
  Mat orthogonal_frame(const Vec& p) const;
  /// Split v = tangential + orthogonal along TF (+) M at p.
  std::pair<Vec, Vec> split(const Vec& p, const Vec& v) const;

  /// Copy of this model with the metric replaced by c * g.
  FoliationModel with_scaled_metric(double c) const;

 private:
  std::string name_;
  ModelKind kind_;
  MetricField metric_;
  std::vector<int> leaf_axes_;
  std::vector<int> transverse_axes_;
  Box sampling_box_;
  std::optional<SuspensionData> suspension_;
};

// --- Suspension of an Anosov automorphism --------------------------------

/// Integer form [[-2c, a-d], [a-d, 2b]]; the fiber metric is eta times this.
IntMatrix2 invariant_form(const IntMatrix2& A);
/// A^T G A - G in integer arithmetic.
IntMatrix2 invariance_defect(const IntMatrix2& A);
Mat suspension_fiber_metric(const IntMatrix2& A, double eta);
/// g (+) I_leaf_dim.
Mat suspension_total_metric(const IntMatrix2& A, double eta, int leaf_dim = 1);

/// Throws NotAnosov unless det A = 1 and trace A > 2, ZeroScale when eta = 0.
FoliationModel make_suspension(const IntMatrix2& A, double eta = 1.0);

/// Suspension-type quotient with `leaf_dim` leaf axes all shifted by the
/// Z-action, carrying an arbitrary invariant metric. Used for the graph.
FoliationModel make_suspension_quotient(std::string name, ModelKind kind, const IntMatrix2& A,
                                        double eta, int leaf_dim, MetricField metric,
                                        Box sampling_box);

/// Affine map (x, t) -> (L x + shift, t + t_shift) of the universal cover R^3.
struct CoverAffine {
  IntMatrix2 linear;
  std::array<std::int64_t, 2> shift{0, 0};
  std::int64_t t_shift = 0;

  friend CoverAffine operator*(const CoverAffine& f, const CoverAffine& g);  // f o g
  friend bool operator==(const CoverAffine&, const CoverAffine&) = default;
  CoverAffine inverse() const;
  bool is_translation() const { return linear == IntMatrix2::identity() && t_shift == 0; }
};

struct DeckGroupReport {
  CoverAffine generator_t;                    ///< (x, t) -> (A x, t + 1)
  std::array<CoverAffine, 2> translations;    ///< n_1, n_2
  std::array<CoverAffine, 2> conjugates;      ///< T n_i T^{-1}
  std::array<std::array<std::int64_t, 2>, 2> expected_shifts;  ///< A e_i
  bool translations_commute = false;
  bool relations_hold = false;
};

DeckGroupReport deck_group_relations(const FoliationModel& model);

// --- Other bundled models ----------------------------------------------

/// Leaves are the first-factor slices; metric is block diagonal.
FoliationModel make_product(const MetricField& leaf_metric, const MetricField& transverse_metric,
                            std::string name = "product");

/// R^2 with leaves y = const and g = dx^2 + e^{2x} dy^2. Not transversally
/// projectable: g_yy depends on the leaf coordinate.
FoliationModel make_warped_counterexample();

// --- Splittings -------------------------------------------------------

struct TangentSplitting {
  std::vector<Vec> tangent;     ///< basis of T_pF
  std::vector<Vec> orthogonal;  ///< basis of M_p
};

/// Throws DegenerateRestriction when g restricted to T_pF is singular.
TangentSplitting tangent_and_orthogonal(const FoliationModel& model, const Vec& p);

/// Sampled check that chart transitions keep the leaf/transverse split:
/// moving along the leaf coordinate in one chart never changes the
/// transverse coordinate in an overlapping chart. Returns the max defect.
double transition_split_defect(const FoliationModel& model, int samples, std::uint64_t seed);

/// Continued-fraction rational recognition: (numerator, denominator) when x
/// is within 1e-12 of a fraction with denominator <= max_denominator.
std::optional<std::pair<std::int64_t, std::int64_t>> recognize_rational(
    double x, std::int64_t max_denominator = kMaxRationalDenominator);

}  // namespace folia
