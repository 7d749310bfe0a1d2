#pragma once

// Holonomy along leaf paths by plaque chaining, transfer of horizontal curves
// along vertical paths (vertical-horizontal homotopy of the orthogonal
// Ehresmann connection), the induced action of leaf loops on horizontal
// curves, and holonomy groups of the bundled models.
//
// Conventions:
//  * Paths compose left to right: (h . g) runs h first. Disk maps therefore
//    compose contravariantly, hol(h . g) = hol(g) o hol(h).
//  * On the suspension, the loop on the leaf through u = 0 that increases t
//    by one has germ u -> A^{-1} u, because (u, 1) ~ (A^{-1} u, 0).

#include "folia/models.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace folia {

/// Power of A attached to a loop that increases t by one period.
inline constexpr int kForwardLoopPower = -1;

/// Piecewise-linear path in cover coordinates.
struct LeafPath {
  std::vector<Vec> vertices;

  Vec start() const { return vertices.front(); }
  Vec end() const { return vertices.back(); }
  LeafPath reversed() const;
  /// This path followed by `next` (which must start where this one ends).
  LeafPath then(const LeafPath& next) const;
  /// Points no further apart than max_step along every segment.
  std::vector<Vec> refine(double max_step) const;
};

/// Loop through `base` moving only along leaf axis `axis` by `advance`.
LeafPath straight_leaf_path(const FoliationModel& model, const Vec& base, double advance, int axis = 0);

struct ChartHop {
  AdaptedChart from;
  AdaptedChart to;
  Vec leaf_coordinate;  ///< where, in `from`, the plaques are matched
};

struct HolonomyOptions {
  double radius = 0.05;
  double radius_min = 1e-4;
  double tolerance = 1e-6;
  /// Path sampling step (<= 0.1 of the suspension chart width).
  double max_step = 0.05;
};

/// Transverse disk map of a leaf path, evaluated by pushing points through
/// the recorded chain of chart transitions.
struct HolonomyMap {
  Vec center;
  double radius = 0.0;
  double tolerance = 1e-6;
  std::vector<std::pair<Vec, Vec>> samples;
  /// Exact linear part in transverse chart coordinates (suspension only).
  std::optional<IntMatrix2> exact;
  std::vector<ChartHop> hops;

  /// Image of a transverse offset. Throws DiskTooLarge outside the chain.
  Vec apply(const Vec& y) const;
  /// max over samples of |image - exact * y|; 0 when exact is absent.
  double exact_residual() const;
  /// max over samples of |image - y|.
  double identity_residual() const;
};

/// Sample offsets on a transverse disk of the given radius.
std::vector<Vec> disk_samples(int codim, double radius);

HolonomyMap holonomy_along(const FoliationModel& model, const LeafPath& path, const HolonomyOptions& opts = {});

/// hol(first . second) = second o first.
HolonomyMap compose(const HolonomyMap& first, const HolonomyMap& second);

/// Largest disagreement of two maps on a disk of the given radius.
double germ_distance(const HolonomyMap& a, const HolonomyMap& b, double radius = 0.05);

/// Germ equality surrogate: agreement on the radius-0.05 disk to 1e-6.
bool germs_agree(const HolonomyMap& a, const HolonomyMap& b, double radius = 0.05, double tol = 1e-6);

// --- Transfer --------------------------------------------------------------

/// Sampled curve tangent to the orthogonal distribution.
struct HorizontalCurve {
  std::vector<Vec> points;
};

/// Horizontal lift through `start` of the transverse segment s -> s w,
/// s in [0, length], taken in the chart centered at `start`.
HorizontalCurve horizontal_curve(const FoliationModel& model, const Vec& start, const Vec& transverse_direction,
                                 double length, int samples = 21);

/// max over chords of the normalized TF-component |g(chord, d_x)| / (|g| |chord|).
double horizontality_residual(const FoliationModel& model, const HorizontalCurve& curve);

struct TransferOptions {
  double max_step = 0.05;
  double horizontality_tolerance = 1e-6;
  bool keep_homotopy = false;
};

struct TransferResult {
  HorizontalCurve curve;                   ///< sigma~, starting at h(1)
  std::vector<HorizontalCurve> homotopy;   ///< rows H(., tau) when requested
  std::vector<Vec> final_transverse;       ///< transverse trace of sigma~ in the end chart
  std::vector<Vec> initial_transverse;     ///< transverse trace of sigma in the start chart
};

/// Transfer of sigma along the vertical path h. Throws TransferBreakdown when
/// the lift leaves the atlas.
TransferResult transfer(const FoliationModel& model, const HorizontalCurve& sigma, const LeafPath& h,
                        const TransferOptions& opts = {});

struct ActionResult {
  HorizontalCurve curve;
  /// Disagreement between two homotopic representatives of the class.
  double independence_residual = 0.0;
};

/// Representative loop at `base` winding `k` times around its leaf.
/// Throws Error when the leaf carries no such loop (k != 0 on a line).
LeafPath generator_loop(const FoliationModel& model, const Vec& base, std::int64_t k);

/// Action of the loop class k on sigma in Omega_x, x = sigma(0).
ActionResult m_holonomy_action(const FoliationModel& model, std::int64_t loop_class, const HorizontalCurve& sigma,
                               const TransferOptions& opts = {});

struct HolonomyGroup {
  LeafKind leaf_kind = LeafKind::Slice;
  bool cyclic = false;    ///< true: infinite cyclic, false: trivial
  bool decided = true;    ///< false for generic suspension leaves (no return within the period bound)
  int period = 0;
  std::optional<IntMatrix2> generator_exact;
  std::optional<HolonomyMap> generator;
  double germ_exact_residual = 0.0;
  /// Germ map vs. M-holonomy action on the generator (chi o mu = nu).
  double chi_residual = 0.0;
};

/// Throws UnknownLeafClass for rational points whose period exceeds kMaxPeriod.
HolonomyGroup holonomy_group(const FoliationModel& model, const Vec& leaf_point, const HolonomyOptions& opts = {});

}  // namespace folia
