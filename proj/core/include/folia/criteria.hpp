#pragma once

// Numeric verdict engines. Each checker samples a model deterministically
// from a seed, computes a normalized residual per sample and turns the
// worst one into a verdict:
//
//   residual <  tolerances.pass   -> pass
//   residual >  tolerances.fail   -> fail
//   otherwise                      -> degenerate (inconclusive, noted)
//
// A structural failure (leaf metric degenerate, so the orthogonal
// distribution is undefined) also yields `degenerate`.
//
// Residuals are normalized by the max-norm of g and by coordinate
// (Euclidean) lengths of the vectors involved. The indefinite metric cannot
// normalize null vectors, and dividing by |g| keeps every verdict invariant
// under g -> c g.

#include "folia/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace folia {

enum class Verdict { Pass, Fail, Degenerate };

const char* to_string(Verdict v);

struct ResidualSample {
  Vec location;
  double value = 0.0;
};

struct Tolerances {
  double pass = 1e-8;
  double fail = 1e-4;
};

struct SamplingOptions {
  std::uint64_t seed = 42;
  int points = 200;
  int geodesics = 100;
  /// Geodesics used by the completeness checker (each runs to +-horizon).
  int completeness_geodesics = 20;
  double s_max = 5.0;
  double horizon = 100.0;
  double step = kDefaultGeodesicStep;
};

struct CheckReport {
  std::string check;
  std::string statement;  ///< the geometric statement the check verifies
  Verdict verdict = Verdict::Degenerate;
  double max_residual = 0.0;
  std::vector<ResidualSample> samples;
  double tolerance = 0.0;
  double fail_threshold = 0.0;
  std::size_t sample_count = 0;
  std::vector<std::string> notes;
  std::vector<CheckReport> parts;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// Verdict from max_residual under the three-band rule.
Verdict classify(double max_residual, const Tolerances& tol);

/// Builds a report from samples; fills max_residual, verdict and counts.
CheckReport make_report(std::string check, std::string statement, std::vector<ResidualSample> samples,
                        const Tolerances& tol);

/// Report for a check that could not be carried out (e.g. degenerate leaf).
CheckReport degenerate_report(std::string check, std::string statement, std::string reason,
                              const Tolerances& tol);

/// Uniform sample points from the model's sampling box.
std::vector<Vec> sample_points(const FoliationModel& model, int count, std::uint64_t seed);

/// Random unit (coordinate norm) vector in span(basis).
Vec random_unit_in_span(const std::vector<Vec>& basis, std::uint64_t seed);

/// Geodesics launched orthogonally to the leaves stay orthogonal: records
/// max over s of |g(gamma', e_a)| / (|g| |gamma'| |e_a|) for a TF basis e_a.
CheckReport check_orthogonal_transport(const FoliationModel& model, const SamplingOptions& opts = {},
                                       const Tolerances& tol = {});

/// Symmetric-product criterion: the TF-component of
/// (nabla_X Y + nabla_Y X) / 2 for foliate frames X, Y of M.
CheckReport check_lewis(const FoliationModel& model, const SamplingOptions& opts = {},
                        const Tolerances& tol = {});

/// Transverse block g(X_a, X_b) of the foliate frame is constant along the
/// leaves and the mixed block g(d_x, X_b) vanishes.
CheckReport check_projectability(const FoliationModel& model, const SamplingOptions& opts = {},
                                 const Tolerances& tol = {});

/// Leaves are totally geodesic: (L_X g)(Y, Z) = 0 for X in M and Y, Z in TF,
/// and geodesics tangent to TF keep a vanishing M-component of velocity.
CheckReport check_totally_geodesic(const FoliationModel& model, const SamplingOptions& opts = {},
                                   const Tolerances& tol = {});

/// Orthogonal geodesics reach +-horizon without leaving the domain; the
/// residual is the normalized energy drift (infinite on exit or blow-up).
/// A desk-scale proxy, not a completeness proof.
CheckReport check_transversal_completeness(const FoliationModel& model, const SamplingOptions& opts = {},
                                           const Tolerances& tol = {});

/// g restricted to T_pF is nondegenerate at all sampled points.
CheckReport check_leaf_nondegeneracy(const FoliationModel& model, const SamplingOptions& opts = {});

struct BiconditionalReport {
  CheckReport transport;
  CheckReport lewis;
  bool leaf_nondegenerate = false;
  bool transport_holds = false;
  bool criterion_holds = false;
  bool agree = false;
  std::string discrepancy;

  /// pass iff both sides agree.
  CheckReport as_report() const;
};

/// Orthogonal transport holds <=> (symmetric-product criterion holds and the
/// leaf metric is nondegenerate), evaluated on the model.
BiconditionalReport cross_validate_orthogonal_transport(const FoliationModel& model, const SamplingOptions& opts = {},
                                            const Tolerances& tol = {});

}  // namespace folia
