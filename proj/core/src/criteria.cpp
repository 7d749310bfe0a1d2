#include "folia/criteria.hpp"

#include "folia/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace folia {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Degenerate: return "degenerate";
  }
  return "unknown";
}

Verdict classify(double max_residual, const Tolerances& tol) {
  if (max_residual < tol.pass) return Verdict::Pass;
  if (max_residual > tol.fail) return Verdict::Fail;
  return Verdict::Degenerate;
}

CheckReport make_report(std::string check, std::string statement, std::vector<ResidualSample> samples,
                        const Tolerances& tol) {
  CheckReport r;
  r.check = std::move(check);
  r.statement = std::move(statement);
  r.tolerance = tol.pass;
  r.fail_threshold = tol.fail;
  r.sample_count = samples.size();
  for (const auto& s : samples)
    r.max_residual = std::isnan(s.value) ? std::numeric_limits<double>::infinity() : std::max(r.max_residual, s.value);
  r.samples = std::move(samples);
  r.verdict = classify(r.max_residual, tol);
  if (r.verdict == Verdict::Degenerate)
    r.notes.push_back("residual between pass and fail thresholds; inconclusive");
  return r;
}

CheckReport degenerate_report(std::string check, std::string statement, std::string reason, const Tolerances& tol) {
  CheckReport r;
  r.check = std::move(check);
  r.statement = std::move(statement);
  r.verdict = Verdict::Degenerate;
  r.max_residual = std::numeric_limits<double>::infinity();
  r.tolerance = tol.pass;
  r.fail_threshold = tol.fail;
  r.notes.push_back(std::move(reason));
  return r;
}

std::vector<Vec> sample_points(const FoliationModel& model, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& box = model.sampling_box();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Vec p(model.dim());
    for (int i = 0; i < model.dim(); ++i) p(i) = box.lower(i) + unit(rng) * (box.upper(i) - box.lower(i));
    out.push_back(std::move(p));
  }
  return out;
}

Vec random_unit_in_span(const std::vector<Vec>& basis, std::uint64_t seed) {
  const int n = static_cast<int>(basis.front().size());
  const Mat q = stack_columns(basis, n).householderQr().householderQ() * Mat::Identity(n, static_cast<Eigen::Index>(basis.size()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec c(static_cast<Eigen::Index>(basis.size()));
  do {
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  } while (c.norm() < 1e-12);
  return q * c.normalized();
}

namespace {

constexpr const char* kTransportStatement =
    "a geodesic orthogonal to one leaf stays orthogonal to every leaf it meets";
constexpr const char* kLewisStatement =
    "symmetric-product criterion: nabla_X Y + nabla_Y X stays in M for foliate X, Y in M";
constexpr const char* kProjectabilityStatement =
    "the metric is transversally projectable (transverse block constant along leaves)";
constexpr const char* kTotallyGeodesicStatement =
    "leaves are totally geodesic: (L_X g)(Y,Z) = 0 for X in M, Y,Z in TF";
constexpr const char* kCompletenessStatement =
    "orthogonal geodesics are defined on the whole real line (desk-scale horizon)";
constexpr const char* kNondegeneracyStatement = "the induced leaf metric is nondegenerate";

double fd_step(const Vec& p) { return 1e-6 * std::max(1.0, p.cwiseAbs().maxCoeff()); }

// Per-sample seeds derived from the run seed; the stream of sample points is
// independent of how many directions are drawn.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t salt, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(index)};
  std::uint64_t out = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

bool leaf_degenerate_at(const FoliationModel& model, const Vec& p) {
  return is_degenerate(gram_matrix(model.metric(), p, model.leaf_frame()));
}

double orthogonality_residual(const FoliationModel& model, const Vec& p, const Vec& v) {
  const Mat g = model.metric().eval(p);
  const double scale = max_norm(g) * v.norm();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int axis : model.leaf_axes()) worst = std::max(worst, std::abs((g * v)(axis)) / scale);
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport check_orthogonal_transport(const FoliationModel& model, const SamplingOptions& opts,
                                       const Tolerances& tol) {
  const auto starts = sample_points(model, opts.geodesics, opts.seed);
  for (const auto& p : starts)
    if (leaf_degenerate_at(model, p))
      return degenerate_report("orthogonal_transport", kTransportStatement,
                               "leaf metric degenerate at a sampled point; orthogonal distribution undefined", tol);

  struct Outcome {
    ResidualSample sample;
    bool exited = false;
  };
  const auto outcomes = parallel_map(starts.size(), [&](std::size_t i) {
    const Vec& p = starts[i];
    const auto split = tangent_and_orthogonal(model, p);
    const Vec v = random_unit_in_span(split.orthogonal, child_seed(opts.seed, 1, i));
    Outcome out{{p, 0.0}, false};
    try {
      trace_geodesic(model.metric(), {p, v, 0.0}, opts.s_max, opts.step, [&](const GeodesicState& s) {
        out.sample.value = std::max(out.sample.value, orthogonality_residual(model, s.position, s.velocity));
        return true;
      });
    } catch (const DomainExit&) {
      out.exited = true;
    }
    return out;
  });

  std::vector<ResidualSample> samples;
  std::size_t exits = 0;
  for (const auto& o : outcomes) {
    samples.push_back(o.sample);
    exits += o.exited ? 1 : 0;
  }
  auto report = make_report("orthogonal_transport", kTransportStatement, std::move(samples), tol);
  if (exits > 0)
    report.notes.push_back(std::to_string(exits) + " geodesic(s) left the domain; residual taken up to the exit");
  return report;
}

CheckReport check_lewis(const FoliationModel& model, const SamplingOptions& opts, const Tolerances& tol) {
  const auto points = sample_points(model, opts.points, opts.seed);
  for (const auto& p : points)
    if (leaf_degenerate_at(model, p))
      return degenerate_report("lewis", kLewisStatement, "leaf metric degenerate at a sampled point", tol);

  auto samples = parallel_map(points.size(), [&](std::size_t idx) {
    const Vec& p = points[idx];
    const Mat frame = model.orthogonal_frame(p);
    const Christoffel gamma = christoffel(model.metric(), p);
    const int q = model.codim();

    // nabla_X Y = dY[X] + Gamma(X, Y); dY[X] by central differences along X.
    auto covariant = [&](int a, int b) -> Vec {
      const Vec x = frame.col(a);
      const double h = fd_step(p) / std::max(1.0, x.norm());
      const Mat ahead = model.orthogonal_frame(p + h * x);
      const Mat behind = model.orthogonal_frame(p - h * x);
      const Vec dy = (ahead.col(b) - behind.col(b)) / (2.0 * h);
      return Vec(dy - gamma.contract(x, frame.col(b)));
    };

    double worst = 0.0;
    for (int a = 0; a < q; ++a)
      for (int b = a; b < q; ++b) {
        const Vec sym = covariant(a, b) + covariant(b, a);
        const Vec tangential = model.split(p, sym).first;
        const double scale = 2.0 * frame.col(a).norm() * frame.col(b).norm();
        worst = std::max(worst, tangential.norm() / scale);
      }
    return ResidualSample{p, worst};
  });
  return make_report("lewis", kLewisStatement, std::move(samples), tol);
}

CheckReport check_projectability(const FoliationModel& model, const SamplingOptions& opts, const Tolerances& tol) {
  const auto points = sample_points(model, opts.points, opts.seed);
  for (const auto& p : points)
    if (leaf_degenerate_at(model, p))
      return degenerate_report("projectability", kProjectabilityStatement, "leaf metric degenerate at a sampled point",
                               tol);

  auto transverse_block = [&](const Vec& p) -> Mat {
    const Mat frame = model.orthogonal_frame(p);
    return frame.transpose() * model.metric().eval(p) * frame;
  };

  auto samples = parallel_map(points.size(), [&](std::size_t idx) {
    const Vec& p = points[idx];
    const Mat g = model.metric().eval(p);
    const Mat frame = model.orthogonal_frame(p);
    const Mat block = frame.transpose() * g * frame;
    const double scale = std::max(max_norm(block), std::numeric_limits<double>::min());

    double worst = 0.0;
    // Mixed block g(d_x^a, X_b).
    const Mat mixed = g * frame;
    for (int axis : model.leaf_axes())
      for (int b = 0; b < model.codim(); ++b) worst = std::max(worst, std::abs(mixed(axis, b)) / max_norm(g));
    // Leafwise derivative of the transverse block.
    const double h = fd_step(p);
    for (int axis : model.leaf_axes()) {
      const Vec e = Vec::Unit(model.dim(), axis);
      const Mat derivative = (transverse_block(p + h * e) - transverse_block(p - h * e)) / (2.0 * h);
      worst = std::max(worst, max_norm(derivative) / scale);
    }
    return ResidualSample{p, worst};
  });
  return make_report("projectability", kProjectabilityStatement, std::move(samples), tol);
}

CheckReport check_totally_geodesic(const FoliationModel& model, const SamplingOptions& opts, const Tolerances& tol) {
  const auto points = sample_points(model, opts.points, opts.seed);
  for (const auto& p : points)
    if (leaf_degenerate_at(model, p))
      return degenerate_report("totally_geodesic", kTotallyGeodesicStatement,
                               "leaf metric degenerate at a sampled point", tol);

  // (i) (L_X g)_ab = X^k d_k g_ab + g_kb d_a X^k + g_ak d_b X^k.
  auto lie_samples = parallel_map(points.size(), [&](std::size_t idx) {
    const Vec& p = points[idx];
    const Mat g = model.metric().eval(p);
    const auto dg = metric_derivative(model.metric(), p);
    const Mat frame = model.orthogonal_frame(p);
    const double h = fd_step(p);
    std::vector<Mat> frame_derivative;  // indexed by leaf axis position
    for (int axis : model.leaf_axes()) {
      const Vec e = Vec::Unit(model.dim(), axis);
      frame_derivative.emplace_back((model.orthogonal_frame(p + h * e) - model.orthogonal_frame(p - h * e)) / (2.0 * h));
    }

    double worst = 0.0;
    const auto& leaf = model.leaf_axes();
    for (int beta = 0; beta < model.codim(); ++beta) {
      const Vec x = frame.col(beta);
      const double scale = max_norm(g) * x.norm();
      for (std::size_t ia = 0; ia < leaf.size(); ++ia)
        for (std::size_t ib = ia; ib < leaf.size(); ++ib) {
          const int a = leaf[ia];
          const int b = leaf[ib];
          double value = 0.0;
          for (int k = 0; k < model.dim(); ++k) value += x(k) * dg[static_cast<std::size_t>(k)](a, b);
          value += (g.row(b) * frame_derivative[ia].col(beta)).value();
          value += (g.row(a) * frame_derivative[ib].col(beta)).value();
          worst = std::max(worst, std::abs(value) / scale);
        }
    }
    return ResidualSample{p, worst};
  });
  auto lie = make_report("totally_geodesic.lie_derivative", kTotallyGeodesicStatement, std::move(lie_samples), tol);

  // (ii) geodesics tangent to TF.
  const auto starts = sample_points(model, opts.geodesics, opts.seed + 1);
  auto geo_samples = parallel_map(starts.size(), [&](std::size_t i) {
    const Vec& p = starts[i];
    const Vec v = random_unit_in_span(model.leaf_frame(), child_seed(opts.seed, 2, i));
    ResidualSample sample{p, 0.0};
    try {
      trace_geodesic(model.metric(), {p, v, 0.0}, opts.s_max, opts.step, [&](const GeodesicState& s) {
        const Vec orthogonal = model.split(s.position, s.velocity).second;
        sample.value = std::max(sample.value, orthogonal.norm() / s.velocity.norm());
        return true;
      });
    } catch (const DomainExit&) {
    }
    return sample;
  });
  auto geodesic =
      make_report("totally_geodesic.leaf_geodesics", kTotallyGeodesicStatement, std::move(geo_samples), tol);

  std::vector<ResidualSample> all = lie.samples;
  all.insert(all.end(), geodesic.samples.begin(), geodesic.samples.end());
  auto report = make_report("totally_geodesic", kTotallyGeodesicStatement, std::move(all), tol);
  if (lie.verdict != geodesic.verdict)
    report.notes.push_back(std::string("sub-checks disagree: lie_derivative=") + to_string(lie.verdict) +
                           ", leaf_geodesics=" + to_string(geodesic.verdict));
  report.parts = {std::move(lie), std::move(geodesic)};
  return report;
}

CheckReport check_transversal_completeness(const FoliationModel& model, const SamplingOptions& opts,
                                           const Tolerances& tol) {
  const auto starts = sample_points(model, opts.completeness_geodesics, opts.seed);
  for (const auto& p : starts)
    if (leaf_degenerate_at(model, p))
      return degenerate_report("transversal_completeness", kCompletenessStatement,
                               "leaf metric degenerate at a sampled point", tol);

  struct Outcome {
    ResidualSample sample;
    std::string note;
  };
  const auto outcomes = parallel_map(starts.size(), [&](std::size_t i) {
    const Vec& p = starts[i];
    const auto split = tangent_and_orthogonal(model, p);
    const Vec v = random_unit_in_span(split.orthogonal, child_seed(opts.seed, 3, i));
    const double energy0 = scalar_product(model.metric(), p, v, v);
    const double speed0 = v.norm();
    Outcome out{{p, 0.0}, {}};
    for (double direction : {1.0, -1.0}) {
      try {
        trace_geodesic(model.metric(), {p, v, 0.0}, direction * opts.horizon, opts.step, [&](const GeodesicState& s) {
          const Mat g = model.metric().eval(s.position);
          const double energy = s.velocity.dot(g * s.velocity);
          const double drift = std::abs(energy - energy0) / (max_norm(g) * speed0 * speed0);
          out.sample.value = std::max(out.sample.value, drift);
          if (s.velocity.norm() > 1e6 * speed0) {
            out.sample.value = std::numeric_limits<double>::infinity();
            out.note = "velocity unbounded at s=" + std::to_string(s.parameter);
            return false;
          }
          return true;
        });
      } catch (const DomainExit& e) {
        out.sample.value = std::numeric_limits<double>::infinity();
        out.note = "geodesic left the domain at s=" + std::to_string(e.parameter);
      }
    }
    return out;
  });

  std::vector<ResidualSample> samples;
  std::vector<std::string> notes;
  for (const auto& o : outcomes) {
    samples.push_back(o.sample);
    if (!o.note.empty() && notes.size() < 5) notes.push_back(o.note);
  }
  auto report = make_report("transversal_completeness", kCompletenessStatement, std::move(samples), tol);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

CheckReport check_leaf_nondegeneracy(const FoliationModel& model, const SamplingOptions& opts) {
  const auto points = sample_points(model, opts.points, opts.seed);
  std::vector<ResidualSample> samples;
  for (const auto& p : points) samples.push_back({p, leaf_degenerate_at(model, p) ? 1.0 : 0.0});
  return make_report("leaf_nondegeneracy", kNondegeneracyStatement, std::move(samples), Tolerances{0.5, 0.5});
}

// ---------------------------------------------------------------------------

CheckReport BiconditionalReport::as_report() const {
  CheckReport r;
  r.check = "biconditional";
  r.statement = "orthogonal transport <=> (symmetric-product criterion and nondegenerate leaves)";
  r.verdict = agree ? Verdict::Pass : Verdict::Fail;
  r.max_residual = agree ? 0.0 : 1.0;
  r.tolerance = 0.5;
  r.fail_threshold = 0.5;
  r.sample_count = 1;
  r.samples.push_back({Vec(), r.max_residual});
  r.notes.push_back(std::string("orthogonal transport ") + (transport_holds ? "holds" : "fails") +
                    "; criterion and nondegeneracy " + (criterion_holds ? "hold" : "fail"));
  if (!discrepancy.empty()) r.notes.push_back(discrepancy);
  r.parts = {transport, lewis};
  return r;
}

BiconditionalReport cross_validate_orthogonal_transport(const FoliationModel& model, const SamplingOptions& opts,
                                                        const Tolerances& tol) {
  BiconditionalReport r;
  r.leaf_nondegenerate = check_leaf_nondegeneracy(model, opts).passed();
  r.transport = check_orthogonal_transport(model, opts, tol);
  r.lewis = check_lewis(model, opts, tol);
  r.transport_holds = r.transport.passed();
  r.criterion_holds = r.lewis.passed() && r.leaf_nondegenerate;
  r.agree = r.transport_holds == r.criterion_holds;
  if (!r.agree)
    r.discrepancy = std::string("transport verdict ") + to_string(r.transport.verdict) + " but criterion verdict " +
                    to_string(r.lewis.verdict) + (r.leaf_nondegenerate ? "" : " (leaf degenerate)");
  return r;
}

}  // namespace folia
