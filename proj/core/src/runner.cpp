#include "folia/runner.hpp"

#include "folia/graph.hpp"
#include "folia/holonomy.hpp"
#include "folia/parallel.hpp"
#include "folia/serialize.hpp"

#include "gallery_data.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

namespace folia {

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "metric_invariance", "signature",        "deck_relations",   "leaf_nondegeneracy", "orthogonal_transport",
      "lewis",             "projectability",   "totally_geodesic", "transversal_completeness",
      "biconditional",     "holonomy",         "graph_foliation",  "prs_axioms",         "graph_metric",
      "leaf_structure"};
  return names;
}

std::vector<std::string> default_checks(const std::string& model_kind) {
  std::vector<std::string> common{"leaf_nondegeneracy", "orthogonal_transport", "lewis", "projectability",
                                  "totally_geodesic", "transversal_completeness", "biconditional", "holonomy"};
  if (model_kind == "suspension") {
    common.insert(common.begin(), {"metric_invariance", "signature", "deck_relations"});
  }
  return common;
}

bool ScenarioResult::ok() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const CheckOutcome& o) { return o.met(); });
}

namespace {

const std::set<std::string> kGraphChecks{"graph_foliation", "prs_axioms", "graph_metric", "leaf_structure"};

struct Context {
  const ScenarioConfig* cfg = nullptr;
  std::optional<FoliationModel> base;
  std::optional<HolonomyGraph> graph;
  std::string graph_refusal;

  const FoliationModel& model() const { return cfg->model.on_graph ? graph->as_foliation() : *base; }
};

Context make_context(const ScenarioConfig& cfg, bool need_graph) {
  Context ctx;
  ctx.cfg = &cfg;
  ctx.base.emplace(build_model(cfg.model));
  if (need_graph || cfg.model.on_graph) {
    try {
      ctx.graph.emplace(HolonomyGraph::build(*ctx.base));
    } catch (const NotPseudoRiemannian& e) {
      if (cfg.model.on_graph) throw;
      ctx.graph_refusal = e.what();
    }
  }
  return ctx;
}

CheckReport boolean_report(std::string check, std::string statement, bool holds, const Tolerances& tol,
                           std::vector<std::string> notes = {}) {
  auto r = make_report(std::move(check), std::move(statement), {{Vec(), holds ? 0.0 : 1.0}}, tol);
  r.notes.insert(r.notes.end(), notes.begin(), notes.end());
  return r;
}

CheckReport not_applicable(const std::string& check, const std::string& what, const Tolerances& tol) {
  return degenerate_report(check, what, "not applicable to this model", tol);
}

std::string matrix_text(const IntMatrix2& m) {
  return "[[" + std::to_string(m.a()) + "," + std::to_string(m.b()) + "],[" + std::to_string(m.c()) + "," +
         std::to_string(m.d()) + "]]";
}

// --- suspension-only exact checks ------------------------------------------

CheckReport metric_invariance(const Context& ctx, const Tolerances& tol) {
  const char* what = "the fibre metric is invariant under A (A^T g A = g, integer arithmetic)";
  const auto& s = ctx.base->suspension();
  if (!s) return not_applicable("metric_invariance", what, tol);
  const IntMatrix2 defect = invariance_defect(s->A);
  double worst = 0.0;
  for (auto v : defect.m) worst = std::max(worst, static_cast<double>(std::abs(v)));
  return boolean_report("metric_invariance", what, worst == 0.0, tol,
                        {"integer form " + matrix_text(invariant_form(s->A)) + ", eta " + format_number(s->eta)});
}

CheckReport signature_check(const Context& ctx, const Tolerances& tol) {
  const char* what = "fibre metric has signature (1,1) and the total metric (2,1)";
  const auto& s = ctx.base->suspension();
  if (!s) return not_applicable("signature", what, tol);
  const Signature fibre = signature(suspension_fiber_metric(s->A, s->eta));
  const Signature total = signature(suspension_total_metric(s->A, s->eta));
  const bool holds = fibre == Signature{1, 1, false} && total == Signature{2, 1, false};
  const double tr = static_cast<double>(s->A.trace());
  const double det_expected = -s->eta * s->eta * (tr * tr - 4.0);
  const double det = suspension_fiber_metric(s->A, s->eta).determinant();
  auto r = make_report("signature", what,
                       {{Vec(), holds ? std::abs(det - det_expected) / std::max(1.0, std::abs(det_expected)) : 1.0}},
                       tol);
  r.notes.push_back("det g = " + format_number(det));
  return r;
}

CheckReport deck_relations(const Context& ctx, const Tolerances& tol) {
  const char* what = "T n_i T^{-1} is translation by A e_i in the deck group of the cover";
  if (!ctx.base->suspension()) return not_applicable("deck_relations", what, tol);
  const DeckGroupReport r = deck_group_relations(*ctx.base);
  return boolean_report("deck_relations", what, r.relations_hold, tol);
}

// --- holonomy --------------------------------------------------------------

CheckReport holonomy_check(const Context& ctx, const Tolerances& tol) {
  const char* what = "leaf-loop holonomy germs match the exact maps and the transfer of horizontal curves";
  const FoliationModel& m = *ctx.base;
  std::vector<ResidualSample> samples;
  std::vector<std::string> notes;

  if (m.suspension()) {
    const Vec x0 = Vec::Zero(3);
    const IntMatrix2& A = m.suspension()->A;
    for (std::int64_t k = -2; k <= 2; ++k) {
      const LeafPath loop = generator_loop(m, x0, k);
      const HolonomyMap germ = holonomy_along(m, loop);
      double r = germ.exact_residual();
      if (!germ.exact || !(*germ.exact == A.power(kForwardLoopPower * k))) r = 1.0;
      Vec direction(2);
      direction << 1.0, 0.5;
      const HorizontalCurve sigma = horizontal_curve(m, x0, direction, 0.5 * germ.radius);
      const TransferResult moved = transfer(m, sigma, loop);
      for (std::size_t i = 0; i < moved.final_transverse.size(); ++i)
        r = std::max(r, (moved.final_transverse[i] - germ.apply(moved.initial_transverse[i])).norm());
      samples.push_back({x0, r});
    }
    const HolonomyGroup closed = holonomy_group(m, x0);
    samples.push_back({x0, closed.cyclic ? closed.chi_residual : 1.0});
    notes.push_back("leaf through u=0: " + std::string(closed.cyclic ? "infinite cyclic" : "trivial") +
                    ", generator germ A^" + std::to_string(kForwardLoopPower * closed.period));
    Vec generic(3);
    generic << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, 0.0;
    const HolonomyGroup open = holonomy_group(m, generic);
    samples.push_back({generic, open.cyclic ? 1.0 : 0.0});
    notes.push_back(std::string("generic leaf: ") + (open.cyclic ? "cyclic" : "trivial") +
                    (open.decided ? "" : " (no return within the period bound)"));
  } else {
    for (const Vec& p : sample_points(m, 5, ctx.cfg->sampling.seed)) {
      const HolonomyGroup group = holonomy_group(m, p);
      double r = group.cyclic ? 1.0 : 0.0;
      const HolonomyMap germ = holonomy_along(m, straight_leaf_path(m, p, 0.3));
      r = std::max(r, germ.identity_residual());
      samples.push_back({p, r});
    }
    notes.push_back("leaves carry trivial holonomy");
  }
  auto report = make_report("holonomy", what, std::move(samples), tol);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

// --- graph -----------------------------------------------------------------

CheckReport graph_refused(const Context& ctx, const std::string& check, const std::string& what,
                          const Tolerances& tol) {
  return degenerate_report(check, what, "graph construction refused: " + ctx.graph_refusal, tol);
}

CheckReport prs_axioms(const Context& ctx, const Tolerances& tol) {
  const char* what = "both canonical projections are pseudo-Riemannian submersions";
  if (!ctx.graph) return graph_refused(ctx, "prs_axioms", what, tol);
  const int n = ctx.cfg->sampling.points;
  const std::uint64_t seed = ctx.cfg->sampling.seed;
  auto p1 = ctx.graph->check_prs_axioms(1, n, tol.pass, seed);
  auto p2 = ctx.graph->check_prs_axioms(2, n, tol.pass, seed);
  std::vector<ResidualSample> all = p1.samples;
  all.insert(all.end(), p2.samples.begin(), p2.samples.end());
  auto r = make_report("prs_axioms", what, std::move(all), tol);
  r.parts = {std::move(p1), std::move(p2)};
  return r;
}

CheckReport graph_metric(const Context& ctx, const Tolerances& tol) {
  const char* what = "d is symmetric, fibre foliations are orthogonal, d is fixed by its defining properties";
  if (!ctx.graph) return graph_refused(ctx, "graph_metric", what, tol);
  const HolonomyGraph& g = *ctx.graph;
  const auto& susp = g.base().suspension();
  const int q = g.codim();
  const int p = g.base().leaf_dim();
  const auto points = g.sample_cover_points(1000, ctx.cfg->sampling.seed);

  auto samples = parallel_map(points.size(), [&](std::size_t k) {
    const Vec& z = points[k];
    const Mat d = g.d_matrix(z);
    const double scale = max_norm(d);
    double r = max_norm(d - d.transpose()) / scale;
    r = std::max(r, max_norm(d.block(q, q + p, p, p)) / scale);  // TF^(2) against TF^(1)
    r = std::max(r, max_norm(g.reconstruct_d(z) - d) / scale);
    if (susp) {
      r = std::max(r, max_norm(d - suspension_total_metric(susp->A, susp->eta, 2)) / scale);
      Mat action = Mat::Identity(g.dim(), g.dim());
      action.topLeftCorner(2, 2) = susp->A.to_dense();
      Vec moved = action * z;
      moved.tail(2 * p).array() += 1.0;
      r = std::max(r, max_norm(action.transpose() * g.d_matrix(moved) * action - d) / scale);
    }
    return ResidualSample{z, r};
  });
  auto report = make_report("graph_metric", what, std::move(samples), tol);
  const Signature sig = signature(g.d_matrix(points.front()));
  report.notes.push_back("signature (" + std::to_string(sig.plus) + "," + std::to_string(sig.minus) + ")");
  return report;
}

CheckReport leaf_structure_check(const Context& ctx, const Tolerances& tol) {
  const char* what = "graph leaves are products of leaves, quotiented by the diagonal deck action of the holonomy";
  if (!ctx.graph) return graph_refused(ctx, "leaf_structure", what, tol);
  const HolonomyGraph& g = *ctx.graph;
  std::vector<ResidualSample> samples;
  std::vector<std::string> notes;
  const Mat identity = Mat::Identity(2 * g.base().leaf_dim(), 2 * g.base().leaf_dim());

  auto record = [&](const Vec& x, GraphLeafShape expected, double shift) {
    const LeafStructure s = g.leaf_structure(x);
    const bool holds = s.shape == expected && s.deck_shift == shift && s.deck_is_diagonal && s.flat &&
                       (shift == 0.0 || s.covering_advance == shift);
    samples.push_back({x, holds ? 0.0 : 1.0});
    notes.push_back(std::string(to_string(s.base_leaf)) + " leaf -> " + to_string(s.shape) +
                    ", deck shift " + format_number(s.deck_shift) +
                    (max_norm(s.leaf_metric - identity) == 0.0 ? ", leaf metric flat identity" : ""));
  };

  if (g.base().suspension()) {
    record(Vec::Zero(3), GraphLeafShape::Cylinder, 1.0);
    Vec generic(3);
    generic << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, 0.0;
    record(generic, GraphLeafShape::Plane, 0.0);
  } else {
    for (const Vec& x : sample_points(g.base(), 3, ctx.cfg->sampling.seed)) record(x, GraphLeafShape::Plane, 0.0);
  }
  auto report = make_report("leaf_structure", what, std::move(samples), tol);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

CheckReport dispatch(const std::string& name, const Context& ctx) {
  const auto& s = ctx.cfg->sampling;
  const auto& tol = ctx.cfg->tolerances;
  if (name == "metric_invariance") return metric_invariance(ctx, tol);
  if (name == "signature") return signature_check(ctx, tol);
  if (name == "deck_relations") return deck_relations(ctx, tol);
  if (name == "leaf_nondegeneracy") return check_leaf_nondegeneracy(ctx.model(), s);
  if (name == "orthogonal_transport") return check_orthogonal_transport(ctx.model(), s, tol);
  if (name == "lewis") return check_lewis(ctx.model(), s, tol);
  if (name == "projectability") return check_projectability(ctx.model(), s, tol);
  if (name == "totally_geodesic") return check_totally_geodesic(ctx.model(), s, tol);
  if (name == "transversal_completeness") return check_transversal_completeness(ctx.model(), s, tol);
  if (name == "biconditional") return cross_validate_orthogonal_transport(ctx.model(), s, tol).as_report();
  if (name == "holonomy") return holonomy_check(ctx, tol);
  if (name == "graph_foliation") return check_graph_foliation(*ctx.base, s, tol);
  if (name == "prs_axioms") return prs_axioms(ctx, tol);
  if (name == "graph_metric") return graph_metric(ctx, tol);
  if (name == "leaf_structure") return leaf_structure_check(ctx, tol);
  throw ConfigError("unknown check '" + name + "'");
}

bool needs_graph(const std::vector<std::string>& checks) {
  return std::any_of(checks.begin(), checks.end(), [](const std::string& c) {
    return kGraphChecks.contains(c) && c != "graph_foliation";
  });
}

}  // namespace

CheckReport run_check(const std::string& name, const ScenarioConfig& cfg) {
  const Context ctx = make_context(cfg, needs_graph({name}));
  return dispatch(name, ctx);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult result;
  result.config = cfg;
  const Context ctx = make_context(result.config, needs_graph(cfg.checks));
  auto reports = parallel_map(cfg.checks.size(), [&](std::size_t i) { return dispatch(cfg.checks[i], ctx); });
  for (std::size_t i = 0; i < reports.size(); ++i)
    result.outcomes.push_back({std::move(reports[i]), cfg.expected(cfg.checks[i])});
  return result;
}

void write_outputs(const ScenarioResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& file, const std::string& body) {
    std::ofstream out(fs::path(dir) / file, std::ios::binary);
    if (!out) throw Error("cannot write " + (fs::path(dir) / file).string());
    out << body;
  };
  write("summary.txt", summary_text(result));
  write("summary.json", summary_json(result));
  for (const auto& o : result.outcomes) write(o.report.check + ".csv", report_csv(o.report));
}

std::vector<GalleryEntry> gallery() {
  std::vector<GalleryEntry> out;
  for (const auto& [name, text] : detail::kGalleryConfigs) {
    const YAML::Node root = YAML::Load(std::string(text));
    out.push_back({std::string(name), root["description"] ? root["description"].as<std::string>() : "", text});
  }
  return out;
}

}  // namespace folia
