#include "folia/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace folia {

using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

ordered_json vector_json(const Vec& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

ordered_json matrix_json(const Mat& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

ordered_json int_matrix_json(const IntMatrix2& m) { return {{m.a(), m.b()}, {m.c(), m.d()}}; }

ordered_json report_json(const CheckReport& r) {
  ordered_json j;
  j["check"] = r.check;
  j["statement"] = r.statement;
  j["verdict"] = to_string(r.verdict);
  j["max_residual"] = number(r.max_residual);
  j["tolerance"] = number(r.tolerance);
  j["fail_threshold"] = number(r.fail_threshold);
  j["samples"] = r.sample_count;
  j["notes"] = r.notes;
  if (!r.parts.empty()) {
    j["parts"] = ordered_json::array();
    for (const auto& p : r.parts) j["parts"].push_back(report_json(p));
  }
  return j;
}

void collect_rows(const CheckReport& r, std::vector<const CheckReport*>& out) {
  out.push_back(&r);
  for (const auto& p : r.parts) collect_rows(p, out);
}

}  // namespace

std::string report_csv(const CheckReport& report) {
  std::vector<const CheckReport*> reports;
  collect_rows(report, reports);
  Eigen::Index width = 0;
  for (const auto* r : reports)
    for (const auto& s : r->samples) width = std::max(width, s.location.size());

  std::ostringstream out;
  out << "check,sample_index";
  for (Eigen::Index i = 0; i < width; ++i) out << ",loc_" << i;
  out << ",residual\n";
  for (const auto* r : reports) {
    for (std::size_t k = 0; k < r->samples.size(); ++k) {
      const auto& s = r->samples[k];
      out << r->check << ',' << k;
      for (Eigen::Index i = 0; i < width; ++i) {
        out << ',';
        if (i < s.location.size()) out << format_number(s.location(i));
      }
      out << ',' << format_number(s.value) << '\n';
    }
  }
  return out.str();
}

std::string summary_text(const ScenarioResult& result) {
  std::ostringstream out;
  const auto& cfg = result.config;
  out << "scenario: " << cfg.name << '\n';
  if (!cfg.description.empty()) out << "description: " << cfg.description << '\n';
  out << "model: " << cfg.model.kind << (cfg.model.on_graph ? " (graph)" : "") << '\n';
  out << "seed: " << cfg.sampling.seed << '\n';
  out << "tolerances: pass < " << format_number(cfg.tolerances.pass) << ", fail > "
      << format_number(cfg.tolerances.fail) << "\n\n";

  std::function<void(const CheckReport&, int)> line = [&](const CheckReport& r, int depth) {
    out << std::string(static_cast<std::size_t>(2 * depth), ' ') << r.check << ": " << to_string(r.verdict)
        << "  max_residual=" << format_number(r.max_residual) << "  samples=" << r.sample_count << '\n';
    out << std::string(static_cast<std::size_t>(2 * depth + 4), ' ') << r.statement << '\n';
    for (const auto& n : r.notes) out << std::string(static_cast<std::size_t>(2 * depth + 4), ' ') << "note: " << n << '\n';
    for (const auto& p : r.parts) line(p, depth + 1);
  };
  for (const auto& o : result.outcomes) {
    out << (o.met() ? "[ok]       " : "[MISMATCH] ") << "expected " << to_string(o.expected) << '\n';
    line(o.report, 1);
  }
  out << "\nresult: " << (result.ok() ? "all verdicts match expectations" : "some verdicts differ from expectations")
      << '\n';
  return out.str();
}

std::string summary_json(const ScenarioResult& result) {
  ordered_json j;
  j["scenario"] = result.config.name;
  j["description"] = result.config.description;
  j["model"] = result.config.model.kind;
  j["graph"] = result.config.model.on_graph;
  j["seed"] = result.config.sampling.seed;
  j["ok"] = result.ok();
  j["checks"] = ordered_json::array();
  for (const auto& o : result.outcomes) {
    ordered_json c = report_json(o.report);
    c["expected"] = to_string(o.expected);
    c["met"] = o.met();
    j["checks"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

std::string holonomy_map_json(const HolonomyMap& map) {
  ordered_json j;
  j["center"] = vector_json(map.center);
  j["radius"] = map.radius;
  j["tolerance"] = map.tolerance;
  if (map.exact) j["exact"] = int_matrix_json(*map.exact);
  j["samples"] = ordered_json::array();
  for (const auto& [y, image] : map.samples) j["samples"].push_back({{"point", vector_json(y)}, {"image", vector_json(image)}});
  return j.dump(2);
}

std::string graph_point_json(const HolonomyGraph& graph, const GraphPoint& z) {
  ordered_json j;
  j["cover"] = vector_json(z.cover);
  j["class"] = z.winding;
  j["source"] = vector_json(graph.project(z, 1));
  j["target"] = vector_json(graph.project(z, 2));
  j["leaf"] = to_string(graph.base().leaf_id(graph.project(z, 1)).kind);
  return j.dump(2);
}

std::string leaf_structure_json(const LeafStructure& leaf) {
  ordered_json j;
  j["shape"] = to_string(leaf.shape);
  j["base_leaf"] = to_string(leaf.base_leaf);
  j["deck_shift"] = leaf.deck_shift;
  j["deck_is_diagonal"] = leaf.deck_is_diagonal;
  j["leaf_metric"] = matrix_json(leaf.leaf_metric);
  j["flat"] = leaf.flat;
  j["covering_advance"] = leaf.covering_advance;
  return j.dump(2);
}

}  // namespace folia
