#include "folia/config.hpp"

#include "folia/runner.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace folia {

Verdict ScenarioConfig::expected(const std::string& check) const {
  const auto it = expectations.find(check);
  return it == expectations.end() ? Verdict::Pass : it->second;
}

Verdict parse_verdict(const std::string& text) {
  if (text == "pass") return Verdict::Pass;
  if (text == "fail") return Verdict::Fail;
  if (text == "degenerate") return Verdict::Degenerate;
  throw ConfigError("unknown verdict '" + text + "' (expected pass, fail or degenerate)");
}

namespace {

void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": malformed value");
  }
}

std::int64_t exact_integer(const YAML::Node& node, const std::string& where) {
  const auto text = scalar<std::string>(node, where);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec == std::errc() && ptr == end) return value;
  // Accept decimal spellings of integers such as "2.0".
  double real = 0.0;
  const auto [rptr, rec] = std::from_chars(text.data(), end, real);
  if (rec == std::errc() && rptr == end && std::isfinite(real) && real == std::trunc(real) &&
      std::abs(real) < 9.0e15)
    return static_cast<std::int64_t>(real);
  throw ConfigError(where + ": '" + text + "' is not an exact integer");
}

Mat real_matrix(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() == 0) throw ConfigError(where + ": expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  const auto cols = static_cast<Eigen::Index>(node[0].IsSequence() ? node[0].size() : 0);
  if (cols != rows) throw ConfigError(where + ": matrix must be square");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(where + ": ragged matrix");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scalar<double>(row[static_cast<std::size_t>(j)], where);
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError(where + ": metric block must be symmetric");
  return m;
}

std::vector<double> real_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ConfigError(where + ": expected a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(scalar<double>(v, where));
  return out;
}

ModelSpec parse_model(const YAML::Node& node) {
  reject_unknown(node, "model",
                 {"kind", "A", "eta", "leaf_metric", "transverse_metric", "leaf_periods", "transverse_periods",
                  "graph"});
  ModelSpec spec;
  if (!node["kind"]) throw ConfigError("model: missing 'kind'");
  spec.kind = scalar<std::string>(node["kind"], "model.kind");
  if (spec.kind != "suspension" && spec.kind != "product" && spec.kind != "warped")
    throw ConfigError("model.kind: unknown kind '" + spec.kind + "'");

  if (const auto a = node["A"]) {
    if (!a.IsSequence() || a.size() != 2 || !a[0].IsSequence() || !a[1].IsSequence() || a[0].size() != 2 ||
        a[1].size() != 2)
      throw ConfigError("model.A: expected [[a, b], [c, d]]");
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) spec.A.m[2 * i + j] = exact_integer(a[i][j], "model.A");
  }
  if (node["eta"]) spec.eta = scalar<double>(node["eta"], "model.eta");
  if (node["leaf_metric"]) spec.leaf_metric = real_matrix(node["leaf_metric"], "model.leaf_metric");
  if (node["transverse_metric"])
    spec.transverse_metric = real_matrix(node["transverse_metric"], "model.transverse_metric");
  if (node["leaf_periods"]) spec.leaf_periods = real_list(node["leaf_periods"], "model.leaf_periods");
  if (node["transverse_periods"])
    spec.transverse_periods = real_list(node["transverse_periods"], "model.transverse_periods");
  if (node["graph"]) spec.on_graph = scalar<bool>(node["graph"], "model.graph");

  if (spec.kind == "product" && (spec.leaf_metric.size() == 0 || spec.transverse_metric.size() == 0))
    throw ConfigError("model: product needs leaf_metric and transverse_metric");
  return spec;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& fallback_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  reject_unknown(root, "config", {"name", "description", "model", "checks", "sampling", "tolerances", "output"});

  ScenarioConfig cfg;
  cfg.name = root["name"] ? scalar<std::string>(root["name"], "name") : fallback_name;
  if (root["description"]) cfg.description = scalar<std::string>(root["description"], "description");
  if (!root["model"]) throw ConfigError("config: missing 'model'");
  cfg.model = parse_model(root["model"]);

  if (const auto checks = root["checks"]) {
    reject_unknown(checks, "checks", {"run", "expect"});
    if (checks["run"]) {
      if (!checks["run"].IsSequence()) throw ConfigError("checks.run: expected a list");
      for (const auto& c : checks["run"]) cfg.checks.push_back(scalar<std::string>(c, "checks.run"));
    }
    if (const auto expect = checks["expect"]) {
      if (!expect.IsMap()) throw ConfigError("checks.expect: expected a mapping");
      for (const auto& kv : expect)
        cfg.expectations[kv.first.as<std::string>()] = parse_verdict(scalar<std::string>(kv.second, "checks.expect"));
    }
  }
  if (cfg.checks.empty()) cfg.checks = default_checks(cfg.model.kind);
  const auto& known = known_checks();
  for (const auto& c : cfg.checks)
    if (std::find(known.begin(), known.end(), c) == known.end()) throw ConfigError("checks.run: unknown check '" + c + "'");
  for (const auto& [c, v] : cfg.expectations)
    if (std::find(cfg.checks.begin(), cfg.checks.end(), c) == cfg.checks.end())
      throw ConfigError("checks.expect: '" + c + "' is not in checks.run");

  if (const auto s = root["sampling"]) {
    reject_unknown(s, "sampling",
                   {"seed", "points", "geodesics", "completeness_geodesics", "s_max", "horizon", "step"});
    auto& o = cfg.sampling;
    if (s["seed"]) o.seed = static_cast<std::uint64_t>(exact_integer(s["seed"], "sampling.seed"));
    if (s["points"]) o.points = static_cast<int>(exact_integer(s["points"], "sampling.points"));
    if (s["geodesics"]) o.geodesics = static_cast<int>(exact_integer(s["geodesics"], "sampling.geodesics"));
    if (s["completeness_geodesics"])
      o.completeness_geodesics =
          static_cast<int>(exact_integer(s["completeness_geodesics"], "sampling.completeness_geodesics"));
    if (s["s_max"]) o.s_max = scalar<double>(s["s_max"], "sampling.s_max");
    if (s["horizon"]) o.horizon = scalar<double>(s["horizon"], "sampling.horizon");
    if (s["step"]) o.step = scalar<double>(s["step"], "sampling.step");
    if (o.points <= 0 || o.geodesics <= 0 || o.completeness_geodesics <= 0 || o.step <= 0.0)
      throw ConfigError("sampling: counts and step must be positive");
  }
  if (const auto t = root["tolerances"]) {
    reject_unknown(t, "tolerances", {"pass", "fail"});
    if (t["pass"]) cfg.tolerances.pass = scalar<double>(t["pass"], "tolerances.pass");
    if (t["fail"]) cfg.tolerances.fail = scalar<double>(t["fail"], "tolerances.fail");
    if (!(cfg.tolerances.pass <= cfg.tolerances.fail)) throw ConfigError("tolerances: pass must not exceed fail");
  }
  if (const auto o = root["output"]) {
    reject_unknown(o, "output", {"dir"});
    if (o["dir"]) cfg.output_dir = scalar<std::string>(o["dir"], "output.dir");
  }
  if (cfg.output_dir.empty()) cfg.output_dir = "folia-out/" + cfg.name;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_config(buffer.str(), stem);
}

namespace {

MetricField block(const Mat& g, const std::vector<double>& periods, const std::string& where) {
  const auto n = static_cast<int>(g.rows());
  if (!periods.empty() && static_cast<int>(periods.size()) != n)
    throw ConfigError(where + ": one period per axis expected");
  Box domain = Box::unbounded(n);
  for (int i = 0; i < static_cast<int>(periods.size()); ++i) {
    if (periods[static_cast<std::size_t>(i)] < 0.0) throw ConfigError(where + ": periods must be >= 0");
    if (periods[static_cast<std::size_t>(i)] > 0.0) {
      domain.lower(i) = 0.0;
      domain.upper(i) = periods[static_cast<std::size_t>(i)];
      domain.periodic[static_cast<std::size_t>(i)] = true;
    }
  }
  return MetricField::constant_field(g, domain);
}

}  // namespace

FoliationModel build_model(const ModelSpec& spec) {
  if (spec.kind == "suspension") return make_suspension(spec.A, spec.eta);
  if (spec.kind == "warped") return make_warped_counterexample();
  if (spec.kind == "product")
    return make_product(block(spec.leaf_metric, spec.leaf_periods, "model.leaf_periods"),
                        block(spec.transverse_metric, spec.transverse_periods, "model.transverse_periods"));
  throw ConfigError("model.kind: unknown kind '" + spec.kind + "'");
}

}  // namespace folia
