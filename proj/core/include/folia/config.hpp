#pragma once

// Scenario configuration (YAML). Unknown keys are rejected; integer matrix
// entries must be written as exact integers.

#include "folia/criteria.hpp"
#include "folia/models.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace folia {

struct ModelSpec {
  std::string kind;  // suspension | product | warped
  IntMatrix2 A{{2, 1, 1, 1}};
  double eta = 1.0;
  Mat leaf_metric;
  Mat transverse_metric;
  std::vector<double> leaf_periods;        ///< 0 = unbounded axis
  std::vector<double> transverse_periods;
  /// Run the criteria checks on the induced foliation of the graph.
  bool on_graph = false;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  ModelSpec model;
  std::vector<std::string> checks;
  std::map<std::string, Verdict> expectations;  ///< missing entries default to pass
  SamplingOptions sampling;
  Tolerances tolerances;
  std::string output_dir;

  Verdict expected(const std::string& check) const;
};

/// Throws ConfigError with the offending key or value in the message.
ScenarioConfig parse_config(const std::string& text, const std::string& fallback_name = "scenario");
ScenarioConfig load_config(const std::string& path);

/// Builds the base model. Throws ModelError subclasses (e.g. NotAnosov).
FoliationModel build_model(const ModelSpec& spec);

Verdict parse_verdict(const std::string& text);

}  // namespace folia
