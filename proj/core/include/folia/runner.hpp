#pragma once

#include "folia/config.hpp"
#include "folia/criteria.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace folia {

/// Names accepted in checks.run.
const std::vector<std::string>& known_checks();
/// Checks run when a config lists none.
std::vector<std::string> default_checks(const std::string& model_kind);

struct CheckOutcome {
  CheckReport report;
  Verdict expected = Verdict::Pass;
  bool met() const { return report.verdict == expected; }
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<CheckOutcome> outcomes;
  /// true iff every verdict matches its expectation.
  bool ok() const;
};

/// Runs one named check against the scenario's model.
CheckReport run_check(const std::string& name, const ScenarioConfig& cfg);

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Writes summary.txt, summary.json and one CSV per check into `dir`.
void write_outputs(const ScenarioResult& result, const std::string& dir);

struct GalleryEntry {
  std::string name;
  std::string description;
  std::string_view text;
};

std::vector<GalleryEntry> gallery();

}  // namespace folia
