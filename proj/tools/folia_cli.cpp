#include "folia/runner.hpp"
#include "folia/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

int report_result(const folia::ScenarioResult& result, const std::string& dir) {
  folia::write_outputs(result, dir);
  std::cout << folia::summary_text(result) << "outputs: " << dir << '\n';
  return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"folia: numeric checks for foliated pseudo-Riemannian models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config_path, "scenario YAML file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");

  bool run_gallery = false;
  std::string gallery_out = "folia-out";
  auto* gallery = app.add_subcommand("gallery", "list (or run) the bundled scenarios");
  gallery->add_flag("--run", run_gallery, "run every bundled scenario");
  gallery->add_option("--out", gallery_out, "root directory for gallery outputs");

  std::string check_name;
  std::string model_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  auto* check = app.add_subcommand("check", "run one named check against a scenario's model");
  check->add_option("name", check_name, "check name")->required();
  check->add_option("--model", model_path, "scenario YAML file")->required();
  check->add_option("--seed", seed, "sampling seed");
  check->add_option("--tol", tol, "pass tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = folia::load_config(config_path);
      return report_result(folia::run_scenario(cfg), out_dir.empty() ? cfg.output_dir : out_dir);
    }
    if (*gallery) {
      const auto entries = folia::gallery();
      if (!run_gallery) {
        for (const auto& e : entries) std::cout << e.name << "  " << e.description << '\n';
        return 0;
      }
      int status = 0;
      for (const auto& e : entries) {
        const auto cfg = folia::parse_config(std::string(e.text), e.name);
        status |= report_result(folia::run_scenario(cfg), (std::filesystem::path(gallery_out) / e.name).string());
      }
      return status;
    }
    if (*check) {
      auto cfg = folia::load_config(model_path);
      if (seed) cfg.sampling.seed = *seed;
      if (tol) {
        cfg.tolerances.pass = *tol;
        cfg.tolerances.fail = std::max(cfg.tolerances.fail, *tol);
      }
      const auto report = folia::run_check(check_name, cfg);
      folia::ScenarioResult result;
      result.config = cfg;
      result.outcomes.push_back({report, cfg.expected(check_name)});
      std::cout << folia::summary_text(result);
      return result.ok() ? 0 : 1;
    }
  } catch (const folia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const folia::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 3;
  } catch (const folia::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
