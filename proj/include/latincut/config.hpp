#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latincut/experiments.hpp"

namespace latincut {

/// Everything a run needs: the problem plus output and study settings.
struct RunConfig {
  ProblemDef problem = ellipse_case();
  std::string output_dir = "output";
  std::vector<int> checkpoints = {5, 27, 210};  // iterations exported as fields and profiles
  int output_level = 0;                         // study level whose fields and profiles are exported
  bool export_fields = true;
  bool export_profiles = true;
  bool export_convergence = true;  // convergence.csv and iterations.csv
  bool export_condition = true;    // condition.csv / condition_scaling.csv
  bool compare_p1p0 = false;                    // extra P1/P0 run with its own profiles
  int workers = 1;
  // crack studies
  std::vector<double> sweep_eps = {0.25, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-11};
  std::vector<double> sweep_gamma_g = {0.0, 1e-3, 1e-1};
  std::string sweep_case = "i";  // i: eps_x held fixed, ii: eps_x = eps_y
  double sweep_eps_x = 0.5;
  double scaling_eps = 0.25;  // eps_x = eps_y on every level of the mesh-size study

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
};

const std::vector<ExperimentInfo>& experiment_catalog();

/// Preset configuration of a named experiment; throws Validation for unknown names.
RunConfig experiment_preset(std::string_view name);

/// Environment lookup used for LATINCUT_* overrides.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_environment();

/// Parses `key = value` lines (# starts a comment). The `experiment` key selects
/// the preset the other keys modify. Environment overrides apply last.
RunConfig parse_config(std::string_view text, const EnvLookup& env = {});
RunConfig load_config(const std::string& path, const EnvLookup& env = {});

/// Writes every key; parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& config);

/// All recognised keys in output order.
std::vector<std::string> config_keys();

/// LATINCUT_<KEY> with dots replaced by underscores, upper case.
std::string env_name(std::string_view key);

}  // namespace latincut
