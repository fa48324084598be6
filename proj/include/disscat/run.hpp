#pragma once

#include "disscat/model.hpp"
#include "disscat/optical_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace disscat {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of a run.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNumerical = 3 };

struct OpticalConfig {
  RadialProblem problem;
  int ell_max = 8;
  double lam_min = 0.05, lam_max = 5.0;
  int n = 200;
  std::optional<double> cpa_lam0;  // resonance-find: tune a square well to this energy first
  double cpa_radius = 1.0;
};

struct RunConfig {
  std::string command;
  nlohmann::json model;  // built-in name, {"builtin", "params"} or an inline model
  std::optional<int> grid_n;
  std::optional<double> grid_lo, grid_hi;
  int oracle_nodes = 200;
  double t_factor = 0.2;
  double dt_factor = 0.1;
  std::string out_dir = "out";
  bool csv = true, json = true;
  OpticalConfig optical;
  nlohmann::json source;  // the document as given, for the manifest hash
};

std::vector<std::string> command_names();

/// Throws InvalidInput on unknown commands, keys of the wrong type or
/// out-of-range values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Builds the model named or described by the config.
Model resolve_model(const nlohmann::json& doc);

RadialPotential potential_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

/// Runs the command, writes its artifacts and manifest.json into
/// cfg.out_dir, and returns the exit code.  Diagnostics go to `diag`.
int run(const RunConfig& cfg, std::ostream& diag);

}  // namespace disscat
