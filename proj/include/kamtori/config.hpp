#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kamtori/io.hpp"
#include "kamtori/kam_driver.hpp"

namespace kamtori {

/// Initial torus: a flat circle theta -> (theta, y0), or coefficients from a file.
struct TorusSpec {
  std::string kind = "circle";  ///< "circle" or "file"
  std::vector<double> y0;       ///< circle only; defaults to omega
  std::string path;             ///< file only, resolved against the config directory

  bool operator==(const TorusSpec&) const = default;
};

/// Everything a run needs. Paths are stored resolved, so the echo re-parses anywhere.
struct RunConfig {
  std::string hamiltonian_path;  ///< empty when the model is given inline
  Json hamiltonian_inline;       ///< null unless the model is given inline
  TorusSpec torus;
  std::vector<double> omega;
  double gamma = 0.0;
  double sigma = 0.0;  ///< defaults to n + 0.1
  long horizon = 1000;
  double rho = 0.1;
  double r = 0.05;
  int l = 4;
  int trunc = 32;
  double tol = 1e-11;
  int max_iter = 20;
  std::optional<double> floor_tol;
  bool adapt_trunc = false;
  int max_trunc = 256;
  double target_error = 1e-7;
  std::string lambda = kDefaultLambda;
  std::string gate = "strict";         ///< "strict" or "report"
  std::string cascade_start = "k0";    ///< "k0" or "first"
  int gap_envelope_class = 1;
  std::vector<int> base_degrees;       ///< empty: 64 per axis
  std::vector<int> growth;             ///< empty: 2 per axis
  int smoothing_count = 4;
  int max_degree = 1 << 20;
  int norm_grid = 64;
  double norm_radius_factor = 2.0;
  std::string out = "run";
  unsigned long seed = 0;

  int n() const { return static_cast<int>(omega.size()); }
  bool operator==(const RunConfig&) const = default;
};

/// Builds a config from JSON. Relative paths resolve against base_dir. Every
/// problem found (missing key, wrong type, unknown key, range violation,
/// unreadable file) is collected into one ConfigError.
RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir);
RunConfig parse_config(const std::filesystem::path& path);

/// Range and consistency checks, one message per violation.
std::vector<std::string> validate(const RunConfig& cfg);

/// Full echo with every default spelled out.
Json config_to_json(const RunConfig& cfg);

HamiltonianModel load_model(const RunConfig& cfg);
Torus initial_torus(const RunConfig& cfg);
SolveOptions solve_options(const RunConfig& cfg);
KamParams kam_params(const RunConfig& cfg);

}  // namespace kamtori
