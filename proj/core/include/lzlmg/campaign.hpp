#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lzlmg/fitting.hpp"
#include "lzlmg/model.hpp"
#include "lzlmg/ode.hpp"
#include "lzlmg/twa.hpp"

namespace lzlmg {

const char* version();

enum class Engine { Spectrum, MeanField, Twa, Quantum, Lz, Fit };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);  // throws ConfigError("engine", ...)

/// Either an explicit list or lo/hi/n with linear or log spacing.
struct GridSpec {
  std::vector<double> values;
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  bool log = true;
  bool is_list = false;

  static GridSpec list(std::vector<double> v);
  static GridSpec range(double lo, double hi, int n, bool log);
  std::vector<double> resolve() const;
};

struct MeanFieldConfig {
  double z0 = 0.98;
  double phi0 = 0.0;
  double window = 10.0;
  double sample_dt = 0.01;
  /// lambda / U values whose full trajectories are dumped.
  std::vector<double> trajectory_lambdas;
};

struct LzConfig {
  GridSpec Lambda = GridSpec::range(0.1, 5.0, 50, false);
  std::vector<double> theta{0.0, 0.7853981633974483, 1.5707963267948966};
  double T = 200.0;
  double lambda = 1.0;
};

enum class FitTransform { None, OnePlusY };

struct FitConfig {
  std::string input;  // CSV path, fit engine only
  std::string x_column = "lambda_over_U";
  std::string y_column = "z_final";
  FitTransform transform = FitTransform::OnePlusY;
  bool envelope = true;
  int bins = 40;
  FitWindow envelope_window{0.02, 0.5};
  FitWindow adiabatic{0.02, 0.3};
  FitWindow intermediate{0.3, 2.0};
  FitWindow diabatic{2.0, 10.0};
};

struct OutputConfig {
  std::string dir = "out";
  std::string prefix;  // defaults to the engine name
  bool dump_populations = false;
};

struct CampaignConfig {
  Engine engine = Engine::MeanField;
  ModelParams model{};
  GridSpec lambda_over_U = GridSpec::range(0.02, 10.0, 400, true);
  std::vector<int> spins{5, 12, 24, 50, 74};
  GridSpec times = GridSpec::range(-10.0, 10.0, 201, false);
  MeanFieldConfig meanfield{};
  NoiseModel noise{};
  LzConfig lz{};
  FitConfig fit{};
  OdeTolerances tol{};
  OdeTolerances quantum_tol{1e-14, 1e-15};
  OdeTolerances two_level_tol{1e-14, 1e-15};
  int norm_checks = 40;
  double norm_abort = 1e-8;
  std::uint64_t seed = 0;
  int workers = 1;
  OutputConfig output{};

  /// Canonical JSON; from_json(to_json()) reproduces the config exactly.
  nlohmann::json to_json() const;
  static CampaignConfig from_json(const nlohmann::json& j);

  /// FNV-1a digest of the canonical JSON without `workers` and `output`,
  /// which do not change results.
  std::string digest() const;

  /// Semantic checks beyond parsing. Throws ConfigError; returns warnings.
  std::vector<std::string> check() const;
};

CampaignConfig load_config(const std::filesystem::path& path);

struct ValidationReport {
  CampaignConfig config;
  std::vector<std::string> warnings;
  std::string resolved;  // pretty JSON with all defaults filled in
};

/// Parses and checks a config file without running anything.
ValidationReport validate_config(const std::filesystem::path& path);

struct CampaignResult {
  std::vector<std::filesystem::path> files;
  std::size_t n_points = 0;
  std::vector<std::string> failures;  // one entry per failed grid point
  nlohmann::json summary;
  bool partial() const { return !failures.empty(); }
};

/// Runs the configured engine and writes CSV files plus <prefix>_summary.json
/// into output.dir. Per-point failures are collected, not thrown.
CampaignResult run_campaign(const CampaignConfig& cfg);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int partial_failure = 2;
inline constexpr int runtime_error = 3;
}  // namespace exit_code

}  // namespace lzlmg
