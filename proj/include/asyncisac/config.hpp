#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asyncisac/estimator.hpp"

namespace asyncisac {

enum class CampaignMode { bounds, estimator, verify };

std::string to_string(CampaignMode m);

/// Static channel: a fixed vector, or one draw per campaign with the given per-element power.
struct StaticChannelSpec {
  bool fixed = false;
  double power = 4.0;                           ///< E|h_m|^2 for the random draw
  std::vector<std::complex<double>> values;     ///< used when fixed

  bool operator==(const StaticChannelSpec&) const = default;
};

struct CampaignConfig {
  int antennas = 0;
  double spacing = 0.5;
  int snapshots = 0;
  std::vector<double> snr_db;
  double dynamic_power = 1.0;
  StaticChannelSpec static_channel;
  double theta_d = 0.35;
  double phase_spread = 1.5707963267948966;  ///< width of the uniform phase-offset draw
  std::int64_t trials = 0;
  std::int64_t bound_trials = 10000;        ///< Monte Carlo trials for the sampled bounds
  bool finite_t_bound = false;
  std::uint64_t seed = 1;
  std::string output;
  CampaignMode mode = CampaignMode::estimator;
  EstimatorConfig estimator;

  bool operator==(const CampaignConfig& o) const;
};

/// YAML schema (required keys marked *):
///
///   array: {antennas*, spacing}
///   snapshots*        snr_db* (list)     trials*
///   dynamic_power     theta_d            phase_spread
///   static_channel: {mode: random|fixed, power, values: [[re, im], ...]}
///   bound_trials      finite_t_bound     seed      output
///   mode: bounds|estimator|verify
///   estimator: {grid_points, refine, source_count}
///
/// Unknown keys and invalid values raise ConfigError naming the field and line.
CampaignConfig parse_config(const std::filesystem::path& path);
CampaignConfig parse_config_string(const std::string& text);

/// Fully resolved YAML (defaults included). parse_config_string(emit_config(c)) == c.
std::string emit_config(const CampaignConfig& cfg);

/// Throws ConfigError (line 0) when a resolved config is inconsistent.
void validate_config(const CampaignConfig& cfg);

}  // namespace asyncisac
