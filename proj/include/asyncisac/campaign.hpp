#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asyncisac/array_model.hpp"
#include "asyncisac/config.hpp"

namespace asyncisac {

/// SNR_dB = 10 log10(P_d M / sigma2): dynamic-path array SNR with |a|^2 = M.
double sigma2_from_snr(double snr_db, double dynamic_power, int antennas);
double snr_from_sigma2(double sigma2, double dynamic_power, int antennas);

struct TrialResult {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;        ///< stage-tagged message when failed
  double theta_err2 = 0.0;
  double d_mse = 0.0;         ///< mean over snapshots of |d_hat - d|^2
  double phi_mse = 0.0;
  bool dominant_eigengap = false;
  int selected_peak = 0;
};

/// One CSV row: snr_db, bound_name_or_metric, value, stderr, trials, seed.
struct ResultRow {
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
  std::optional<double> stderr_of_value;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  bool operator==(const ResultRow&) const = default;
};

struct CampaignResult {
  std::vector<ResultRow> rows;
  std::vector<std::vector<TrialResult>> trials;  ///< per SNR point, estimator mode only
  Eigen::VectorXcd h_s;
};

/// The static channel used by a campaign: cfg's fixed vector, or one draw from stream (seed, 0).
Eigen::VectorXcd campaign_static_channel(const CampaignConfig& cfg);

/// Seed of trial `trial` at SNR index `snr_index`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t snr_index, std::int64_t trial);

/// Draws d (zero-mean) and phi_o (uniform of width cfg.phase_spread, mean removed) from rng.
ScenarioParams draw_trial_scenario(const CampaignConfig& cfg, const Eigen::VectorXcd& h_s, double sigma2, Rng& rng);

/// One estimator trial. Never throws for numerical failures; they are recorded in the result.
TrialResult run_trial(const CampaignConfig& cfg, const Eigen::VectorXcd& h_s, double sigma2,
                      std::size_t snr_index, std::int64_t trial);

/// Bounds (and, in estimator mode, estimator MSEs) for every SNR point. Output depends only on
/// cfg; `threads` changes speed, never bytes. Throws NumericalError when more than 5% of the
/// trials at any SNR point fail. cfg.mode == verify is rejected (see run_verification).
CampaignResult run_campaign(const CampaignConfig& cfg, int threads = 1);

}  // namespace asyncisac
