#include "asyncisac/campaign.hpp"

#include <cmath>

#include "asyncisac/array_model.hpp"
#include "asyncisac/bounds.hpp"
#include "asyncisac/errors.hpp"
#include "asyncisac/estimator.hpp"
#include "asyncisac/statistics.hpp"

namespace asyncisac {

namespace {

// Stream keys under the master seed.
constexpr std::uint64_t kStaticStream = 0;
constexpr std::uint64_t kTrialStream = 1;
constexpr std::uint64_t kHrcrbStream = 2;
constexpr std::uint64_t kFiniteTStream = 3;

constexpr double kMaxFailureRate = 0.05;

ResultRow mc_row(double snr, const char* name, const SampleSummary& s, std::uint64_t seed) {
  return {snr, name, s.mean, s.stderr_of_mean, s.count, seed};
}

ResultRow bound_row(double snr, const char* name, const BoundReport& r, std::uint64_t seed) {
  return {snr, name, r.value, r.stderr_of_value, r.trials, seed};
}

}  // namespace

double sigma2_from_snr(double snr_db, double dynamic_power, int antennas) {
  if (!std::isfinite(snr_db)) throw DomainError("SNR must be finite");
  return dynamic_power * antennas / std::pow(10.0, snr_db / 10.0);
}

double snr_from_sigma2(double sigma2, double dynamic_power, int antennas) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  return 10.0 * std::log10(dynamic_power * antennas / sigma2);
}

Eigen::VectorXcd campaign_static_channel(const CampaignConfig& cfg) {
  if (cfg.static_channel.fixed) {
    Eigen::VectorXcd h(static_cast<Eigen::Index>(cfg.static_channel.values.size()));
    for (std::size_t i = 0; i < cfg.static_channel.values.size(); ++i) {
      h(static_cast<Eigen::Index>(i)) = cfg.static_channel.values[i];
    }
    return h;
  }
  Rng rng = make_rng(derive_seed(cfg.seed, {kStaticStream}));
  return complex_gaussian_matrix(rng, cfg.antennas, 1, cfg.static_channel.power / 2.0);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t snr_index, std::int64_t trial) {
  return derive_seed(master, {kTrialStream, snr_index, static_cast<std::uint64_t>(trial)});
}

ScenarioParams draw_trial_scenario(const CampaignConfig& cfg, const Eigen::VectorXcd& h_s, double sigma2, Rng& rng) {
  ScenarioParams p;
  p.theta_d = cfg.theta_d;
  p.h_s = h_s;
  p.sigma2 = sigma2;
  p.d = draw_dynamic_gains(cfg.snapshots, GainDistribution(cfg.dynamic_power), rng, GainDraw::zero_mean);
  std::uniform_real_distribution<double> phase(-cfg.phase_spread / 2, cfg.phase_spread / 2);
  p.phi_o.resize(cfg.snapshots);
  for (int t = 0; t < cfg.snapshots; ++t) p.phi_o(t) = phase(rng);
  p.phi_o.array() -= p.phi_o.mean();
  return p;
}

TrialResult run_trial(const CampaignConfig& cfg, const Eigen::VectorXcd& h_s, double sigma2,
                      std::size_t snr_index, std::int64_t trial) {
  const ArrayGeometry geom(cfg.antennas, cfg.spacing);
  TrialResult r;
  r.trial = trial;
  r.seed = trial_seed(cfg.seed, snr_index, trial);
  Rng rng = make_rng(r.seed);

  const ScenarioParams p = draw_trial_scenario(cfg, h_s, sigma2, rng);
  const CsiBlock h = synthesize_csi(geom, p, rng);

  try {
    const EstimateResult est = run_estimator(h, geom, cfg.estimator);
    r.theta_err2 = (est.theta_hat - p.theta_d) * (est.theta_hat - p.theta_d);
    r.d_mse = (est.d_hat - p.d).squaredNorm() / cfg.snapshots;
    r.phi_mse = (est.phi_hat - p.phi_o).squaredNorm() / cfg.snapshots;
    r.dominant_eigengap = est.diagnostics.dominant_eigengap;
    r.selected_peak = est.diagnostics.selected_peak;
  } catch (const NumericalError& e) {
    r.failed = true;
    r.failure = e.what();
  }
  return r;
}

CampaignResult run_campaign(const CampaignConfig& cfg, int threads) {
  if (cfg.mode == CampaignMode::verify) throw DomainError("verify mode is handled by run_verification");
  validate_config(cfg);
  const ArrayGeometry geom(cfg.antennas, cfg.spacing);
  const GainDistribution dist(cfg.dynamic_power);

  CampaignResult out;
  out.h_s = campaign_static_channel(cfg);
  const std::uint64_t seed = cfg.seed;

  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double snr = cfg.snr_db[s];
    const double sigma2 = sigma2_from_snr(snr, cfg.dynamic_power, cfg.antennas);

    const BoundReport hrcrb = hrcrb_theta(geom, cfg.theta_d, out.h_s, sigma2, cfg.snapshots, dist,
                                          BoundMethod::closed_form);
    out.rows.push_back(bound_row(snr, "hrcrb_theta", hrcrb, seed));
    out.rows.push_back(bound_row(snr, "ahrcrb_d", ahrcrb_cgs(geom, cfg.theta_d, out.h_s, sigma2, dist), seed));

    if (cfg.mode == CampaignMode::bounds) {
      const MonteCarloOptions mc{cfg.bound_trials, derive_seed(seed, {kHrcrbStream, s}), threads};
      out.rows.push_back(bound_row(snr, "hrcrb_theta_mc",
                                   hrcrb_theta(geom, cfg.theta_d, out.h_s, sigma2, cfg.snapshots, dist,
                                               BoundMethod::monte_carlo, mc),
                                   seed));
    }
    if (cfg.finite_t_bound) {
      const MonteCarloOptions mc{cfg.bound_trials, derive_seed(seed, {kFiniteTStream, s}), threads};
      out.rows.push_back(bound_row(
          snr, "finite_t_hrcrb_d",
          finite_t_hrcrb_cgs(geom, cfg.theta_d, out.h_s, sigma2, cfg.snapshots, dist, mc), seed));
    }
    if (cfg.mode != CampaignMode::estimator) continue;

    std::vector<TrialResult> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, threads, [&](std::int64_t i) {
      trials[static_cast<std::size_t>(i)] = run_trial(cfg, out.h_s, sigma2, s, i);
    });

    std::vector<double> theta_err, d_err, phi_err;
    for (const TrialResult& t : trials) {
      if (t.failed) continue;
      theta_err.push_back(t.theta_err2);
      d_err.push_back(t.d_mse);
      phi_err.push_back(t.phi_mse);
    }
    const std::int64_t failures = cfg.trials - static_cast<std::int64_t>(theta_err.size());
    const double failure_rate = static_cast<double>(failures) / static_cast<double>(cfg.trials);
    if (failure_rate > kMaxFailureRate) {
      std::string first;
      for (const TrialResult& t : trials) {
        if (t.failed) {
          first = t.failure;
          break;
        }
      }
      throw NumericalError("campaign aborted at " + std::to_string(snr) + " dB: " + std::to_string(failures) +
                           " of " + std::to_string(cfg.trials) + " trials failed (first: " + first + ")");
    }
    out.rows.push_back(mc_row(snr, "mse_theta", summarize(theta_err), seed));
    out.rows.push_back(mc_row(snr, "mse_d", summarize(d_err), seed));
    out.rows.push_back(mc_row(snr, "mse_phi", summarize(phi_err), seed));
    out.rows.push_back({snr, "failure_rate", failure_rate, std::nullopt, cfg.trials, seed});
    out.trials.push_back(std::move(trials));
  }
  return out;
}

}  // namespace asyncisac
