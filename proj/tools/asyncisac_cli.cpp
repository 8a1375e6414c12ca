#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "asyncisac/bounds.hpp"
#include "asyncisac/campaign.hpp"
#include "asyncisac/config.hpp"
#include "asyncisac/csv.hpp"
#include "asyncisac/errors.hpp"
#include "asyncisac/estimator.hpp"
#include "asyncisac/fisher.hpp"
#include "asyncisac/verify.hpp"

using namespace asyncisac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "YAML campaign configuration")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  sub->add_option("--seed", c.seed, "override the master seed");
  sub->add_option("--out", c.out, "output path ('-' or empty for stdout)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv"}));
}

CampaignConfig load(const Common& c) {
  CampaignConfig cfg = parse_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  std::cerr << "# resolved configuration\n" << emit_config(cfg);
  return cfg;
}

// Writes through `fn` to cfg.output, or stdout when it is empty or "-".
template <typename Fn>
void write_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ostringstream buf;
  fn(buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << buf.str();
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

void require_index(std::size_t index, const CampaignConfig& cfg) {
  if (index >= cfg.snr_db.size()) throw DomainError("--snr-index is outside snr_db");
}

int cmd_fim(const Common& c, const std::string& matrix, std::size_t snr_index) {
  const CampaignConfig cfg = load(c);
  require_index(snr_index, cfg);
  const ArrayGeometry geom(cfg.antennas, cfg.spacing);
  const double sigma2 = sigma2_from_snr(cfg.snr_db[snr_index], cfg.dynamic_power, cfg.antennas);
  Rng rng = make_rng(trial_seed(cfg.seed, snr_index, 0));
  const ScenarioParams p = draw_trial_scenario(cfg, campaign_static_channel(cfg), sigma2, rng);

  Eigen::MatrixXd m;
  if (matrix == "fim") {
    m = joint_fim(geom, p).data;
  } else if (matrix == "oracle") {
    m = fim_numeric_oracle(geom, p).data;
  } else if (matrix == "reordered") {
    m = reordered_blocks(geom, p).dense();
  } else {
    m = constrained_crb(joint_fim(geom, p), constraint_basis(cfg.antennas, cfg.snapshots));
  }
  write_output(cfg.output, [&](std::ostream& os) { write_matrix_csv(os, m); });
  return kExitOk;
}

int cmd_campaign(const Common& c, std::optional<CampaignMode> force) {
  CampaignConfig cfg = load(c);
  if (force) cfg.mode = *force;
  if (cfg.mode == CampaignMode::verify) {
    const std::vector<CheckResult> checks = run_verification(cfg.seed);
    write_output(cfg.output, [&](std::ostream& os) { write_check_csv(os, checks); });
    for (const CheckResult& r : checks) {
      if (!r.passed) return kExitVerification;
    }
    return kExitOk;
  }
  const CampaignResult res = run_campaign(cfg, c.threads);
  if (cfg.output.empty() || cfg.output == "-") {
    write_csv(std::cout, res.rows);
  } else {
    emit_csv(res.rows, cfg.output);
  }
  return kExitOk;
}

int cmd_estimate(const Common& c, const std::string& csi_path, double spacing, std::size_t snr_index,
                 const std::string& save_csi) {
  CsiBlock h;
  ArrayGeometry geom;
  EstimatorConfig est;
  std::string out_path = c.out;
  if (!csi_path.empty()) {
    h = read_csi_csv(csi_path);
    if (!c.config.empty()) {
      const CampaignConfig cfg = load(c);
      spacing = cfg.spacing;
      est = cfg.estimator;
      out_path = cfg.output;
    }
    geom = ArrayGeometry(h.antennas(), spacing);
  } else {
    if (c.config.empty()) throw CLI::ValidationError("estimate needs --csi or --config");
    const CampaignConfig cfg = load(c);
    require_index(snr_index, cfg);
    geom = ArrayGeometry(cfg.antennas, cfg.spacing);
    est = cfg.estimator;
    out_path = cfg.output;
    const double sigma2 = sigma2_from_snr(cfg.snr_db[snr_index], cfg.dynamic_power, cfg.antennas);
    Rng rng = make_rng(trial_seed(cfg.seed, snr_index, 0));
    const ScenarioParams p = draw_trial_scenario(cfg, campaign_static_channel(cfg), sigma2, rng);
    h = synthesize_csi(geom, p, rng);
  }
  if (!save_csi.empty()) write_output(save_csi, [&](std::ostream& os) { write_csi_csv(os, h); });

  const EstimateResult r = run_estimator(h, geom, est);
  write_output(out_path, [&](std::ostream& os) {
    os << std::setprecision(17) << "quantity,index,real,imag\n";
    os << "theta_hat,0," << r.theta_hat << ",0\n";
    for (Eigen::Index t = 0; t < r.phi_hat.size(); ++t) os << "phi_hat," << t << ',' << r.phi_hat(t) << ",0\n";
    for (Eigen::Index t = 0; t < r.d_hat.size(); ++t) {
      os << "d_hat," << t << ',' << r.d_hat(t).real() << ',' << r.d_hat(t).imag() << '\n';
    }
    os << "eigengap_ratio,0," << r.diagnostics.eigengap_ratio << ",0\n";
    os << "selected_peak,0," << r.diagnostics.selected_peak << ",0\n";
  });
  return kExitOk;
}

int cmd_verify(const Common& c) {
  std::uint64_t seed = 1;
  std::string out = c.out;
  if (!c.config.empty()) {
    const CampaignConfig cfg = load(c);
    seed = cfg.seed;
    out = cfg.output;
  }
  if (c.seed) seed = *c.seed;
  const std::vector<CheckResult> checks = run_verification(seed);
  write_output(out, [&](std::ostream& os) { write_check_csv(os, checks); });
  bool ok = true;
  for (const CheckResult& r : checks) {
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << " worst=" << r.worst << " tol=" << r.tolerance << " "
              << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds, estimator and Monte Carlo campaigns for asynchronous passive CSI sensing"};
  app.require_subcommand(1);

  Common fim_opts, bounds_opts, est_opts, mc_opts, verify_opts;
  std::string matrix = "fim";
  std::size_t snr_index = 0;
  std::string csi_path, save_csi;
  double spacing = 0.5;

  auto* fim = app.add_subcommand("fim", "dump the FIM or a derived matrix for one scenario");
  add_common(fim, fim_opts, true);
  fim->add_option("--matrix", matrix, "fim | oracle | reordered | crb")
      ->check(CLI::IsMember({"fim", "oracle", "reordered", "crb"}));
  fim->add_option("--snr-index", snr_index, "SNR grid point");

  auto* bounds = app.add_subcommand("bounds", "closed-form and Monte Carlo bounds over the SNR grid");
  add_common(bounds, bounds_opts, true);

  auto* estimate = app.add_subcommand("estimate", "run the estimator on a CSI file or one synthesized block");
  add_common(estimate, est_opts, false);
  estimate->add_option("--csi", csi_path, "CSI file (M rows, 2T columns)")->check(CLI::ExistingFile);
  estimate->add_option("--spacing", spacing, "element spacing in wavelengths when no config is given");
  estimate->add_option("--snr-index", snr_index, "SNR grid point for synthesized CSI");
  estimate->add_option("--save-csi", save_csi, "also write the CSI block used");

  auto* mc = app.add_subcommand("montecarlo", "full campaign as configured");
  add_common(mc, mc_opts, true);

  auto* verify = app.add_subcommand("verify", "all property suites");
  add_common(verify, verify_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fim->parsed()) return cmd_fim(fim_opts, matrix, snr_index);
    if (bounds->parsed()) return cmd_campaign(bounds_opts, CampaignMode::bounds);
    if (estimate->parsed()) return cmd_estimate(est_opts, csi_path, spacing, snr_index, save_csi);
    if (mc->parsed()) return cmd_campaign(mc_opts, std::nullopt);
    if (verify->parsed()) return cmd_verify(verify_opts);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
