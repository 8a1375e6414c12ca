#include "asyncisac/bounds.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "asyncisac/errors.hpp"
#include "asyncisac/fisher.hpp"
#include "asyncisac/statistics.hpp"

namespace asyncisac {

namespace {

using cd = std::complex<double>;

// vec(x y^T - y x^T), column-major.
Eigen::VectorXcd wedge(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  const Eigen::MatrixXcd w = x * y.transpose() - y * x.transpose();
  return w.reshaped();
}

bool close(double direct, double other, double scale) {
  return std::abs(direct - other) <= 1e-10 * scale;
}

ScenarioParams bound_scenario(double theta, const Eigen::VectorXcd& h_s, double sigma2, Eigen::VectorXcd d) {
  ScenarioParams p;
  p.theta_d = theta;
  p.h_s = h_s;
  p.phi_o = Eigen::VectorXd::Zero(d.size());
  p.d = std::move(d);
  p.sigma2 = sigma2;
  return p;
}

void check_mc(const MonteCarloOptions& mc) {
  if (mc.trials < 1) throw DomainError("Monte Carlo needs at least one trial");
}

}  // namespace

std::string to_string(BoundMethod m) {
  return m == BoundMethod::closed_form ? "closed-form" : "monte-carlo";
}

RhoDecomposition rho_theta(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s) {
  if (h_s.size() != geom.antennas) throw DimensionError("h_s length does not match the array");
  const Eigen::VectorXcd a = steering_vector(geom, theta);
  const Eigen::VectorXcd b = steering_derivative(geom, theta);
  const double aa = a.squaredNorm();
  const double bb = b.squaredNorm();
  const double hh = h_s.squaredNorm();
  const cd a_b = a.dot(b);
  const cd a_h = a.dot(h_s);
  const cd b_h = b.dot(h_s);

  RhoDecomposition r;
  r.gamma = aa * bb - std::norm(a_b);
  r.delta = aa * hh - std::norm(a_h);
  r.xi = std::norm(std::conj(a_b) * a_h - aa * b_h);

  const Eigen::VectorXcd w_ab = wedge(a, b);
  const Eigen::VectorXcd w_ah = wedge(a, h_s);
  r.gamma_wedge = 0.5 * w_ab.squaredNorm();
  r.delta_wedge = 0.5 * w_ah.squaredNorm();
  r.xi_wedge = 0.25 * std::norm(w_ab.dot(w_ah));

  // Scale of |b|^2 at broadside; cos(theta) shrinks it towards endfire.
  const double m = geom.antennas;
  const double bb_ref = std::pow(2.0 * std::numbers::pi * geom.spacing, 2) * (m - 1) * m * (2 * m - 1) / 6.0;
  if (!(r.gamma > 1e-12 * aa * bb_ref)) throw DegenerateBoundError("Gamma vanishes: theta is not resolvable");
  if (!(r.delta > 1e-12 * aa * hh)) throw CollinearityError("static channel is collinear with a(theta)");
  if (!close(r.gamma, r.gamma_wedge, aa * bb) || !close(r.delta, r.delta_wedge, aa * hh) ||
      !close(r.xi, r.xi_wedge, r.gamma * r.delta)) {
    throw NumericalError("direct and Binet-Cauchy evaluations of Gamma/Delta/Xi disagree");
  }
  r.rho = 1.0 / (1.0 - r.xi / (2.0 * r.gamma * r.delta));
  return r;
}

BoundReport hrcrb_theta(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s, double sigma2,
                        int snapshots, const GainDistribution& dist, BoundMethod mode,
                        const MonteCarloOptions& mc) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  if (snapshots < 1) throw DimensionError("need at least one snapshot");
  BoundReport out;
  out.method = mode;
  if (mode == BoundMethod::closed_form) {
    const RhoDecomposition r = rho_theta(geom, theta, h_s);
    const double info = snapshots * dist.power * (r.gamma - r.xi / (2.0 * r.delta)) / (sigma2 * geom.antennas);
    if (!(info > 0.0)) throw DegenerateBoundError("expected AoA information is not positive");
    out.value = 1.0 / info;
    return out;
  }

  check_mc(mc);
  if (snapshots < 2) throw DimensionError("Monte Carlo gain draws need at least 2 snapshots");
  std::vector<double> info(static_cast<std::size_t>(mc.trials));
  parallel_for(mc.trials, mc.threads, [&](std::int64_t i) {
    Rng rng = make_rng(derive_seed(mc.seed, {static_cast<std::uint64_t>(i)}));
    const ScenarioParams p =
        bound_scenario(theta, h_s, sigma2, draw_dynamic_gains(snapshots, dist, rng, GainDraw::unconstrained));
    info[static_cast<std::size_t>(i)] = efim_theta_closed(geom, p);
  });
  const SampleSummary s = summarize(info);
  if (!(s.mean > 0.0)) throw DegenerateBoundError("mean AoA information is not positive");
  out.value = 1.0 / s.mean;
  out.trials = mc.trials;
  out.stderr_of_value = s.stderr_of_mean / (s.mean * s.mean);
  return out;
}

BoundReport ahrcrb_cgs(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s, double sigma2,
                       const GainDistribution& dist) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  if (h_s.size() != geom.antennas) throw DimensionError("h_s length does not match the array");
  const double M = geom.antennas;
  const Eigen::VectorXcd a = steering_vector(geom, theta);
  const double delta = static_separation(a, h_s);
  BoundReport out;
  out.value = 2.0 * sigma2 / M + (sigma2 / M) * (std::norm(a.dot(h_s)) + M * M * dist.power) / delta;
  return out;
}

BoundReport finite_t_hrcrb_cgs(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s,
                               double sigma2, int snapshots, const GainDistribution& dist,
                               const MonteCarloOptions& mc) {
  if (snapshots < 2) throw DimensionError("finite-T CGS bound needs T >= 2");
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  check_mc(mc);
  static_separation(steering_vector(geom, theta), h_s);

  std::vector<double> per_trial(static_cast<std::size_t>(mc.trials));
  std::vector<char> kept(static_cast<std::size_t>(mc.trials), 0);
  parallel_for(mc.trials, mc.threads, [&](std::int64_t i) {
    Rng rng = make_rng(derive_seed(mc.seed, {static_cast<std::uint64_t>(i)}));
    const ScenarioParams p =
        bound_scenario(theta, h_s, sigma2, draw_dynamic_gains(snapshots, dist, rng, GainDraw::unconstrained));
    try {
      const std::vector<Eigen::Matrix3d> efim = efim_psi_all(geom, p);
      CompensatedSum trace;
      for (const Eigen::Matrix3d& j : efim) {
        Eigen::Matrix3d inv;
        bool ok = false;
        j.computeInverseWithCheck(inv, ok, 0.0);
        if (!ok) return;
        trace.add(inv(0, 0) + inv(1, 1));
      }
      per_trial[static_cast<std::size_t>(i)] = trace.value() / snapshots;
      kept[static_cast<std::size_t>(i)] = 1;
    } catch (const DegenerateBoundError&) {
      // counted as discarded below
    }
  });

  std::vector<double> values;
  values.reserve(per_trial.size());
  for (std::size_t i = 0; i < per_trial.size(); ++i) {
    if (kept[i]) values.push_back(per_trial[i]);
  }
  BoundReport out;
  out.method = BoundMethod::monte_carlo;
  out.trials = mc.trials;
  out.discarded = mc.trials - static_cast<std::int64_t>(values.size());
  if (out.discard_rate() > 1e-3) {
    throw DegenerateBoundError("finite-T CGS bound discarded " + std::to_string(out.discarded) + " of " +
                               std::to_string(out.trials) + " trials");
  }
  const SampleSummary s = summarize(values);
  out.value = s.mean;
  out.stderr_of_value = s.stderr_of_mean;
  return out;
}

bool ChainReport::passed(double ordering_slack, double identity_tol) const {
  return worst_jensen_slack >= ordering_slack && worst_monotone_slack >= ordering_slack &&
         worst_hrcrb_slack >= ordering_slack && worst_scalar_jensen_slack >= ordering_slack &&
         worst_schur_identity_error <= identity_tol;
}

ChainReport verify_hrcrb_chain(const ScenarioFamily& family, int scenarios, int draws, std::uint64_t seed) {
  if (scenarios < 1 || draws < 2) throw DomainError("chain verification needs scenarios >= 1 and draws >= 2");
  ChainReport report;
  report.worst_jensen_slack = report.worst_monotone_slack = report.worst_hrcrb_slack =
      report.worst_scalar_jensen_slack = std::numeric_limits<double>::infinity();

  // (larger - smaller) / |larger|
  auto slack = [](double smaller, double larger) { return (larger - smaller) / std::abs(larger); };

  for (int s = 0; s < scenarios; ++s) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    std::uniform_int_distribution<int> pick_m(family.min_antennas, family.max_antennas);
    std::uniform_int_distribution<int> pick_t(family.min_snapshots, family.max_snapshots);
    std::uniform_real_distribution<double> pick_theta(-family.max_abs_theta, family.max_abs_theta);
    std::uniform_real_distribution<double> pick_sigma2(family.min_sigma2, family.max_sigma2);
    const ArrayGeometry geom(pick_m(rng));
    const int T = pick_t(rng);
    const double theta = pick_theta(rng);
    const double sigma2 = pick_sigma2(rng);
    const Eigen::VectorXcd h_s = complex_gaussian_matrix(rng, geom.antennas, 1, family.static_power / 2.0);
    const GainDistribution dist(family.dynamic_power);

    const int n = 1 + 3 * T;
    Eigen::MatrixXd sum_j = Eigen::MatrixXd::Zero(n, n);
    CompensatedSum sum_inv_tt;
    CompensatedSum sum_equ;
    CompensatedSum sum_inv_equ;
    for (int k = 0; k < draws; ++k) {
      const ScenarioParams p = bound_scenario(theta, h_s, sigma2,
                                              draw_dynamic_gains(T, dist, rng, GainDraw::unconstrained));
      const Eigen::MatrixXd J = reordered_blocks(geom, p).dense();
      sum_j += J;
      const Eigen::MatrixXd J_inv = J.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
      sum_inv_tt.add(J_inv(0, 0));
      const double equ = efim_theta_schur(geom, p);
      sum_equ.add(equ);
      sum_inv_equ.add(1.0 / equ);
    }
    const Eigen::MatrixXd mean_j = sum_j / draws;
    const double mean_inv_tt = sum_inv_tt.value() / draws;
    const double mean_equ = sum_equ.value() / draws;
    const double mean_inv_equ = sum_inv_equ.value() / draws;

    // [E{J}^{-1}]_tt by dense inversion, and via the Schur complement of E{J}.
    const double inv_of_mean_tt = mean_j.ldlt().solve(Eigen::MatrixXd::Identity(n, n))(0, 0);
    const Eigen::MatrixXd j_bb = mean_j.bottomRightCorner(n - 1, n - 1);
    const Eigen::VectorXd j_ab = mean_j.row(0).tail(n - 1).transpose();
    const double schur = mean_j(0, 0) - j_ab.dot(j_bb.ldlt().solve(j_ab));
    const double schur_tt = 1.0 / schur;

    report.worst_schur_identity_error =
        std::max(report.worst_schur_identity_error, std::abs(schur_tt - inv_of_mean_tt) / std::abs(inv_of_mean_tt));
    report.worst_jensen_slack = std::min(report.worst_jensen_slack, slack(inv_of_mean_tt, mean_inv_tt));
    report.worst_monotone_slack = std::min(report.worst_monotone_slack, slack(1.0 / mean_j(0, 0), inv_of_mean_tt));
    report.worst_hrcrb_slack = std::min(report.worst_hrcrb_slack, slack(inv_of_mean_tt, 1.0 / mean_equ));
    report.worst_scalar_jensen_slack = std::min(report.worst_scalar_jensen_slack, slack(1.0 / mean_equ, mean_inv_equ));
    report.scenarios += 1;
    report.draws += draws;
  }
  return report;
}

void write_bound_csv_header(std::ostream& out) { out << "scenario_id,bound,value,method,trials,stderr\n"; }

void write_bound_csv_row(std::ostream& out, const std::string& scenario_id, const std::string& bound,
                         const BoundReport& report) {
  std::ostringstream row;
  row << std::setprecision(17) << scenario_id << ',' << bound << ',' << report.value << ','
      << to_string(report.method) << ',' << report.trials << ',';
  if (report.stderr_of_value) row << *report.stderr_of_value;
  row << '\n';
  out << row.str();
}

}  // namespace asyncisac
