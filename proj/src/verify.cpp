#include "asyncisac/verify.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "asyncisac/errors.hpp"
#include "asyncisac/fisher.hpp"

namespace asyncisac {

namespace {

constexpr double kPi = std::numbers::pi;

struct RandomScenario {
  ArrayGeometry geom;
  ScenarioParams params;
};

RandomScenario random_scenario(Rng& rng, int max_m, int min_t, int max_t) {
  std::uniform_int_distribution<int> pick_m(2, max_m);
  std::uniform_int_distribution<int> pick_t(min_t, max_t);
  std::uniform_real_distribution<double> pick_theta(-1.2, 1.2);
  std::uniform_real_distribution<double> pick_phase(-kPi, kPi);
  std::uniform_real_distribution<double> pick_sigma2(0.2, 2.0);
  RandomScenario s{ArrayGeometry(pick_m(rng)), {}};
  const int T = pick_t(rng);
  s.params.theta_d = pick_theta(rng);
  s.params.h_s = complex_gaussian_matrix(rng, s.geom.antennas, 1, 0.5);
  s.params.d = complex_gaussian_matrix(rng, T, 1, 0.5);
  s.params.phi_o.resize(T);
  for (int t = 0; t < T; ++t) s.params.phi_o(t) = pick_phase(rng);
  s.params.sigma2 = pick_sigma2(rng);
  return s;
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

std::string fmt(const char* label, double v) {
  std::ostringstream s;
  s << label << '=' << std::setprecision(3) << v;
  return s.str();
}

}  // namespace

CheckResult check_fim_oracle(int scenarios, std::uint64_t seed, double rel_tol, double floor) {
  CheckResult r{"fim_oracle", false, 0.0, rel_tol, ""};
  for (int k = 0; k < scenarios; ++k) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const RandomScenario s = random_scenario(rng, 6, 1, 8);
    const Eigen::MatrixXd j = joint_fim(s.geom, s.params).data;
    const Eigen::MatrixXd o = fim_numeric_oracle(s.geom, s.params).data;
    for (Eigen::Index a = 0; a < j.rows(); ++a) {
      for (Eigen::Index b = 0; b < j.cols(); ++b) {
        const double scale = std::max(std::abs(o(a, b)), floor * std::sqrt(o(a, a) * o(b, b)));
        r.worst = std::max(r.worst, std::abs(j(a, b) - o(a, b)) / scale);
      }
    }
  }
  r.passed = r.worst <= rel_tol;
  r.detail = std::to_string(scenarios) + " scenarios";
  return r;
}

CheckResult check_schur_consistency(int scenarios, std::uint64_t seed, double rel_tol) {
  CheckResult r{"schur_consistency", false, 0.0, rel_tol, ""};
  double worst_residual = 0.0;
  for (int k = 0; k < scenarios; ++k) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const RandomScenario s = random_scenario(rng, 8, 1, 8);
    const double schur = efim_theta_schur(s.geom, s.params);
    const double closed = efim_theta_closed(s.geom, s.params);
    const Eigen::MatrixXd j = reordered_blocks(s.geom, s.params).dense();
    const double dense = 1.0 / j.inverse()(0, 0);
    r.worst = std::max({r.worst, rel_err(closed, schur), rel_err(dense, schur)});
    for (int t = 0; t < s.params.snapshots(); ++t) {
      const Eigen::Matrix3d inv = psi_block_inverse(s.geom, s.params, t);
      const Eigen::Matrix3d block = reordered_blocks(s.geom, s.params).snapshots[static_cast<std::size_t>(t)].j_psi;
      worst_residual = std::max(worst_residual, (block * inv - Eigen::Matrix3d::Identity()).norm());
    }
  }
  r.passed = r.worst <= rel_tol && worst_residual <= rel_tol;
  r.worst = std::max(r.worst, worst_residual);
  r.detail = fmt("psi_inverse_residual", worst_residual);
  return r;
}

CheckResult check_rho_bounds(int draws, std::uint64_t seed, double rel_slack) {
  CheckResult r{"rho_bounds", false, 0.0, rel_slack, ""};
  double rho_min = std::numeric_limits<double>::infinity();
  double rho_max = -rho_min;
  double worst_xi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < draws; ++k) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    std::uniform_int_distribution<int> pick_m(2, 16);
    std::uniform_real_distribution<double> pick_theta(-1.5, 1.5);
    const ArrayGeometry geom(pick_m(rng));
    const double theta = pick_theta(rng);
    const Eigen::VectorXcd h = complex_gaussian_matrix(rng, geom.antennas, 1, 0.5);
    const RhoDecomposition d = rho_theta(geom, theta, h);
    rho_min = std::min(rho_min, d.rho);
    rho_max = std::max(rho_max, d.rho);
    worst_xi = std::max(worst_xi, (d.xi - d.gamma * d.delta) / (d.gamma * d.delta));
  }
  r.worst = std::max({1.0 - rho_min, rho_max - 2.0, worst_xi});
  r.passed = r.worst <= rel_slack;
  r.detail = fmt("rho_min", rho_min) + " " + fmt("rho_max", rho_max) + " " + fmt("xi_excess", worst_xi);
  return r;
}

CheckResult check_rho_unity(int draws, std::uint64_t seed, double tol) {
  CheckResult r{"rho_unity", false, 0.0, tol, ""};
  for (int k = 0; k < draws; ++k) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    std::uniform_int_distribution<int> pick_m(3, 16);
    std::uniform_real_distribution<double> pick_theta(-1.5, 1.5);
    const ArrayGeometry geom(pick_m(rng));
    const double theta = pick_theta(rng);
    const Eigen::VectorXcd a = steering_vector(geom, theta);
    const Eigen::VectorXcd b = steering_derivative(geom, theta);
    // Xi = |v^H h|^2 with v = |a|^2 b - (a^H b) a; take h orthogonal to v.
    const Eigen::VectorXcd v = a.squaredNorm() * b - a.dot(b) * a;
    const Eigen::VectorXcd g = complex_gaussian_matrix(rng, geom.antennas, 1, 0.5);
    const Eigen::VectorXcd h = g - v * (v.dot(g) / v.squaredNorm());
    r.worst = std::max(r.worst, std::abs(rho_theta(geom, theta, h).rho - 1.0));
  }
  r.passed = r.worst <= tol;
  r.detail = std::to_string(draws) + " constructed inputs";
  return r;
}

CheckResult check_constraint_basis(const std::vector<int>& snapshot_counts, double tol) {
  CheckResult r{"constraint_basis", false, 0.0, tol, ""};
  for (int T : snapshot_counts) {
    const Eigen::MatrixXd u = constraint_block(T);
    r.worst = std::max(r.worst, (u.transpose() * u - Eigen::MatrixXd::Identity(T - 1, T - 1)).cwiseAbs().maxCoeff());
    r.worst = std::max(r.worst, (Eigen::RowVectorXd::Ones(T) * u).cwiseAbs().maxCoeff());

    // Full basis: the zero-sum rows on Re d, Im d and phi_o are annihilated.
    const int M = 3;
    const ConstraintBasis basis = constraint_basis(M, T);
    const ParameterLayout layout(FimModel::joint, M, T);
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(3, layout.size());
    for (int t = 0; t < T; ++t) {
      rows(0, layout.d_real(t)) = 1.0;
      rows(1, layout.d_imag(t)) = 1.0;
      rows(2, layout.phase(t)) = 1.0;
    }
    r.worst = std::max(r.worst, (rows * basis.u).cwiseAbs().maxCoeff());
    const Eigen::Index n = basis.u.cols();
    r.worst = std::max(r.worst, (basis.u.transpose() * basis.u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  Eigen::Vector4d expected(-5.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5);
  const double pattern = (constraint_block(4).col(0) - expected).cwiseAbs().maxCoeff();
  r.worst = std::max(r.worst, pattern);
  r.passed = r.worst <= tol;
  r.detail = fmt("t4_column_error", pattern);
  return r;
}

CheckResult check_hrcrb_chain(int scenarios, int draws, std::uint64_t seed, double slack, double identity_tol) {
  const ChainReport rep = verify_hrcrb_chain(ScenarioFamily{}, scenarios, draws, seed);
  CheckResult r{"hrcrb_chain", rep.passed(slack, identity_tol), 0.0, slack, ""};
  r.worst = std::min({rep.worst_jensen_slack, rep.worst_monotone_slack, rep.worst_hrcrb_slack,
                      rep.worst_scalar_jensen_slack});
  r.detail = fmt("min_slack", r.worst) + " " + fmt("schur_identity_error", rep.worst_schur_identity_error) + " " +
             std::to_string(rep.draws) + " draws";
  return r;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto run = [&](std::uint64_t key, auto&& fn) {
    try {
      out.push_back(fn(derive_seed(seed, {key})));
    } catch (const Error& e) {
      out.push_back({"suite_" + std::to_string(key), false, 0.0, 0.0, e.what()});
    }
  };
  run(1, [](std::uint64_t s) { return check_fim_oracle(50, s); });
  run(2, [](std::uint64_t s) { return check_schur_consistency(100, s); });
  run(3, [](std::uint64_t s) { return check_rho_bounds(10000, s); });
  run(4, [](std::uint64_t s) { return check_rho_unity(1000, s); });
  run(5, [](std::uint64_t) { return check_constraint_basis({2, 3, 8, 64}); });
  run(6, [](std::uint64_t s) { return check_hrcrb_chain(100, 100, s); });
  return out;
}

void write_check_csv(std::ostream& out, const std::vector<CheckResult>& checks) {
  std::ostringstream buf;
  buf << std::setprecision(17) << "check,passed,worst,tolerance,detail\n";
  for (const CheckResult& c : checks) {
    buf << c.name << ',' << (c.passed ? 1 : 0) << ',' << c.worst << ',' << c.tolerance << ",\"" << c.detail
        << "\"\n";
  }
  out << buf.str();
}

}  // namespace asyncisac
