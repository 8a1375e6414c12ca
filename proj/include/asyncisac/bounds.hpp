#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asyncisac/array_model.hpp"

namespace asyncisac {

/// Gamma, Delta, Xi and the asynchrony penalty rho for one (array, theta, h_s).
///
///   Gamma = |a|^2 |b|^2 - |a^H b|^2
///   Delta = |a|^2 |h|^2 - |a^H h|^2
///   Xi    = |(b^H a a^H - a^H a b^H) h|^2
///   rho   = 1 / (1 - Xi / (2 Gamma Delta))
///
/// The *_wedge fields hold the same quantities computed from the antisymmetric wedge vectors
/// L_xy = vec(x y^T - y x^T): Gamma = |L_ab|^2/2, Delta = |L_ah|^2/2, Xi = |L_ab^H L_ah|^2/4.
struct RhoDecomposition {
  double gamma = 0.0;
  double delta = 0.0;
  double xi = 0.0;
  double rho = 1.0;
  double gamma_wedge = 0.0;
  double delta_wedge = 0.0;
  double xi_wedge = 0.0;
};

/// Throws CollinearityError when Delta vanishes, DegenerateBoundError when Gamma does, and
/// NumericalError when the direct and wedge routes disagree beyond 1e-10 relative.
RhoDecomposition rho_theta(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s);

enum class BoundMethod { closed_form, monte_carlo };

std::string to_string(BoundMethod m);

struct BoundReport {
  double value = 0.0;
  BoundMethod method = BoundMethod::closed_form;
  std::int64_t trials = 0;
  std::optional<double> stderr_of_value;  ///< set iff method == monte_carlo
  std::int64_t discarded = 0;             ///< Monte Carlo trials dropped as singular

  double discard_rate() const { return trials > 0 ? static_cast<double>(discarded) / trials : 0.0; }
};

struct MonteCarloOptions {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// HRCRB of theta_d = 1 / E_d{J_theta^equ}.
///
/// closed_form: sigma2 M / (T P_d (Gamma - Xi / (2 Delta))) = rho sigma2 M / (T P_d Gamma).
/// monte_carlo: 1 / mean(J_theta^equ) over draws of unconstrained d, standard error by the delta
/// method. Throws DegenerateBoundError when the expected information is not positive.
BoundReport hrcrb_theta(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s, double sigma2,
                        int snapshots, const GainDistribution& dist, BoundMethod mode,
                        const MonteCarloOptions& mc = {});

/// Asymptotic per-snapshot bound on the CGS:
/// 2 sigma2/M + (sigma2/M) (|a^H h|^2 + M^2 P_d) / Delta.
BoundReport ahrcrb_cgs(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s, double sigma2,
                       const GainDistribution& dist);

/// (1/T) E_d{ sum_t Tr([J_psi_t^equ^{-1}]_{0:2,0:2}) } by Monte Carlo over unconstrained d.
/// Trials whose leave-one-out EFIM is not positive are discarded; a discard rate above 0.1%
/// raises DegenerateBoundError.
BoundReport finite_t_hrcrb_cgs(const ArrayGeometry& geom, double theta, const Eigen::VectorXcd& h_s,
                               double sigma2, int snapshots, const GainDistribution& dist,
                               const MonteCarloOptions& mc);

/// Random scenario family for the hybrid-bound inequality chain.
struct ScenarioFamily {
  int min_antennas = 2;
  int max_antennas = 6;
  int min_snapshots = 2;
  int max_snapshots = 5;
  double max_abs_theta = 1.2;
  double static_power = 1.0;
  double dynamic_power = 1.0;
  double min_sigma2 = 0.1;
  double max_sigma2 = 2.0;
};

/// Outcome of verify_hrcrb_chain. Orderings are reported as the worst signed slack
/// (larger - smaller) relative to the larger side; a value below -1e-10 is a violation.
struct ChainReport {
  std::int64_t scenarios = 0;
  std::int64_t draws = 0;
  double worst_jensen_slack = 0.0;         ///< [E{J}^-1]_tt <= [E{J^-1}]_tt
  double worst_monotone_slack = 0.0;       ///< E{J_tt}^-1 <= [E{J}^-1]_tt
  double worst_hrcrb_slack = 0.0;          ///< [E{J}^-1]_tt <= 1/E{J_equ} <= [E{J^-1}]_tt
  double worst_scalar_jensen_slack = 0.0;  ///< 1/E{x} <= E{1/x} on the per-draw EFIM
  double worst_schur_identity_error = 0.0; ///< relative error of the Schur-complement identity
  bool passed(double ordering_slack = -1e-10, double identity_tol = 1e-9) const;
};

/// Checks the expectation/inversion orderings of the hybrid bound on the theta coordinate of the
/// h_s-known FIM, over `scenarios` random members of `family` with `draws` gain draws each.
ChainReport verify_hrcrb_chain(const ScenarioFamily& family, int scenarios, int draws, std::uint64_t seed);

/// "scenario_id,bound,value,method,trials,stderr" rows.
void write_bound_csv_header(std::ostream& out);
void write_bound_csv_row(std::ostream& out, const std::string& scenario_id, const std::string& bound,
                         const BoundReport& report);

}  // namespace asyncisac
