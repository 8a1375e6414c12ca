#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asyncisac/bounds.hpp"

namespace asyncisac {

/// Outcome of one property suite: `worst` is the worst observed error (or slack) and `tolerance`
/// the threshold it was judged against.
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Closed-form joint FIM vs the finite-difference oracle on random scenarios (M <= 6, T <= 8).
/// Entry error is |J - J_oracle| / max(|J_oracle|, floor * sqrt(J_ii J_jj)); the floor keeps
/// structurally tiny entries from dividing by rounding noise.
CheckResult check_fim_oracle(int scenarios, std::uint64_t seed, double rel_tol = 1e-6, double floor = 1e-4);

/// efim_theta_schur vs efim_theta_closed vs 1/[J^-1]_tt, and the residual of psi_block_inverse.
CheckResult check_schur_consistency(int scenarios, std::uint64_t seed, double rel_tol = 1e-10);

/// 1 <= rho <= 2 and Xi <= Gamma Delta on random (M in [2, 16], theta, h_s).
CheckResult check_rho_bounds(int draws, std::uint64_t seed, double rel_slack = 1e-12);

/// rho on inputs constructed so that Xi = 0 (M >= 3).
CheckResult check_rho_unity(int draws, std::uint64_t seed, double tol = 1e-10);

/// Orthonormality and constraint annihilation of U for each T, plus the T = 4 column pattern.
CheckResult check_constraint_basis(const std::vector<int>& snapshot_counts, double tol = 1e-12);

CheckResult check_hrcrb_chain(int scenarios, int draws, std::uint64_t seed, double slack = -1e-10,
                              double identity_tol = 1e-9);

/// Every suite at its default size.
std::vector<CheckResult> run_verification(std::uint64_t seed);

/// "check,passed,worst,tolerance,detail" rows.
void write_check_csv(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace asyncisac
