#pragma once

#include <vector>

#include <Eigen/Dense>

#include "asyncisac/array_model.hpp"

namespace asyncisac {

struct EstimatorConfig {
  int grid_points = 2048;  ///< AoA grid on (-pi/2, pi/2), cell centres
  bool refine = true;      ///< off-grid refinement of the selected peak
  int source_count = 2;    ///< signal subspace dimension

  /// Throws DomainError when grid_points < 64 or source_count < 1.
  void validate() const;
  double grid_step() const;
};

struct MusicDiagnostics {
  std::vector<double> peak_thetas;          ///< candidate peaks, strongest first
  std::vector<double> peak_values;          ///< pseudospectrum 1/|E_n^H a|^2 at each candidate
  std::vector<double> peak_beam_variance;   ///< temporal variance of |a(theta_i)^H h_t / M|
  int selected_peak = 0;
  Eigen::VectorXd eigenvalues;              ///< sample covariance eigenvalues, ascending
  double eigengap_ratio = 0.0;              ///< largest eigenvalue / mean noise eigenvalue
  bool dominant_eigengap = false;           ///< ratio above the white-noise threshold
};

struct MusicResult {
  double theta = 0.0;
  MusicDiagnostics diagnostics;
};

/// MUSIC AoA of the dynamic path. Needs T >= 3 and M >= 3; M <= source_count raises SubspaceError.
MusicResult music_aoa(const CsiBlock& h, const ArrayGeometry& geom, const EstimatorConfig& cfg = {});

/// White-noise threshold for the eigen-gap flag: 2 (1 + sqrt(M/T))^2.
double eigengap_threshold(int antennas, int snapshots);

/// A = a(theta)/|a(theta)|, B spans the orthogonal complement of a(theta) (columns 1..M-1 of the
/// left singular vectors of a).
struct Beamspace {
  Eigen::VectorXcd a;
  Eigen::MatrixXcd b;
};

Beamspace beamspace_basis(double theta_hat, const ArrayGeometry& geom);

/// Zero-mean unwrapped phase of w^H B^H H, with w the principal left singular vector of B^H H.
/// Throws DegenerateProjectionError when B^H H vanishes.
Eigen::VectorXd estimate_phase_offsets(const CsiBlock& h, const Eigen::MatrixXcd& b);

/// d_hat = A^H H diag(exp(-j phi_hat)) / |a(theta_hat)|, DC removed.
Eigen::VectorXcd estimate_cgs(const CsiBlock& h, const Eigen::VectorXcd& a, const Eigen::VectorXd& phi_hat,
                              const ArrayGeometry& geom);

struct EstimateResult {
  double theta_hat = 0.0;
  Eigen::VectorXd phi_hat;
  Eigen::VectorXcd d_hat;
  MusicDiagnostics diagnostics;
};

/// Full pipeline. Stage failures are rethrown as EstimatorError tagged
/// "music", "beamspace", "phase" or "cgs".
EstimateResult run_estimator(const CsiBlock& h, const ArrayGeometry& geom, const EstimatorConfig& cfg = {});

}  // namespace asyncisac
