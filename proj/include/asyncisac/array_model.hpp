#pragma once

#include <Eigen/Dense>

#include "asyncisac/random.hpp"

namespace asyncisac {

/// Uniform linear array with element spacing in wavelengths; element 0 is the phase reference.
struct ArrayGeometry {
  int antennas = 2;
  double spacing = 0.5;

  ArrayGeometry() = default;
  explicit ArrayGeometry(int antennas, double spacing = 0.5);
};

/// Full scenario: AoA of the dynamic path, static channel, dynamic complex gain sequence (CGS),
/// per-snapshot phase offsets and noise level.
///
/// Noise convention: the real and imaginary part of every CSI noise sample each have variance
/// `sigma2`. With this convention the Fisher information of the model is (1/sigma2)*Re{...}.
struct ScenarioParams {
  double theta_d = 0.0;
  Eigen::VectorXcd h_s;
  Eigen::VectorXcd d;
  Eigen::VectorXd phi_o;
  double sigma2 = 1.0;

  int antennas() const { return static_cast<int>(h_s.size()); }
  int snapshots() const { return static_cast<int>(d.size()); }

  /// Throws DimensionError/DomainError when the fields do not describe a valid scenario for geom.
  /// sigma2 == 0 (noiseless) passes.
  void validate(const ArrayGeometry& geom) const;
};

/// Complex M x T matrix; column t is the CSI snapshot h_t.
struct CsiBlock {
  Eigen::MatrixXcd data;

  int antennas() const { return static_cast<int>(data.rows()); }
  int snapshots() const { return static_cast<int>(data.cols()); }
};

/// Per-snapshot distribution of the dynamic path gain: circularly symmetric complex Gaussian with
/// E|d_t|^2 = power.
struct GainDistribution {
  double power = 1.0;

  GainDistribution() = default;
  explicit GainDistribution(double power);
};

enum class GainDraw { unconstrained, zero_mean };

/// a(theta), entry m = exp(j 2 pi spacing m sin theta). theta must lie in [-pi/2, pi/2].
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta);

/// b(theta) = da/dtheta.
Eigen::VectorXcd steering_derivative(const ArrayGeometry& geom, double theta);

/// d^2 a / dtheta^2.
Eigen::VectorXcd steering_second_derivative(const ArrayGeometry& geom, double theta);

/// Removes the mean of d and of phi_o; all other fields are copied unchanged.
ScenarioParams project_constraints(ScenarioParams params);

/// |sum d| <= eps sqrt(T) rms(d) and |sum phi_o| <= eps.
bool satisfies_constraints(const ScenarioParams& params, double eps = 1e-9);

Eigen::VectorXcd draw_dynamic_gains(int snapshots, const GainDistribution& dist, Rng& rng,
                                    GainDraw mode = GainDraw::unconstrained);

/// Noiseless CSI: column t = (h_s + a(theta_d) d_t) exp(j phi_t).
Eigen::MatrixXcd noiseless_csi(const ArrayGeometry& geom, const ScenarioParams& params);

/// noiseless_csi plus i.i.d. complex Gaussian noise (each part variance sigma2).
CsiBlock synthesize_csi(const ArrayGeometry& geom, const ScenarioParams& params, Rng& rng);

}  // namespace asyncisac
