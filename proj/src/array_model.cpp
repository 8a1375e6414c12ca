#include "asyncisac/array_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "asyncisac/errors.hpp"

namespace asyncisac {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) > kPi / 2) {
    throw DomainError("steering angle " + std::to_string(theta) + " outside [-pi/2, pi/2]");
  }
}

// Per-element phase slope: d(phase_m)/d(sin theta) = 2 pi spacing m.
double phase_slope(const ArrayGeometry& geom, int m) { return 2.0 * kPi * geom.spacing * m; }

}  // namespace

ArrayGeometry::ArrayGeometry(int antennas_, double spacing_) : antennas(antennas_), spacing(spacing_) {
  if (antennas < 2) throw DomainError("array needs at least 2 antennas");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("element spacing must be positive");
}

GainDistribution::GainDistribution(double power_) : power(power_) {
  if (!(power > 0.0) || !std::isfinite(power)) throw DomainError("dynamic path power must be positive");
}

void ScenarioParams::validate(const ArrayGeometry& geom) const {
  if (h_s.size() != geom.antennas) {
    throw DimensionError("h_s has " + std::to_string(h_s.size()) + " entries, array has " +
                         std::to_string(geom.antennas));
  }
  if (d.size() != phi_o.size()) throw DimensionError("d and phi_o must have the same length");
  if (d.size() < 1) throw DimensionError("scenario needs at least one snapshot");
  check_angle(theta_d);
  // sigma2 == 0 is a valid noiseless scenario; Fisher quantities reject it separately.
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be non-negative");
  if (!h_s.allFinite() || !d.allFinite() || !phi_o.allFinite()) {
    throw DomainError("scenario contains non-finite entries");
  }
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta) {
  check_angle(theta);
  const double s = std::sin(theta);
  Eigen::VectorXcd a(geom.antennas);
  for (int m = 0; m < geom.antennas; ++m) a(m) = std::polar(1.0, phase_slope(geom, m) * s);
  return a;
}

Eigen::VectorXcd steering_derivative(const ArrayGeometry& geom, double theta) {
  Eigen::VectorXcd a = steering_vector(geom, theta);
  const double c = std::cos(theta);
  for (int m = 0; m < geom.antennas; ++m) a(m) *= std::complex<double>(0.0, phase_slope(geom, m) * c);
  return a;
}

Eigen::VectorXcd steering_second_derivative(const ArrayGeometry& geom, double theta) {
  Eigen::VectorXcd a = steering_vector(geom, theta);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  for (int m = 0; m < geom.antennas; ++m) {
    const double k = phase_slope(geom, m);
    // d/dtheta [j k cos(theta) a] = (-j k sin(theta) - k^2 cos^2(theta)) a
    a(m) *= std::complex<double>(-k * k * c * c, -k * s);
  }
  return a;
}

ScenarioParams project_constraints(ScenarioParams params) {
  if (params.d.size() > 0) {
    const std::complex<double> mean_d = params.d.mean();
    params.d.array() -= mean_d;
  }
  if (params.phi_o.size() > 0) {
    const double mean_phi = params.phi_o.mean();
    params.phi_o.array() -= mean_phi;
  }
  return params;
}

bool satisfies_constraints(const ScenarioParams& params, double eps) {
  const double T = static_cast<double>(params.d.size());
  if (T == 0) return true;
  const double rms = std::sqrt(params.d.squaredNorm() / T);
  return std::abs(params.d.sum()) <= eps * std::sqrt(T) * rms && std::abs(params.phi_o.sum()) <= eps;
}

Eigen::VectorXcd draw_dynamic_gains(int snapshots, const GainDistribution& dist, Rng& rng, GainDraw mode) {
  if (snapshots < 2) throw DimensionError("need at least 2 snapshots to draw a gain sequence");
  Eigen::VectorXcd d = complex_gaussian_matrix(rng, snapshots, 1, dist.power / 2.0);
  if (mode == GainDraw::zero_mean) d.array() -= d.mean();
  return d;
}

Eigen::MatrixXcd noiseless_csi(const ArrayGeometry& geom, const ScenarioParams& params) {
  params.validate(geom);
  const Eigen::VectorXcd a = steering_vector(geom, params.theta_d);
  Eigen::MatrixXcd H(geom.antennas, params.snapshots());
  for (int t = 0; t < params.snapshots(); ++t) {
    H.col(t) = (params.h_s + a * params.d(t)) * std::polar(1.0, params.phi_o(t));
  }
  return H;
}

CsiBlock synthesize_csi(const ArrayGeometry& geom, const ScenarioParams& params, Rng& rng) {
  CsiBlock block{noiseless_csi(geom, params)};
  block.data += complex_gaussian_matrix(rng, block.data.rows(), block.data.cols(), params.sigma2);
  return block;
}

}  // namespace asyncisac
