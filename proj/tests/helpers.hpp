#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "asyncisac/array_model.hpp"

namespace testing {

using asyncisac::ArrayGeometry;
using asyncisac::Rng;
using asyncisac::ScenarioParams;

constexpr double kPi = std::numbers::pi;

inline ScenarioParams random_params(Rng& rng, int M, int T, double sigma2 = 1.0) {
  std::uniform_real_distribution<double> theta(-1.2, 1.2);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  ScenarioParams p;
  p.theta_d = theta(rng);
  p.h_s = asyncisac::complex_gaussian_matrix(rng, M, 1, 0.5);
  p.d = asyncisac::complex_gaussian_matrix(rng, T, 1, 0.5);
  p.phi_o.resize(T);
  for (int t = 0; t < T; ++t) p.phi_o(t) = phase(rng);
  p.sigma2 = sigma2;
  return p;
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// h orthogonal to every column of `span`, built from a random draw.
inline Eigen::VectorXcd orthogonal_to(const Eigen::MatrixXcd& span, Rng& rng) {
  const Eigen::VectorXcd g = asyncisac::complex_gaussian_matrix(rng, span.rows(), 1, 0.5);
  const Eigen::MatrixXcd q = span.householderQr().householderQ() * Eigen::MatrixXcd::Identity(span.rows(), span.cols());
  return g - q * (q.adjoint() * g);
}

}  // namespace testing
