#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "asyncisac/random.hpp"

namespace asyncisac {

/// Training sequences, one tx_antennas x symbols matrix per subcarrier, each with orthonormal rows.
struct ReferenceSignal {
  std::vector<Eigen::MatrixXcd> per_subcarrier;

  int subcarriers() const { return static_cast<int>(per_subcarrier.size()); }
  int tx_antennas() const { return per_subcarrier.empty() ? 0 : static_cast<int>(per_subcarrier[0].rows()); }
  int symbols() const { return per_subcarrier.empty() ? 0 : static_cast<int>(per_subcarrier[0].cols()); }
};

/// Received training block: one rx_antennas x symbols matrix per subcarrier.
using ReceivedBlock = std::vector<Eigen::MatrixXcd>;

/// Semi-unitary X_k (X_k X_k^H = I) from the Q factor of a random complex Gaussian matrix.
ReferenceSignal make_reference_signal(int tx_antennas, int symbols, int subcarriers, Rng& rng);

/// Y_k = H_k X_k + n, noise parts each with variance sigma2.
Eigen::MatrixXcd simulate_received(const Eigen::MatrixXcd& channel, const Eigen::MatrixXcd& training,
                                   double sigma2, Rng& rng);

/// Least-squares CSI, H_hat = Y X^H.
Eigen::MatrixXcd ls_estimate(const Eigen::MatrixXcd& received, const Eigen::MatrixXcd& training);

/// Channel family used by the sufficiency experiment: H_k = g * G_k with a scalar gain
/// g ~ CN(0, gain_power) and fixed, known shapes G_k.
struct SufficiencyScenario {
  int rx_antennas = 4;
  int tx_antennas = 2;
  int subcarriers = 4;
  int symbols = 4;
  double sigma2 = 1.0;
  double gain_power = 1.0;
};

struct SufficiencyReport {
  double mse_raw = 0.0;     ///< LMMSE of g computed from the raw training block Y
  double mse_csi = 0.0;     ///< LMMSE of g computed from the LS CSI only
  double ratio = 1.0;       ///< mse_raw / mse_csi (1 when both are zero)
  double mse_theory = 0.0;  ///< Bayesian MMSE of the linear-Gaussian model
  std::int64_t trials = 0;
};

/// Monte Carlo comparison of an estimator that sees Y with one that only sees H_hat(Y).
SufficiencyReport sufficiency_check(const SufficiencyScenario& scenario, std::int64_t trials,
                                    std::uint64_t seed);

}  // namespace asyncisac
