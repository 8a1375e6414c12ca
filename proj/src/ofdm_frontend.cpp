#include "asyncisac/ofdm_frontend.hpp"

#include <cmath>

#include "asyncisac/errors.hpp"
#include "asyncisac/statistics.hpp"

namespace asyncisac {

ReferenceSignal make_reference_signal(int tx_antennas, int symbols, int subcarriers, Rng& rng) {
  if (tx_antennas < 1 || subcarriers < 1) throw DimensionError("reference signal needs positive dimensions");
  if (symbols < tx_antennas) throw DimensionError("training length N must be at least M_T");
  ReferenceSignal ref;
  ref.per_subcarrier.reserve(static_cast<std::size_t>(subcarriers));
  for (int k = 0; k < subcarriers; ++k) {
    const Eigen::MatrixXcd g = complex_gaussian_matrix(rng, symbols, tx_antennas, 0.5);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(symbols, tx_antennas);
    ref.per_subcarrier.push_back(q.adjoint());
  }
  return ref;
}

Eigen::MatrixXcd simulate_received(const Eigen::MatrixXcd& channel, const Eigen::MatrixXcd& training,
                                   double sigma2, Rng& rng) {
  if (channel.cols() != training.rows()) throw DimensionError("channel columns must match training rows");
  if (!(sigma2 >= 0.0)) throw DomainError("sigma2 must be non-negative");
  Eigen::MatrixXcd y = channel * training;
  y += complex_gaussian_matrix(rng, y.rows(), y.cols(), sigma2);
  return y;
}

Eigen::MatrixXcd ls_estimate(const Eigen::MatrixXcd& received, const Eigen::MatrixXcd& training) {
  if (received.cols() != training.cols()) throw DimensionError("received block and training length differ");
  return received * training.adjoint();
}

SufficiencyReport sufficiency_check(const SufficiencyScenario& sc, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("sufficiency check needs at least one trial");
  Rng setup = make_rng(derive_seed(seed, {0}));
  const ReferenceSignal ref = make_reference_signal(sc.tx_antennas, sc.symbols, sc.subcarriers, setup);
  std::vector<Eigen::MatrixXcd> shapes;
  for (int k = 0; k < sc.subcarriers; ++k) {
    shapes.push_back(complex_gaussian_matrix(setup, sc.rx_antennas, sc.tx_antennas, 0.5));
  }

  // Raw-domain signature: vec(G_k X_k) stacked over subcarriers.
  const Eigen::Index raw_len = static_cast<Eigen::Index>(sc.rx_antennas) * sc.symbols;
  Eigen::VectorXcd signature(raw_len * sc.subcarriers);
  double csi_energy = 0.0;
  for (int k = 0; k < sc.subcarriers; ++k) {
    const Eigen::MatrixXcd gx = shapes[k] * ref.per_subcarrier[k];
    signature.segment(k * raw_len, raw_len) = gx.reshaped();
    csi_energy += shapes[k].squaredNorm();
  }
  const double noise_var = 2.0 * sc.sigma2;  // complex variance of one noise sample
  const double raw_scale = sc.gain_power / (sc.gain_power * signature.squaredNorm() + noise_var);
  const double csi_scale = sc.gain_power / (sc.gain_power * csi_energy + noise_var);

  std::vector<double> err_raw(static_cast<std::size_t>(trials));
  std::vector<double> err_csi(static_cast<std::size_t>(trials));
  for (std::int64_t i = 0; i < trials; ++i) {
    Rng rng = make_rng(derive_seed(seed, {1, static_cast<std::uint64_t>(i)}));
    const std::complex<double> g = complex_gaussian(rng, sc.gain_power / 2.0);
    std::complex<double> raw_stat = 0.0;
    std::complex<double> csi_stat = 0.0;
    for (int k = 0; k < sc.subcarriers; ++k) {
      const Eigen::MatrixXcd y = simulate_received(g * shapes[k], ref.per_subcarrier[k], sc.sigma2, rng);
      raw_stat += signature.segment(k * raw_len, raw_len).dot(y.reshaped());
      const Eigen::MatrixXcd h_hat = ls_estimate(y, ref.per_subcarrier[k]);
      csi_stat += shapes[k].reshaped().dot(h_hat.reshaped());
    }
    err_raw[static_cast<std::size_t>(i)] = std::norm(raw_scale * raw_stat - g);
    err_csi[static_cast<std::size_t>(i)] = std::norm(csi_scale * csi_stat - g);
  }

  SufficiencyReport report;
  report.trials = trials;
  report.mse_raw = summarize(err_raw).mean;
  report.mse_csi = summarize(err_csi).mean;
  report.ratio = (report.mse_csi == 0.0 && report.mse_raw == 0.0) ? 1.0 : report.mse_raw / report.mse_csi;
  report.mse_theory = sc.gain_power * noise_var / (sc.gain_power * csi_energy + noise_var);
  return report;
}

}  // namespace asyncisac
