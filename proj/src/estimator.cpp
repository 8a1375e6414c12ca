#include "asyncisac/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "asyncisac/errors.hpp"

namespace asyncisac {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double grid_theta(int i, int points) { return -kPi / 2 + (i + 0.5) * kPi / points; }

// Null spectrum q(theta) = a^H P_n a and its first two derivatives.
struct NullSpectrum {
  double q;
  double dq;
  double d2q;
};

NullSpectrum null_spectrum(const ArrayGeometry& geom, const Eigen::MatrixXcd& noise, double theta) {
  const Eigen::VectorXcd pa = noise.adjoint() * steering_vector(geom, theta);
  const Eigen::VectorXcd pb = noise.adjoint() * steering_derivative(geom, theta);
  const Eigen::VectorXcd pc = noise.adjoint() * steering_second_derivative(geom, theta);
  return {pa.squaredNorm(), 2.0 * pb.dot(pa).real(), 2.0 * (pc.dot(pa).real() + pb.squaredNorm())};
}

// Newton iterations on q'(theta) = 0, kept inside [lo, hi].
double polish(const ArrayGeometry& geom, const Eigen::MatrixXcd& noise, double theta, double lo, double hi) {
  for (int it = 0; it < 8; ++it) {
    const NullSpectrum s = null_spectrum(geom, noise, theta);
    if (!(s.d2q > 0.0)) break;
    const double next = std::clamp(theta - s.dq / s.d2q, lo, hi);
    const double step = std::abs(next - theta);
    theta = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(theta))) break;
  }
  return theta;
}

double beam_magnitude_variance(const CsiBlock& h, const ArrayGeometry& geom, double theta) {
  const Eigen::VectorXcd a = steering_vector(geom, theta);
  const Eigen::VectorXd mag = (a.adjoint() * h.data).cwiseAbs().transpose() / geom.antennas;
  const double mean = mag.mean();
  return (mag.array() - mean).square().sum() / std::max<Eigen::Index>(mag.size() - 1, 1);
}

template <typename Fn>
auto tagged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const EstimatorError&) {
    throw;
  } catch (const Error& e) {
    throw EstimatorError(stage, e.what());
  }
}

}  // namespace

void EstimatorConfig::validate() const {
  if (grid_points < 64) throw DomainError("grid_points must be at least 64");
  if (source_count < 1) throw DomainError("source_count must be at least 1");
}

double EstimatorConfig::grid_step() const { return kPi / grid_points; }

double eigengap_threshold(int antennas, int snapshots) {
  const double r = 1.0 + std::sqrt(static_cast<double>(antennas) / snapshots);
  return 2.0 * r * r;
}

MusicResult music_aoa(const CsiBlock& h, const ArrayGeometry& geom, const EstimatorConfig& cfg) {
  cfg.validate();
  const int M = h.antennas();
  const int T = h.snapshots();
  if (M != geom.antennas) throw DimensionError("CSI rows do not match the array");
  if (M <= cfg.source_count) throw SubspaceError("no noise subspace: M <= source_count");
  if (M < 3) throw DimensionError("MUSIC needs M >= 3");
  if (T < 3) throw DimensionError("MUSIC needs T >= 3");
  if (!h.data.allFinite()) throw DomainError("CSI contains non-finite entries");

  const Eigen::MatrixXcd r = h.data * h.data.adjoint() / static_cast<double>(T);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
  if (eig.info() != Eigen::Success) throw SubspaceError("eigendecomposition of the sample covariance failed");
  const int noise_dim = M - cfg.source_count;
  const Eigen::MatrixXcd noise = eig.eigenvectors().leftCols(noise_dim);

  MusicResult out;
  MusicDiagnostics& diag = out.diagnostics;
  diag.eigenvalues = eig.eigenvalues();
  const double noise_mean = diag.eigenvalues.head(noise_dim).mean();
  const double top = diag.eigenvalues(M - 1);
  diag.eigengap_ratio = noise_mean > 0.0 ? top / noise_mean : std::numeric_limits<double>::infinity();
  diag.dominant_eigengap = diag.eigengap_ratio > eigengap_threshold(M, T);

  const int G = cfg.grid_points;
  Eigen::MatrixXcd steering(M, G);
  for (int i = 0; i < G; ++i) steering.col(i) = steering_vector(geom, grid_theta(i, G));
  const Eigen::VectorXd q = (noise.adjoint() * steering).colwise().squaredNorm().transpose();

  // d q / d theta vanishes at endfire for every input, so the grid ends only count when no
  // interior peak exists.
  std::vector<int> maxima;
  for (int i = 1; i + 1 < G; ++i) {
    if (q(i) < q(i - 1) && q(i) <= q(i + 1)) maxima.push_back(i);
  }
  if (maxima.empty()) {
    if (q(0) < q(1)) maxima.push_back(0);
    if (q(G - 1) <= q(G - 2)) maxima.push_back(G - 1);
  }
  if (maxima.empty()) throw SubspaceError("pseudospectrum has no peak");
  std::stable_sort(maxima.begin(), maxima.end(), [&](int x, int y) { return q(x) < q(y); });
  maxima.resize(std::min<std::size_t>(maxima.size(), static_cast<std::size_t>(cfg.source_count)));

  const double step = cfg.grid_step();
  for (int i : maxima) {
    double theta = grid_theta(i, G);
    if (cfg.refine && i > 0 && i < G - 1) {
      const double curv = q(i - 1) - 2.0 * q(i) + q(i + 1);
      if (curv > 0.0) theta += 0.5 * step * (q(i - 1) - q(i + 1)) / curv;
      const double lo = grid_theta(i, G) - step;
      const double hi = grid_theta(i, G) + step;
      theta = polish(geom, noise, std::clamp(theta, lo, hi), lo, hi);
    }
    const double qt = null_spectrum(geom, noise, theta).q;
    diag.peak_thetas.push_back(theta);
    diag.peak_values.push_back(qt > 0.0 ? 1.0 / qt : std::numeric_limits<double>::infinity());
    diag.peak_beam_variance.push_back(beam_magnitude_variance(h, geom, theta));
  }
  const auto best = std::max_element(diag.peak_beam_variance.begin(), diag.peak_beam_variance.end());
  diag.selected_peak = static_cast<int>(best - diag.peak_beam_variance.begin());
  out.theta = diag.peak_thetas[static_cast<std::size_t>(diag.selected_peak)];
  return out;
}

Beamspace beamspace_basis(double theta_hat, const ArrayGeometry& geom) {
  const Eigen::VectorXcd a = steering_vector(geom, theta_hat);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(a), Eigen::ComputeFullU);
  Beamspace out;
  out.a = a / a.norm();
  out.b = svd.matrixU().rightCols(geom.antennas - 1);
  return out;
}

Eigen::VectorXd estimate_phase_offsets(const CsiBlock& h, const Eigen::MatrixXcd& b) {
  if (h.antennas() < 2) throw DimensionError("phase recovery needs M >= 2");
  if (b.rows() != h.antennas()) throw DimensionError("beamspace basis does not match the CSI");
  const Eigen::MatrixXcd hp = b.adjoint() * h.data;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hp, Eigen::ComputeThinU);
  const double scale = h.data.norm();
  if (!(svd.singularValues()(0) > 1e-12 * scale) || scale == 0.0) {
    throw DegenerateProjectionError("nullspace projection of the CSI vanishes");
  }
  const Eigen::VectorXcd w = svd.matrixU().col(0);
  const Eigen::RowVectorXcd hq = w.adjoint() * hp;

  const Eigen::Index T = hq.size();
  Eigen::VectorXd phi(T);
  phi(0) = std::arg(hq(0));
  for (Eigen::Index t = 1; t < T; ++t) {
    phi(t) = phi(t - 1) + std::arg(hq(t) * std::conj(hq(t - 1)));
  }
  phi.array() -= phi.mean();
  return phi;
}

Eigen::VectorXcd estimate_cgs(const CsiBlock& h, const Eigen::VectorXcd& a, const Eigen::VectorXd& phi_hat,
                              const ArrayGeometry& geom) {
  if (a.size() != h.antennas() || h.antennas() != geom.antennas) {
    throw DimensionError("combining vector does not match the CSI");
  }
  if (phi_hat.size() != h.snapshots()) throw DimensionError("phase estimate length does not match T");
  const Eigen::VectorXcd rot = (-phi_hat.cast<cd>() * cd(0.0, 1.0)).array().exp();
  const Eigen::VectorXcd combined = (a.adjoint() * h.data).transpose();
  Eigen::VectorXcd d = combined.cwiseProduct(rot) / std::sqrt(static_cast<double>(geom.antennas));
  d.array() -= d.mean();
  return d;
}

EstimateResult run_estimator(const CsiBlock& h, const ArrayGeometry& geom, const EstimatorConfig& cfg) {
  EstimateResult out;
  const MusicResult music = tagged("music", [&] { return music_aoa(h, geom, cfg); });
  out.theta_hat = music.theta;
  out.diagnostics = music.diagnostics;
  const Beamspace beam = tagged("beamspace", [&] { return beamspace_basis(out.theta_hat, geom); });
  out.phi_hat = tagged("phase", [&] { return estimate_phase_offsets(h, beam.b); });
  out.d_hat = tagged("cgs", [&] { return estimate_cgs(h, beam.a, out.phi_hat, geom); });
  return out;
}

}  // namespace asyncisac
