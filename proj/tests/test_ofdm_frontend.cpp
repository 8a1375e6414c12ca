#include <doctest.h>

#include "asyncisac/errors.hpp"
#include "asyncisac/ofdm_frontend.hpp"

using namespace asyncisac;

namespace {

double gram_error(const Eigen::MatrixXcd& x) {
  return (x * x.adjoint() - Eigen::MatrixXcd::Identity(x.rows(), x.rows())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("reference signal is semi-unitary") {
  Rng rng(1);
  const ReferenceSignal one = make_reference_signal(1, 1, 1, rng);
  CHECK(std::abs(std::abs(one.per_subcarrier[0](0, 0)) - 1.0) < 1e-14);

  const ReferenceSignal r = make_reference_signal(4, 8, 3, rng);
  CHECK(r.subcarriers() == 3);
  CHECK(r.tx_antennas() == 4);
  CHECK(r.symbols() == 8);
  for (const auto& x : r.per_subcarrier) CHECK(gram_error(x) < 1e-12);

  for (int n = 2; n <= 12; ++n) {
    const ReferenceSignal s = make_reference_signal(2, n, 1, rng);
    CHECK(gram_error(s.per_subcarrier[0]) < 1e-12);
  }
  CHECK_THROWS_AS(make_reference_signal(4, 3, 1, rng), DimensionError);
}

TEST_CASE("received signal and LS estimate") {
  Rng rng(2);
  const Eigen::MatrixXcd x = make_reference_signal(2, 6, 1, rng).per_subcarrier[0];
  const Eigen::MatrixXcd h = complex_gaussian_matrix(rng, 3, 2, 0.5);

  SUBCASE("noiseless round trip") {
    const Eigen::MatrixXcd y = simulate_received(h, x, 0.0, rng);
    CHECK(y == h * x);
    CHECK((ls_estimate(y, x) - h).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("deterministic under a fixed seed") {
    Rng a(7), b(7);
    CHECK(simulate_received(h, x, 0.4, a) == simulate_received(h, x, 0.4, b));
  }
  SUBCASE("adding and removing the signal leaves the estimate unchanged") {
    const Eigen::MatrixXcd y = simulate_received(h, x, 0.4, rng);
    const Eigen::MatrixXcd hx = h * x;
    const Eigen::MatrixXcd y2 = y + hx - hx;
    CHECK((ls_estimate(y, x) - ls_estimate(y2, x)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("pure noise input") {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(3, 2);
    double acc = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) acc += simulate_received(zero, x, 0.8, rng).squaredNorm();
    // Complex entries carry 2 sigma2.
    CHECK(std::abs(acc / (reps * 18.0) - 1.6) < 0.02 * 1.6);
  }
}

TEST_CASE("LS CSI noise is white") {
  // Semi-unitary training keeps the estimation noise i.i.d. with the raw noise level.
  Rng rng(3);
  const Eigen::MatrixXcd x = make_reference_signal(2, 5, 1, rng).per_subcarrier[0];
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
  const int reps = 100000;
  const int n = 4;  // vec(H_hat) length
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXd re_var = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < reps; ++i) {
    const Eigen::VectorXcd e = ls_estimate(simulate_received(zero, x, 1.0, rng), x).reshaped();
    cov += e * e.adjoint();
    re_var += e.real().cwiseAbs2();
  }
  cov /= reps;
  re_var /= reps;
  for (int k = 0; k < n; ++k) {
    CHECK(std::abs(re_var(k) - 1.0) < 0.02);
    CHECK(std::abs(cov(k, k).real() - 2.0) < 0.02 * 2.0);
    for (int l = 0; l < n; ++l) {
      if (k != l) CHECK(std::abs(cov(k, l)) / 2.0 < 5.0 / std::sqrt(static_cast<double>(reps)));
    }
  }
}

TEST_CASE("sufficiency check") {
  SUBCASE("noiseless") {
    SufficiencyScenario sc;
    sc.sigma2 = 0.0;
    const SufficiencyReport r = sufficiency_check(sc, 1000, 5);
    CHECK(r.mse_raw < 1e-24);
    CHECK(r.mse_csi < 1e-24);
  }
  SUBCASE("raw and CSI estimators match") {
    SufficiencyScenario sc;
    const SufficiencyReport r = sufficiency_check(sc, 10000, 6);
    CHECK(std::abs(r.ratio - 1.0) < 0.05);
    // The empirical MSE sits near the Bayesian MMSE.
    CHECK(std::abs(r.mse_csi / r.mse_theory - 1.0) < 0.05);
  }
  SUBCASE("single subcarrier") {
    SufficiencyScenario sc;
    sc.subcarriers = 1;
    const SufficiencyReport r = sufficiency_check(sc, 10000, 7);
    CHECK(std::abs(r.ratio - 1.0) < 0.05);
  }
  SUBCASE("deterministic") {
    const SufficiencyReport a = sufficiency_check({}, 500, 9);
    const SufficiencyReport b = sufficiency_check({}, 500, 9);
    CHECK(a.mse_raw == b.mse_raw);
    CHECK(a.mse_csi == b.mse_csi);
  }
}
