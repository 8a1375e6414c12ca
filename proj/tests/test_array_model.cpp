#include <doctest.h>

#include "asyncisac/array_model.hpp"
#include "asyncisac/errors.hpp"
#include "helpers.hpp"

using namespace asyncisac;
using testing::kPi;

TEST_CASE("steering vector at broadside is all ones") {
  const Eigen::VectorXcd a = steering_vector(ArrayGeometry(4, 0.5), 0.0);
  CHECK((a - Eigen::VectorXcd::Ones(4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("steering vector at endfire alternates sign") {
  const Eigen::VectorXcd a = steering_vector(ArrayGeometry(2, 0.5), kPi / 2);
  CHECK(std::abs(a(0) - 1.0) < 1e-15);
  CHECK(std::abs(a(1) + 1.0) < 1e-15);
}

TEST_CASE("steering vector has unit-modulus entries") {
  const Eigen::VectorXcd a = steering_vector(ArrayGeometry(8, 0.5), 0.3);
  CHECK(std::abs(a.squaredNorm() - 8.0) < 1e-14);
  Rng rng(11);
  std::uniform_real_distribution<double> th(-kPi / 2, kPi / 2);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXcd v = steering_vector(ArrayGeometry(16, 0.37), th(rng));
    CHECK((v.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("steering derivative closed values") {
  const Eigen::VectorXcd b = steering_derivative(ArrayGeometry(4), 0.0);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(b(m) - std::complex<double>(0.0, kPi * m)) < 1e-14);
  CHECK(steering_derivative(ArrayGeometry(2), 0.0)(0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("steering derivatives match central differences") {
  Rng rng(5);
  std::uniform_real_distribution<double> th(-1.4, 1.4);
  const ArrayGeometry g(7, 0.5);
  const double h = 1e-6;
  double worst1 = 0.0, worst2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = th(rng);
    const Eigen::VectorXcd fd1 = (steering_vector(g, t + h) - steering_vector(g, t - h)) / (2 * h);
    const Eigen::VectorXcd fd2 = (steering_derivative(g, t + h) - steering_derivative(g, t - h)) / (2 * h);
    worst1 = std::max(worst1, (fd1 - steering_derivative(g, t)).norm() / steering_derivative(g, t).norm());
    worst2 = std::max(worst2, (fd2 - steering_second_derivative(g, t)).norm() / steering_second_derivative(g, t).norm());
  }
  CHECK(worst1 < 1e-6);
  CHECK(worst2 < 1e-6);
}

TEST_CASE("geometry and angle validation") {
  CHECK_THROWS_AS(ArrayGeometry(1), DomainError);
  CHECK_THROWS_AS(ArrayGeometry(4, 0.0), DomainError);
  CHECK_THROWS_AS(steering_vector(ArrayGeometry(4), 1.6), DomainError);
  CHECK_THROWS_AS(steering_vector(ArrayGeometry(4), std::nan("")), DomainError);
  CHECK_THROWS_AS(GainDistribution(0.0), DomainError);
}

TEST_CASE("project_constraints") {
  ScenarioParams p;
  p.theta_d = 0.1;
  p.h_s = Eigen::VectorXcd::Constant(3, {1.0, 2.0});
  p.sigma2 = 0.7;
  p.d = Eigen::VectorXcd::Constant(5, {0.3, -1.1});
  p.phi_o = Eigen::VectorXd::Zero(5);

  SUBCASE("constant gain sequence becomes zero") {
    CHECK(project_constraints(p).d.cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("phase offsets are centred") {
    p.d = Eigen::VectorXcd::Zero(3);
    p.phi_o = Eigen::Vector3d(1, 2, 3);
    const ScenarioParams q = project_constraints(p);
    CHECK((q.phi_o - Eigen::Vector3d(-1, 0, 1)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("idempotent, other fields untouched") {
    Rng rng(3);
    p = testing::random_params(rng, 4, 9, 0.4);
    const ScenarioParams once = project_constraints(p);
    const ScenarioParams twice = project_constraints(once);
    CHECK((once.d - twice.d).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((once.phi_o - twice.phi_o).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(once.h_s == p.h_s);
    CHECK(once.theta_d == p.theta_d);
    CHECK(once.sigma2 == p.sigma2);
    CHECK(satisfies_constraints(once));
    CHECK_FALSE(satisfies_constraints(p));
  }
}

TEST_CASE("dynamic gain draws") {
  const GainDistribution dist(2.5);
  Rng rng(17);
  const int n = 1'000'000;
  const Eigen::VectorXcd d = draw_dynamic_gains(n, dist, rng);
  CHECK(std::abs(d.squaredNorm() / n - 2.5) < 0.01 * 2.5);
  // E d^2 = 0 for circular symmetry; sd of each d_t^2 is sqrt(2) P.
  const std::complex<double> m2 = d.array().square().mean();
  CHECK(std::abs(m2) < 3.0 * std::sqrt(2.0) * 2.5 / std::sqrt(static_cast<double>(n)));

  const Eigen::VectorXcd c = draw_dynamic_gains(64, dist, rng, GainDraw::zero_mean);
  CHECK(std::abs(c.sum()) < 1e-12);
  CHECK_THROWS_AS(draw_dynamic_gains(1, dist, rng), DimensionError);
}

TEST_CASE("synthesize_csi") {
  Rng rng(23);
  const ArrayGeometry g(5);
  ScenarioParams p = testing::random_params(rng, 5, 6, 0.0);

  SUBCASE("noiseless static only") {
    p.d.setZero();
    p.phi_o.setZero();
    const CsiBlock h = synthesize_csi(g, p, rng);
    for (int t = 0; t < 6; ++t) CHECK((h.data.col(t) - p.h_s).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("noiseless dynamic only") {
    p.h_s.setZero();
    p.phi_o.setZero();
    const CsiBlock h = synthesize_csi(g, p, rng);
    const Eigen::VectorXcd a = steering_vector(g, p.theta_d);
    for (int t = 0; t < 6; ++t) CHECK((h.data.col(t) - a * p.d(t)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("seed determinism") {
    p.sigma2 = 0.3;
    Rng r1(99), r2(99), r3(100);
    CHECK(synthesize_csi(g, p, r1).data == synthesize_csi(g, p, r2).data);
    Rng r4(99);
    CHECK(synthesize_csi(g, p, r3).data != synthesize_csi(g, p, r4).data);
  }
  SUBCASE("noise statistics") {
    // Each of Re and Im carries variance sigma2, so the complex entry carries 2 sigma2.
    p.sigma2 = 0.6;
    p.h_s.setZero();
    p.d.setZero();
    p.phi_o.setZero();
    const ArrayGeometry g2(2);
    p.h_s = Eigen::VectorXcd::Zero(2);
    const int reps = 50'000;
    double re2 = 0.0, im2 = 0.0;
    std::complex<double> cross = 0.0;
    for (int i = 0; i < reps; ++i) {
      const CsiBlock h = synthesize_csi(g2, p, rng);
      for (int t = 0; t < 6; ++t) {
        re2 += std::norm(h.data(0, t).real());
        im2 += std::norm(h.data(0, t).imag());
        cross += h.data(0, t) * std::conj(h.data(1, t));
      }
    }
    const double n = reps * 6.0;
    CHECK(std::abs(re2 / n - 0.6) < 0.02 * 0.6);
    CHECK(std::abs(im2 / n - 0.6) < 0.02 * 0.6);
    CHECK(std::abs(cross / n) < 5.0 * 2.0 * 0.6 / std::sqrt(n));
  }
}
