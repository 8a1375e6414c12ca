#include <doctest.h>

#include <sstream>

#include "asyncisac/bounds.hpp"
#include "asyncisac/errors.hpp"
#include "asyncisac/fisher.hpp"
#include "helpers.hpp"

using namespace asyncisac;

namespace {

Eigen::VectorXcd random_channel(Rng& rng, int M, double power = 1.0) {
  return complex_gaussian_matrix(rng, M, 1, power / 2.0);
}

}  // namespace

TEST_CASE("rho decomposition") {
  Rng rng(1);
  SUBCASE("range on random inputs") {
    for (int k = 0; k < 10000; ++k) {
      const int M = 2 + k % 15;
      std::uniform_real_distribution<double> th(-1.5, 1.5);
      const double theta = th(rng);
      const RhoDecomposition r = rho_theta(ArrayGeometry(M), theta, random_channel(rng, M));
      REQUIRE(r.rho >= 1.0 - 1e-12);
      REQUIRE(r.rho <= 2.0 + 1e-12);
      REQUIRE(r.xi <= r.gamma * r.delta * (1.0 + 1e-12));
      REQUIRE(testing::rel(r.gamma_wedge, r.gamma) < 1e-12);
      REQUIRE(testing::rel(r.delta_wedge, r.delta) < 1e-12);
    }
  }
  SUBCASE("Xi = 0 construction") {
    for (int k = 0; k < 200; ++k) {
      const ArrayGeometry g(3 + k % 10);
      const double theta = -1.0 + 0.01 * k;
      const Eigen::VectorXcd a = steering_vector(g, theta), b = steering_derivative(g, theta);
      const Eigen::VectorXcd v = a.squaredNorm() * b - a.dot(b) * a;
      const Eigen::VectorXcd h = testing::orthogonal_to(v, rng);
      const RhoDecomposition r = rho_theta(g, theta, h);
      CHECK(std::abs(r.rho - 1.0) < 1e-10);
    }
  }
  SUBCASE("collinear static channel") {
    const ArrayGeometry g(4);
    const Eigen::VectorXcd h = std::complex<double>(1.5, 0.5) * steering_vector(g, 0.2);
    CHECK_THROWS_AS(rho_theta(g, 0.2, h), CollinearityError);
  }
  SUBCASE("endfire has no AoA information") {
    CHECK_THROWS_AS(rho_theta(ArrayGeometry(4), testing::kPi / 2, random_channel(rng, 4)), DegenerateBoundError);
  }
}

TEST_CASE("AoA hybrid bound") {
  Rng rng(2);
  const GainDistribution dist(1.3);

  SUBCASE("Xi = 0 reduces to the rho = 1 floor") {
    const ArrayGeometry g(6);
    const double theta = 0.4;
    const Eigen::VectorXcd a = steering_vector(g, theta), b = steering_derivative(g, theta);
    Eigen::MatrixXcd span(6, 2);
    span << a, b;
    const Eigen::VectorXcd h = testing::orthogonal_to(span, rng);
    const double gamma = a.squaredNorm() * b.squaredNorm() - std::norm(a.dot(b));
    const BoundReport r = hrcrb_theta(g, theta, h, 0.3, 10, dist, BoundMethod::closed_form);
    CHECK(testing::rel(r.value, 0.3 * 6 / (10 * 1.3 * gamma)) < 1e-12);
    CHECK_FALSE(r.stderr_of_value.has_value());
  }
  SUBCASE("doubling T halves the bound") {
    const ArrayGeometry g(5);
    const Eigen::VectorXcd h = random_channel(rng, 5);
    const double b1 = hrcrb_theta(g, 0.1, h, 0.5, 16, dist, BoundMethod::closed_form).value;
    const double b2 = hrcrb_theta(g, 0.1, h, 0.5, 32, dist, BoundMethod::closed_form).value;
    CHECK(testing::rel(b2, b1 / 2) < 1e-14);
  }
  SUBCASE("closed form agrees with Monte Carlo") {
    int outside = 0;
    double worst_z = 0.0;
    for (int k = 0; k < 20; ++k) {
      const int M = 2 + k % 6, T = 2 + k % 5;
      const ArrayGeometry g(M);
      std::uniform_real_distribution<double> th(-1.2, 1.2);
      const double theta = th(rng);
      const Eigen::VectorXcd h = random_channel(rng, M, 2.0);
      const BoundReport c = hrcrb_theta(g, theta, h, 0.7, T, dist, BoundMethod::closed_form);
      const BoundReport m =
          hrcrb_theta(g, theta, h, 0.7, T, dist, BoundMethod::monte_carlo, {100000, 100u + k, 1});
      REQUIRE(m.stderr_of_value.has_value());
      CHECK(m.trials == 100000);
      const double z = std::abs(c.value - m.value) / *m.stderr_of_value;
      if (z > 3.0) ++outside;
      worst_z = std::max(worst_z, z);
    }
    // Twenty independent comparisons: one 3-sigma excursion is expected about 5% of the time.
    CHECK(outside <= 1);
    CHECK(worst_z < 4.5);
  }
  SUBCASE("Monte Carlo is seed-deterministic and thread-independent") {
    const ArrayGeometry g(4);
    const Eigen::VectorXcd h = random_channel(rng, 4);
    const BoundReport a = hrcrb_theta(g, 0.2, h, 1.0, 4, dist, BoundMethod::monte_carlo, {5000, 9, 1});
    const BoundReport b = hrcrb_theta(g, 0.2, h, 1.0, 4, dist, BoundMethod::monte_carlo, {5000, 9, 4});
    CHECK(a.value == b.value);
    CHECK(*a.stderr_of_value == *b.stderr_of_value);
  }
}

TEST_CASE("asymptotic CGS bound") {
  const GainDistribution unit(1.0);
  const ArrayGeometry g(4);
  // a(0) = 1, h = (1, -1, 1, -1): |h|^2 = 4, a^H h = 0.
  Eigen::VectorXcd h(4);
  h << 1.0, -1.0, 1.0, -1.0;
  CHECK(std::abs(ahrcrb_cgs(g, 0.0, h, 1.0, unit).value - 0.75) < 1e-12);

  SUBCASE("a^H h = 0 reduction") {
    Rng rng(3);
    const ArrayGeometry g6(6);
    const Eigen::VectorXcd hs = testing::orthogonal_to(steering_vector(g6, 0.3), rng);
    const double expect = 2 * 0.4 / 6 + 0.4 * 2.0 / hs.squaredNorm();
    CHECK(testing::rel(ahrcrb_cgs(g6, 0.3, hs, 0.4, GainDistribution(2.0)).value, expect) < 1e-12);
  }
  SUBCASE("diverges towards collinearity") {
    const Eigen::VectorXcd a = steering_vector(g, 0.0);
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double v = ahrcrb_cgs(g, 0.0, a + eps * h, 1.0, unit).value;
      CHECK(v > prev);
      prev = v;
    }
    CHECK(prev > 1e6);
    CHECK_THROWS_AS(ahrcrb_cgs(g, 0.0, a, 1.0, unit), CollinearityError);
  }
}

TEST_CASE("finite-T CGS bound") {
  const ArrayGeometry g(4);
  Eigen::VectorXcd h(4);
  h << 1.0, -1.0, 1.0, -1.0;
  const GainDistribution unit(1.0);

  SUBCASE("approaches the asymptotic value from above") {
    const double limit = ahrcrb_cgs(g, 0.0, h, 1.0, unit).value;
    double prev = std::numeric_limits<double>::infinity();
    for (int T : {8, 64, 512}) {
      const BoundReport r = finite_t_hrcrb_cgs(g, 0.0, h, 1.0, T, unit, {2000, 5, 1});
      CAPTURE(T);
      CHECK(r.value < prev);
      CHECK(r.value > limit - 3 * *r.stderr_of_value);
      CHECK(r.discarded == 0);
      prev = r.value;
    }
    CHECK(std::abs(prev / limit - 1.0) < 0.02);
  }
  SUBCASE("seed-deterministic") {
    const BoundReport a = finite_t_hrcrb_cgs(g, 0.0, h, 1.0, 6, unit, {300, 11, 1});
    const BoundReport b = finite_t_hrcrb_cgs(g, 0.0, h, 1.0, 6, unit, {300, 11, 3});
    CHECK(a.value == b.value);
    CHECK(a.method == BoundMethod::monte_carlo);
  }
  SUBCASE("T = 2 is reported with a standard error") {
    const BoundReport r = finite_t_hrcrb_cgs(g, 0.0, h, 1.0, 2, unit, {1000, 12, 1});
    CHECK(r.stderr_of_value.has_value());
    CHECK(r.value > 0.0);
  }
  CHECK_THROWS_AS(finite_t_hrcrb_cgs(g, 0.0, h, 1.0, 1, unit, {10, 1, 1}), DimensionError);
}

TEST_CASE("hybrid bound inequality chain") {
  const ChainReport r = verify_hrcrb_chain(ScenarioFamily{}, 100, 100, 77);
  CHECK(r.draws == 10000);
  CHECK(r.passed());
  CHECK(r.worst_jensen_slack >= -1e-10);
  CHECK(r.worst_monotone_slack >= -1e-10);
  CHECK(r.worst_hrcrb_slack >= -1e-10);
  CHECK(r.worst_schur_identity_error < 1e-9);

  SUBCASE("scalar Jensen sanity") {
    Rng rng(4);
    std::exponential_distribution<double> e(1.0);
    double s = 0.0, s_inv = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const double x = 0.1 + e(rng);
      s += x;
      s_inv += 1.0 / x;
    }
    CHECK(1.0 / (s / n) <= s_inv / n);
  }
}

TEST_CASE("bound CSV rows") {
  std::ostringstream out;
  write_bound_csv_header(out);
  BoundReport closed;
  closed.value = 0.75;
  BoundReport mc;
  mc.value = 0.5;
  mc.method = BoundMethod::monte_carlo;
  mc.trials = 10;
  mc.stderr_of_value = 0.125;
  write_bound_csv_row(out, "ref", "ahrcrb_d", closed);
  write_bound_csv_row(out, "ref", "finite_t_hrcrb_d", mc);
  CHECK(out.str() ==
        "scenario_id,bound,value,method,trials,stderr\n"
        "ref,ahrcrb_d,0.75,closed-form,0,\n"
        "ref,finite_t_hrcrb_d,0.5,monte-carlo,10,0.125\n");
}
