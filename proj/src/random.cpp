#include "asyncisac/random.hpp"

#include <cmath>

namespace asyncisac {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t state = mix64(master);
  for (std::uint64_t key : keys) {
    state = mix64(state ^ mix64(key + 0x632be59bd9b4e019ULL));
  }
  return state;
}

std::complex<double> complex_gaussian(Rng& rng, double component_variance) {
  if (component_variance == 0.0) return {0.0, 0.0};
  std::normal_distribution<double> normal(0.0, std::sqrt(component_variance));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

Eigen::MatrixXcd complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                         double component_variance) {
  Eigen::MatrixXcd out(rows, cols);
  if (component_variance == 0.0) {
    out.setZero();
    return out;
  }
  std::normal_distribution<double> normal(0.0, std::sqrt(component_variance));
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(r, c) = {re, im};
    }
  }
  return out;
}

}  // namespace asyncisac
