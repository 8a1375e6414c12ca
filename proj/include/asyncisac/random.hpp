#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace asyncisac {

/// Random engine used everywhere. All randomness flows through an explicit Rng&.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based stream derivation: the seed for stream (k0, k1, ...) under `master`.
///
/// Each key is folded in with mix64(state ^ mix64(key + golden)), so a stream seed depends
/// only on (master, keys) and never on how many other streams were drawn before it.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Circularly symmetric complex Gaussian whose real and imaginary parts each have
/// variance `component_variance`.
std::complex<double> complex_gaussian(Rng& rng, double component_variance);

/// Matrix of i.i.d. complex Gaussian entries, each part with variance `component_variance`.
Eigen::MatrixXcd complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                         double component_variance);

}  // namespace asyncisac
