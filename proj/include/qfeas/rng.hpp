#pragma once

#include <cstdint>
#include <random>

#include "qfeas/core.hpp"

namespace qfeas {

/// Engine used everywhere. Streams are never shared between work units:
/// each unit seeds its own engine from derive_seed(parent, index).
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the `index`-th child stream of `seed`. Distinct indices give
/// statistically independent streams; the mapping is fixed across builds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Two-level derivation, e.g. (trial, matrix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

Rng make_rng(std::uint64_t seed);

/// Entries with independent real and imaginary parts, each N(0, component_variance).
ComplexVector complex_gaussian(Rng& rng, std::size_t n, double component_variance);

/// Uniform on the unit sphere of C^n (= S^{2n-1} in R^{2n}).
ComplexVector unit_sphere_point(Rng& rng, std::size_t n);

/// Uniform in the closed ball of the given radius in C^n.
ComplexVector ball_point(Rng& rng, std::size_t n, double radius);

}  // namespace qfeas
