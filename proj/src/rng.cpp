#include "qfeas/rng.hpp"

#include <cmath>

namespace qfeas {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

ComplexVector complex_gaussian(Rng& rng, std::size_t n, double component_variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(component_variance));
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = {re, im};
  }
  return ComplexVector(std::move(v));
}

ComplexVector unit_sphere_point(Rng& rng, std::size_t n) {
  for (;;) {
    ComplexVector g = complex_gaussian(rng, n, 1.0);
    const double r = g.norm();
    if (r > 1e-300) return g * Complex(1.0 / r);
  }
}

ComplexVector ball_point(Rng& rng, std::size_t n, double radius) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ComplexVector dir = unit_sphere_point(rng, n);
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(2 * n));
  return dir * Complex(r);
}

}  // namespace qfeas
