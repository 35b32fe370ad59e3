#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qfeas/core.hpp"

namespace qfeas {

enum class EnsembleKind { hermitian_gaussian, rank_one, user_supplied };

std::string_view to_string(EnsembleKind kind);
/// Accepts the canonical names and their dashed spellings ("rank-one").
EnsembleKind parse_ensemble_kind(std::string_view name);

/// The measurement set {A_i}. Immutable once built.
class MeasurementEnsemble {
 public:
  /// Validates m >= 1, n >= 1, every matrix of dimension n, variance > 0, and
  /// for rank_one that A_i^2 = trace(A_i) A_i with trace(A_i) >= 0.
  MeasurementEnsemble(std::size_t n, EnsembleKind kind, std::vector<HermitianMatrix> matrices,
                      double variance = 1.0, std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t n() const { return n_; }
  std::size_t m() const { return matrices_.size(); }
  EnsembleKind kind() const { return kind_; }
  double variance() const { return variance_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  const std::vector<HermitianMatrix>& matrices() const { return matrices_; }
  const HermitianMatrix& operator[](std::size_t i) const { return matrices_[i]; }

  friend bool operator==(const MeasurementEnsemble& a, const MeasurementEnsemble& b);

 private:
  std::size_t n_;
  EnsembleKind kind_;
  std::vector<HermitianMatrix> matrices_;
  double variance_;
  std::optional<std::uint64_t> seed_;
};

/// Observations c_i and the standard deviation of the noise added to each.
struct MeasurementVector {
  std::vector<double> values;
  std::vector<double> noise_sigma;

  std::size_t m() const { return values.size(); }
  /// Throws unless sizes agree and all values are finite.
  void validate() const;
  friend bool operator==(const MeasurementVector&, const MeasurementVector&) = default;
};

/// Diagonal N(0, variance); strict upper triangle with independent real and
/// imaginary parts N(0, variance / 2); lower triangle by conjugation. Matrix i
/// is drawn from the stream derive_seed(seed, i).
MeasurementEnsemble sample_hermitian_gaussian(std::size_t n, std::size_t m, double variance,
                                              std::uint64_t seed);

/// A_i = a_i a_i* with a_i having independent real and imaginary parts N(0, 1/2).
MeasurementEnsemble sample_rank_one(std::size_t n, std::size_t m, std::uint64_t seed);

/// a a*.
HermitianMatrix rank_one_matrix(const ComplexVector& a);

/// c_i = x* A_i x.
MeasurementVector forward_map(const MeasurementEnsemble& ens, const ComplexVector& x);

/// c_i + nu_i with nu_i ~ N(0, sigmas[i]^2); stream derive_seed(seed, i).
MeasurementVector add_noise(const MeasurementVector& c, const std::vector<double>& sigmas,
                            std::uint64_t seed);

// Documents. Numbers are written with round-trip-exact precision.
std::string serialize_ensemble(const MeasurementEnsemble& ens);
MeasurementEnsemble deserialize_ensemble(std::string_view text);
std::string serialize_observations(const MeasurementVector& c);
MeasurementVector deserialize_observations(std::string_view text);
std::string serialize_vector(const ComplexVector& x);
ComplexVector deserialize_vector(std::string_view text);

/// Thrown for malformed or invariant-violating documents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qfeas
