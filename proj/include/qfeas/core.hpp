#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qfeas {

using Complex = std::complex<double>;

/// Fixed-length vector in C^n. Entries are finite and never change after
/// construction; arithmetic produces new vectors.
class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(Eigen::VectorXcd entries);
  explicit ComplexVector(std::vector<Complex> entries);

  static ComplexVector zeros(std::size_t n);
  /// Standard basis vector e_k (0-based).
  static ComplexVector basis(std::size_t n, std::size_t k);

  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }
  Complex operator[](std::size_t i) const { return v_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXcd& vec() const { return v_; }
  std::span<const Complex> entries() const { return {v_.data(), size()}; }

  double norm() const { return v_.norm(); }
  double squared_norm() const { return v_.squaredNorm(); }

  ComplexVector operator+(const ComplexVector& o) const;
  ComplexVector operator-(const ComplexVector& o) const;
  ComplexVector operator*(Complex s) const;
  ComplexVector conj() const;

 private:
  Eigen::VectorXcd v_;
};

inline ComplexVector operator*(Complex s, const ComplexVector& x) { return x * s; }

/// <u, v> = u* v (conjugate-linear in the first argument).
Complex inner(const ComplexVector& u, const ComplexVector& v);

/// n x n Hermitian matrix held by its upper triangle, row-major:
/// (0,0), (0,1), ..., (0,n-1), (1,1), ..., (n-1,n-1). The lower triangle is
/// the conjugate of the upper one and diagonal entries are real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Throws std::invalid_argument on a wrong entry count, a non-finite entry
  /// or a non-real diagonal.
  HermitianMatrix(std::size_t n, std::vector<Complex> upper);

  static HermitianMatrix zeros(std::size_t n);
  static HermitianMatrix identity(std::size_t n);
  /// Takes the upper triangle of `a`; the strict lower triangle is ignored.
  static HermitianMatrix from_dense_upper(const Eigen::MatrixXcd& a);

  static std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

  std::size_t dim() const { return n_; }
  std::span<const Complex> upper() const { return upper_; }
  /// Entry (i, j) of the full matrix.
  Complex at(std::size_t i, std::size_t j) const;
  Eigen::MatrixXcd dense() const;

  /// x* A x, real for Hermitian A.
  double quadratic_form(const ComplexVector& x) const;
  /// u* A v.
  Complex bilinear(const ComplexVector& u, const ComplexVector& v) const;
  double frobenius_norm() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }

  std::size_t n_ = 0;
  std::vector<Complex> upper_;
};

/// Delta = x - e^{i phase} z with the phase minimizing ||Delta||.
struct AlignedDifference {
  double phase = 0.0;
  ComplexVector delta;
};

/// Frobenius inner product trace(A* M). Both arguments are Hermitian so the
/// result is real.
double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& m);

/// x x* - y y*.
HermitianMatrix outer_difference(const ComplexVector& x, const ComplexVector& y);

/// u v* + v u*.
HermitianMatrix symmetric_outer(const ComplexVector& u, const ComplexVector& v);

/// Phase-invariant distance ||x x* - y y*||_F, computed by the direct
/// entrywise sum.
double equiv_distance(const ComplexVector& x, const ComplexVector& y);

/// O(n) closed form sqrt(||x||^4 + ||y||^4 - 2|<x,y>|^2) of equiv_distance.
double equiv_distance_fast(const ComplexVector& x, const ComplexVector& y);

/// arg <x, z> in [0, 2 pi); 0 when <x, z> == 0.
double optimal_phase(const ComplexVector& x, const ComplexVector& z);

AlignedDifference aligned_delta(const ComplexVector& x, const ComplexVector& z);

/// Throws std::invalid_argument unless a == b.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace qfeas
