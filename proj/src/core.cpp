#include "qfeas/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfeas {

namespace {

void require_finite(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      throw std::invalid_argument("ComplexVector: non-finite entry at index " + std::to_string(i));
    }
  }
}

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// ---------------------------------------------------------------------------
// ComplexVector

ComplexVector::ComplexVector(Eigen::VectorXcd entries) : v_(std::move(entries)) {
  require_finite(v_);
}

ComplexVector::ComplexVector(std::vector<Complex> entries)
    : v_(Eigen::Map<const Eigen::VectorXcd>(entries.data(), static_cast<Eigen::Index>(entries.size()))) {
  require_finite(v_);
}

ComplexVector ComplexVector::zeros(std::size_t n) {
  return ComplexVector(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n)));
}

ComplexVector ComplexVector::basis(std::size_t n, std::size_t k) {
  if (k >= n) throw std::invalid_argument("ComplexVector::basis: index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return ComplexVector(std::move(v));
}

ComplexVector ComplexVector::operator+(const ComplexVector& o) const {
  require_same_dim(size(), o.size(), "ComplexVector::operator+");
  return ComplexVector(Eigen::VectorXcd(v_ + o.v_));
}

ComplexVector ComplexVector::operator-(const ComplexVector& o) const {
  require_same_dim(size(), o.size(), "ComplexVector::operator-");
  return ComplexVector(Eigen::VectorXcd(v_ - o.v_));
}

ComplexVector ComplexVector::operator*(Complex s) const {
  return ComplexVector(Eigen::VectorXcd(v_ * s));
}

ComplexVector ComplexVector::conj() const { return ComplexVector(Eigen::VectorXcd(v_.conjugate())); }

Complex inner(const ComplexVector& u, const ComplexVector& v) {
  require_same_dim(u.size(), v.size(), "inner");
  return u.vec().dot(v.vec());  // Eigen conjugates the left operand
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(std::size_t n, std::vector<Complex> upper)
    : n_(n), upper_(std::move(upper)) {
  if (upper_.size() != packed_size(n_)) {
    throw std::invalid_argument("HermitianMatrix: expected " + std::to_string(packed_size(n_)) +
                                " upper-triangle entries, got " + std::to_string(upper_.size()));
  }
  for (const auto& a : upper_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("HermitianMatrix: non-finite entry");
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (upper_[index(i, i)].imag() != 0.0) {
      throw std::invalid_argument("HermitianMatrix: non-real diagonal at (" + std::to_string(i) + ", " +
                                  std::to_string(i) + ")");
    }
  }
}

HermitianMatrix HermitianMatrix::zeros(std::size_t n) {
  return HermitianMatrix(n, std::vector<Complex>(packed_size(n)));
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  HermitianMatrix a = zeros(n);
  for (std::size_t i = 0; i < n; ++i) a.upper_[a.index(i, i)] = 1.0;
  return a;
}

HermitianMatrix HermitianMatrix::from_dense_upper(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<Complex> upper;
  upper.reserve(packed_size(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    upper.emplace_back(a(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) upper.push_back(a(i, j));
  }
  return HermitianMatrix(n, std::move(upper));
}

Complex HermitianMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("HermitianMatrix::at");
  return i <= j ? upper_[index(i, j)] : std::conj(upper_[index(j, i)]);
}

Eigen::MatrixXcd HermitianMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXcd a(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      a(i, j) = upper_[k];
      a(j, i) = std::conj(upper_[k]);
    }
  }
  return a;
}

double HermitianMatrix::quadratic_form(const ComplexVector& x) const {
  require_same_dim(n_, x.size(), "HermitianMatrix::quadratic_form");
  double diag = 0.0;
  Complex off = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    diag += upper_[k++].real() * std::norm(x[i]);
    const Complex xi = std::conj(x[i]);
    for (std::size_t j = i + 1; j < n_; ++j) off += xi * upper_[k++] * x[j];
  }
  return diag + 2.0 * off.real();
}

Complex HermitianMatrix::bilinear(const ComplexVector& u, const ComplexVector& v) const {
  require_same_dim(n_, u.size(), "HermitianMatrix::bilinear");
  require_same_dim(n_, v.size(), "HermitianMatrix::bilinear");
  Complex acc = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const Complex ui = std::conj(u[i]);
    acc += ui * upper_[k++].real() * v[i];
    for (std::size_t j = i + 1; j < n_; ++j, ++k) {
      acc += ui * upper_[k] * v[j];
      acc += std::conj(u[j]) * std::conj(upper_[k]) * v[i];
    }
  }
  return acc;
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    s += std::norm(upper_[k++]);
    for (std::size_t j = i + 1; j < n_; ++j) s += 2.0 * std::norm(upper_[k++]);
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Operations

double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& m) {
  require_same_dim(a.dim(), m.dim(), "hermitian_inner");
  const auto au = a.upper();
  const auto mu = m.upper();
  // conj(a_ij) m_ij + conj(a_ji) m_ji = 2 Re(conj(a_ij) m_ij) off the diagonal.
  double diag = 0.0;
  double off = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    diag += au[k].real() * mu[k].real();
    ++k;
    for (std::size_t j = i + 1; j < a.dim(); ++j, ++k) off += (std::conj(au[k]) * mu[k]).real();
  }
  return diag + 2.0 * off;
}

HermitianMatrix outer_difference(const ComplexVector& x, const ComplexVector& y) {
  require_same_dim(x.size(), y.size(), "outer_difference");
  const std::size_t n = x.size();
  std::vector<Complex> upper;
  upper.reserve(HermitianMatrix::packed_size(n));
  for (std::size_t i = 0; i < n; ++i) {
    upper.emplace_back(std::norm(x[i]) - std::norm(y[i]), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      upper.push_back(x[i] * std::conj(x[j]) - y[i] * std::conj(y[j]));
    }
  }
  return HermitianMatrix(n, std::move(upper));
}

HermitianMatrix symmetric_outer(const ComplexVector& u, const ComplexVector& v) {
  require_same_dim(u.size(), v.size(), "symmetric_outer");
  const std::size_t n = u.size();
  std::vector<Complex> upper;
  upper.reserve(HermitianMatrix::packed_size(n));
  for (std::size_t i = 0; i < n; ++i) {
    upper.emplace_back(2.0 * (u[i] * std::conj(v[i])).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      upper.push_back(u[i] * std::conj(v[j]) + v[i] * std::conj(u[j]));
    }
  }
  return HermitianMatrix(n, std::move(upper));
}

double equiv_distance(const ComplexVector& x, const ComplexVector& y) {
  return outer_difference(x, y).frobenius_norm();
}

double equiv_distance_fast(const ComplexVector& x, const ComplexVector& y) {
  require_same_dim(x.size(), y.size(), "equiv_distance_fast");
  const double nx = x.squared_norm();
  const double ny = y.squared_norm();
  const double d2 = nx * nx + ny * ny - 2.0 * std::norm(inner(x, y));
  return std::sqrt(std::max(d2, 0.0));
}

double optimal_phase(const ComplexVector& x, const ComplexVector& z) {
  const Complex c = inner(z, x);  // z* x; e^{i phi} z aligns with x
  if (c == Complex(0.0, 0.0)) return 0.0;
  double phi = std::arg(c);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  return phi;
}

AlignedDifference aligned_delta(const ComplexVector& x, const ComplexVector& z) {
  const double phi = optimal_phase(x, z);
  return {phi, x - std::polar(1.0, phi) * z};
}

}  // namespace qfeas
