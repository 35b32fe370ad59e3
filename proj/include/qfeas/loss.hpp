#pragma once

#include <functional>

#include "qfeas/core.hpp"
#include "qfeas/measurement.hpp"

namespace qfeas {

/// The least-squares objective
///
///   f(x) = (1/m) sum_i (x* A_i x - c_i)^2
///
/// over x in C^n, viewed as a function of the 2n real coordinates.
///
/// Derivative conventions (all pinned by finite differences in the tests):
///   * wirtinger_gradient returns g = (2/m) sum_i r_i A_i x with
///     r_i = x* A_i x - c_i, so that d/dt f(x + t D)|_0 = 2 Re <g, D>.
///   * The real gradient (d f/d Re x + i d f/d Im x) is 2 g; gradient_norm()
///     is its Euclidean norm and gradient descent steps along -2 g.
///   * hessian_quadratic_form(x, D) = d^2/dt^2 f(x + t D)|_0
///       = (1/m) sum_i [ 4 r_i D* A_i D + 8 (Re D* A_i x)^2 ].
///   * hessian_matrix H satisfies [D; conj D]* H [D; conj D] = the same value,
///     so Rayleigh quotients are taken against ||[D; conj D]||^2 = 2 ||D||^2.
class LossProblem {
 public:
  LossProblem(MeasurementEnsemble ensemble, MeasurementVector observations);

  const MeasurementEnsemble& ensemble() const { return ensemble_; }
  const MeasurementVector& observations() const { return observations_; }
  std::size_t n() const { return ensemble_.n(); }
  std::size_t m() const { return ensemble_.m(); }
  const std::vector<Eigen::MatrixXcd>& dense() const { return dense_; }

 private:
  MeasurementEnsemble ensemble_;
  MeasurementVector observations_;
  std::vector<Eigen::MatrixXcd> dense_;
};

/// Noiseless problem with observations forward_map(ens, z).
LossProblem make_noiseless_problem(const MeasurementEnsemble& ens, const ComplexVector& z);

struct WirtingerGradient {
  ComplexVector g_x;
  ComplexVector g_xbar() const { return g_x.conj(); }
};

/// Euclidean norm of the real gradient, 2 ||g_x||.
double gradient_norm(const WirtingerGradient& g);

struct LossEvaluation {
  double value = 0.0;
  WirtingerGradient gradient;
};

double loss(const LossProblem& p, const ComplexVector& x);
WirtingerGradient wirtinger_gradient(const LossProblem& p, const ComplexVector& x);
/// One pass over the measurements for both quantities.
LossEvaluation evaluate(const LossProblem& p, const ComplexVector& x);

double hessian_quadratic_form(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta);

/// Q(x)[D] / ||[D; conj D]||^2; 0 for D = 0.
double rayleigh_quotient(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta);

/// 2n x 2n Wirtinger Hessian in the (x, conj x) coordinates, averaged over
/// measurements:
///   (2/m) sum_i [ r_i A_i + v_i v_i^*      v_i v_i^T
///                 conj(v_i) v_i^*          r_i conj(A_i) + conj(v_i) v_i^T ],  v_i = A_i x.
/// Hermitian by construction. Only meant for small n.
Eigen::MatrixXcd hessian_matrix(const LossProblem& p, const ComplexVector& x);

/// Smallest eigenvalue of hessian_matrix, which equals the minimum of
/// rayleigh_quotient over all directions.
double hessian_min_eigenvalue(const LossProblem& p, const ComplexVector& x);

using ScalarField = std::function<double(const ComplexVector&)>;

/// Central differences of fn in the 2n real coordinates, reassembled as
/// d/dRe + i d/dIm. For the loss this approximates 2 g_x.
ComplexVector central_gradient(const ScalarField& fn, const ComplexVector& x, double h);

/// (fn(x + hD) - 2 fn(x) + fn(x - hD)) / h^2.
double second_difference(const ScalarField& fn, const ComplexVector& x, const ComplexVector& delta, double h);

/// Directional derivative (fn(x + hD) - fn(x - hD)) / 2h.
double directional_difference(const ScalarField& fn, const ComplexVector& x, const ComplexVector& delta,
                              double h);

ComplexVector fd_gradient(const LossProblem& p, const ComplexVector& x, double h = 1e-6);
double fd_second_difference(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta,
                            double h = 1e-4);

}  // namespace qfeas
