#include "qfeas/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace qfeas {

LossProblem::LossProblem(MeasurementEnsemble ensemble, MeasurementVector observations)
    : ensemble_(std::move(ensemble)), observations_(std::move(observations)) {
  observations_.validate();
  require_same_dim(ensemble_.m(), observations_.m(), "LossProblem (measurements vs observations)");
  dense_.reserve(ensemble_.m());
  for (const auto& a : ensemble_.matrices()) dense_.push_back(a.dense());
}

LossProblem make_noiseless_problem(const MeasurementEnsemble& ens, const ComplexVector& z) {
  return LossProblem(ens, forward_map(ens, z));
}

double gradient_norm(const WirtingerGradient& g) { return 2.0 * g.g_x.norm(); }

double loss(const LossProblem& p, const ComplexVector& x) {
  require_same_dim(p.n(), x.size(), "loss");
  const auto& c = p.observations().values;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const double r = x.vec().dot(p.dense()[i] * x.vec()).real() - c[i];
    acc += r * r;
  }
  return acc / static_cast<double>(p.m());
}

LossEvaluation evaluate(const LossProblem& p, const ComplexVector& x) {
  require_same_dim(p.n(), x.size(), "evaluate");
  const auto& c = p.observations().values;
  const Eigen::VectorXcd& xv = x.vec();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(xv.size());
  Eigen::VectorXcd ax(xv.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    ax.noalias() = p.dense()[i] * xv;
    const double r = xv.dot(ax).real() - c[i];
    acc += r * r;
    g += r * ax;
  }
  const double inv_m = 1.0 / static_cast<double>(p.m());
  return {acc * inv_m, {ComplexVector(Eigen::VectorXcd(g * (2.0 * inv_m)))}};
}

WirtingerGradient wirtinger_gradient(const LossProblem& p, const ComplexVector& x) {
  return evaluate(p, x).gradient;
}

double hessian_quadratic_form(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta) {
  require_same_dim(p.n(), x.size(), "hessian_quadratic_form");
  require_same_dim(p.n(), delta.size(), "hessian_quadratic_form");
  const auto& c = p.observations().values;
  const Eigen::VectorXcd& xv = x.vec();
  const Eigen::VectorXcd& dv = delta.vec();
  Eigen::VectorXcd ax(xv.size());
  Eigen::VectorXcd ad(xv.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    ax.noalias() = p.dense()[i] * xv;
    ad.noalias() = p.dense()[i] * dv;
    const double r = xv.dot(ax).real() - c[i];
    const double curv = dv.dot(ad).real();
    const double slope = dv.dot(ax).real();
    acc += 4.0 * r * curv + 8.0 * slope * slope;
  }
  return acc / static_cast<double>(p.m());
}

double rayleigh_quotient(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta) {
  const double nrm = 2.0 * delta.squared_norm();
  if (nrm == 0.0) return 0.0;
  return hessian_quadratic_form(p, x, delta) / nrm;
}

Eigen::MatrixXcd hessian_matrix(const LossProblem& p, const ComplexVector& x) {
  require_same_dim(p.n(), x.size(), "hessian_matrix");
  const auto n = static_cast<Eigen::Index>(p.n());
  const auto& c = p.observations().values;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < p.m(); ++i) {
    const Eigen::MatrixXcd& a = p.dense()[i];
    const Eigen::VectorXcd v = a * x.vec();
    const double r = x.vec().dot(v).real() - c[i];
    const Eigen::MatrixXcd top_left = r * a + v * v.adjoint();
    h.topLeftCorner(n, n) += top_left;
    h.topRightCorner(n, n) += v * v.transpose();
    h.bottomLeftCorner(n, n) += v.conjugate() * v.adjoint();
    h.bottomRightCorner(n, n) += top_left.conjugate();
  }
  h *= 2.0 / static_cast<double>(p.m());
  return h;
}

double hessian_min_eigenvalue(const LossProblem& p, const ComplexVector& x) {
  const Eigen::MatrixXcd h = hessian_matrix(p, x);
  // Symmetrize away roundoff before the self-adjoint solver.
  const Eigen::MatrixXcd hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("hessian_min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Finite differences

ComplexVector central_gradient(const ScalarField& fn, const ComplexVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("central_gradient: step must be positive");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXcd g(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double part[2];
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e[k] = comp == 0 ? Complex(h, 0.0) : Complex(0.0, h);
      const double fp = fn(ComplexVector(Eigen::VectorXcd(x.vec() + e)));
      const double fm = fn(ComplexVector(Eigen::VectorXcd(x.vec() - e)));
      part[comp] = (fp - fm) / (2.0 * h);
    }
    g[k] = {part[0], part[1]};
  }
  return ComplexVector(std::move(g));
}

double second_difference(const ScalarField& fn, const ComplexVector& x, const ComplexVector& delta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("second_difference: step must be positive");
  const ComplexVector step = delta * Complex(h);
  return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / (h * h);
}

double directional_difference(const ScalarField& fn, const ComplexVector& x, const ComplexVector& delta,
                              double h) {
  if (!(h > 0.0)) throw std::invalid_argument("directional_difference: step must be positive");
  const ComplexVector step = delta * Complex(h);
  return (fn(x + step) - fn(x - step)) / (2.0 * h);
}

ComplexVector fd_gradient(const LossProblem& p, const ComplexVector& x, double h) {
  return central_gradient([&p](const ComplexVector& y) { return loss(p, y); }, x, h);
}

double fd_second_difference(const LossProblem& p, const ComplexVector& x, const ComplexVector& delta,
                            double h) {
  return second_difference([&p](const ComplexVector& y) { return loss(p, y); }, x, delta, h);
}

}  // namespace qfeas
