#include <doctest.h>

#include <cmath>

#include "qfeas/loss.hpp"
#include "qfeas/measurement.hpp"
#include "qfeas/rng.hpp"

using namespace qfeas;

namespace {

struct Inst {
  MeasurementEnsemble ens;
  ComplexVector z;
  LossProblem p;
};

Inst make(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto ens = sample_hermitian_gaussian(n, m, 1.0, seed);
  Rng rng = make_rng(seed + 1000);
  auto z = unit_sphere_point(rng, n);
  auto p = make_noiseless_problem(ens, z);
  return {std::move(ens), std::move(z), std::move(p)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("loss against a direct sum") {
  const auto in = make(4, 15, 1);
  Rng rng = make_rng(2);
  const auto x = complex_gaussian(rng, 4, 1.0);
  double want = 0.0;
  for (std::size_t i = 0; i < 15; ++i) {
    const Complex q = x.vec().dot(in.ens[i].dense() * x.vec());
    want += std::pow(q.real() - in.p.observations().values[i], 2);
  }
  want /= 15.0;
  CHECK(loss(in.p, x) == doctest::Approx(want).epsilon(1e-12));
  CHECK(evaluate(in.p, x).value == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("truth orbit is a zero of loss and gradient") {
  const auto in = make(5, 30, 3);
  for (double th : {0.0, 1.0, 4.0}) {
    const auto ev = evaluate(in.p, in.z * std::polar(1.0, th));
    CHECK(ev.value < 1e-28);
    CHECK(gradient_norm(ev.gradient) < 1e-13);
  }
}

TEST_CASE("gradient matches central differences in real coordinates") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto in = make(1 + s % 5, 10 + 2 * s, 10 + s);
    Rng rng = make_rng(50 + s);
    const auto x = complex_gaussian(rng, in.p.n(), 0.6);
    const auto g = wirtinger_gradient(in.p, x);
    const auto fd = fd_gradient(in.p, x);
    // The real gradient is twice the Wirtinger gradient.
    CHECK((fd.vec() - 2.0 * g.g_x.vec()).norm() <= 1e-6 * (1.0 + 2.0 * g.g_x.norm()));
    CHECK(gradient_norm(g) == doctest::Approx(2.0 * g.g_x.norm()));
    CHECK(g.g_xbar().vec() == g.g_x.vec().conjugate());
    const auto d = unit_sphere_point(rng, in.p.n());
    const double dir = directional_difference([&](const ComplexVector& v) { return loss(in.p, v); }, x, d, 1e-6);
    CHECK(rel(dir, 2.0 * inner(g.g_x, d).real()) < 1e-6);
  }
}

TEST_CASE("Hessian quadratic form matches second differences") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto in = make(2 + s % 4, 20, 100 + s);
    Rng rng = make_rng(150 + s);
    const auto x = complex_gaussian(rng, in.p.n(), 0.6);
    const auto d = unit_sphere_point(rng, in.p.n());
    const double q = hessian_quadratic_form(in.p, x, d);
    CHECK(rel(q, fd_second_difference(in.p, x, d)) < 1e-5);
    CHECK(rayleigh_quotient(in.p, x, d) == doctest::Approx(q / 2.0));
  }
}

TEST_CASE("scalar case against the real-variable Hessian") {
  // n = 1: f(u, v) = (1/m) sum (a_i (u^2 + v^2) - c_i)^2 with real a_i.
  const std::vector<double> a{0.7, -1.2, 2.0, 0.3};
  const std::vector<double> c{0.5, -0.4, 1.1, 0.9};
  std::vector<HermitianMatrix> mats;
  for (double ai : a) mats.emplace_back(1, std::vector<Complex>{{ai, 0.0}});
  const LossProblem p(MeasurementEnsemble(1, EnsembleKind::user_supplied, mats), MeasurementVector{c, {0, 0, 0, 0}});
  const double u = 0.8, v = -0.3;
  const ComplexVector x(std::vector<Complex>{{u, v}});
  double huu = 0.0, hvv = 0.0, huv = 0.0, gu = 0.0, gv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] * (u * u + v * v) - c[i];
    gu += 4.0 * a[i] * u * r;
    gv += 4.0 * a[i] * v * r;
    huu += 8.0 * a[i] * a[i] * u * u + 4.0 * a[i] * r;
    hvv += 8.0 * a[i] * a[i] * v * v + 4.0 * a[i] * r;
    huv += 8.0 * a[i] * a[i] * u * v;
  }
  const double m = static_cast<double>(a.size());
  const auto g = wirtinger_gradient(p, x);
  CHECK(2.0 * g.g_x[0].real() == doctest::Approx(gu / m).epsilon(1e-12));
  CHECK(2.0 * g.g_x[0].imag() == doctest::Approx(gv / m).epsilon(1e-12));
  for (double t : {0.0, 0.4, 1.3, 2.9}) {
    const double du = std::cos(t), dv = std::sin(t);
    const double want = (du * du * huu + 2.0 * du * dv * huv + dv * dv * hvv) / m;
    CHECK(hessian_quadratic_form(p, x, ComplexVector(std::vector<Complex>{{du, dv}})) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("Hessian matrix reproduces the quadratic form and bounds the Rayleigh quotient") {
  const auto in = make(2, 12, 7);
  Rng rng = make_rng(8);
  const auto x = complex_gaussian(rng, 2, 0.5);
  const Eigen::MatrixXcd h = hessian_matrix(in.p, x);
  REQUIRE(h.rows() == 4);
  CHECK((h - h.adjoint()).norm() < 1e-12 * h.norm());
  double min_ray = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20000; ++k) {
    const auto d = unit_sphere_point(rng, 2);
    Eigen::VectorXcd w(4);
    w << d.vec(), d.vec().conjugate();
    const double q = (w.adjoint() * h * w)(0, 0).real();
    CHECK(q == doctest::Approx(hessian_quadratic_form(in.p, x, d)).epsilon(1e-10));
    min_ray = std::min(min_ray, rayleigh_quotient(in.p, x, d));
  }
  const double lam = hessian_min_eigenvalue(in.p, x);
  CHECK(min_ray >= lam - 1e-10);
  // With 2e4 directions in real dimension 4 the sampled minimum is close.
  CHECK(min_ray - lam <= 2e-2 * std::max(1.0, std::abs(lam)));
}

TEST_CASE("phase symmetry of the loss") {
  const auto in = make(3, 18, 9);
  Rng rng = make_rng(10);
  const auto x = complex_gaussian(rng, 3, 1.0);
  const Complex ph = std::polar(1.0, 0.9);
  CHECK(loss(in.p, x * ph) == doctest::Approx(loss(in.p, x)).epsilon(1e-12));
  const auto g1 = wirtinger_gradient(in.p, x);
  const auto g2 = wirtinger_gradient(in.p, x * ph);
  CHECK((g2.g_x.vec() - ph * g1.g_x.vec()).norm() < 1e-12 * (1.0 + g1.g_x.norm()));
}

TEST_CASE("problem construction checks sizes") {
  const auto ens = sample_hermitian_gaussian(3, 5, 1.0, 1);
  CHECK_THROWS_AS(LossProblem(ens, MeasurementVector{{1.0, 2.0}, {0.0, 0.0}}), std::invalid_argument);
  const auto in = make(3, 5, 2);
  CHECK_THROWS_AS(loss(in.p, ComplexVector::zeros(2)), std::invalid_argument);
}
