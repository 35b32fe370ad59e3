#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qfeas/landscape.hpp"
#include "qfeas/rng.hpp"

using namespace qfeas;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Inst {
  MeasurementEnsemble ens;
  ComplexVector z;
  LossProblem p;
};

Inst make(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto ens = sample_hermitian_gaussian(n, m, 1.0, seed);
  Rng rng = make_rng(seed + 1);
  auto z = unit_sphere_point(rng, n);
  auto p = make_noiseless_problem(ens, z);
  return {std::move(ens), std::move(z), std::move(p)};
}

// Direct evaluation of the cross-term statistic with dense matrices.
double cross_term_oracle(const MeasurementEnsemble& ens, const ComplexVector& x, const ComplexVector& d) {
  double acc = 0.0;
  for (const auto& a : ens.matrices()) {
    const Eigen::MatrixXcd ad = a.dense();
    const Eigen::VectorXcd& xv = x.vec();
    const Eigen::VectorXcd& dv = d.vec();
    // <A, u v*> = trace(A* u v*) = v* A u for Hermitian A.
    const Complex dd = dv.dot(ad * dv);
    const Complex xx = xv.dot(ad * xv);
    const Complex dx = xv.dot(ad * dv);  // <A, D x*>
    const Complex xd = dv.dot(ad * xv);  // <A, x D*>
    acc += (dd * xx - dx * xd).real();
  }
  return acc / static_cast<double>(ens.m());
}

}  // namespace

TEST_CASE("stability ratio is scale and phase invariant") {
  const auto ens = sample_hermitian_gaussian(5, 40, 1.0, 1);
  Rng rng = make_rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto x = complex_gaussian(rng, 5, 1.0);
    const auto y = complex_gaussian(rng, 5, 1.0);
    const double v = stability_ratio(ens, x, y);
    const Complex c = std::polar(0.3 + t, 0.7 * t);
    CHECK(stability_ratio(ens, x * c, y * c) == doctest::Approx(v).epsilon(1e-10));
    CHECK(stability_ratio(ens, x * std::polar(1.0, 1.0), y * std::polar(1.0, -2.0)) ==
          doctest::Approx(v).epsilon(1e-10));
  }
  const auto x = unit_sphere_point(rng, 5);
  CHECK_THROWS_AS(stability_ratio(ens, x, x * std::polar(1.0, 0.5)), std::domain_error);
}

TEST_CASE("stability estimate ordering and normalisation") {
  const auto ens = sample_hermitian_gaussian(6, 120, 1.0, 3);
  const auto est = stability_estimate(ens, 10000, 4, true);
  CHECK(est.alpha_hat > 0.0);
  CHECK(est.alpha_hat <= est.beta_hat);
  CHECK(est.num_pairs == 10000);
  CHECK(est.ratio_samples.size() == 10000);
  // The (1/m)-averaged ratio has expectation one.
  CHECK(est.mean_ratio >= 0.9);
  CHECK(est.mean_ratio <= 1.1);
  CHECK(stability_estimate(ens, 100, 4).alpha_hat == stability_estimate(ens, 100, 4).alpha_hat);
  CHECK_THROWS_AS(stability_estimate(ens, 0, 4), std::invalid_argument);
}

TEST_CASE("identity measurements cannot separate unit vectors") {
  const MeasurementEnsemble ens(3, EnsembleKind::user_supplied,
                                std::vector<HermitianMatrix>(10, HermitianMatrix::identity(3)));
  const auto est = stability_estimate(ens, 500, 5);
  CHECK(est.alpha_hat <= 1e-12);
}

TEST_CASE("concentration experiment") {
  const auto r = concentration_experiment(4, 300, 100, 0.5, 6);
  CHECK(r.ratios.size() == 100);
  CHECK(r.empirical_mean_ratio == doctest::Approx(1.0).epsilon(0.1));
  CHECK(r.tail_fraction >= 0.0);
  CHECK(r.tail_fraction <= 1.0);
  CHECK(concentration_experiment(4, 30, 50, kInf, 6).tail_fraction == 0.0);
  CHECK_THROWS_AS(concentration_experiment(4, 30, 5, 0.0, 6), std::invalid_argument);
  // Same output with a worker pool.
  const auto par = concentration_experiment(4, 300, 100, 0.5, 6, 3);
  CHECK(par.ratios == r.ratios);
}

TEST_CASE("cross-term statistic") {
  const auto ens = sample_hermitian_gaussian(4, 25, 1.0, 7);
  Rng rng = make_rng(8);
  const auto x = complex_gaussian(rng, 4, 1.0);
  const auto d = complex_gaussian(rng, 4, 1.0);
  CHECK(cross_term_statistic(ens, x, d) == doctest::Approx(cross_term_oracle(ens, x, d)).epsilon(1e-12));
  CHECK(cross_term_statistic(ens, x, ComplexVector::zeros(4)) == 0.0);
  CHECK(std::abs(cross_term_statistic(ens, x, x)) < 1e-12);
}

TEST_CASE("cross-term mean follows |<x, D>|^2 - ||x||^2 ||D||^2") {
  // Over Hermitian Gaussian ensembles E[<A, DD*><A, xx*>] = |<x, D>|^2 and
  // E[<A, Dx*><A, xD*>] = ||x||^2 ||D||^2, so the mean is nonpositive and
  // vanishes only when D is parallel to x.
  const auto s = cross_term_experiment(6, 500, 200, 9);
  const double overlap = std::norm(inner(s.x, s.delta));
  CHECK(s.analytic_expectation == doctest::Approx(overlap - 1.0).epsilon(1e-12));
  CHECK(s.normalized_mean == doctest::Approx(s.analytic_expectation).epsilon(0.1));
  CHECK(s.normalized_std > 0.0);
}

TEST_CASE("phase distance") {
  Rng rng = make_rng(10);
  const auto x = unit_sphere_point(rng, 3);
  const auto u = unit_sphere_point(rng, 3);
  CHECK(phase_distance(x, x * std::polar(1.0, 2.5)) < 1e-7);
  double best = kInf;
  for (int k = 0; k < 100000; ++k) best = std::min(best, (x - u * std::polar(1.0, 2e-5 * std::numbers::pi * k)).norm());
  CHECK(phase_distance(x, u) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("sphere net covers the probe set") {
  const auto net = build_sphere_net(2, 0.25, 11, {20000, 100000});
  CHECK(net.n == 2);
  CHECK(net.certified_radius <= 0.25);
  CHECK(net.points.size() > 4);
  CHECK(net.dense.size() == 2 * (20000 + 100000));
  // Independent probes: every one is within delta of some net point.
  Rng rng = make_rng(12);
  for (int k = 0; k < 2000; ++k) {
    const auto x = unit_sphere_point(rng, 2);
    double best = kInf;
    for (const auto& u : net.points) best = std::min(best, phase_distance(x, u));
    CHECK(best <= 0.25 + 0.05);
  }
  CHECK_THROWS_AS(build_sphere_net(4, 0.25, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_sphere_net(2, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_sphere_net(2, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_sphere_net(3, 0.05, 1, {50, 1000}), std::runtime_error);
}

TEST_CASE("covering sandwich examples") {
  const auto net = build_sphere_net(2, 0.25, 13, {20000, 100000});
  const auto zero = covering_net_check(HermitianMatrix::zeros(2), net);
  CHECK(zero.sup_net == 0.0);
  CHECK(zero.sup_dense == 0.0);
  CHECK(zero.holds);
  // diag(1, -1): x*Ax ranges over [-1, 1], so the supremum over pairs is 2.
  const HermitianMatrix a(2, {{1.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}});
  const auto r = covering_net_check(a, net);
  CHECK(r.sup_dense == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.holds);
  CHECK(r.lower == doctest::Approx(0.5 * r.sup_dense));
}

TEST_CASE("saddle certificate verdicts") {
  const auto in = make(4, 48, 14);
  SaddleThresholds thr{0.05, 0.1, 0.5};
  CHECK(saddle_certificate(in.p, in.z, in.z, thr).verdict == Verdict::near_minimum);

  Rng rng = make_rng(15);
  const auto far = unit_sphere_point(rng, 4) * Complex(5.0);
  const auto big = saddle_certificate(in.p, in.z, far, thr);
  CHECK(big.verdict == Verdict::large_gradient);

  // Near the origin the gradient vanishes while the curvature towards the
  // truth is strictly negative.
  const auto tiny = unit_sphere_point(rng, 4) * Complex(1e-4);
  const auto c = saddle_certificate(in.p, in.z, tiny, thr);
  CHECK(c.gradient_norm < 1e-3);
  CHECK(c.curvature_along_delta < -0.1);
  CHECK(c.verdict == Verdict::negative_curvature);

  // Impossible thresholds give a violation verdict, not an exception.
  const auto v = saddle_certificate(in.p, in.z, tiny, {kInf, kInf, 0.0});
  CHECK(v.verdict == Verdict::violation);
  CHECK_THROWS_AS(saddle_certificate(in.p, in.z, ComplexVector::zeros(3), thr), std::invalid_argument);
}

TEST_CASE("point generators") {
  const auto in = make(4, 40, 16);
  const auto pts = generate_points(in.p, in.z, 50, PointGenerator::mixed, 17);
  REQUIRE(pts.size() == 50);
  std::array<int, 5> count{};
  for (const auto& sp : pts) ++count[static_cast<std::size_t>(sp.source)];
  CHECK(count[static_cast<std::size_t>(PointGenerator::uniform_ball)] == 20);
  CHECK(count[static_cast<std::size_t>(PointGenerator::trajectory)] == 20);
  CHECK(count[static_cast<std::size_t>(PointGenerator::near_orbit)] == 10);
  const auto again = generate_points(in.p, in.z, 50, PointGenerator::mixed, 17);
  for (std::size_t i = 0; i < 50; ++i) CHECK(again[i].x.vec() == pts[i].x.vec());
  for (const auto& sp : generate_points(in.p, in.z, 30, PointGenerator::uniform_ball, 1)) {
    CHECK(sp.x.norm() <= 2.0 + 1e-12);
  }
  CHECK(parse_point_generator("near-orbit") == PointGenerator::near_orbit);
  CHECK_THROWS_AS(parse_point_generator("grid"), std::invalid_argument);
}

TEST_CASE("scan on the orbit and with vacuous thresholds") {
  const auto in = make(4, 40, 18);
  const auto orbit = landscape_scan(in.p, in.z, 40, PointGenerator::orbit, {0.01, 0.01, 1e-9}, 19);
  CHECK(orbit.histogram[static_cast<std::size_t>(Verdict::near_minimum)] == 40);
  const auto vac = landscape_scan(in.p, in.z, 60, PointGenerator::mixed, {kInf, kInf, kInf}, 20);
  CHECK(vac.histogram[static_cast<std::size_t>(Verdict::near_minimum)] == 60);
  CHECK(vac.max_fd_curvature_rel_error < 1e-4);
}

TEST_CASE("calibrated scan has no violations and is thread-count independent") {
  const auto in = make(6, 72, 21);
  const auto cal = calibrate_thresholds(in.p, in.z, 300, 22);
  CHECK(cal.thresholds.beta_thr > 0.0);
  CHECK(cal.thresholds.zeta > 0.0);
  CHECK(cal.thresholds.gamma == doctest::Approx(cal.c0 * cal.thresholds.beta_thr / in.z.norm()));
  const auto a = landscape_scan(in.p, in.z, 200, PointGenerator::mixed, cal.thresholds, 23, 1);
  const auto b = landscape_scan(in.p, in.z, 200, PointGenerator::mixed, cal.thresholds, 23, 3);
  CHECK(a.violations.empty());
  CHECK(a.histogram == b.histogram);
  for (std::size_t i = 0; i < a.certificates.size(); ++i) {
    CHECK(a.certificates[i].gradient_norm == b.certificates[i].gradient_norm);
  }
}

TEST_CASE("local minimum check") {
  const auto in = make(4, 40, 24);
  SolverConfig at_truth;
  at_truth.init = GivenInit{in.z};
  const auto r0 = local_min_global_check(in.ens, in.z, 3, at_truth, 1e-3, 25);
  CHECK(r0.counterexamples == 0);
  for (const auto& t : r0.details) CHECK(t.rel_error == 0.0);

  const auto r = local_min_global_check(in.ens, in.z, 10, SolverConfig{}, 1e-3, 26, 2, 200);
  CHECK(r.trials == 10);
  CHECK(r.counterexamples == 0);
  CHECK(r.successes == 10);
  for (const auto& t : r.details) {
    if (t.converged) {
      CHECK(t.min_rayleigh.has_value());
      CHECK(t.min_eigenvalue.has_value());
      CHECK(*t.min_rayleigh >= *t.min_eigenvalue - 1e-9);
    }
  }
}
