#include "qfeas/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qfeas/landscape.hpp"
#include "qfeas/loss.hpp"
#include "qfeas/measurement.hpp"
#include "qfeas/report.hpp"
#include "qfeas/rng.hpp"
#include "qfeas/solver.hpp"

namespace qfeas {

namespace {

constexpr std::uint64_t kSeed = 0x5eed0001ULL;

using Check = std::function<std::string()>;  // returns detail, throws on failure

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw CheckFailed(what);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

struct Instance {
  MeasurementEnsemble ens;
  ComplexVector z;
  LossProblem p;
};

Instance small_instance(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto ens = sample_hermitian_gaussian(n, m, 1.0, derive_seed(seed, 1));
  Rng rng = make_rng(derive_seed(seed, 2));
  ComplexVector z = unit_sphere_point(rng, n);
  LossProblem p = make_noiseless_problem(ens, z);
  return {std::move(ens), std::move(z), std::move(p)};
}

std::vector<std::pair<std::string, Check>> battery(const VerifyOptions& opts) {
  std::vector<std::pair<std::string, Check>> checks;

  checks.emplace_back("core.outer_norm_is_norm_fourth", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
      Rng rng = make_rng(derive_seed(kSeed, t));
      const auto x = complex_gaussian(rng, 5, 1.0);
      const double lhs = std::pow(outer_difference(x, ComplexVector::zeros(5)).frobenius_norm(), 2);
      worst = std::max(worst, std::abs(lhs - std::pow(x.squared_norm(), 2)) / std::pow(x.squared_norm(), 2));
    }
    expect(worst <= 1e-10, "relative error " + format_number(worst));
    return "max rel " + format_number(worst);
  });

  checks.emplace_back("core.distance_fast_path", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
      Rng rng = make_rng(derive_seed(kSeed, 100 + t));
      const auto x = complex_gaussian(rng, 4, 1.0);
      const auto y = complex_gaussian(rng, 4, 1.0);
      worst = std::max(worst, rel(equiv_distance(x, y), equiv_distance_fast(x, y)));
    }
    expect(worst <= 1e-10, "fast and direct distances differ by " + format_number(worst));
    return "max rel " + format_number(worst);
  });

  checks.emplace_back("core.distance_phase_invariance", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng = make_rng(derive_seed(kSeed, 200 + t));
      const auto x = complex_gaussian(rng, 4, 1.0);
      const auto y = complex_gaussian(rng, 4, 1.0);
      const Complex ph = std::polar(1.0, 0.37 * static_cast<double>(t));
      worst = std::max(worst, rel(equiv_distance(x, y), equiv_distance(x * ph, y)));
    }
    expect(worst <= 1e-10, "distance changed under a phase by " + format_number(worst));
    return "max rel " + format_number(worst);
  });

  checks.emplace_back("core.aligned_delta_real_overlap", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng = make_rng(derive_seed(kSeed, 300 + t));
      const auto x = complex_gaussian(rng, 6, 1.0);
      const auto z = complex_gaussian(rng, 6, 1.0);
      const auto ad = aligned_delta(x, z);
      const auto sum = x + z * std::polar(1.0, ad.phase);
      worst = std::max(worst, std::abs(inner(ad.delta, sum).imag()) / (x.squared_norm() + z.squared_norm()));
    }
    expect(worst <= 1e-10, "Im <D, x + e^{i phi} z> = " + format_number(worst));
    return "max scaled " + format_number(worst);
  });

  checks.emplace_back("measurement.serialization_round_trip", [] {
    const auto ens = sample_hermitian_gaussian(3, 7, 2.0, kSeed);
    expect(deserialize_ensemble(serialize_ensemble(ens)) == ens, "hermitian ensemble changed");
    const auto r1 = sample_rank_one(3, 5, kSeed);
    expect(deserialize_ensemble(serialize_ensemble(r1)) == r1, "rank-one ensemble changed");
    Rng rng = make_rng(kSeed);
    const auto z = unit_sphere_point(rng, 3);
    const auto c = forward_map(ens, z);
    expect(deserialize_observations(serialize_observations(c)) == c, "observations changed");
    return std::string("ensemble, observations");
  });

  checks.emplace_back("measurement.rank_one_nonnegative", [] {
    const auto ens = sample_rank_one(4, 40, kSeed);
    Rng rng = make_rng(derive_seed(kSeed, 9));
    const auto c = forward_map(ens, complex_gaussian(rng, 4, 1.0));
    const double lo = *std::min_element(c.values.begin(), c.values.end());
    expect(lo >= 0.0, "negative observation " + format_number(lo));
    return "min " + format_number(lo);
  });

  if (opts.fixture) {
    const auto path = *opts.fixture;
    checks.emplace_back("measurement.fixture", [path] {
      const auto ens = deserialize_ensemble(read_text_file(path));
      return "n=" + std::to_string(ens.n()) + " m=" + std::to_string(ens.m());
    });
  }

  checks.emplace_back("loss.gradient_matches_finite_difference", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 10; ++t) {
      const auto inst = small_instance(4, 20, derive_seed(kSeed, 400 + t));
      Rng rng = make_rng(derive_seed(kSeed, 500 + t));
      const auto x = complex_gaussian(rng, 4, 0.5);
      const auto d = unit_sphere_point(rng, 4);
      const auto g = wirtinger_gradient(inst.p, x);
      const double closed = 2.0 * inner(g.g_x, d).real();
      const double fd = directional_difference([&](const ComplexVector& v) { return loss(inst.p, v); }, x, d, 1e-6);
      worst = std::max(worst, std::abs(closed - fd) / std::max(1.0, std::abs(closed)));
    }
    expect(worst <= 1e-5, "directional derivative off by " + format_number(worst));
    return "max rel " + format_number(worst);
  });

  checks.emplace_back("loss.hessian_matches_second_difference", [] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 10; ++t) {
      const auto inst = small_instance(4, 20, derive_seed(kSeed, 600 + t));
      Rng rng = make_rng(derive_seed(kSeed, 700 + t));
      const auto x = complex_gaussian(rng, 4, 0.5);
      const auto d = unit_sphere_point(rng, 4);
      const double q = hessian_quadratic_form(inst.p, x, d);
      worst = std::max(worst, std::abs(q - fd_second_difference(inst.p, x, d)) / std::max(1.0, std::abs(q)));
    }
    expect(worst <= 1e-4, "second difference off by " + format_number(worst));
    return "max rel " + format_number(worst);
  });

  checks.emplace_back("loss.truth_is_stationary", [] {
    const auto inst = small_instance(5, 40, kSeed);
    const auto ev = evaluate(inst.p, inst.z * std::polar(1.0, 1.1));
    expect(ev.value <= 1e-20 && gradient_norm(ev.gradient) <= 1e-10, "loss or gradient nonzero at e^{it} z");
    return "f=" + format_number(ev.value);
  });

  checks.emplace_back("loss.rayleigh_bounded_by_min_eigenvalue", [] {
    const auto inst = small_instance(3, 15, derive_seed(kSeed, 3));
    Rng rng = make_rng(derive_seed(kSeed, 4));
    const auto x = complex_gaussian(rng, 3, 0.5);
    const double lam = hessian_min_eigenvalue(inst.p, x);
    const double ray = min_random_rayleigh(inst.p, x, 500, kSeed);
    expect(ray >= lam - 1e-9 * std::max(1.0, std::abs(lam)), "Rayleigh quotient below the smallest eigenvalue");
    return "lambda_min " + format_number(lam);
  });

  checks.emplace_back("solver.recovers_small_instance", [] {
    const auto inst = small_instance(4, 40, derive_seed(kSeed, 5));
    SolverConfig cfg;
    cfg.seed = derive_seed(kSeed, 6);
    const auto out = solve(inst.p, cfg, inst.z);
    expect(out.result->success, "rel_error " + format_number(out.result->rel_error));
    return "iterations " + std::to_string(out.result->iterations);
  });

  checks.emplace_back("solver.deterministic", [] {
    const auto inst = small_instance(4, 40, derive_seed(kSeed, 7));
    SolverConfig cfg;
    cfg.seed = derive_seed(kSeed, 8);
    const auto a = solve(inst.p, cfg, inst.z);
    const auto b = solve(inst.p, cfg, inst.z);
    expect(a.trace.x_hat.vec() == b.trace.x_hat.vec() && a.trace.iterations == b.trace.iterations,
           "two runs with one seed differ");
    return std::string("identical traces");
  });

  checks.emplace_back("solver.start_at_truth", [] {
    const auto inst = small_instance(4, 40, derive_seed(kSeed, 9));
    SolverConfig cfg;
    cfg.init = GivenInit{inst.z};
    const auto out = solve(inst.p, cfg, inst.z);
    expect(out.result->iterations == 0 && out.result->rel_error == 0.0, "moved away from the truth");
    return std::string("0 iterations");
  });

  checks.emplace_back("landscape.stability_order", [] {
    const auto ens = sample_hermitian_gaussian(4, 40, 1.0, kSeed);
    const auto s = stability_estimate(ens, 500, kSeed);
    expect(s.alpha_hat > 0.0 && s.alpha_hat <= s.beta_hat, "alpha_hat " + format_number(s.alpha_hat));
    return "alpha " + format_number(s.alpha_hat) + " beta " + format_number(s.beta_hat);
  });

  checks.emplace_back("landscape.stability_ratio_scaling", [] {
    const auto ens = sample_hermitian_gaussian(4, 30, 1.0, kSeed);
    Rng rng = make_rng(derive_seed(kSeed, 10));
    const auto x = complex_gaussian(rng, 4, 1.0);
    const auto y = complex_gaussian(rng, 4, 1.0);
    const Complex c{-1.7, 0.4};
    const double e = rel(stability_ratio(ens, x, y), stability_ratio(ens, x * c, y * c));
    expect(e <= 1e-10, "ratio changed by " + format_number(e));
    return "rel " + format_number(e);
  });

  checks.emplace_back("landscape.identity_not_injective", [] {
    std::vector<HermitianMatrix> mats(12, HermitianMatrix::identity(4));
    const MeasurementEnsemble ens(4, EnsembleKind::user_supplied, std::move(mats));
    const auto s = stability_estimate(ens, 200, kSeed);
    expect(s.alpha_hat <= 1e-12, "alpha_hat " + format_number(s.alpha_hat));
    return "alpha " + format_number(s.alpha_hat);
  });

  checks.emplace_back("landscape.certificate_at_truth", [] {
    const auto inst = small_instance(4, 40, derive_seed(kSeed, 11));
    const auto c = saddle_certificate(inst.p, inst.z, inst.z, {1e-3, 1e-3, 1e-3});
    expect(c.verdict == Verdict::near_minimum, "verdict " + std::string(to_string(c.verdict)));
    return std::string(to_string(c.verdict));
  });

  checks.emplace_back("landscape.cross_term_vanishing_cases", [] {
    const auto ens = sample_hermitian_gaussian(4, 20, 1.0, kSeed);
    Rng rng = make_rng(derive_seed(kSeed, 12));
    const auto x = unit_sphere_point(rng, 4);
    const double a = cross_term_statistic(ens, x, ComplexVector::zeros(4));
    const double b = cross_term_statistic(ens, x, x);
    expect(std::abs(a) <= 1e-12 && std::abs(b) <= 1e-12, "statistic nonzero for D = 0 or D = x");
    return "max " + format_number(std::max(std::abs(a), std::abs(b)));
  });

  checks.emplace_back("landscape.concentration_mean", [] {
    const auto r = concentration_experiment(4, 200, 50, 0.5, kSeed);
    expect(r.empirical_mean_ratio >= 0.85 && r.empirical_mean_ratio <= 1.15,
           "mean ratio " + format_number(r.empirical_mean_ratio));
    return "mean " + format_number(r.empirical_mean_ratio);
  });

  checks.emplace_back("landscape.covering_sandwich", [] {
    Rng rng = make_rng(derive_seed(kSeed, 13));
    std::normal_distribution<double> g;
    const HermitianMatrix a(2, {Complex(g(rng), 0.0), Complex(g(rng), g(rng)), Complex(g(rng), 0.0)});
    const auto r = covering_net_check(a, 0.25, kSeed, {20000, 200000});
    expect(r.holds, "sandwich broken: net " + format_number(r.sup_net) + " dense " + format_number(r.sup_dense));
    return "net size " + std::to_string(r.net_size);
  });

  return checks;
}

}  // namespace

std::vector<CheckResult> run_invariant_battery(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (auto& [name, fn] : battery(opts)) {
    CheckResult r{name, false, {}};
    try {
      r.detail = fn();
      r.passed = true;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void print_check_table(std::ostream& os, const std::vector<CheckResult>& results) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::size_t failed = 0;
  for (const auto& r : results) {
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << r.detail
       << '\n';
    if (!r.passed) ++failed;
  }
  os << results.size() - failed << '/' << results.size() << " checks passed";
  if (failed) {
    os << "; failing:";
    for (const auto& r : results) {
      if (!r.passed) os << ' ' << r.name;
    }
  }
  os << '\n';
}

}  // namespace qfeas
