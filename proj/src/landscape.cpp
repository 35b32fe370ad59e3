#include "qfeas/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qfeas/parallel.hpp"
#include "qfeas/rng.hpp"

namespace qfeas {

namespace {

double percentile(std::vector<double> v, double pct) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Stability

double stability_ratio(const MeasurementEnsemble& ens, const ComplexVector& x, const ComplexVector& y) {
  const double d = equiv_distance(x, y);
  // Rounding leaves d around 1e-16 for phase-rotated copies.
  if (d <= 1e-12 * (x.squared_norm() + y.squared_norm())) throw std::domain_error("stability_ratio: x ~ y");
  double acc = 0.0;
  for (const auto& a : ens.matrices()) {
    const double r = a.quadratic_form(x) - a.quadratic_form(y);
    acc += r * r;
  }
  return acc / static_cast<double>(ens.m()) / (d * d);
}

StabilityEstimate stability_estimate(const MeasurementEnsemble& ens, std::size_t num_pairs, std::uint64_t seed,
                                     bool retain_samples) {
  if (num_pairs == 0) throw std::invalid_argument("stability_estimate: num_pairs must be >= 1");
  StabilityEstimate est;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = 0.0;
  double vsum = 0.0;
  for (std::size_t k = 0; k < num_pairs; ++k) {
    Rng rng = make_rng(derive_seed(seed, k));
    const ComplexVector x = unit_sphere_point(rng, ens.n());
    const ComplexVector y = unit_sphere_point(rng, ens.n());
    if (equiv_distance(x, y) <= 1e-8) {
      ++est.degenerate_pairs;
      continue;
    }
    const double v = stability_ratio(ens, x, y);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    vsum += v;
    ++est.num_pairs;
    if (retain_samples) est.ratio_samples.push_back(v);
  }
  if (est.num_pairs == 0) throw std::runtime_error("stability_estimate: every sampled pair was degenerate");
  est.alpha_hat = std::sqrt(vmin);
  est.beta_hat = std::sqrt(vmax);
  est.mean_ratio = vsum / static_cast<double>(est.num_pairs);
  return est;
}

// ---------------------------------------------------------------------------
// Concentration

ConcentrationReport concentration_experiment(std::size_t n, std::size_t m, std::size_t trials, double epsilon,
                                             std::uint64_t seed, unsigned jobs) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("concentration_experiment: epsilon must be positive");
  ConcentrationReport rep;
  rep.n = n;
  rep.m = m;
  rep.trials = trials;
  rep.epsilon = epsilon;
  rep.ratios.assign(trials, 0.0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    const auto ens = sample_hermitian_gaussian(n, m, 1.0, derive_seed(seed, t, 0));
    Rng rng = make_rng(derive_seed(seed, t, 1));
    ComplexVector x = unit_sphere_point(rng, n);
    ComplexVector y = unit_sphere_point(rng, n);
    while (equiv_distance(x, y) <= 1e-8) y = unit_sphere_point(rng, n);
    rep.ratios[t] = stability_ratio(ens, x, y);
  });
  std::size_t tail = 0;
  double sum = 0.0;
  for (double r : rep.ratios) {
    sum += r;
    if (std::abs(r - 1.0) >= epsilon) ++tail;
  }
  if (trials > 0) {
    rep.empirical_mean_ratio = sum / static_cast<double>(trials);
    rep.tail_fraction = static_cast<double>(tail) / static_cast<double>(trials);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cross term

double cross_term_statistic(const MeasurementEnsemble& ens, const ComplexVector& x, const ComplexVector& delta) {
  require_same_dim(ens.n(), x.size(), "cross_term_statistic");
  require_same_dim(ens.n(), delta.size(), "cross_term_statistic");
  double acc = 0.0;
  for (const auto& a : ens.matrices()) {
    // <A, DD*> = D*AD, <A, xx*> = x*Ax, <A, Dx*> = x*AD, <A, xD*> = D*Ax.
    const double dd = a.quadratic_form(delta);
    const double xx = a.quadratic_form(x);
    const Complex xd = a.bilinear(x, delta);
    acc += dd * xx - std::norm(xd);
  }
  return acc / static_cast<double>(ens.m());
}

CrossTermSummary cross_term_experiment(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed,
                                       unsigned jobs) {
  if (trials == 0) throw std::invalid_argument("cross_term_experiment: trials must be >= 1");
  CrossTermSummary s;
  s.n = n;
  s.m = m;
  s.trials = trials;
  Rng rng = make_rng(derive_seed(seed, 0x78746572ULL));
  s.x = unit_sphere_point(rng, n);
  s.delta = unit_sphere_point(rng, n);
  const double scale = s.delta.squared_norm() * s.x.squared_norm();
  s.analytic_expectation = std::norm(inner(s.x, s.delta)) / scale - 1.0;
  std::vector<double> vals(trials);
  parallel_for(trials, jobs, [&](std::size_t t) {
    const auto ens = sample_hermitian_gaussian(n, m, 1.0, derive_seed(seed, t));
    vals[t] = cross_term_statistic(ens, s.x, s.delta) / scale;
  });
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(trials);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  s.normalized_mean = mean;
  s.normalized_std = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Strict saddle

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::large_gradient: return "large_gradient";
    case Verdict::negative_curvature: return "negative_curvature";
    case Verdict::near_minimum: return "near_minimum";
    case Verdict::violation: return "VIOLATION";
  }
  return "unknown";
}

std::string_view to_string(PointGenerator g) {
  switch (g) {
    case PointGenerator::mixed: return "mixed";
    case PointGenerator::uniform_ball: return "uniform_ball";
    case PointGenerator::trajectory: return "trajectory";
    case PointGenerator::near_orbit: return "near_orbit";
    case PointGenerator::orbit: return "orbit";
  }
  return "unknown";
}

PointGenerator parse_point_generator(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) {
    if (ch == '-') ch = '_';
  }
  if (s == "mixed") return PointGenerator::mixed;
  if (s == "uniform_ball" || s == "ball") return PointGenerator::uniform_ball;
  if (s == "trajectory") return PointGenerator::trajectory;
  if (s == "near_orbit" || s == "near") return PointGenerator::near_orbit;
  if (s == "orbit") return PointGenerator::orbit;
  throw std::invalid_argument("unknown point generator '" + std::string(name) + "'");
}

SaddleCertificate saddle_certificate(const LossProblem& p, const ComplexVector& z, const ComplexVector& x,
                                     const SaddleThresholds& thr) {
  require_same_dim(p.n(), x.size(), "saddle_certificate");
  require_same_dim(p.n(), z.size(), "saddle_certificate");
  SaddleCertificate c;
  c.x = x;
  c.thresholds = thr;
  c.gradient_norm = gradient_norm(wirtinger_gradient(p, x));
  const ComplexVector delta = aligned_delta(x, z).delta;
  c.curvature_along_delta = rayleigh_quotient(p, x, delta);
  c.distance_to_truth = equiv_distance(x, z);
  if (c.gradient_norm >= thr.beta_thr) {
    c.verdict = Verdict::large_gradient;
  } else if (delta.squared_norm() > 0.0 && c.curvature_along_delta <= -thr.zeta) {
    c.verdict = Verdict::negative_curvature;
  } else if (c.distance_to_truth <= thr.gamma) {
    c.verdict = Verdict::near_minimum;
  } else {
    c.verdict = Verdict::violation;
  }
  return c;
}

namespace {

std::vector<ComplexVector> trajectory_points(const LossProblem& p, std::size_t count, std::uint64_t seed) {
  static constexpr std::array<int, 9> kSnapshots{0, 1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<ComplexVector> out;
  out.reserve(count);
  for (std::uint64_t traj = 0; out.size() < count; ++traj) {
    Rng rng = make_rng(derive_seed(seed, traj));
    std::uniform_real_distribution<double> u(-4.0, 0.0);
    const double base = 1.0 / std::sqrt(2.0 * static_cast<double>(p.n()));
    SolverConfig cfg;
    cfg.init = RandomInit{base * std::pow(10.0, u(rng))};  // start norms from 1e-4 to 1
    cfg.seed = derive_seed(seed, traj, 1);
    for (int snap : kSnapshots) {
      if (out.size() >= count) break;
      cfg.max_iters = snap;
      out.push_back(solve(p, cfg).trace.x_hat);
    }
  }
  return out;
}

}  // namespace

std::vector<ScanPoint> generate_points(const LossProblem& p, const ComplexVector& z, std::size_t count,
                                       PointGenerator gen, std::uint64_t seed) {
  const std::size_t n = p.n();
  const double zn = z.norm();
  std::vector<ScanPoint> out;
  out.reserve(count);
  auto ball = [&](std::size_t k, std::uint64_t s) {
    for (std::size_t i = 0; i < k; ++i) {
      Rng rng = make_rng(derive_seed(s, i));
      out.push_back({ball_point(rng, n, 2.0 * zn), PointGenerator::uniform_ball});
    }
  };
  auto near = [&](std::size_t k, std::uint64_t s) {
    for (std::size_t i = 0; i < k; ++i) {
      Rng rng = make_rng(derive_seed(s, i));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double theta = 2.0 * std::numbers::pi * u(rng);
      const double radius = 0.3 * zn * u(rng);
      out.push_back({std::polar(1.0, theta) * z + ball_point(rng, n, radius), PointGenerator::near_orbit});
    }
  };
  auto traj = [&](std::size_t k, std::uint64_t s) {
    for (auto& x : trajectory_points(p, k, s)) out.push_back({std::move(x), PointGenerator::trajectory});
  };
  switch (gen) {
    case PointGenerator::uniform_ball: ball(count, seed); break;
    case PointGenerator::near_orbit: near(count, seed); break;
    case PointGenerator::trajectory: traj(count, seed); break;
    case PointGenerator::orbit:
      for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_rng(derive_seed(seed, i));
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        out.push_back({std::polar(1.0, u(rng)) * z, PointGenerator::orbit});
      }
      break;
    case PointGenerator::mixed: {
      const std::size_t n_ball = count * 4 / 10;
      const std::size_t n_traj = count * 4 / 10;
      const std::size_t n_near = count - n_ball - n_traj;
      ball(n_ball, derive_seed(seed, 1));
      traj(n_traj, derive_seed(seed, 2));
      near(n_near, derive_seed(seed, 3));
      break;
    }
  }
  return out;
}

Calibration calibrate_thresholds(const LossProblem& p, const ComplexVector& z, std::size_t pilot_points,
                                 std::uint64_t seed) {
  Calibration cal;
  cal.pilot_points = pilot_points;
  const auto pts = generate_points(p, z, pilot_points, PointGenerator::mixed, derive_seed(seed, 0x70696c74ULL));

  std::vector<double> ball_grads;
  std::vector<SaddleCertificate> probes;
  probes.reserve(pts.size());
  const SaddleThresholds none{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (const auto& sp : pts) {
    probes.push_back(saddle_certificate(p, z, sp.x, none));
    if (sp.source == PointGenerator::uniform_ball) ball_grads.push_back(probes.back().gradient_norm);
  }
  const double zn = std::max(z.norm(), 1e-300);
  const double var = p.ensemble().variance();
  cal.ball_grad_percentile = percentile(ball_grads, cal.grad_percentile);
  // The percentile sets the gradient scale of the instance; the threshold
  // itself sits a factor c / c0 below it, and gamma converts c0 times the
  // threshold into a distance (near the orbit the gradient grows like
  // variance * ||z|| * d(x, z)).
  cal.grad_delta = cal.ball_grad_percentile * cal.c / cal.c0;
  cal.thresholds.beta_thr = cal.grad_delta;
  cal.thresholds.gamma = cal.c0 * cal.grad_delta / (var * zn);

  double gap = std::numeric_limits<double>::infinity();
  for (const auto& c : probes) {
    if (c.gradient_norm < cal.thresholds.beta_thr && c.distance_to_truth > cal.thresholds.gamma &&
        c.curvature_along_delta < 0.0) {
      gap = std::min(gap, -c.curvature_along_delta);
    }
  }
  // Without pilot points in the saddle region fall back to a small fraction
  // of the curvature scale at the origin, variance * ||z||^2.
  cal.curvature_gap = std::isfinite(gap) ? gap : 0.0;
  cal.thresholds.zeta = std::isfinite(gap) ? 0.5 * gap : 1e-3 * var * zn * zn;
  return cal;
}

ScanReport landscape_scan(const LossProblem& p, const ComplexVector& z, std::size_t num_points,
                          PointGenerator gen, const SaddleThresholds& thr, std::uint64_t seed, unsigned jobs) {
  ScanReport rep;
  rep.thresholds = thr;
  const auto pts = generate_points(p, z, num_points, gen, seed);
  rep.num_points = pts.size();
  rep.certificates.resize(pts.size());
  rep.sources.resize(pts.size());
  std::vector<double> fd_err(pts.size(), 0.0);
  parallel_for(pts.size(), jobs, [&](std::size_t i) {
    rep.certificates[i] = saddle_certificate(p, z, pts[i].x, thr);
    rep.sources[i] = pts[i].source;
    const ComplexVector delta = aligned_delta(pts[i].x, z).delta;
    const double dn = delta.norm();
    if (dn > 0.0) {
      const ComplexVector u = delta * Complex(1.0 / dn);
      const double q = hessian_quadratic_form(p, pts[i].x, u);
      const double fd = fd_second_difference(p, pts[i].x, u, 1e-4);
      fd_err[i] = std::abs(q - fd) / std::max(1.0, std::abs(q));
    }
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& c = rep.certificates[i];
    ++rep.histogram[static_cast<std::size_t>(c.verdict)];
    if (c.verdict == Verdict::violation) rep.violations.push_back(c);
    rep.max_fd_curvature_rel_error = std::max(rep.max_fd_curvature_rel_error, fd_err[i]);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Local minima

double min_random_rayleigh(const LossProblem& p, const ComplexVector& x, std::size_t directions,
                           std::uint64_t seed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < directions; ++k) {
    Rng rng = make_rng(derive_seed(seed, k));
    best = std::min(best, rayleigh_quotient(p, x, unit_sphere_point(rng, p.n())));
  }
  return best;
}

LocalMinReport local_min_global_check(const MeasurementEnsemble& ens, const ComplexVector& z,
                                      std::size_t num_trials, const SolverConfig& cfg, double zeta_tol,
                                      std::uint64_t seed, unsigned jobs, std::size_t directions) {
  const LossProblem p = make_noiseless_problem(ens, z);
  LocalMinReport rep;
  rep.trials = num_trials;
  rep.zeta_tol = zeta_tol;
  rep.details.resize(num_trials);
  parallel_for(num_trials, jobs, [&](std::size_t t) {
    SolverConfig c = cfg;
    c.seed = derive_seed(seed, t);
    const SolveOutcome out = solve(p, c, z);
    LocalMinTrial& tr = rep.details[t];
    tr.rel_error = out.result->rel_error;
    tr.iterations = out.result->iterations;
    tr.converged = out.result->converged;
    tr.success = out.result->success;
    tr.final_grad_norm = out.trace.records.back().grad_norm;
    if (tr.converged) {
      tr.min_rayleigh = min_random_rayleigh(p, out.trace.x_hat, directions, derive_seed(seed, t, 1));
      double curvature = *tr.min_rayleigh;
      if (p.n() <= 32) {
        tr.min_eigenvalue = hessian_min_eigenvalue(p, out.trace.x_hat);
        curvature = *tr.min_eigenvalue;
      }
      tr.counterexample = curvature >= -zeta_tol && tr.rel_error >= c.success_tol;
    }
  });
  for (const auto& tr : rep.details) {
    rep.converged += tr.converged ? 1 : 0;
    rep.successes += tr.success ? 1 : 0;
    rep.counterexamples += tr.counterexample ? 1 : 0;
  }
  return rep;
}

}  // namespace qfeas
