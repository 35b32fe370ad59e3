// Acceptance runner. Each criterion prints one line:
//   criterion N: PASS|FAIL <measured values>
// and the process exits nonzero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qfeas/commands.hpp"
#include "qfeas/json_io.hpp"
#include "qfeas/landscape.hpp"
#include "qfeas/loss.hpp"
#include "qfeas/measurement.hpp"
#include "qfeas/parallel.hpp"
#include "qfeas/report.hpp"
#include "qfeas/rng.hpp"
#include "qfeas/solver.hpp"

using namespace qfeas;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) { return format_number(v); }

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

struct Instance {
  MeasurementEnsemble ens;
  ComplexVector z;
  LossProblem p;
};

Instance noiseless(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto ens = sample_hermitian_gaussian(n, m, 1.0, derive_seed(seed, 1));
  Rng rng = make_rng(derive_seed(seed, 2));
  auto z = unit_sphere_point(rng, n);
  auto p = make_noiseless_problem(ens, z);
  return {std::move(ens), std::move(z), std::move(p)};
}

Outcome derivatives() {
  double worst_dir = 0.0, worst_q = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::uint64_t s = derive_seed(kSeed, 1, k);
    const std::size_t n = 1 + k % 6;
    const std::size_t m = 5 + (k * 7) % 26;
    const auto in = noiseless(n, m, s);
    Rng rng = make_rng(derive_seed(s, 3));
    const auto x = complex_gaussian(rng, n, 1.0 / std::sqrt(2.0 * static_cast<double>(n)));
    const auto d = unit_sphere_point(rng, n);
    const auto fn = [&](const ComplexVector& v) { return loss(in.p, v); };
    const double closed = 2.0 * inner(wirtinger_gradient(in.p, x).g_x, d).real();
    worst_dir = std::max(worst_dir, rel_gap(closed, directional_difference(fn, x, d, 1e-6)));
    worst_q = std::max(worst_q, rel_gap(hessian_quadratic_form(in.p, x, d), fd_second_difference(in.p, x, d)));
  }
  return {worst_dir <= 1e-5 && worst_q <= 1e-4,
          "max rel gap directional " + fmt(worst_dir) + " (tol 1e-5), quadratic form " + fmt(worst_q) +
              " (tol 1e-4) over 50 instances"};
}

Outcome identities() {
  Rng rng = make_rng(derive_seed(kSeed, 2));
  double norm4 = 0.0, im = 0.0, split = 0.0, bound_excess = -1.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t) % 7;
    const auto x = complex_gaussian(rng, n, 1.0);
    const auto z = complex_gaussian(rng, n, 1.0);
    const double scale = std::pow(std::max(x.norm(), z.norm()), 2);
    const double xx = rank_one_matrix(x).frobenius_norm();
    norm4 = std::max(norm4, rel_gap(xx * xx, std::pow(x.norm(), 4)));
    const auto ad = aligned_delta(x, z);
    const auto w = z * std::polar(1.0, ad.phase);
    const auto u = x - w, v = x + w;
    im = std::max(im, std::abs(inner(ad.delta, v).imag()) / scale);
    const double dist2 = std::pow(equiv_distance(x, z), 2);
    bound_excess = std::max(bound_excess, 0.5 * std::pow(ad.delta.squared_norm(), 2) / dist2 - 1.0);
    const auto lhs = outer_difference(x, z);
    const auto rhs = symmetric_outer(u, v);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) split = std::max(split, std::abs(lhs.at(i, j) - 0.5 * rhs.at(i, j)) / scale);
    }
  }
  const bool ok = norm4 <= 1e-10 && im <= 1e-10 && bound_excess <= 1e-12 && split <= 1e-10;
  return {ok, "norm4 " + fmt(norm4) + ", imag overlap " + fmt(im) + ", half |DD*|^2 / d^2 - 1 max " +
                  fmt(bound_excess) + ", split " + fmt(split) + " over 1000 pairs"};
}

Outcome concentration(unsigned jobs) {
  const auto r = concentration_experiment(8, 500, 200, 0.5, derive_seed(kSeed, 3), jobs);
  std::size_t inversions = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    double prev = 2.0;
    for (std::size_t m : {100, 200, 400, 800}) {
      const double tail = concentration_experiment(8, m, 200, 0.5, derive_seed(kSeed, 30, s * 1000 + m), jobs)
                              .tail_fraction;
      if (tail > prev) ++inversions;
      prev = tail;
    }
  }
  const bool ok = r.empirical_mean_ratio >= 0.9 && r.empirical_mean_ratio <= 1.1 && r.tail_fraction <= 0.05 &&
                  inversions <= 1;
  return {ok, "mean Y/d^2 " + fmt(r.empirical_mean_ratio) + ", tail fraction " + fmt(r.tail_fraction) +
                  ", tail inversions over m grid and 10 seeds " + std::to_string(inversions)};
}

Outcome cross_term(unsigned jobs) {
  const auto s = cross_term_experiment(6, 500, 200, derive_seed(kSeed, 4), jobs);
  return {std::abs(s.normalized_mean) <= 0.1,
          "normalized mean " + fmt(s.normalized_mean) + " (tol 0.1), std " + fmt(s.normalized_std) +
              ", analytic expectation " + fmt(s.analytic_expectation)};
}

Outcome covering(unsigned jobs) {
  std::size_t held = 0, total = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (double delta : {0.1, 0.25}) {
    const auto net = build_sphere_net(2, delta, derive_seed(kSeed, 5, static_cast<std::uint64_t>(delta * 100)));
    const auto mats = sample_hermitian_gaussian(2, 20, 1.0, derive_seed(kSeed, 50));
    std::vector<CoveringReport> reps(20);
    parallel_for(20, jobs, [&](std::size_t k) { reps[k] = covering_net_check(mats[k], net); });
    for (const auto& r : reps) {
      ++total;
      if (r.holds) ++held;
      worst_slack = std::min({worst_slack, r.sup_net - r.lower, r.upper - r.sup_net});
    }
  }
  return {held == total, std::to_string(held) + "/" + std::to_string(total) +
                             " sandwiches hold, smallest slack " + fmt(worst_slack)};
}

struct RecoveryRun {
  LocalMinReport report;
  double zeta_tol = 0.0;
};

const RecoveryRun& recovery_run(unsigned jobs) {
  static const RecoveryRun run = [jobs] {
    const auto in = noiseless(16, 160, derive_seed(kSeed, 6));
    const auto cal = calibrate_thresholds(in.p, in.z, 500, derive_seed(kSeed, 60));
    SolverConfig cfg;
    cfg.max_iters = 5000;
    cfg.success_tol = 1e-5;
    RecoveryRun r;
    r.zeta_tol = cal.thresholds.zeta;
    r.report = local_min_global_check(in.ens, in.z, 100, cfg, r.zeta_tol, derive_seed(kSeed, 61), jobs);
    return r;
  }();
  return run;
}

Outcome recovery(unsigned jobs) {
  const auto& r = recovery_run(jobs).report;
  return {r.successes >= 95, std::to_string(r.successes) + "/100 trials reach rel_error < 1e-5 (need 95), " +
                                 std::to_string(r.converged) + " converged"};
}

Outcome spurious(unsigned jobs) {
  const auto& run = recovery_run(jobs);
  double min_ray = std::numeric_limits<double>::infinity();
  for (const auto& t : run.report.details) {
    if (t.min_rayleigh) min_ray = std::min(min_ray, *t.min_rayleigh);
  }
  return {run.report.counterexamples == 0, std::to_string(run.report.counterexamples) +
                                               " spurious minima among converged trials, zeta_tol " +
                                               fmt(run.zeta_tol) + ", smallest sampled Rayleigh " + fmt(min_ray)};
}

Outcome saddle_scan(unsigned jobs) {
  const auto in = noiseless(8, 96, derive_seed(kSeed, 8));
  const auto cal = calibrate_thresholds(in.p, in.z, 500, derive_seed(kSeed, 80));
  const auto scan = landscape_scan(in.p, in.z, 1000, PointGenerator::mixed, cal.thresholds, derive_seed(kSeed, 81), jobs);
  std::ostringstream os;
  os << scan.violations.size() << " violations in " << scan.num_points << " points (beta_thr "
     << fmt(cal.thresholds.beta_thr) << ", zeta " << fmt(cal.thresholds.zeta) << ", gamma " << fmt(cal.thresholds.gamma)
     << "; histogram";
  for (auto v : {Verdict::large_gradient, Verdict::negative_curvature, Verdict::near_minimum, Verdict::violation}) {
    os << ' ' << to_string(v) << '=' << scan.histogram[static_cast<std::size_t>(v)];
  }
  os << ')';
  return {scan.violations.empty() && scan.num_points == 1000, os.str()};
}

Outcome transition(unsigned jobs) {
  SolverConfig cfg;
  cfg.max_iters = 5000;
  cfg.success_tol = 1e-5;
  std::vector<SweepRow> rows;
  for (std::size_t k : {2, 4, 6, 8, 10}) {
    rows.push_back(run_sweep_cell(16, 16 * k, 50, EnsembleKind::hermitian_gaussian, 1.0, cfg, derive_seed(kSeed, 9), jobs));
  }
  std::ostringstream os;
  os << "success rates";
  for (const auto& r : rows) os << " m=" << r.m << ':' << fmt(r.success_rate);
  const double gain = rows.back().success_rate - rows.front().success_rate;
  os << "; gain " << fmt(gain) << " (need 0.3)";
  return {gain >= 0.30, os.str()};
}

Outcome injectivity() {
  std::ostringstream os;
  bool ok = true;
  for (std::size_t n : {4, 6, 8}) {
    const auto ens = sample_hermitian_gaussian(n, 10 * n, 1.0, derive_seed(kSeed, 10, n));
    const auto est = stability_estimate(ens, 10000, derive_seed(kSeed, 11, n));
    os << "n=" << n << " alpha_hat " << fmt(est.alpha_hat) << "; ";
    ok = ok && est.alpha_hat > 0.0;
  }
  const fs::path dir = fs::temp_directory_path() / "qfeas_acceptance_identity";
  fs::remove_all(dir);
  GlobalOptions g;
  g.seed = kSeed;
  g.out_dir = dir;
  StabilityOptions o;
  o.identity = true;
  o.n = 4;
  o.m = 40;
  std::ostringstream out, err;
  const int code = cmd_stability(g, o, out, err);
  const auto doc = parse_document(read_text_file(dir / "stability.json"));
  const bool flagged = code == kExitClaimFailed && doc["injective"] == false;
  os << "identity ensemble alpha_hat " << fmt(doc["estimate"]["alpha_hat"].get<double>()) << ", exit " << code
     << ", injective " << (doc["injective"].get<bool>() ? "true" : "false");
  return {ok && flagged, os.str()};
}

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), root).string(), read_text_file(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "qfeas_acceptance_determinism";
  fs::remove_all(base);
  int codes = 0;
  for (const char* run : {"a", "b"}) {
    GlobalOptions g;
    g.seed = kSeed;
    g.out_dir = base / run;
    std::ostringstream out, err;
    GenOptions gen;
    gen.noise = 0.05;
    codes |= cmd_gen(g, gen, out, err);
    SweepOptions sw;
    sw.n = 6;
    sw.m_per_n = {2, 4, 8};
    sw.trials = 10;
    codes |= cmd_sweep(g, sw, out, err);
  }
  const auto a = read_tree(base / "a");
  const auto b = read_tree(base / "b");
  std::size_t same = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) same += a[i] == b[i];
  const bool ok = codes == 0 && a.size() == 4 && a.size() == b.size() && same == a.size();
  return {ok, std::to_string(same) + "/" + std::to_string(a.size()) + " output files byte-identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  unsigned jobs = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_option("--jobs", jobs, "worker threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      derivatives,
      identities,
      [&] { return concentration(jobs); },
      [&] { return cross_term(jobs); },
      [&] { return covering(jobs); },
      [&] { return recovery(jobs); },
      [&] { return spurious(jobs); },
      [&] { return saddle_scan(jobs); },
      [&] { return transition(jobs); },
      injectivity,
      determinism,
  };
  bool all = true;
  for (std::size_t k = 1; k <= criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << k << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << " ["
              << fmt(std::round(secs * 100.0) / 100.0) << " s]" << std::endl;
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
