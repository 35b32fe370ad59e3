#include "qfeas/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfeas/json_io.hpp"
#include "qfeas/landscape.hpp"
#include "qfeas/parallel.hpp"
#include "qfeas/report.hpp"
#include "qfeas/rng.hpp"
#include "qfeas/verify.hpp"

namespace qfeas {

namespace {

// Bad parameters. Like every other escaping exception it maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json path_json(const std::optional<std::filesystem::path>& p) { return p ? Json(p->string()) : Json(); }
Json opt_json(const std::optional<double>& v) { return v ? number_json(*v) : Json(); }

MeasurementEnsemble load_ensemble(const std::filesystem::path& p) {
  return ensemble_from_json(parse_document(read_text_file(p)));
}
MeasurementVector load_observations(const std::filesystem::path& p) {
  return observations_from_json(parse_document(read_text_file(p)));
}
ComplexVector load_vector(const std::filesystem::path& p) { return vector_from_json(parse_document(read_text_file(p))); }

Json report_document(std::string_view kind, const Provenance& prov) {
  Json doc;
  doc["version"] = kReportVersion;
  doc["kind"] = std::string(kind);
  doc["provenance"] = to_json(prov);
  return doc;
}

void write_json(const std::filesystem::path& path, const Json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

MeasurementEnsemble sample_ensemble(EnsembleKind kind, std::size_t n, std::size_t m, double variance,
                                    std::uint64_t seed) {
  switch (kind) {
    case EnsembleKind::hermitian_gaussian: return sample_hermitian_gaussian(n, m, variance, seed);
    case EnsembleKind::rank_one: return sample_rank_one(n, m, seed);
    case EnsembleKind::user_supplied: break;
  }
  throw UsageError("cannot sample a user-supplied ensemble; pass a file instead");
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

SweepRow run_sweep_cell(std::size_t n, std::size_t m, std::size_t trials, EnsembleKind kind, double variance,
                        const SolverConfig& base, std::uint64_t seed, unsigned jobs) {
  std::vector<int> iters(trials, 0);
  std::vector<char> ok(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    const std::uint64_t ts = derive_seed(seed, m, t);
    const auto ens = sample_ensemble(kind, n, m, variance, derive_seed(ts, 1));
    Rng rng = make_rng(derive_seed(ts, 2));
    const auto z = unit_sphere_point(rng, n);
    SolverConfig cfg = base;
    cfg.seed = derive_seed(ts, 3);
    try {
      const auto out = solve(make_noiseless_problem(ens, z), cfg, z);
      iters[t] = out.result->iterations;
      ok[t] = out.result->success;
    } catch (const SolverError& e) {
      iters[t] = e.trace().iterations;
    }
  });
  SweepRow row{n, m, trials, 0.0, 0.0};
  if (trials > 0) {
    row.success_rate = static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / static_cast<double>(trials);
    row.median_iters = median(std::vector<double>(iters.begin(), iters.end()));
  }
  return row;
}

std::size_t count_inversions(const std::vector<SweepRow>& rows) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].success_rate < rows[i - 1].success_rate) ++k;
  }
  return k;
}

int cmd_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.n == 0 || o.m == 0) throw UsageError("n and m must be >= 1");
    if (!(o.noise >= 0.0)) throw UsageError("noise must be >= 0");
    const EnsembleKind kind = parse_ensemble_kind(o.kind);
    Provenance prov{"gen", g.seed, {}};
    prov.config["n"] = o.n;
    prov.config["m"] = o.m;
    prov.config["kind"] = std::string(to_string(kind));
    prov.config["variance"] = o.variance;
    prov.config["noise"] = o.noise;
    prov.config["prefix"] = o.prefix;

    const auto ens = sample_ensemble(kind, o.n, o.m, o.variance, derive_seed(g.seed, 1));
    Rng rng = make_rng(derive_seed(g.seed, 2));
    const auto z = unit_sphere_point(rng, o.n);
    auto c = forward_map(ens, z);
    if (o.noise > 0.0) c = add_noise(c, std::vector<double>(o.m, o.noise), derive_seed(g.seed, 3));

    const Json pj = to_json(prov);
    const std::vector<std::pair<std::filesystem::path, Json>> files{
        {g.out_dir / (o.prefix + ".ensemble.json"), to_json(ens)},
        {g.out_dir / (o.prefix + ".truth.json"), to_json(z)},
        {g.out_dir / (o.prefix + ".observations.json"), to_json(c)},
    };
    for (const auto& [path, doc] : files) {
      Json d = doc;
      d["provenance"] = pj;
      const std::string text = d.dump() + "\n";
      write_text_file(path, text);
      out << sha256_hex(text) << "  " << path.string() << '\n';
    }
    return kExitOk;
  });
}

int cmd_solve(const GlobalOptions& g, const SolveOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto ens = load_ensemble(o.ensemble);
    const auto c = load_observations(o.observations);
    const LossProblem p(ens, c);
    std::optional<ComplexVector> truth;
    if (o.truth) truth = load_vector(*o.truth);

    SolverConfig cfg;
    if (o.step == "backtracking") {
      Backtracking b;
      b.initial_eta = o.eta;
      cfg.step = b;
    } else if (o.step == "fixed") {
      if (!(o.eta > 0.0)) throw UsageError("--step fixed needs a positive --eta");
      cfg.step = FixedStep{o.eta};
    } else {
      throw UsageError("unknown step policy '" + o.step + "' (expected backtracking or fixed)");
    }
    if (o.x0) {
      cfg.init = GivenInit{load_vector(*o.x0)};
    } else {
      cfg.init = RandomInit{o.init_scale};
    }
    cfg.max_iters = o.max_iters;
    cfg.grad_tol = o.grad_tol;
    cfg.success_tol = o.success_tol;
    cfg.seed = g.seed;
    if (o.perturb_radius > 0.0) {
      Perturbation pt;
      pt.radius = o.perturb_radius;
      cfg.perturb = pt;
    }

    Provenance prov{"solve", g.seed, {}};
    prov.config["ensemble"] = o.ensemble.string();
    prov.config["observations"] = o.observations.string();
    prov.config["truth"] = path_json(o.truth);
    prov.config["x0"] = path_json(o.x0);
    prov.config["init_scale"] = o.init_scale;
    prov.config["step"] = o.step;
    prov.config["eta"] = o.eta;
    prov.config["max_iters"] = o.max_iters;
    prov.config["grad_tol"] = o.grad_tol;
    prov.config["success_tol"] = o.success_tol;
    prov.config["perturb_radius"] = o.perturb_radius;

    SolveOutcome res;
    std::string failure;
    try {
      res = solve(p, cfg, truth);
    } catch (const SolverError& e) {
      res.trace = e.trace();
      failure = e.what();
    }

    Json doc = report_document("solve_result", prov);
    doc["iterations"] = res.trace.iterations;
    doc["converged"] = res.trace.converged;
    doc["grad_tol"] = res.trace.grad_tol;
    doc["perturbations"] = res.trace.perturbations;
    doc["final_loss"] = res.trace.records.empty() ? Json() : number_json(res.trace.records.back().f);
    doc["x_hat"] = to_json(res.trace.x_hat)["entries"];
    doc["result"] = res.result ? to_json(*res.result) : Json();
    doc["error"] = failure.empty() ? Json() : Json(failure);
    write_json(g.out_dir / (o.prefix + ".result.json"), doc);

    std::ostringstream csv;
    csv << csv_provenance(prov);
    write_trace_csv(csv, res.trace);
    write_text_file(g.out_dir / (o.prefix + ".trace.csv"), csv.str());

    out << "iterations " << res.trace.iterations << ", converged " << (res.trace.converged ? "yes" : "no");
    if (res.result) out << ", rel_error " << format_number(res.result->rel_error);
    out << '\n';
    if (!failure.empty()) {
      err << "solver failed: " << failure << '\n';
      return kExitClaimFailed;
    }
    const bool ok = res.result ? res.result->success : res.trace.converged;
    return ok ? kExitOk : kExitClaimFailed;
  });
}

int cmd_sweep(const GlobalOptions& g, const SweepOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.n == 0) throw UsageError("n must be >= 1");
    std::vector<std::size_t> grid = o.m_grid;
    for (double f : o.m_per_n) {
      if (!(f > 0.0)) throw UsageError("--m-per-n factors must be positive");
      grid.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(o.n))));
    }
    if (grid.empty()) throw UsageError("empty m grid (pass --m or --m-per-n)");
    for (std::size_t m : grid) {
      if (m == 0) throw UsageError("grid values must be >= 1");
    }
    const EnsembleKind kind = parse_ensemble_kind(o.kind);

    Provenance prov{"sweep", g.seed, {}};
    prov.config["n"] = o.n;
    prov.config["m_grid"] = grid;
    prov.config["trials"] = o.trials;
    prov.config["kind"] = std::string(to_string(kind));
    prov.config["variance"] = o.variance;
    prov.config["max_iters"] = o.max_iters;
    prov.config["success_tol"] = o.success_tol;

    SolverConfig base;
    base.max_iters = o.max_iters;
    base.success_tol = o.success_tol;
    std::vector<SweepRow> rows;
    if (o.trials > 0) {
      for (std::size_t m : grid) rows.push_back(run_sweep_cell(o.n, m, o.trials, kind, o.variance, base, g.seed, g.jobs));
    }

    std::ostringstream csv;
    csv << csv_provenance(prov);
    csv << "n,m,trials,success_rate,median_iters\n";
    for (const auto& r : rows) {
      csv << r.n << ',' << r.m << ',' << r.trials << ',' << format_number(r.success_rate) << ','
          << format_number(r.median_iters) << '\n';
    }
    if (o.trials == 0) {
      csv << "# trend: no trials\n";
      write_text_file(g.out_dir / (o.name + ".csv"), csv.str());
      err << "error: no trials\n";
      return kExitUsage;
    }
    const std::size_t inv = count_inversions(rows);
    csv << "# trend: " << (inv == 0 ? "success rate non-decreasing in m" : "success rate decreases at " +
                                                                             std::to_string(inv) + " step(s)")
        << "; first " << format_number(rows.front().success_rate) << ", last "
        << format_number(rows.back().success_rate) << '\n';
    write_text_file(g.out_dir / (o.name + ".csv"), csv.str());
    for (const auto& r : rows) {
      out << "m=" << r.m << " success_rate=" << format_number(r.success_rate)
          << " median_iters=" << format_number(r.median_iters) << '\n';
    }
    return kExitOk;
  });
}

int cmd_stability(const GlobalOptions& g, const StabilityOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.pairs == 0) throw UsageError("pairs must be >= 1");
    std::optional<MeasurementEnsemble> ens;
    if (o.ensemble) {
      ens = load_ensemble(*o.ensemble);
    } else if (o.identity) {
      if (o.n == 0 || o.m == 0) throw UsageError("n and m must be >= 1");
      ens.emplace(o.n, EnsembleKind::user_supplied, std::vector<HermitianMatrix>(o.m, HermitianMatrix::identity(o.n)));
    } else {
      if (o.n == 0 || o.m == 0) throw UsageError("n and m must be >= 1");
      ens = sample_ensemble(parse_ensemble_kind(o.kind), o.n, o.m, 1.0, derive_seed(g.seed, 1));
    }

    Provenance prov{"stability", g.seed, {}};
    prov.config["ensemble"] = path_json(o.ensemble);
    prov.config["n"] = ens->n();
    prov.config["m"] = ens->m();
    prov.config["kind"] = std::string(to_string(ens->kind()));
    prov.config["identity"] = o.identity;
    prov.config["pairs"] = o.pairs;

    const auto est = stability_estimate(*ens, o.pairs, derive_seed(g.seed, 2), o.retain);
    // The statistic has unit scale for variance-1 ensembles; anything this
    // small is rounding noise on an exact zero.
    const bool injective = est.alpha_hat > 1e-9;
    Json doc = report_document("stability_report", prov);
    doc["estimate"] = to_json(est);
    doc["injective"] = injective;
    write_json(g.out_dir / (o.name + ".json"), doc);

    out << "alpha_hat " << format_number(est.alpha_hat) << ", beta_stability " << format_number(est.beta_hat)
        << ", mean V " << format_number(est.mean_ratio) << '\n';
    if (!injective) {
      out << "non-injective: alpha_hat is zero, the measurement map cannot separate some pairs\n";
      return kExitClaimFailed;
    }
    return kExitOk;
  });
}

int cmd_landscape(const GlobalOptions& g, const LandscapeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PointGenerator gen = parse_point_generator(o.generator);
    if (o.ensemble.has_value() != o.truth.has_value()) {
      throw UsageError("--ensemble and --truth must be given together");
    }
    std::optional<MeasurementEnsemble> ens;
    ComplexVector z;
    if (o.ensemble) {
      ens = load_ensemble(*o.ensemble);
      z = load_vector(*o.truth);
    } else {
      if (o.n == 0 || o.m == 0) throw UsageError("n and m must be >= 1");
      ens = sample_hermitian_gaussian(o.n, o.m, 1.0, derive_seed(g.seed, 1));
      Rng rng = make_rng(derive_seed(g.seed, 2));
      z = unit_sphere_point(rng, o.n);
    }
    const LossProblem p = make_noiseless_problem(*ens, z);

    Provenance prov{"landscape", g.seed, {}};
    prov.config["ensemble"] = path_json(o.ensemble);
    prov.config["truth"] = path_json(o.truth);
    prov.config["n"] = ens->n();
    prov.config["m"] = ens->m();
    prov.config["points"] = o.points;
    prov.config["generator"] = std::string(to_string(gen));
    prov.config["pilot"] = o.pilot;
    prov.config["beta_thr"] = opt_json(o.beta_thr);
    prov.config["zeta"] = opt_json(o.zeta);
    prov.config["gamma"] = opt_json(o.gamma);
    prov.config["local_min_trials"] = o.local_min_trials;
    prov.config["zeta_tol"] = opt_json(o.zeta_tol);
    prov.config["directions"] = o.directions;
    prov.config["max_iters"] = o.max_iters;

    const Calibration cal = calibrate_thresholds(p, z, o.pilot, derive_seed(g.seed, 3));
    SaddleThresholds thr = cal.thresholds;
    if (o.beta_thr) thr.beta_thr = *o.beta_thr;
    if (o.zeta) thr.zeta = *o.zeta;
    if (o.gamma) thr.gamma = *o.gamma;

    const ScanReport scan = landscape_scan(p, z, o.points, gen, thr, derive_seed(g.seed, 4), g.jobs);
    Json doc = report_document("landscape_report", prov);
    doc["calibration"] = to_json(cal);
    doc["scan"] = to_json(scan);

    std::size_t counterexamples = 0;
    if (o.local_min_trials > 0) {
      SolverConfig cfg;
      cfg.max_iters = o.max_iters;
      const double zt = o.zeta_tol.value_or(thr.zeta);
      const auto lm = local_min_global_check(*ens, z, o.local_min_trials, cfg, zt, derive_seed(g.seed, 5), g.jobs,
                                             o.directions);
      counterexamples = lm.counterexamples;
      doc["local_min"] = to_json(lm);
      out << "local-min trials " << lm.trials << ", converged " << lm.converged << ", successes " << lm.successes
          << ", counterexamples " << lm.counterexamples << '\n';
    }
    write_json(g.out_dir / (o.name + ".json"), doc);
    std::ostringstream csv;
    csv << csv_provenance(prov);
    write_scan_csv(csv, scan);
    write_text_file(g.out_dir / (o.name + ".csv"), csv.str());

    out << "thresholds beta_thr " << format_number(thr.beta_thr) << ", zeta " << format_number(thr.zeta)
        << ", gamma " << format_number(thr.gamma) << '\n';
    out << "verdicts";
    for (auto v : {Verdict::large_gradient, Verdict::negative_curvature, Verdict::near_minimum, Verdict::violation}) {
      out << ' ' << to_string(v) << '=' << scan.histogram[static_cast<std::size_t>(v)];
    }
    out << '\n';
    return scan.violations.empty() && counterexamples == 0 ? kExitOk : kExitClaimFailed;
  });
}

int cmd_concentration(const GlobalOptions& g, const ConcentrationOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.n == 0 || o.trials == 0) throw UsageError("n and trials must be >= 1");
    if (o.m_grid.empty()) throw UsageError("empty m grid");
    if (!(o.epsilon > 0.0)) throw UsageError("epsilon must be positive");
    if (!(o.xi > 0.0 && o.xi < 1.0)) throw UsageError("failure budget xi must lie in (0, 1)");

    Provenance prov{"concentration", g.seed, {}};
    prov.config["n"] = o.n;
    prov.config["m_grid"] = o.m_grid;
    prov.config["trials"] = o.trials;
    prov.config["epsilon"] = number_json(o.epsilon);
    prov.config["xi"] = o.xi;
    prov.config["cross_term"] = o.cross_term;

    Json doc = report_document("concentration_report", prov);
    Json reports = Json::array();
    std::ostringstream csv;
    csv << csv_provenance(prov);
    csv << "m,trial,ratio\n";
    bool within_budget = true;
    for (std::size_t m : o.m_grid) {
      if (m == 0) throw UsageError("grid values must be >= 1");
      const auto r = concentration_experiment(o.n, m, o.trials, o.epsilon, derive_seed(g.seed, m), g.jobs);
      reports.push_back(to_json(r));
      for (std::size_t i = 0; i < r.ratios.size(); ++i) csv << m << ',' << i << ',' << format_number(r.ratios[i]) << '\n';
      out << "m=" << m << " mean Y/d^2 " << format_number(r.empirical_mean_ratio) << ", tail fraction "
          << format_number(r.tail_fraction) << '\n';
      if (r.tail_fraction > o.xi) within_budget = false;
    }
    doc["reports"] = reports;
    doc["within_budget"] = within_budget;
    if (o.cross_term) {
      Json ct = Json::array();
      for (std::size_t m : o.m_grid) {
        const auto s = cross_term_experiment(o.n, m, o.trials, derive_seed(g.seed, 0x63726f73ULL, m), g.jobs);
        ct.push_back(to_json(s));
        out << "m=" << m << " cross term mean " << format_number(s.normalized_mean) << " (expected "
            << format_number(s.analytic_expectation) << "), std " << format_number(s.normalized_std) << '\n';
      }
      doc["cross_term"] = ct;
    }
    write_json(g.out_dir / (o.name + ".json"), doc);
    write_text_file(g.out_dir / (o.name + ".csv"), csv.str());
    return within_budget ? kExitOk : kExitClaimFailed;
  });
}

int cmd_covering(const GlobalOptions& g, const CoveringOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.deltas.empty()) throw UsageError("no delta values");
    Provenance prov{"covering", g.seed, {}};
    prov.config["n"] = o.n;
    prov.config["deltas"] = o.deltas;
    prov.config["matrices"] = o.matrices;
    prov.config["candidates"] = o.candidates;
    prov.config["probes"] = o.probes;

    Json doc = report_document("covering_report", prov);
    Json nets = Json::array();
    bool all_hold = true;
    for (std::size_t di = 0; di < o.deltas.size(); ++di) {
      const double delta = o.deltas[di];
      const SphereNet net = build_sphere_net(o.n, delta, derive_seed(g.seed, 1, di), {o.candidates, o.probes});
      // Matrix k is the first entry of a variance-1 Hermitian Gaussian draw.
      std::vector<CoveringReport> reps(o.matrices);
      parallel_for(o.matrices, g.jobs, [&](std::size_t k) {
        const auto a = sample_hermitian_gaussian(o.n, 1, 1.0, derive_seed(g.seed, 2, k))[0];
        reps[k] = covering_net_check(a, net);
      });
      std::size_t holds = 0;
      Json cases = Json::array();
      for (const auto& r : reps) {
        holds += r.holds;
        cases.push_back(to_json(r));
      }
      all_hold = all_hold && holds == reps.size();
      Json entry;
      entry["net_delta"] = delta;
      entry["net_size"] = net.points.size();
      entry["certified_radius"] = net.certified_radius;
      entry["holds"] = holds;
      entry["cases"] = cases;
      nets.push_back(entry);
      out << "delta " << format_number(delta) << ": net size " << net.points.size() << ", certified radius "
          << format_number(net.certified_radius) << ", sandwich holds " << holds << '/' << reps.size() << '\n';
    }
    doc["nets"] = nets;
    doc["all_hold"] = all_hold;
    write_json(g.out_dir / (o.name + ".json"), doc);
    return all_hold ? kExitOk : kExitClaimFailed;
  });
}

int cmd_verify(const GlobalOptions&, const VerifyCommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto results = run_invariant_battery({o.fixture});
    print_check_table(out, results);
    const bool ok = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
    return ok ? kExitOk : kExitClaimFailed;
  });
}

}  // namespace qfeas
