// Command-line driver: qfeas <subcommand> [options]. Run with --help for
// the option list of each subcommand.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qfeas/commands.hpp"

namespace {

std::optional<std::filesystem::path> as_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qfeas;

  CLI::App app{"Quadratic feasibility experiments: instance generation, recovery and landscape studies"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");

  GlobalOptions g;
  std::string out_dir = ".";
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for trial-parallel work (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();

  GenOptions gen;
  auto* c_gen = app.add_subcommand("gen", "Generate an ensemble, a unit-norm ground truth and observations");
  c_gen->add_option("--n", gen.n, "Signal dimension")->capture_default_str();
  c_gen->add_option("--m", gen.m, "Number of measurements")->capture_default_str();
  c_gen->add_option("--kind", gen.kind, "hermitian-gaussian or rank-one")->capture_default_str();
  c_gen->add_option("--variance", gen.variance, "Entry variance of Hermitian Gaussian matrices")->capture_default_str();
  c_gen->add_option("--noise", gen.noise, "Standard deviation of additive Gaussian noise")->capture_default_str();
  c_gen->add_option("--prefix", gen.prefix, "Output file prefix")->capture_default_str();

  SolveOptions sol;
  std::string sol_ens, sol_obs, sol_truth, sol_x0;
  auto* c_solve = app.add_subcommand("solve", "Run gradient descent on an instance");
  c_solve->add_option("--ensemble", sol_ens, "Ensemble file")->required();
  c_solve->add_option("--observations", sol_obs, "Observations file")->required();
  c_solve->add_option("--truth", sol_truth, "Ground-truth file; enables rel_error and the success flag");
  c_solve->add_option("--x0", sol_x0, "Initial point file (random init when absent)");
  c_solve->add_option("--init-scale", sol.init_scale, "Per-component std of the random init (0 = 1/sqrt(2n))");
  c_solve->add_option("--step", sol.step, "backtracking or fixed")->capture_default_str();
  c_solve->add_option("--eta", sol.eta, "Fixed step, or initial backtracking step (0 = automatic)");
  c_solve->add_option("--max-iters", sol.max_iters, "Iteration budget")->capture_default_str();
  c_solve->add_option("--grad-tol", sol.grad_tol, "Gradient-norm tolerance (0 = 1e-8 (1 + f(x0)))");
  c_solve->add_option("--success-tol", sol.success_tol, "rel_error below which a solve counts as success")
      ->capture_default_str();
  c_solve->add_option("--perturb-radius", sol.perturb_radius, "Saddle-escape perturbation radius (0 = off)");
  c_solve->add_option("--prefix", sol.prefix, "Output file prefix")->capture_default_str();

  SweepOptions sw;
  auto* c_sweep = app.add_subcommand("sweep", "Success rate of random-init recovery across m");
  c_sweep->add_option("--n", sw.n, "Signal dimension")->capture_default_str();
  c_sweep->add_option("--m", sw.m_grid, "Measurement counts")->delimiter(',');
  c_sweep->add_option("--m-per-n", sw.m_per_n, "Measurement counts as multiples of n")->delimiter(',');
  c_sweep->add_option("--trials", sw.trials, "Trials per grid point")->capture_default_str();
  c_sweep->add_option("--kind", sw.kind, "hermitian-gaussian or rank-one")->capture_default_str();
  c_sweep->add_option("--variance", sw.variance, "Entry variance")->capture_default_str();
  c_sweep->add_option("--max-iters", sw.max_iters, "Iteration budget per solve")->capture_default_str();
  c_sweep->add_option("--success-tol", sw.success_tol, "Success threshold on rel_error")->capture_default_str();
  c_sweep->add_option("--name", sw.name, "Output file stem")->capture_default_str();

  StabilityOptions st;
  std::string st_ens;
  auto* c_stab = app.add_subcommand("stability", "Empirical stability constants of an ensemble");
  c_stab->add_option("--ensemble", st_ens, "Ensemble file (sampled when absent)");
  c_stab->add_option("--n", st.n, "Signal dimension")->capture_default_str();
  c_stab->add_option("--m", st.m, "Number of measurements")->capture_default_str();
  c_stab->add_option("--kind", st.kind, "hermitian-gaussian or rank-one")->capture_default_str();
  c_stab->add_flag("--identity", st.identity, "Use m copies of the identity matrix");
  c_stab->add_option("--pairs", st.pairs, "Sampled unit pairs")->capture_default_str();
  c_stab->add_flag("--retain", st.retain, "Keep every sampled ratio in the report");
  c_stab->add_option("--name", st.name, "Output file stem")->capture_default_str();

  LandscapeOptions ls;
  std::string ls_ens, ls_truth;
  auto* c_land = app.add_subcommand("landscape", "Strict-saddle certification scan and local-minimum check");
  c_land->add_option("--ensemble", ls_ens, "Ensemble file (with --truth)");
  c_land->add_option("--truth", ls_truth, "Ground-truth file (with --ensemble)");
  c_land->add_option("--n", ls.n, "Signal dimension when sampling")->capture_default_str();
  c_land->add_option("--m", ls.m, "Number of measurements when sampling")->capture_default_str();
  c_land->add_option("--points", ls.points, "Points to certify")->capture_default_str();
  c_land->add_option("--generator", ls.generator, "mixed, uniform-ball, trajectory, near-orbit or orbit")
      ->capture_default_str();
  c_land->add_option("--pilot", ls.pilot, "Pilot points for threshold calibration")->capture_default_str();
  c_land->add_option("--beta-thr", ls.beta_thr, "Override the gradient threshold");
  c_land->add_option("--zeta", ls.zeta, "Override the curvature threshold");
  c_land->add_option("--gamma", ls.gamma, "Override the distance threshold");
  c_land->add_option("--local-min-trials", ls.local_min_trials, "Random-init solves to check for spurious minima");
  c_land->add_option("--zeta-tol", ls.zeta_tol, "Curvature tolerance for the local-minimum check");
  c_land->add_option("--directions", ls.directions, "Random directions per Rayleigh-quotient check")
      ->capture_default_str();
  c_land->add_option("--max-iters", ls.max_iters, "Iteration budget per solve")->capture_default_str();
  c_land->add_option("--name", ls.name, "Output file stem")->capture_default_str();

  ConcentrationOptions co;
  auto* c_conc = app.add_subcommand("concentration", "Concentration of the averaged measurement energy");
  c_conc->add_option("--n", co.n, "Signal dimension")->capture_default_str();
  c_conc->add_option("--m", co.m_grid, "Measurement counts")->delimiter(',')->capture_default_str();
  c_conc->add_option("--trials", co.trials, "Trials per m")->capture_default_str();
  c_conc->add_option("--epsilon", co.epsilon, "Relative deviation defining the tail")->capture_default_str();
  c_conc->add_option("--xi", co.xi, "Failure budget for the tail fraction")->capture_default_str();
  c_conc->add_flag("--cross-term", co.cross_term, "Also run the cross-term experiment");
  c_conc->add_option("--name", co.name, "Output file stem")->capture_default_str();

  CoveringOptions cv;
  auto* c_cov = app.add_subcommand("covering", "Covering-net sandwich on the complex unit sphere");
  c_cov->add_option("--n", cv.n, "Dimension (2 or 3)")->capture_default_str();
  c_cov->add_option("--delta", cv.deltas, "Net radii")->delimiter(',')->capture_default_str();
  c_cov->add_option("--matrices", cv.matrices, "Random Hermitian matrices per radius")->capture_default_str();
  c_cov->add_option("--candidates", cv.candidates, "Candidate pool size")->capture_default_str();
  c_cov->add_option("--probes", cv.probes, "Probe set size")->capture_default_str();
  c_cov->add_option("--name", cv.name, "Output file stem")->capture_default_str();

  VerifyCommandOptions vf;
  std::string vf_fixture;
  auto* c_verify = app.add_subcommand("verify", "Run the invariant battery and print a pass/fail table");
  c_verify->add_option("--fixture", vf_fixture, "Ensemble file to validate as part of the battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.out_dir = out_dir;

  auto& out = std::cout;
  auto& err = std::cerr;
  if (c_gen->parsed()) return cmd_gen(g, gen, out, err);
  if (c_solve->parsed()) {
    sol.ensemble = sol_ens;
    sol.observations = sol_obs;
    sol.truth = as_path(sol_truth);
    sol.x0 = as_path(sol_x0);
    return cmd_solve(g, sol, out, err);
  }
  if (c_sweep->parsed()) return cmd_sweep(g, sw, out, err);
  if (c_stab->parsed()) {
    st.ensemble = as_path(st_ens);
    return cmd_stability(g, st, out, err);
  }
  if (c_land->parsed()) {
    ls.ensemble = as_path(ls_ens);
    ls.truth = as_path(ls_truth);
    return cmd_landscape(g, ls, out, err);
  }
  if (c_conc->parsed()) return cmd_concentration(g, co, out, err);
  if (c_cov->parsed()) return cmd_covering(g, cv, out, err);
  if (c_verify->parsed()) {
    vf.fixture = as_path(vf_fixture);
    return cmd_verify(g, vf, out, err);
  }
  return kExitUsage;
}
