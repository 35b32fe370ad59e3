#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfeas/measurement.hpp"
#include "qfeas/solver.hpp"

namespace qfeas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailed = 1;
inline constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::filesystem::path out_dir = ".";
};

struct GenOptions {
  std::size_t n = 4;
  std::size_t m = 40;
  std::string kind = "hermitian-gaussian";
  double variance = 1.0;
  double noise = 0.0;
  std::string prefix = "instance";
};

struct SolveOptions {
  std::filesystem::path ensemble;
  std::filesystem::path observations;
  std::optional<std::filesystem::path> truth;
  /// Starting point file; random init when absent.
  std::optional<std::filesystem::path> x0;
  double init_scale = 0.0;
  std::string step = "backtracking";
  double eta = 0.0;
  int max_iters = 5000;
  double grad_tol = 0.0;
  double success_tol = 1e-5;
  double perturb_radius = 0.0;  // 0 disables perturbation
  std::string prefix = "solve";
};

struct SweepOptions {
  std::size_t n = 16;
  std::vector<std::size_t> m_grid;
  /// Alternative to m_grid: m = round(factor * n).
  std::vector<double> m_per_n;
  std::size_t trials = 50;
  std::string kind = "hermitian-gaussian";
  double variance = 1.0;
  int max_iters = 5000;
  double success_tol = 1e-5;
  std::string name = "sweep";
};

struct StabilityOptions {
  std::optional<std::filesystem::path> ensemble;
  std::size_t n = 6;
  std::size_t m = 60;
  std::string kind = "hermitian-gaussian";
  /// Use m copies of the identity (a non-injective ensemble).
  bool identity = false;
  std::size_t pairs = 10000;
  bool retain = false;
  std::string name = "stability";
};

struct LandscapeOptions {
  std::optional<std::filesystem::path> ensemble;
  std::optional<std::filesystem::path> truth;
  std::size_t n = 8;
  std::size_t m = 96;
  std::size_t points = 1000;
  std::string generator = "mixed";
  std::size_t pilot = 500;
  std::optional<double> beta_thr;
  std::optional<double> zeta;
  std::optional<double> gamma;
  std::size_t local_min_trials = 0;
  /// Curvature tolerance for the local-minimum check; calibrated zeta when
  /// absent.
  std::optional<double> zeta_tol;
  std::size_t directions = 1000;
  int max_iters = 5000;
  std::string name = "landscape";
};

struct ConcentrationOptions {
  std::size_t n = 8;
  std::vector<std::size_t> m_grid{500};
  std::size_t trials = 200;
  double epsilon = 0.5;
  /// Failure budget: the command fails when a tail fraction exceeds it.
  double xi = 0.05;
  bool cross_term = false;
  std::string name = "concentration";
};

struct CoveringOptions {
  std::size_t n = 2;
  std::vector<double> deltas{0.25};
  std::size_t matrices = 20;
  std::size_t candidates = 100000;
  std::size_t probes = 1000000;
  std::string name = "covering";
};

struct VerifyCommandOptions {
  std::optional<std::filesystem::path> fixture;
};

/// One (n, m) cell of a sample-complexity sweep.
struct SweepRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double success_rate = 0.0;
  double median_iters = 0.0;
};

/// Trial t draws its ensemble, ground truth and initial point from seeds
/// derived from (seed, m, t).
SweepRow run_sweep_cell(std::size_t n, std::size_t m, std::size_t trials, EnsembleKind kind, double variance,
                        const SolverConfig& base, std::uint64_t seed, unsigned jobs);

/// Count of consecutive m values where the success rate drops.
std::size_t count_inversions(const std::vector<SweepRow>& rows);

// Every command writes its outputs below g.out_dir, reports to `out`, and
// explains failures on `err`. Return values are the kExit* codes.
int cmd_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out, std::ostream& err);
int cmd_solve(const GlobalOptions& g, const SolveOptions& o, std::ostream& out, std::ostream& err);
int cmd_sweep(const GlobalOptions& g, const SweepOptions& o, std::ostream& out, std::ostream& err);
int cmd_stability(const GlobalOptions& g, const StabilityOptions& o, std::ostream& out, std::ostream& err);
int cmd_landscape(const GlobalOptions& g, const LandscapeOptions& o, std::ostream& out, std::ostream& err);
int cmd_concentration(const GlobalOptions& g, const ConcentrationOptions& o, std::ostream& out, std::ostream& err);
int cmd_covering(const GlobalOptions& g, const CoveringOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const GlobalOptions& g, const VerifyCommandOptions& o, std::ostream& out, std::ostream& err);

}  // namespace qfeas
