#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qfeas/core.hpp"
#include "qfeas/loss.hpp"

namespace qfeas {

struct FixedStep {
  double eta = 0.01;
};

/// Armijo backtracking. Each iteration starts from twice the previously
/// accepted step (or the initial step) and shrinks by `shrink` until
///   f(x - eta d) <= f(x) - armijo * eta * ||d||^2,  d = 2 g_x.
struct Backtracking {
  double shrink = 0.5;
  double armijo = 1e-4;
  /// Initial step; nonpositive means 0.1 / ||grad f(x0)||.
  double initial_eta = 0.0;
  double growth = 2.0;
  int max_backtracks = 60;
};

using StepPolicy = std::variant<FixedStep, Backtracking>;

struct Perturbation {
  double radius = 1e-2;
  double trigger_grad_tol = 1e-4;
  int cooldown = 100;
};

struct RandomInit {
  /// Per-component standard deviation; nonpositive means 1/sqrt(2n), which
  /// gives unit expected norm.
  double scale = 0.0;
};

struct GivenInit {
  ComplexVector x0;
};

using InitPolicy = std::variant<RandomInit, GivenInit>;

struct SolverConfig {
  StepPolicy step = Backtracking{};
  int max_iters = 5000;
  /// Absolute gradient-norm tolerance; nonpositive means 1e-8 * (1 + f(x0)).
  double grad_tol = 0.0;
  std::optional<Perturbation> perturb;
  InitPolicy init = RandomInit{};
  std::uint64_t seed = 0;
  double success_tol = 1e-5;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  /// Step taken from this iterate to the next; 0 on the last record.
  double step = 0.0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  ComplexVector x_hat;
  int iterations = 0;
  bool converged = false;
  double grad_tol = 0.0;
  int perturbations = 0;
};

struct RecoveryResult {
  ComplexVector x_hat;
  double rel_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool success = false;
};

struct SolveOutcome {
  SolverTrace trace;
  std::optional<RecoveryResult> result;
};

/// Non-finite loss, or a fixed step that blew the loss up tenfold. Carries
/// the trace up to the failure.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolverTrace trace) : std::runtime_error(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

/// Gradient descent x_{k+1} = x_k - eta_k * 2 g_x(x_k). When `truth` is given
/// the outcome also carries a RecoveryResult against it.
SolveOutcome solve(const LossProblem& p, const SolverConfig& cfg,
                   const std::optional<ComplexVector>& truth = std::nullopt);

/// d(x_hat, z) / ||z||^2. Throws std::invalid_argument for z = 0.
double recovery_error(const ComplexVector& x_hat, const ComplexVector& z);

/// State for perturb_if_stalled: iteration of the last perturbation.
struct PerturbState {
  std::optional<int> last_perturbed;
  int count = 0;
};

/// Returns x plus a uniform draw from the complex ball of radius
/// cfg.radius when grad_norm < cfg.trigger_grad_tol and the cooldown since
/// the last perturbation has elapsed; otherwise x. The draw uses the stream
/// derive_seed(seed, iter).
ComplexVector perturb_if_stalled(const ComplexVector& x, double grad_norm, int iter, const Perturbation& cfg,
                                 std::uint64_t seed, PerturbState& state);

/// CSV with header iter,f,grad_norm,step.
void write_trace_csv(std::ostream& os, const SolverTrace& trace);

}  // namespace qfeas
