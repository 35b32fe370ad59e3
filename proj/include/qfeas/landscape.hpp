#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qfeas/core.hpp"
#include "qfeas/loss.hpp"
#include "qfeas/measurement.hpp"
#include "qfeas/solver.hpp"

namespace qfeas {

// ---------------------------------------------------------------------------
// Stability

/// Empirical two-sided bounds on
///   sqrt(V(x, y)),  V(x, y) = (1/m) sum_i |<A_i, xx* - yy*>|^2 / d(x, y)^2
/// over sampled unit pairs. For Gaussian ensembles V has expectation 1.
struct StabilityEstimate {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  std::size_t num_pairs = 0;
  /// Pairs skipped because d(x, y) <= 1e-8.
  std::size_t degenerate_pairs = 0;
  /// Mean of V (not of its square root).
  double mean_ratio = 0.0;
  std::vector<double> ratio_samples;  // V values, only when retained
};

/// V(x, y) for one pair. Throws std::domain_error when d(x, y) is zero up to rounding.
double stability_ratio(const MeasurementEnsemble& ens, const ComplexVector& x, const ComplexVector& y);

StabilityEstimate stability_estimate(const MeasurementEnsemble& ens, std::size_t num_pairs, std::uint64_t seed,
                                     bool retain_samples = false);

// ---------------------------------------------------------------------------
// Concentration of Y = (1/m) sum_i |<A_i, xx* - yy*>|^2 around d(x, y)^2

struct ConcentrationReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double epsilon = 0.0;
  double empirical_mean_ratio = 0.0;
  double tail_fraction = 0.0;
  std::vector<double> ratios;  // Y / d^2 per trial
};

/// Each trial draws a fresh Hermitian Gaussian ensemble (variance 1) and a
/// fresh unit pair, both from derive_seed(seed, trial).
ConcentrationReport concentration_experiment(std::size_t n, std::size_t m, std::size_t trials, double epsilon,
                                             std::uint64_t seed, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Cross term (1/m) sum_d <A_d, DD*><A_d, xx*> - <A_d, Dx*><A_d, xD*>

double cross_term_statistic(const MeasurementEnsemble& ens, const ComplexVector& x, const ComplexVector& delta);

struct CrossTermSummary {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  /// Statistics of the per-trial value divided by ||D||^2 ||x||^2.
  double normalized_mean = 0.0;
  double normalized_std = 0.0;
  /// Exact expectation of the normalized statistic for this (x, D) under
  /// the Hermitian Gaussian law: |<x, D>|^2 / (||x||^2 ||D||^2) - 1.
  double analytic_expectation = 0.0;
  ComplexVector x;
  ComplexVector delta;
};

/// x and D are fixed unit vectors drawn from the seed; each trial draws a
/// fresh ensemble.
CrossTermSummary cross_term_experiment(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed,
                                       unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Covering nets of the complex unit sphere

/// A delta-net of the unit sphere of C^n up to global phase: every sphere
/// point x has a net point u with min_t ||x - e^{it} u|| <= delta. The
/// quantities <A, xx*> are phase invariant, so suprema over the net equal
/// suprema over the (infinite) phase closure of the net, which is an
/// ordinary delta-cover of the sphere.
struct SphereNet {
  std::size_t n = 0;
  double delta = 0.0;
  std::vector<ComplexVector> points;
  std::size_t candidates = 0;
  std::size_t probes = 0;
  /// Largest probe-to-net distance observed.
  double certified_radius = 0.0;
  /// Candidate and probe points (the dense sample of the sphere), n
  /// consecutive entries per point.
  std::vector<Complex> dense;
};

/// min_t ||x - e^{it} u|| for unit x, u: sqrt(2 - 2 |<u, x>|).
double phase_distance(const ComplexVector& x, const ComplexVector& u);

struct SphereNetOptions {
  std::size_t candidates = 100000;
  std::size_t probes = 1000000;
};

/// Greedy farthest-point net over sampled candidates, certified against a
/// separate probe set. The greedy target starts at 0.9 delta and tightens
/// until every probe lies within delta. Requires n in {2, 3} and
/// 0 < delta < 1/2; throws std::runtime_error when the candidate pool cannot
/// certify radius delta.
SphereNet build_sphere_net(std::size_t n, double delta, std::uint64_t seed, SphereNetOptions opts = {});

struct CoveringReport {
  double delta = 0.0;
  std::size_t net_size = 0;
  double sup_net = 0.0;
  double sup_dense = 0.0;
  double lower = 0.0;  // (1 - 2 delta) sup_dense
  double upper = 0.0;  // (1 + 2 delta) sup_dense
  bool holds = false;
};

/// sup over pairs of |<A, x1x1* - x2x2*>| is max x*Ax - min x*Ax over the set.
CoveringReport covering_net_check(const HermitianMatrix& a, const SphereNet& net);
CoveringReport covering_net_check(const HermitianMatrix& a, double delta, std::uint64_t seed,
                                  SphereNetOptions opts = {});

// ---------------------------------------------------------------------------
// Strict-saddle certification

struct SaddleThresholds {
  double beta_thr = 0.0;  // gradient-norm threshold
  double zeta = 0.0;      // curvature threshold (per unit ||[D; conj D]||^2)
  double gamma = 0.0;     // distance to the solution orbit
};

enum class Verdict { large_gradient, negative_curvature, near_minimum, violation };
std::string_view to_string(Verdict v);

struct SaddleCertificate {
  ComplexVector x;
  double gradient_norm = 0.0;
  /// Q(x)[D] / ||[D; conj D]||^2 along D = aligned_delta(x, z).delta.
  double curvature_along_delta = 0.0;
  double distance_to_truth = 0.0;
  Verdict verdict = Verdict::violation;
  SaddleThresholds thresholds;
};

/// Checks, in order: gradient_norm >= beta_thr; curvature <= -zeta;
/// d(x, z) <= gamma. Never throws for a violation; it is a verdict.
SaddleCertificate saddle_certificate(const LossProblem& p, const ComplexVector& z, const ComplexVector& x,
                                     const SaddleThresholds& thr);

enum class PointGenerator { mixed, uniform_ball, trajectory, near_orbit, orbit };
std::string_view to_string(PointGenerator g);
PointGenerator parse_point_generator(std::string_view name);

/// Tagged sample point.
struct ScanPoint {
  ComplexVector x;
  PointGenerator source = PointGenerator::uniform_ball;
};

/// Uniform ball of radius 2||z||; GD-trajectory snapshots from random
/// starts; e^{i t} z plus a ball perturbation of radius up to 0.3||z||;
/// exact orbit points. Mixed draws 40/40/20 from the first three.
std::vector<ScanPoint> generate_points(const LossProblem& p, const ComplexVector& z, std::size_t count,
                                       PointGenerator gen, std::uint64_t seed);

struct Calibration {
  SaddleThresholds thresholds;
  std::size_t pilot_points = 0;
  double grad_percentile = 5.0;
  /// Gradient-norm percentile over the uniform-ball pilot points.
  double ball_grad_percentile = 0.0;
  double c = 0.05;
  double c0 = 10.0;
  /// Gradient-scale parameter and curvature gap behind the thresholds.
  double grad_delta = 0.0;
  double curvature_gap = 0.0;
};

/// Threshold calibration on pilot points drawn from an independent seed.
///   beta_thr = (c / c0) * P5, P5 the 5th percentile of gradient norms over
///              uniform-ball points (c = 1/20, c0 = 10);
///   gamma    = c0 * beta_thr / (variance * ||z||);
///   zeta     = half the smallest |curvature| among pilot points that have
///              small gradient, negative curvature and lie beyond gamma,
///              or 1e-3 * variance * ||z||^2 when there are none.
Calibration calibrate_thresholds(const LossProblem& p, const ComplexVector& z, std::size_t pilot_points,
                                 std::uint64_t seed);

struct ScanReport {
  SaddleThresholds thresholds;
  std::size_t num_points = 0;
  std::array<std::size_t, 4> histogram{};  // indexed by Verdict
  std::vector<SaddleCertificate> certificates;
  std::vector<PointGenerator> sources;
  std::vector<SaddleCertificate> violations;
  /// Worst relative gap between the closed-form curvature and a second
  /// difference along D, over all points.
  double max_fd_curvature_rel_error = 0.0;
};

ScanReport landscape_scan(const LossProblem& p, const ComplexVector& z, std::size_t num_points,
                          PointGenerator gen, const SaddleThresholds& thr, std::uint64_t seed, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Local minima are global

struct LocalMinTrial {
  double rel_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool success = false;
  double final_grad_norm = 0.0;
  /// Minimum Rayleigh quotient over random directions (converged trials).
  std::optional<double> min_rayleigh;
  /// Exact minimum Hessian eigenvalue when n <= 32 (converged trials).
  std::optional<double> min_eigenvalue;
  bool counterexample = false;
};

struct LocalMinReport {
  std::size_t trials = 0;
  std::size_t converged = 0;
  std::size_t successes = 0;
  std::size_t counterexamples = 0;
  double zeta_tol = 0.0;
  std::vector<LocalMinTrial> details;
};

/// Smallest rayleigh_quotient over `directions` uniform random directions.
double min_random_rayleigh(const LossProblem& p, const ComplexVector& x, std::size_t directions,
                           std::uint64_t seed);

/// Trial t solves the noiseless problem from cfg with seed derive_seed(seed, t).
/// Terminal points with gradient below tolerance, curvature >= -zeta_tol and
/// rel_error >= success_tol are counterexamples.
LocalMinReport local_min_global_check(const MeasurementEnsemble& ens, const ComplexVector& z,
                                      std::size_t num_trials, const SolverConfig& cfg, double zeta_tol,
                                      std::uint64_t seed, unsigned jobs = 1, std::size_t directions = 1000);

}  // namespace qfeas
