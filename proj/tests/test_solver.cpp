#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qfeas/measurement.hpp"
#include "qfeas/rng.hpp"
#include "qfeas/solver.hpp"

using namespace qfeas;

namespace {

struct Inst {
  ComplexVector z;
  LossProblem p;
};

Inst make(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto ens = sample_hermitian_gaussian(n, m, 1.0, seed);
  Rng rng = make_rng(seed + 1);
  auto z = unit_sphere_point(rng, n);
  auto p = make_noiseless_problem(ens, z);
  return {std::move(z), std::move(p)};
}

}  // namespace

TEST_CASE("recovers a small noiseless instance from a random start") {
  const auto in = make(4, 40, 1);
  SolverConfig cfg;
  cfg.seed = 3;
  const auto out = solve(in.p, cfg, in.z);
  REQUIRE(out.result);
  CHECK(out.result->success);
  CHECK(out.result->converged);
  CHECK(out.result->rel_error < 1e-5);
  CHECK(out.trace.records.size() == static_cast<std::size_t>(out.trace.iterations) + 1);
}

TEST_CASE("backtracking never increases the loss") {
  const auto in = make(6, 50, 2);
  SolverConfig cfg;
  cfg.seed = 4;
  const auto out = solve(in.p, cfg);
  for (std::size_t k = 1; k < out.trace.records.size(); ++k) {
    CHECK(out.trace.records[k].f <= out.trace.records[k - 1].f);
  }
  CHECK_FALSE(out.result);
}

TEST_CASE("starting at the truth takes zero iterations") {
  const auto in = make(4, 40, 5);
  SolverConfig cfg;
  cfg.init = GivenInit{in.z * std::polar(1.0, 2.0)};
  const auto out = solve(in.p, cfg, in.z);
  CHECK(out.trace.iterations == 0);
  CHECK(out.result->rel_error < 1e-15);
  CHECK(out.result->success);
}

TEST_CASE("zero iteration budget stops before the first step") {
  const auto in = make(4, 40, 6);
  SolverConfig cfg;
  cfg.max_iters = 0;
  const auto out = solve(in.p, cfg, in.z);
  CHECK(out.trace.iterations == 0);
  CHECK_FALSE(out.trace.converged);
  CHECK_FALSE(out.result->success);
}

TEST_CASE("runs are reproducible from the seed") {
  const auto in = make(5, 40, 7);
  SolverConfig cfg;
  cfg.seed = 11;
  const auto a = solve(in.p, cfg);
  const auto b = solve(in.p, cfg);
  CHECK(a.trace.x_hat.vec() == b.trace.x_hat.vec());
  CHECK(a.trace.iterations == b.trace.iterations);
  cfg.seed = 12;
  const auto c = solve(in.p, cfg);
  CHECK(c.trace.records.front().f != a.trace.records.front().f);
}

TEST_CASE("a fixed step that is far too large raises with the trace") {
  const auto in = make(4, 40, 8);
  SolverConfig cfg;
  cfg.step = FixedStep{50.0};
  cfg.seed = 1;
  try {
    solve(in.p, cfg, in.z);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.trace().iterations >= 1);
    CHECK_FALSE(e.trace().records.empty());
  }
}

TEST_CASE("a small fixed step converges") {
  const auto in = make(3, 30, 9);
  SolverConfig cfg;
  cfg.step = FixedStep{0.02};
  cfg.seed = 2;
  cfg.max_iters = 20000;
  const auto out = solve(in.p, cfg, in.z);
  CHECK(out.result->success);
}

TEST_CASE("configuration validation") {
  SolverConfig cfg;
  cfg.step = FixedStep{0.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.step = Backtracking{1.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.step = Backtracking{};
  cfg.max_iters = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_iters = 10;
  cfg.perturb = Perturbation{-1.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  const auto in = make(3, 10, 1);
  SolverConfig bad;
  bad.init = GivenInit{ComplexVector::zeros(2)};
  CHECK_THROWS_AS(solve(in.p, bad), std::invalid_argument);
}

TEST_CASE("recovery error is phase invariant and needs a nonzero truth") {
  Rng rng = make_rng(3);
  const auto z = complex_gaussian(rng, 4, 1.0);
  CHECK(recovery_error(z * std::polar(1.0, 1.7), z) < 1e-15);
  CHECK(recovery_error(z * Complex(2.0), z) == doctest::Approx(3.0));  // d(2z, z) = 3 ||z||^2
  CHECK_THROWS_AS(recovery_error(z, ComplexVector::zeros(4)), std::invalid_argument);
}

TEST_CASE("perturbation fires below the threshold and respects the cooldown") {
  Perturbation cfg;
  cfg.radius = 0.1;
  cfg.trigger_grad_tol = 1e-3;
  cfg.cooldown = 5;
  PerturbState st;
  const auto x = ComplexVector::zeros(3);
  CHECK(perturb_if_stalled(x, 1.0, 0, cfg, 9, st).vec() == x.vec());
  CHECK(st.count == 0);
  const auto y = perturb_if_stalled(x, 1e-4, 1, cfg, 9, st);
  CHECK(st.count == 1);
  CHECK((y - x).norm() <= 0.1 + 1e-15);
  CHECK((y - x).norm() > 0.0);
  CHECK(perturb_if_stalled(x, 1e-4, 3, cfg, 9, st).vec() == x.vec());
  CHECK(st.count == 1);
  PerturbState st2;
  CHECK(perturb_if_stalled(x, 1e-4, 1, cfg, 9, st2).vec() == y.vec());
  perturb_if_stalled(x, 1e-4, 6, cfg, 9, st);
  CHECK(st.count == 2);
}

TEST_CASE("solver with perturbation still reaches the truth") {
  const auto in = make(4, 40, 10);
  SolverConfig cfg;
  cfg.seed = 5;
  cfg.perturb = Perturbation{};
  const auto out = solve(in.p, cfg, in.z);
  CHECK(out.result->success);
}

TEST_CASE("trace CSV layout") {
  const auto in = make(3, 20, 11);
  SolverConfig cfg;
  cfg.max_iters = 3;
  const auto out = solve(in.p, cfg);
  std::ostringstream os;
  write_trace_csv(os, out.trace);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "iter,f,grad_norm,step");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 4);
}
