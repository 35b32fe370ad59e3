#include "qfeas/solver.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "qfeas/rng.hpp"

namespace qfeas {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ComplexVector initial_point(const LossProblem& p, const SolverConfig& cfg) {
  return std::visit(overloaded{
                        [&](const RandomInit& r) {
                          const double scale =
                              r.scale > 0.0 ? r.scale : 1.0 / std::sqrt(2.0 * static_cast<double>(p.n()));
                          Rng rng = make_rng(derive_seed(cfg.seed, 0));
                          return complex_gaussian(rng, p.n(), scale * scale);
                        },
                        [&](const GivenInit& g) {
                          require_same_dim(p.n(), g.x0.size(), "solve (initial point)");
                          return g.x0;
                        },
                    },
                    cfg.init);
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be >= 0");
  if (!(success_tol > 0.0)) throw std::invalid_argument("SolverConfig: success_tol must be positive");
  std::visit(overloaded{
                 [](const FixedStep& s) {
                   if (!(s.eta > 0.0)) throw std::invalid_argument("SolverConfig: fixed step eta must be positive");
                 },
                 [](const Backtracking& b) {
                   if (!(b.shrink > 0.0 && b.shrink < 1.0)) {
                     throw std::invalid_argument("SolverConfig: backtracking shrink must lie in (0, 1)");
                   }
                   if (!(b.armijo > 0.0 && b.armijo < 1.0)) {
                     throw std::invalid_argument("SolverConfig: armijo constant must lie in (0, 1)");
                   }
                   if (!(b.growth >= 1.0)) throw std::invalid_argument("SolverConfig: growth must be >= 1");
                 },
             },
             step);
  if (perturb) {
    if (!(perturb->radius > 0.0)) throw std::invalid_argument("SolverConfig: perturbation radius must be positive");
    if (perturb->cooldown < 0) throw std::invalid_argument("SolverConfig: perturbation cooldown must be >= 0");
  }
}

double recovery_error(const ComplexVector& x_hat, const ComplexVector& z) {
  const double nz = z.squared_norm();
  if (nz == 0.0) throw std::invalid_argument("recovery_error: ground truth must be nonzero");
  return equiv_distance(x_hat, z) / nz;
}

ComplexVector perturb_if_stalled(const ComplexVector& x, double grad_norm, int iter, const Perturbation& cfg,
                                 std::uint64_t seed, PerturbState& state) {
  if (!(grad_norm < cfg.trigger_grad_tol)) return x;
  if (state.last_perturbed && iter - *state.last_perturbed < cfg.cooldown) return x;
  Rng rng = make_rng(derive_seed(seed, 0x70657274ULL, static_cast<std::uint64_t>(iter)));
  state.last_perturbed = iter;
  ++state.count;
  return x + ball_point(rng, x.size(), cfg.radius);
}

SolveOutcome solve(const LossProblem& p, const SolverConfig& cfg, const std::optional<ComplexVector>& truth) {
  cfg.validate();
  if (truth) require_same_dim(p.n(), truth->size(), "solve (ground truth)");

  SolverTrace trace;
  ComplexVector x = initial_point(p, cfg);
  LossEvaluation ev = evaluate(p, x);
  if (!std::isfinite(ev.value)) {
    trace.x_hat = x;
    throw SolverError("solve: non-finite loss at the initial point", std::move(trace));
  }
  const double f0 = ev.value;
  double gnorm = gradient_norm(ev.gradient);
  trace.grad_tol = cfg.grad_tol > 0.0 ? cfg.grad_tol : 1e-8 * (1.0 + f0);

  const Backtracking* bt = std::get_if<Backtracking>(&cfg.step);
  double eta = 0.0;
  if (bt) {
    eta = bt->initial_eta > 0.0 ? bt->initial_eta : (gnorm > 0.0 ? 0.1 / gnorm : 0.1);
  } else {
    eta = std::get<FixedStep>(cfg.step).eta;
  }

  PerturbState pstate;
  int k = 0;
  for (;; ++k) {
    trace.records.push_back({k, ev.value, gnorm, 0.0});
    if (gnorm < trace.grad_tol) {
      trace.converged = true;
      break;
    }
    if (k >= cfg.max_iters) break;

    if (cfg.perturb) {
      ComplexVector xp = perturb_if_stalled(x, gnorm, k, *cfg.perturb, cfg.seed, pstate);
      if (pstate.last_perturbed == k) {
        x = std::move(xp);
        ev = evaluate(p, x);
        gnorm = gradient_norm(ev.gradient);
      }
    }

    const Eigen::VectorXcd dir = 2.0 * ev.gradient.g_x.vec();
    const double dir_sq = dir.squaredNorm();

    if (bt) {
      double trial_eta = k == 0 ? eta : eta * bt->growth;
      bool accepted = false;
      for (int b = 0; b <= bt->max_backtracks; ++b) {
        Eigen::VectorXcd xv = x.vec() - trial_eta * dir;
        if (xv.allFinite()) {
          ComplexVector xn(std::move(xv));
          LossEvaluation en = evaluate(p, xn);
          if (std::isfinite(en.value) && en.value <= ev.value - bt->armijo * trial_eta * dir_sq) {
            x = std::move(xn);
            ev = std::move(en);
            accepted = true;
            break;
          }
        }
        trial_eta *= bt->shrink;
      }
      if (!accepted) break;  // no descent possible at machine precision
      eta = trial_eta;
    } else {
      Eigen::VectorXcd xv = x.vec() - eta * dir;
      if (!xv.allFinite()) {
        trace.x_hat = x;
        trace.iterations = k;
        throw SolverError("solve: non-finite iterate at iteration " + std::to_string(k + 1), std::move(trace));
      }
      x = ComplexVector(std::move(xv));
      ev = evaluate(p, x);
      if (!std::isfinite(ev.value)) {
        trace.x_hat = x;
        trace.iterations = k + 1;
        throw SolverError("solve: non-finite loss at iteration " + std::to_string(k + 1), std::move(trace));
      }
      if (ev.value > 10.0 * f0) {
        trace.x_hat = x;
        trace.iterations = k + 1;
        throw SolverError("solve: loss diverged (more than 10x its initial value) under fixed step",
                          std::move(trace));
      }
    }
    trace.records.back().step = eta;
    gnorm = gradient_norm(ev.gradient);
  }

  trace.iterations = k;
  trace.x_hat = x;
  trace.perturbations = pstate.count;

  SolveOutcome out{std::move(trace), std::nullopt};
  if (truth) {
    RecoveryResult r;
    r.x_hat = out.trace.x_hat;
    r.rel_error = recovery_error(r.x_hat, *truth);
    r.iterations = out.trace.iterations;
    r.converged = out.trace.converged;
    r.success = r.rel_error < cfg.success_tol;
    out.result = std::move(r);
  }
  return out;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  os << "iter,f,grad_norm,step\n";
  auto num = [](double v) {
    std::array<char, 64> buf{};
    return std::string(buf.data(), std::to_chars(buf.data(), buf.data() + buf.size(), v).ptr);
  };
  for (const auto& r : trace.records) {
    os << r.iter << ',' << num(r.f) << ',' << num(r.grad_norm) << ',' << num(r.step) << '\n';
  }
}

}  // namespace qfeas
