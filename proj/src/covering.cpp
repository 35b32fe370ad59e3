#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qfeas/landscape.hpp"
#include "qfeas/rng.hpp"

namespace qfeas {

namespace {

// Unit points in flat storage, n entries per point.
struct PointCloud {
  std::size_t n = 0;
  std::vector<Complex> data;

  std::size_t size() const { return data.size() / n; }
  const Complex* at(std::size_t i) const { return data.data() + i * n; }
};

PointCloud sample_sphere(std::size_t n, std::size_t count, std::uint64_t seed) {
  PointCloud pc{n, {}};
  pc.data.reserve(n * count);
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const ComplexVector x = unit_sphere_point(rng, n);
    pc.data.insert(pc.data.end(), x.entries().begin(), x.entries().end());
  }
  return pc;
}

// |<u, x>| for unit vectors; the phase distance is sqrt(2 - 2 |<u, x>|).
double overlap(const Complex* u, const Complex* x, std::size_t n) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::conj(u[k]) * x[k];
  return std::abs(acc);
}

double distance_from_overlap(double ov) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * ov)); }

double quad_form(const Eigen::MatrixXcd& a, const Complex* x, std::size_t n) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
    }
    acc += std::conj(x[i]) * row;
  }
  return acc.real();
}

}  // namespace

double phase_distance(const ComplexVector& x, const ComplexVector& u) {
  require_same_dim(x.size(), u.size(), "phase_distance");
  return distance_from_overlap(std::abs(inner(u, x)));
}

SphereNet build_sphere_net(std::size_t n, double delta, std::uint64_t seed, SphereNetOptions opts) {
  if (n != 2 && n != 3) throw std::invalid_argument("build_sphere_net: only n = 2 or n = 3 is supported");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("build_sphere_net: delta must lie in (0, 1/2)");
  if (opts.candidates == 0 || opts.probes == 0) {
    throw std::invalid_argument("build_sphere_net: candidate and probe counts must be positive");
  }

  const PointCloud cand = sample_sphere(n, opts.candidates, derive_seed(seed, 0));
  const PointCloud probe = sample_sphere(n, opts.probes, derive_seed(seed, 1));

  // Greedy farthest-point insertion; min_dist[i] is candidate i's distance to
  // the current net.
  std::vector<double> min_dist(cand.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> net;
  auto insert = [&](std::size_t c) {
    net.push_back(c);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double d = distance_from_overlap(overlap(cand.at(c), cand.at(i), n));
      if (d < min_dist[i]) min_dist[i] = d;
    }
  };
  auto grow_to = [&](double target) {
    if (net.empty()) insert(0);
    for (;;) {
      const auto it = std::max_element(min_dist.begin(), min_dist.end());
      if (*it <= target) return;
      insert(static_cast<std::size_t>(it - min_dist.begin()));
    }
  };

  // Probe i passes when some net point is within delta. Checking the most
  // recent hit first makes the common case O(1).
  const double need = 1.0 - 0.5 * delta * delta;  // overlap threshold for distance <= delta
  auto certify = [&](double& worst) {
    worst = 0.0;
    bool ok = true;
    std::size_t hint = 0;
    for (std::size_t p = 0; p < probe.size(); ++p) {
      const Complex* x = probe.at(p);
      if (overlap(cand.at(net[hint]), x, n) >= need) continue;
      double best = 0.0;
      for (std::size_t k = 0; k < net.size(); ++k) {
        const double ov = overlap(cand.at(net[k]), x, n);
        if (ov > best) {
          best = ov;
          hint = k;
          if (ov >= need) break;
        }
      }
      if (best < need) {
        ok = false;
        worst = std::max(worst, distance_from_overlap(best));
      }
    }
    return ok;
  };

  double target = 0.9 * delta;
  double worst = 0.0;
  bool certified = false;
  for (int attempt = 0; attempt < 6 && !certified; ++attempt, target *= 0.8) {
    grow_to(target);
    certified = certify(worst);
  }
  if (!certified) {
    throw std::runtime_error("build_sphere_net: candidate pool of " + std::to_string(opts.candidates) +
                             " cannot certify covering radius " + std::to_string(delta) + " (worst probe at " +
                             std::to_string(worst) + ")");
  }

  // Largest probe-to-net distance, for the report.
  double radius = 0.0;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    double best = 0.0;
    for (std::size_t k = 0; k < net.size() && best < 1.0; ++k) {
      best = std::max(best, overlap(cand.at(net[k]), probe.at(p), n));
      if (distance_from_overlap(best) <= radius) break;  // cannot raise the maximum
    }
    radius = std::max(radius, distance_from_overlap(best));
  }

  SphereNet out;
  out.n = n;
  out.delta = delta;
  out.candidates = opts.candidates;
  out.probes = opts.probes;
  out.certified_radius = radius;
  out.points.reserve(net.size());
  for (std::size_t c : net) out.points.emplace_back(std::vector<Complex>(cand.at(c), cand.at(c) + n));
  out.dense = cand.data;
  out.dense.insert(out.dense.end(), probe.data.begin(), probe.data.end());
  return out;
}

CoveringReport covering_net_check(const HermitianMatrix& a, const SphereNet& net) {
  require_same_dim(a.dim(), net.n, "covering_net_check");
  const Eigen::MatrixXcd ad = a.dense();
  const std::size_t n = net.n;

  double net_lo = std::numeric_limits<double>::infinity();
  double net_hi = -std::numeric_limits<double>::infinity();
  for (const auto& u : net.points) {
    const double q = a.quadratic_form(u);
    net_lo = std::min(net_lo, q);
    net_hi = std::max(net_hi, q);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.dense.size() / n; ++i) {
    const double q = quad_form(ad, net.dense.data() + i * n, n);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }

  CoveringReport rep;
  rep.delta = net.delta;
  rep.net_size = net.points.size();
  rep.sup_net = net.points.empty() ? 0.0 : net_hi - net_lo;
  rep.sup_dense = net.dense.empty() ? 0.0 : hi - lo;
  rep.lower = (1.0 - 2.0 * net.delta) * rep.sup_dense;
  rep.upper = (1.0 + 2.0 * net.delta) * rep.sup_dense;
  rep.holds = rep.lower <= rep.sup_net && rep.sup_net <= rep.upper;
  return rep;
}

CoveringReport covering_net_check(const HermitianMatrix& a, double delta, std::uint64_t seed,
                                  SphereNetOptions opts) {
  return covering_net_check(a, build_sphere_net(a.dim(), delta, seed, opts));
}

}  // namespace qfeas
