#include "qfeas/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef QFEAS_BUILD_ID
#define QFEAS_BUILD_ID "qfeas-unknown"
#endif

namespace qfeas {

std::string_view build_id() { return QFEAS_BUILD_ID; }

Json to_json(const Provenance& p) {
  Json j;
  j["version"] = kReportVersion;
  j["build"] = std::string(build_id());
  j["command"] = p.command;
  j["seed"] = p.seed;
  j["config"] = p.config;
  return j;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_provenance(const Provenance& p) {
  std::string out;
  out += "# version: " + std::to_string(kReportVersion) + "\n";
  out += "# build: " + std::string(build_id()) + "\n";
  out += "# command: " + p.command + "\n";
  out += "# seed: " + std::to_string(p.seed) + "\n";
  out += "# config: " + p.config.dump() + "\n";
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

namespace {

Json entries_json(const ComplexVector& x) { return to_json(x)["entries"]; }

}  // namespace

Json to_json(const SaddleThresholds& t) {
  Json j;
  j["beta_thr"] = number_json(t.beta_thr);
  j["zeta"] = number_json(t.zeta);
  j["gamma"] = number_json(t.gamma);
  return j;
}

Json to_json(const SaddleCertificate& c) {
  Json j;
  j["x"] = entries_json(c.x);
  j["gradient_norm"] = c.gradient_norm;
  j["curvature_along_delta"] = c.curvature_along_delta;
  j["distance_to_truth"] = c.distance_to_truth;
  j["verdict"] = std::string(to_string(c.verdict));
  j["thresholds"] = to_json(c.thresholds);
  return j;
}

Json to_json(const Calibration& c) {
  Json j;
  j["thresholds"] = to_json(c.thresholds);
  j["pilot_points"] = c.pilot_points;
  j["grad_percentile"] = c.grad_percentile;
  j["ball_grad_percentile"] = c.ball_grad_percentile;
  j["c"] = c.c;
  j["c0"] = c.c0;
  j["grad_delta"] = c.grad_delta;
  j["curvature_gap"] = c.curvature_gap;
  return j;
}

Json to_json(const ScanReport& r) {
  Json j;
  j["thresholds"] = to_json(r.thresholds);
  j["num_points"] = r.num_points;
  Json h;
  for (auto v : {Verdict::large_gradient, Verdict::negative_curvature, Verdict::near_minimum, Verdict::violation}) {
    h[std::string(to_string(v))] = r.histogram[static_cast<std::size_t>(v)];
  }
  j["histogram"] = h;
  j["max_fd_curvature_rel_error"] = r.max_fd_curvature_rel_error;
  Json viol = Json::array();
  for (const auto& c : r.violations) viol.push_back(to_json(c));
  j["violations"] = viol;
  return j;
}

Json to_json(const StabilityEstimate& s) {
  Json j;
  j["alpha_hat"] = s.alpha_hat;
  j["beta_stability"] = s.beta_hat;
  j["beta_over_alpha"] = s.alpha_hat > 0.0 ? number_json(s.beta_hat / s.alpha_hat) : Json("inf");
  j["num_pairs"] = s.num_pairs;
  j["degenerate_pairs"] = s.degenerate_pairs;
  j["mean_ratio"] = s.mean_ratio;
  if (!s.ratio_samples.empty()) j["ratio_samples"] = s.ratio_samples;
  return j;
}

Json to_json(const ConcentrationReport& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["trials"] = r.trials;
  j["epsilon"] = number_json(r.epsilon);
  j["empirical_mean_ratio"] = r.empirical_mean_ratio;
  j["tail_fraction"] = r.tail_fraction;
  return j;
}

Json to_json(const CrossTermSummary& s) {
  Json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["trials"] = s.trials;
  j["normalized_mean"] = s.normalized_mean;
  j["normalized_std"] = s.normalized_std;
  j["analytic_expectation"] = s.analytic_expectation;
  j["x"] = entries_json(s.x);
  j["delta"] = entries_json(s.delta);
  return j;
}

Json to_json(const CoveringReport& r) {
  Json j;
  j["net_delta"] = r.delta;
  j["net_size"] = r.net_size;
  j["sup_net"] = r.sup_net;
  j["sup_dense"] = r.sup_dense;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["holds"] = r.holds;
  return j;
}

Json to_json(const LocalMinReport& r) {
  Json j;
  j["trials"] = r.trials;
  j["converged"] = r.converged;
  j["successes"] = r.successes;
  j["counterexamples"] = r.counterexamples;
  j["zeta_tol"] = r.zeta_tol;
  Json d = Json::array();
  for (const auto& t : r.details) {
    Json e;
    e["rel_error"] = t.rel_error;
    e["iterations"] = t.iterations;
    e["converged"] = t.converged;
    e["success"] = t.success;
    e["final_grad_norm"] = t.final_grad_norm;
    e["min_rayleigh"] = t.min_rayleigh ? Json(*t.min_rayleigh) : Json();
    e["min_eigenvalue"] = t.min_eigenvalue ? Json(*t.min_eigenvalue) : Json();
    e["counterexample"] = t.counterexample;
    d.push_back(e);
  }
  j["details"] = d;
  return j;
}

Json to_json(const RecoveryResult& r) {
  Json j;
  j["x_hat"] = entries_json(r.x_hat);
  j["rel_error"] = r.rel_error;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["success"] = r.success;
  return j;
}

void write_scan_csv(std::ostream& os, const ScanReport& r) {
  os << "index,source,gradient_norm,curvature_along_delta,distance_to_truth,verdict\n";
  for (std::size_t i = 0; i < r.certificates.size(); ++i) {
    const auto& c = r.certificates[i];
    os << i << ',' << to_string(r.sources[i]) << ',' << format_number(c.gradient_norm) << ','
       << format_number(c.curvature_along_delta) << ',' << format_number(c.distance_to_truth) << ','
       << to_string(c.verdict) << '\n';
  }
}

void write_concentration_csv(std::ostream& os, const ConcentrationReport& r) {
  os << "trial,ratio\n";
  for (std::size_t i = 0; i < r.ratios.size(); ++i) os << i << ',' << format_number(r.ratios[i]) << '\n';
}

}  // namespace qfeas
