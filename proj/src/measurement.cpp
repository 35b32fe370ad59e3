#include "qfeas/measurement.hpp"

#include <cmath>
#include <string>

#include "qfeas/json_io.hpp"
#include "qfeas/rng.hpp"

namespace qfeas {

namespace {

constexpr int kFormatVersion = 1;

bool is_rank_one_psd(const HermitianMatrix& a) {
  const Eigen::MatrixXcd d = a.dense();
  const double tr = d.trace().real();
  const double scale = std::max(1.0, d.squaredNorm());
  if (tr < -1e-12 * scale) return false;
  return (d * d - tr * d).norm() <= 1e-9 * scale;
}

}  // namespace

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::hermitian_gaussian: return "hermitian_gaussian";
    case EnsembleKind::rank_one: return "rank_one";
    case EnsembleKind::user_supplied: return "user_supplied";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) {
    if (ch == '-') ch = '_';
  }
  if (s == "hermitian_gaussian" || s == "gaussian") return EnsembleKind::hermitian_gaussian;
  if (s == "rank_one") return EnsembleKind::rank_one;
  if (s == "user_supplied") return EnsembleKind::user_supplied;
  throw std::invalid_argument("unknown ensemble kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

MeasurementEnsemble::MeasurementEnsemble(std::size_t n, EnsembleKind kind,
                                         std::vector<HermitianMatrix> matrices, double variance,
                                         std::optional<std::uint64_t> seed)
    : n_(n), kind_(kind), matrices_(std::move(matrices)), variance_(variance), seed_(seed) {
  if (n_ == 0) throw std::invalid_argument("MeasurementEnsemble: n must be >= 1");
  if (matrices_.empty()) throw std::invalid_argument("MeasurementEnsemble: m must be >= 1");
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
    throw std::invalid_argument("MeasurementEnsemble: variance must be positive");
  }
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    if (matrices_[i].dim() != n_) {
      throw std::invalid_argument("MeasurementEnsemble: matrix " + std::to_string(i) + " has dim " +
                                  std::to_string(matrices_[i].dim()) + ", expected " + std::to_string(n_));
    }
    if (kind_ == EnsembleKind::rank_one && !is_rank_one_psd(matrices_[i])) {
      throw std::invalid_argument("MeasurementEnsemble: matrix " + std::to_string(i) +
                                  " is not rank-one PSD");
    }
  }
}

bool operator==(const MeasurementEnsemble& a, const MeasurementEnsemble& b) {
  if (a.n_ != b.n_ || a.kind_ != b.kind_ || a.variance_ != b.variance_ || a.seed_ != b.seed_ ||
      a.m() != b.m()) {
    return false;
  }
  for (std::size_t i = 0; i < a.m(); ++i) {
    const auto ua = a.matrices_[i].upper();
    const auto ub = b.matrices_[i].upper();
    if (!std::equal(ua.begin(), ua.end(), ub.begin(), ub.end())) return false;
  }
  return true;
}

void MeasurementVector::validate() const {
  if (noise_sigma.size() != values.size()) {
    throw std::invalid_argument("MeasurementVector: noise_sigma length " + std::to_string(noise_sigma.size()) +
                                " != values length " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("MeasurementVector: non-finite value");
  }
  for (double s : noise_sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("MeasurementVector: invalid noise sigma");
  }
}

// ---------------------------------------------------------------------------
// Sampling

MeasurementEnsemble sample_hermitian_gaussian(std::size_t n, std::size_t m, double variance,
                                              std::uint64_t seed) {
  if (!(variance > 0.0)) throw std::invalid_argument("sample_hermitian_gaussian: variance must be positive");
  if (n == 0 || m == 0) throw std::invalid_argument("sample_hermitian_gaussian: n and m must be >= 1");
  const double sd = std::sqrt(variance);
  const double sd_off = std::sqrt(variance / 2.0);
  std::vector<HermitianMatrix> mats;
  mats.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng = make_rng(derive_seed(seed, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Complex> upper;
    upper.reserve(HermitianMatrix::packed_size(n));
    for (std::size_t r = 0; r < n; ++r) {
      upper.emplace_back(sd * normal(rng), 0.0);
      for (std::size_t c = r + 1; c < n; ++c) {
        const double re = sd_off * normal(rng);
        const double im = sd_off * normal(rng);
        upper.emplace_back(re, im);
      }
    }
    mats.emplace_back(n, std::move(upper));
  }
  return MeasurementEnsemble(n, EnsembleKind::hermitian_gaussian, std::move(mats), variance, seed);
}

HermitianMatrix rank_one_matrix(const ComplexVector& a) {
  const std::size_t n = a.size();
  std::vector<Complex> upper;
  upper.reserve(HermitianMatrix::packed_size(n));
  for (std::size_t i = 0; i < n; ++i) {
    upper.emplace_back(std::norm(a[i]), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(a[i] * std::conj(a[j]));
  }
  return HermitianMatrix(n, std::move(upper));
}

MeasurementEnsemble sample_rank_one(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0) throw std::invalid_argument("sample_rank_one: n and m must be >= 1");
  std::vector<HermitianMatrix> mats;
  mats.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng = make_rng(derive_seed(seed, i));
    mats.push_back(rank_one_matrix(complex_gaussian(rng, n, 0.5)));
  }
  return MeasurementEnsemble(n, EnsembleKind::rank_one, std::move(mats), 1.0, seed);
}

MeasurementVector forward_map(const MeasurementEnsemble& ens, const ComplexVector& x) {
  require_same_dim(ens.n(), x.size(), "forward_map");
  MeasurementVector c;
  c.values.reserve(ens.m());
  for (const auto& a : ens.matrices()) c.values.push_back(a.quadratic_form(x));
  c.noise_sigma.assign(ens.m(), 0.0);
  return c;
}

MeasurementVector add_noise(const MeasurementVector& c, const std::vector<double>& sigmas,
                            std::uint64_t seed) {
  require_same_dim(c.m(), sigmas.size(), "add_noise");
  MeasurementVector out = c;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double s = sigmas[i];
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("add_noise: sigma[" + std::to_string(i) + "] must be finite and >= 0");
    }
    if (s > 0.0) {
      Rng rng = make_rng(derive_seed(seed, i));
      std::normal_distribution<double> normal(0.0, s);
      out.values[i] += normal(rng);
    }
    out.noise_sigma[i] = std::sqrt(out.noise_sigma[i] * out.noise_sigma[i] + s * s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Documents

namespace {

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError(std::string(what) + ": expected [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::size_t size_field(const Json& doc, const char* key) {
  const Json& j = field(doc, key);
  if (!j.is_number_unsigned()) throw FormatError(std::string("field '") + key + "' must be a nonnegative integer");
  return j.get<std::size_t>();
}

void check_version(const Json& doc) {
  const Json& v = field(doc, "version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw FormatError("unsupported document version (expected 1)");
  }
}

}  // namespace

Json to_json(const MeasurementEnsemble& ens) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = ens.n();
  doc["m"] = ens.m();
  doc["kind"] = std::string(to_string(ens.kind()));
  doc["variance"] = ens.variance();
  if (ens.seed()) doc["seed"] = *ens.seed();
  Json mats = Json::array();
  for (const auto& a : ens.matrices()) {
    Json entries = Json::array();
    for (Complex z : a.upper()) entries.push_back(complex_pair(z));
    mats.push_back(std::move(entries));
  }
  doc["matrices"] = std::move(mats);
  return doc;
}

MeasurementEnsemble ensemble_from_json(const Json& doc) {
  check_version(doc);
  const std::size_t n = size_field(doc, "n");
  const std::size_t m = size_field(doc, "m");
  if (n == 0 || m == 0) throw FormatError("ensemble: n and m must be >= 1");
  const Json& kind_j = field(doc, "kind");
  if (!kind_j.is_string()) throw FormatError("ensemble: 'kind' must be a string");
  EnsembleKind kind;
  try {
    kind = parse_ensemble_kind(kind_j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("ensemble: ") + e.what());
  }
  double variance = 1.0;
  if (doc.contains("variance")) {
    if (!doc["variance"].is_number()) throw FormatError("ensemble: 'variance' must be a number");
    variance = doc["variance"].get<double>();
  }
  std::optional<std::uint64_t> seed;
  if (doc.contains("seed") && !doc["seed"].is_null()) {
    if (!doc["seed"].is_number_unsigned()) throw FormatError("ensemble: 'seed' must be an unsigned integer");
    seed = doc["seed"].get<std::uint64_t>();
  }
  const Json& mats = field(doc, "matrices");
  if (!mats.is_array()) throw FormatError("ensemble: 'matrices' must be an array");
  if (mats.size() != m) {
    throw FormatError("ensemble: m = " + std::to_string(m) + " but " + std::to_string(mats.size()) +
                      " matrices present");
  }
  const std::size_t packed = HermitianMatrix::packed_size(n);
  std::vector<HermitianMatrix> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Json& entries = mats[i];
    if (!entries.is_array() || entries.size() != packed) {
      throw FormatError("ensemble: matrix " + std::to_string(i) + " dim mismatch: expected " +
                        std::to_string(packed) + " upper-triangle entries");
    }
    std::vector<Complex> upper;
    upper.reserve(packed);
    for (const auto& e : entries) upper.push_back(complex_from(e, "ensemble matrix entry"));
    std::size_t k = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (upper[k].imag() != 0.0) {
        throw FormatError("ensemble: matrix " + std::to_string(i) + " has non-real diagonal at (" +
                          std::to_string(r) + ", " + std::to_string(r) + ")");
      }
      k += n - r;
    }
    try {
      out.emplace_back(n, std::move(upper));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("ensemble: ") + e.what());
    }
  }
  try {
    return MeasurementEnsemble(n, kind, std::move(out), variance, seed);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("ensemble: ") + e.what());
  }
}

Json to_json(const MeasurementVector& c) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["m"] = c.m();
  doc["values"] = c.values;
  doc["noise_sigma"] = c.noise_sigma;
  return doc;
}

MeasurementVector observations_from_json(const Json& doc) {
  check_version(doc);
  const std::size_t m = size_field(doc, "m");
  MeasurementVector c;
  const Json& values = field(doc, "values");
  if (!values.is_array() || values.size() != m) throw FormatError("observations: 'values' length must equal m");
  for (const auto& v : values) {
    if (!v.is_number()) throw FormatError("observations: non-numeric value");
    c.values.push_back(v.get<double>());
  }
  if (doc.contains("noise_sigma")) {
    const Json& s = doc["noise_sigma"];
    if (!s.is_array() || s.size() != m) throw FormatError("observations: 'noise_sigma' length must equal m");
    for (const auto& v : s) {
      if (!v.is_number()) throw FormatError("observations: non-numeric noise sigma");
      c.noise_sigma.push_back(v.get<double>());
    }
  } else {
    c.noise_sigma.assign(m, 0.0);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("observations: ") + e.what());
  }
  return c;
}

Json to_json(const ComplexVector& x) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = x.size();
  Json entries = Json::array();
  for (Complex z : x.entries()) entries.push_back(complex_pair(z));
  doc["entries"] = std::move(entries);
  return doc;
}

ComplexVector vector_from_json(const Json& doc) {
  check_version(doc);
  const std::size_t n = size_field(doc, "n");
  const Json& entries = field(doc, "entries");
  if (!entries.is_array() || entries.size() != n) throw FormatError("vector: 'entries' length must equal n");
  std::vector<Complex> v;
  v.reserve(n);
  for (const auto& e : entries) v.push_back(complex_from(e, "vector entry"));
  try {
    return ComplexVector(std::move(v));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("vector: ") + e.what());
  }
}

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  }
}

std::string serialize_ensemble(const MeasurementEnsemble& ens) { return to_json(ens).dump() + "\n"; }
MeasurementEnsemble deserialize_ensemble(std::string_view text) {
  return ensemble_from_json(parse_document(text));
}
std::string serialize_observations(const MeasurementVector& c) { return to_json(c).dump() + "\n"; }
MeasurementVector deserialize_observations(std::string_view text) {
  return observations_from_json(parse_document(text));
}
std::string serialize_vector(const ComplexVector& x) { return to_json(x).dump() + "\n"; }
ComplexVector deserialize_vector(std::string_view text) { return vector_from_json(parse_document(text)); }

}  // namespace qfeas
