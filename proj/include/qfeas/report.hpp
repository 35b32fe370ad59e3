#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "qfeas/json_io.hpp"
#include "qfeas/landscape.hpp"
#include "qfeas/solver.hpp"

namespace qfeas {

inline constexpr int kReportVersion = 1;

/// Compiler and library version string baked in at build time.
std::string_view build_id();

/// Echoed into every output file.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  Json config = Json::object();
};

Json to_json(const Provenance& p);

/// Shortest decimal that round-trips, '.' separator regardless of locale.
/// Infinities print as inf / -inf, NaN as nan.
std::string format_number(double v);

/// "# key: value" lines for the top of a CSV file.
std::string csv_provenance(const Provenance& p);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Writes text to path, creating parent directories. Throws
/// std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Non-finite values become the strings "inf", "-inf", "nan" so documents
/// stay valid JSON.
Json number_json(double v);

Json to_json(const SaddleThresholds& t);
Json to_json(const SaddleCertificate& c);
Json to_json(const Calibration& c);
Json to_json(const ScanReport& r);
Json to_json(const StabilityEstimate& s);
Json to_json(const ConcentrationReport& r);
Json to_json(const CrossTermSummary& s);
Json to_json(const CoveringReport& r);
Json to_json(const LocalMinReport& r);
Json to_json(const RecoveryResult& r);

/// index,source,gradient_norm,curvature_along_delta,distance_to_truth,verdict
void write_scan_csv(std::ostream& os, const ScanReport& r);
/// trial,ratio
void write_concentration_csv(std::ostream& os, const ConcentrationReport& r);

}  // namespace qfeas
