#pragma once

#include <json.hpp>

#include "qfeas/core.hpp"
#include "qfeas/measurement.hpp"

namespace qfeas {

using Json = nlohmann::ordered_json;

Json to_json(const MeasurementEnsemble& ens);
Json to_json(const MeasurementVector& c);
Json to_json(const ComplexVector& x);

MeasurementEnsemble ensemble_from_json(const Json& doc);
MeasurementVector observations_from_json(const Json& doc);
ComplexVector vector_from_json(const Json& doc);

/// Parses text, rethrowing parse failures as FormatError.
Json parse_document(std::string_view text);

}  // namespace qfeas
