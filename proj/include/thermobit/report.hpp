#pragma once

// JSON, table and CSV renderings of the result types. Field names are part of
// the CLI contract; every information quantity carries both "nats" and "bits",
// and non-finite numbers are written as the strings "inf" / "-inf".

#include <string>

#include "json.hpp"
#include "thermobit/bit_ops.hpp"
#include "thermobit/information.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/szilard_engine.hpp"
#include "thermobit/thermo.hpp"

namespace thermobit::report {

using Json = nlohmann::ordered_json;

Json number(double x);
Json to_json(InfoQuantity q);
Json to_json(const Distribution& d);
Json to_json(const ThermoReport& r, double thermal_energy, double relative_tol);
Json to_json(const OpLedger& ledger);
Json to_json(const AuditVerdict& v);
Json to_json(const DataProcessing& d);
Json to_json(const CycleLedger& ledger);
Json to_json(const InfoDecomposition& d);

/// Nested keys joined with '.', array elements by index.
Json flatten(const Json& j);

/// Pretty-printed JSON with a trailing newline.
std::string render_json(const Json& j);
/// One "key  value" line per flattened field.
std::string render_table(const Json& j);
/// Header of flattened keys and a single data row.
std::string render_csv(const Json& j);

enum class Format { table, json, csv };

Format parse_format(std::string_view name);
std::string render(const Json& j, Format format);

}  // namespace thermobit::report
