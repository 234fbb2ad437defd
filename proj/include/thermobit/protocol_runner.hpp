#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "thermobit/dsl.hpp"
#include "thermobit/report.hpp"

namespace thermobit {

struct ProtocolRun {
    std::string protocol;
    report::Json steps = report::Json::array();  // one record per directive
    std::optional<report::Format> format;        // set by the last `report` directive
    bool violation = false;                      // a correspondence check or audit failed
    std::string error;                           // runtime failure, e.g. no stationary distribution

    report::Json to_json() const;
};

/// Executes one protocol of a validated document. Bit operations run in
/// lenient mode with k_B T taken from the current system.
ProtocolRun run_protocol(const dsl::ProtocolSpec& doc, std::string_view name,
                         double relative_tol = kDefaultIdentityTolerance);

}  // namespace thermobit
