#include "thermobit/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "thermobit/numeric.hpp"

namespace thermobit::report {
namespace {

void flatten_into(const Json& j, const std::string& prefix, Json& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_into(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out[prefix] = j;
    }
}

std::string scalar_text(const Json& j) {
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_float())
        return shortest_repr(j.get<double>());
    return j.dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

}  // namespace

Json number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

Json to_json(InfoQuantity q) {
    return Json{{"nats", number(q.nats())}, {"bits", number(q.bits())}};
}

Json to_json(const Distribution& d) {
    Json arr = Json::array();
    for (double x : d.probs())
        arr.push_back(number(x));
    return arr;
}

Json to_json(const ThermoReport& r, double thermal_energy, double relative_tol) {
    return Json{
        {"partition_value", number(r.partition_value)},
        {"log_partition", number(r.log_partition)},
        {"gibbs", to_json(r.gibbs)},
        {"average_energy", number(r.average_energy)},
        {"free_energy_p", number(r.free_energy_p)},
        {"free_energy_gibbs", number(r.free_energy_gibbs)},
        {"available", number(r.available)},
        {"kl", to_json(r.kl_nats)},
        {"kT", number(thermal_energy)},
        {"residual", number(r.residual)},
        {"proof_step_residual", number(r.proof_step_residual)},
        {"tolerance", number(relative_tol * r.scale)},
        {"pass", r.holds(relative_tol)},
    };
}

Json to_json(const OpLedger& ledger) {
    return Json{
        {"op_name", ledger.op_name},
        {"input_state", Json{{"probs", to_json(ledger.input_state)}, {"type", ledger.input_type}}},
        {"output_state", Json{{"probs", to_json(ledger.output_state)}, {"type", ledger.output_type}}},
        {"delta_H", to_json(ledger.delta_H)},
        {"delta_D", to_json(ledger.delta_D)},
        {"min_energy", Json{{"energy", number(ledger.min_energy)},
                            {"nats", number(ledger.delta_D.nats())},
                            {"bits", number(ledger.delta_D.bits())}}},
        {"kT", number(ledger.thermal_energy)},
        {"direction", std::string(to_string(ledger.direction))},
    };
}

Json to_json(const AuditVerdict& v) {
    Json j{
        {"stationary_found", v.stationary_found},
        {"stationary", v.stationary ? to_json(*v.stationary) : Json(nullptr)},
        {"multiplicity_warning", v.multiplicity_warning},
        {"detailed_balance", v.detailed_balance},
        {"detailed_balance_residual", number(v.detailed_balance_residual)},
        {"monotone", v.monotone},
        {"max_violation", number(v.max_violation)},
        {"steps_checked", v.steps_checked},
    };
    if (v.trajectory) {
        j["D_initial"] = to_json(v.trajectory->divergence.front());
        j["D_final"] = to_json(v.trajectory->divergence.back());
    }
    if (!v.error.empty())
        j["error"] = v.error;
    return j;
}

Json to_json(const DataProcessing& d) {
    return Json{{"before", to_json(d.before)}, {"after", to_json(d.after)}, {"ok", d.ok}};
}

Json to_json(const CycleLedger& ledger) {
    Json entries = Json::array();
    for (const CycleEntry& e : ledger.entries)
        entries.push_back(Json{{"label", e.label}, {"work", number(e.work)}, {"info_delta", to_json(InfoQuantity(e.info_delta))}});
    return Json{
        {"entries", entries},
        {"net_work", number(ledger.net_work)},
        {"net_info", to_json(InfoQuantity(ledger.net_info))},
        {"kT", number(ledger.thermal_energy)},
        {"free_energy_balance", number(ledger.free_energy_balance())},
        {"final_state", to_json(ledger.final_state)},
        {"notes", ledger.notes},
    };
}

Json to_json(const InfoDecomposition& d) {
    return Json{{"total", to_json(d.total)},
                {"part1", to_json(d.part1)},
                {"part2", to_json(d.part2)},
                {"correlation", to_json(d.correlation)},
                {"residual", number(d.residual())}};
}

Json flatten(const Json& j) {
    Json out = Json::object();
    if (!j.is_object() && !j.is_array()) {
        out["value"] = j;
        return out;
    }
    flatten_into(j, "", out);
    return out;
}

std::string render_json(const Json& j) {
    return j.dump(2) + "\n";
}

std::string render_table(const Json& j) {
    const Json flat = flatten(j);
    std::size_t width = 0;
    for (auto it = flat.begin(); it != flat.end(); ++it)
        width = std::max(width, it.key().size());
    std::ostringstream out;
    for (auto it = flat.begin(); it != flat.end(); ++it)
        out << it.key() << std::string(width - it.key().size() + 2, ' ') << scalar_text(it.value()) << '\n';
    return out.str();
}

std::string render_csv(const Json& j) {
    const Json flat = flatten(j);
    std::ostringstream header;
    std::ostringstream row;
    bool first = true;
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        if (!first) {
            header << ',';
            row << ',';
        }
        first = false;
        header << csv_field(it.key());
        row << csv_field(scalar_text(it.value()));
    }
    return header.str() + "\n" + row.str() + "\n";
}

Format parse_format(std::string_view name) {
    if (name == "table")
        return Format::table;
    if (name == "json")
        return Format::json;
    if (name == "csv")
        return Format::csv;
    throw std::invalid_argument("unknown output format '" + std::string(name) + "'");
}

std::string render(const Json& j, Format format) {
    switch (format) {
    case Format::table: return render_table(j);
    case Format::json: return render_json(j);
    case Format::csv: return render_csv(j);
    }
    return render_json(j);
}

}  // namespace thermobit::report
