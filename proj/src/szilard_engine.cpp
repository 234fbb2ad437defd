#include "thermobit/szilard_engine.hpp"

#include <cmath>
#include <sstream>

#include "thermobit/bit_ops.hpp"
#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit {
namespace {

void require_half(int h) {
    if (h != 0 && h != 1)
        throw DomainError("vessel half must be 0 (left) or 1 (right)");
}

CycleEntry entry_from(std::string label, const OpLedger& ledger) {
    return {std::move(label), ledger.min_energy, ledger.delta_D.nats()};
}

}  // namespace

void EngineConfig::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw DomainError("engine temperature must be positive");
    if (!(boltzmann > 0.0) || !std::isfinite(boltzmann))
        throw DomainError("engine boltzmann constant must be positive");
    if (!(volume > 0.0) || !std::isfinite(volume))
        throw DomainError("engine volume must be positive");
    if (steps < 1)
        throw DomainError("engine needs at least one discretization step");
}

double isothermal_work(const EngineConfig& cfg, double v_start, double v_end) {
    cfg.validate();
    if (!(v_start > 0.0) || !(v_end > 0.0) || !std::isfinite(v_start) || !std::isfinite(v_end))
        throw DomainError("volumes must be positive and finite");
    if (v_start == v_end)
        return 0.0;
    // W_on = -int_{v_start}^{v_end} P dV = int_{v_end}^{v_start} kT / V dV.
    const double kt = cfg.thermal_energy();
    const double width = v_start - v_end;
    const double h = width / static_cast<double>(cfg.steps);
    CompensatedSum acc;
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        const double v = v_end + (static_cast<double>(i) + 0.5) * h;
        acc.add(1.0 / v);
    }
    return kt * h * acc.value();
}

double erase_work_bound(const EngineConfig& cfg) {
    cfg.validate();
    return cfg.thermal_energy() * std::log(2.0);
}

double randomize_work_yield(const EngineConfig& cfg) {
    cfg.validate();
    return cfg.thermal_energy() * std::log(2.0);
}

double pulley_work_yield(const EngineConfig& cfg, int molecule_half, int pulley_half) {
    require_half(molecule_half);
    require_half(pulley_half);
    const double yield = randomize_work_yield(cfg);
    return molecule_half == pulley_half ? yield : -yield;
}

double blind_work_yield(const EngineConfig& cfg, int pulley_half) {
    return 0.5 * pulley_work_yield(cfg, 0, pulley_half) + 0.5 * pulley_work_yield(cfg, 1, pulley_half);
}

std::string_view to_string(Measurement m) {
    switch (m) {
    case Measurement::szilard_copy: return "SZILARD_COPY";
    case Measurement::landauer_copy: return "LANDAUER_COPY";
    case Measurement::none: return "NONE";
    }
    return "NONE";
}

CycleLedger demon_cycle(const EngineConfig& cfg, Measurement measurement) {
    cfg.validate();
    const BitOpSettings settings{.mode = BitOpMode::strict, .temperature = cfg.temperature, .boltzmann = cfg.boltzmann};
    CycleLedger ledger;
    ledger.thermal_energy = cfg.thermal_energy();

    switch (measurement) {
    case Measurement::szilard_copy: {
        const auto measured = copy_szilard(BitPairState::independent(BitState::star(), BitState::star()), settings);
        const auto extracted = randomize_pair_bit(measured.state, 0, settings);
        ledger.entries.push_back(entry_from("measure X into random Y (copy_szilard)", measured.ledger));
        ledger.entries.push_back(entry_from("extract by randomizing X", extracted.ledger));
        ledger.final_state = extracted.state.joint().flattened();
        ledger.notes.push_back("measurement cost bound cancels the extraction yield bound");
        break;
    }
    case Measurement::landauer_copy: {
        const auto measured = copy_landauer(BitPairState::independent(BitState::star(), BitState::zero()), settings);
        const auto extracted = randomize_pair_bit(measured.state, 0, settings);
        ledger.entries.push_back(entry_from("measure X into initialized Y (copy_landauer)", measured.ledger));
        ledger.entries.push_back(entry_from("extract by randomizing X", extracted.ledger));
        ledger.final_state = extracted.state.joint().flattened();
        ledger.notes.push_back("Y is left randomized; the extracted work is paid for by the information in Y");
        break;
    }
    case Measurement::none: {
        ledger.entries.push_back({"extract without position information", 0.0 - blind_work_yield(cfg, 0), 0.0});
        ledger.final_state = Distribution::uniform(4);
        ledger.notes.push_back("without a measurement the expected yield is zero");
        break;
    }
    }

    CompensatedSum work;
    CompensatedSum info;
    for (const CycleEntry& e : ledger.entries) {
        work.add(e.work);
        info.add(e.info_delta);
    }
    ledger.net_work = work.value();
    ledger.net_info = info.value();
    return ledger;
}

std::vector<ConvergenceRow> convergence_table(const EngineConfig& cfg, double ratio, std::size_t max_steps,
                                              std::size_t levels) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw DomainError("compression ratio must be positive");
    const double exact = cfg.thermal_energy() * std::log(ratio);
    std::vector<ConvergenceRow> rows;
    std::size_t n = max_steps;
    for (std::size_t level = 0; level < levels && n >= 1; ++level, n /= 2) {
        EngineConfig c = cfg;
        c.steps = n;
        const double w = isothermal_work(c, c.volume, c.volume / ratio);
        rows.push_back({n, w, std::abs(w - exact)});
    }
    return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "N,work,abs_error\n";
    for (const ConvergenceRow& r : rows)
        out << r.steps << ',' << shortest_repr(r.work) << ',' << shortest_repr(r.abs_error) << '\n';
    return out.str();
}

}  // namespace thermobit
