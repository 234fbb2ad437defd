#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "thermobit/information.hpp"

namespace thermobit {

inline constexpr std::size_t kDefaultEngineSteps = 100'000;

/// Single-molecule ideal gas held at temperature T; P V = k_B T.
struct EngineConfig {
    double temperature = 1.0;
    double boltzmann = 1.0;
    double volume = 1.0;  // only ratios matter
    std::size_t steps = kDefaultEngineSteps;

    double thermal_energy() const noexcept { return boltzmann * temperature; }
    /// Throws DomainError unless every field is positive.
    void validate() const;
};

/// Work done on the gas for a quasi-static isothermal change v_start -> v_end,
/// by an N-step midpoint rule over k_B T dV / V. Compression is positive.
double isothermal_work(const EngineConfig& cfg, double v_start, double v_end);

/// k_B T log 2: the least work that confines the molecule to one half.
double erase_work_bound(const EngineConfig& cfg);

/// k_B T log 2: the most work the expansion V/2 -> V can deliver.
double randomize_work_yield(const EngineConfig& cfg);

/// Work delivered to the load when the molecule sits in `molecule_half` and the
/// pulley is rigged for `pulley_half` (0 = left, 1 = right). A mismatched rig
/// lowers the weight and the yield is negative.
double pulley_work_yield(const EngineConfig& cfg, int molecule_half, int pulley_half);

/// Expected yield with the pulley fixed to one side and the molecule uniformly
/// placed, i.e. with no position information. Always 0.
double blind_work_yield(const EngineConfig& cfg, int pulley_half);

enum class Measurement { szilard_copy, landauer_copy, none };

std::string_view to_string(Measurement m);

struct CycleEntry {
    std::string label;
    double work;        // supplied > 0, extracted < 0
    double info_delta;  // nats
};

struct CycleLedger {
    std::vector<CycleEntry> entries;
    double net_work = 0.0;
    double net_info = 0.0;
    double thermal_energy = 1.0;
    Distribution final_state = Distribution::uniform(4);  // joint over (X, Y): 00, 01, 10, 11
    std::vector<std::string> notes;

    /// net_work - k_B T * net_info; never negative for a lawful cycle.
    double free_energy_balance() const noexcept { return net_work - thermal_energy * net_info; }
};

/// Measure-then-extract cycle of the demon: X is the engine bit, Y the apparatus bit.
CycleLedger demon_cycle(const EngineConfig& cfg, Measurement measurement);

struct ConvergenceRow {
    std::size_t steps;
    double work;
    double abs_error;
};

/// Compression by `ratio` at N = max_steps, max_steps/2, ... (`levels` rows).
std::vector<ConvergenceRow> convergence_table(const EngineConfig& cfg, double ratio, std::size_t max_steps,
                                              std::size_t levels);

/// Columns N, work, abs_error.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace thermobit
