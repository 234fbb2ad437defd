#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "thermobit/information.hpp"

namespace thermobit {

inline constexpr double kBoltzmannSI = 1.380649e-23;  // J/K
inline constexpr double kDefaultIdentityTolerance = 1e-12;

/// State energies at a fixed temperature. T and k_B must be positive, energies finite.
class EnergyLandscape {
public:
    EnergyLandscape(std::vector<double> energies, double temperature, double boltzmann = 1.0);

    std::size_t size() const noexcept { return energies_.size(); }
    const std::vector<double>& energies() const noexcept { return energies_; }
    double temperature() const noexcept { return temperature_; }
    double boltzmann() const noexcept { return boltzmann_; }
    /// k_B * T, the energy that one nat is worth.
    double thermal_energy() const noexcept { return boltzmann_ * temperature_; }

    /// Same landscape with `c` added to every energy.
    EnergyLandscape shifted(double c) const;

private:
    std::vector<double> energies_;
    double temperature_;
    double boltzmann_;
};

struct ThermoReport {
    double partition_value;     // Z; +inf or 0 when exp overflows, log_partition stays finite
    double log_partition;       // log Z
    Distribution gibbs;
    double average_energy;      // <E>_p
    double free_energy_p;       // F(p)
    double free_energy_gibbs;   // F(pi), evaluated from its definition
    double available;           // F(p) - F(pi)
    InfoQuantity kl_nats;       // D(p || pi)
    double residual;            // |available - kT D|
    double proof_step_residual; // |F(pi) + kT log Z|
    double scale;               // max(1, |F(p)|)

    /// Both residuals within `relative_tol * scale`.
    bool holds(double relative_tol = kDefaultIdentityTolerance) const noexcept;
};

/// log sum_i exp(-E_i / kT), max-shifted so |E/kT| up to 1e6 stays finite.
double log_partition_function(const EnergyLandscape& landscape);

Distribution gibbs_distribution(const EnergyLandscape& landscape);

/// log pi_i computed without exponentiating, exact even where pi_i underflows.
std::vector<double> gibbs_log_probabilities(const EnergyLandscape& landscape);

double average_energy(const EnergyLandscape& landscape, const Distribution& p);

/// <E>_p - k_B T H(p).
double free_energy(const EnergyLandscape& landscape, const Distribution& p);

ThermoReport check_szilard_landauer(const EnergyLandscape& landscape, const Distribution& p);

/// F(p) - F(pi).
double available_free_energy(const EnergyLandscape& landscape, const Distribution& p);

}  // namespace thermobit
