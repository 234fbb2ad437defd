#include "thermobit/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit {
namespace {

void require_same_size(const EnergyLandscape& landscape, const Distribution& p) {
    if (landscape.size() != p.size())
        throw ShapeError("landscape has " + std::to_string(landscape.size()) +
                         " states but the distribution has " + std::to_string(p.size()));
}

// -E_i / kT for every state.
std::vector<double> reduced_weights(const EnergyLandscape& landscape) {
    std::vector<double> w(landscape.size());
    const double kt = landscape.thermal_energy();
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = -landscape.energies()[i] / kt;
    return w;
}

double log_sum_exp(const std::vector<double>& w) {
    const double shift = *std::max_element(w.begin(), w.end());
    CompensatedSum acc;
    for (double x : w)
        acc.add(std::exp(x - shift));
    return shift + std::log(acc.value());
}

}  // namespace

EnergyLandscape::EnergyLandscape(std::vector<double> energies, double temperature, double boltzmann)
    : energies_(std::move(energies)), temperature_(temperature), boltzmann_(boltzmann) {
    if (energies_.empty())
        throw DomainError("energy landscape needs at least one state");
    if (!(temperature_ > 0.0) || !std::isfinite(temperature_))
        throw DomainError("temperature must be positive and finite, got " + brief_repr(temperature_));
    if (!(boltzmann_ > 0.0) || !std::isfinite(boltzmann_))
        throw DomainError("boltzmann constant must be positive and finite, got " + brief_repr(boltzmann_));
    if (!std::isfinite(thermal_energy()) || thermal_energy() == 0.0)
        throw DomainError("k_B * T is not a positive finite number");
    for (double e : energies_)
        if (!std::isfinite(e))
            throw DomainError("energies must be finite");
}

EnergyLandscape EnergyLandscape::shifted(double c) const {
    std::vector<double> e = energies_;
    for (double& x : e)
        x += c;
    return EnergyLandscape(std::move(e), temperature_, boltzmann_);
}

double log_partition_function(const EnergyLandscape& landscape) {
    return log_sum_exp(reduced_weights(landscape));
}

std::vector<double> gibbs_log_probabilities(const EnergyLandscape& landscape) {
    std::vector<double> w = reduced_weights(landscape);
    const double log_z = log_sum_exp(w);
    for (double& x : w)
        x -= log_z;
    return w;
}

Distribution gibbs_distribution(const EnergyLandscape& landscape) {
    std::vector<double> probs = gibbs_log_probabilities(landscape);
    for (double& x : probs)
        x = std::exp(x);
    return Distribution(std::move(probs));
}

double average_energy(const EnergyLandscape& landscape, const Distribution& p) {
    require_same_size(landscape, p);
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc.add(p[i] * landscape.energies()[i]);
    return acc.value();
}

double free_energy(const EnergyLandscape& landscape, const Distribution& p) {
    require_same_size(landscape, p);
    // Summed term by term as p_i E_i + kT p_i log p_i to avoid cancelling two large totals.
    const double kt = landscape.thermal_energy();
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc.add(p[i] * landscape.energies()[i]);
        if (p[i] > 0.0)
            acc.add(kt * p[i] * std::log(p[i]));
    }
    return acc.value();
}

bool ThermoReport::holds(double relative_tol) const noexcept {
    const double bound = relative_tol * scale;
    return residual <= bound && proof_step_residual <= bound;
}

ThermoReport check_szilard_landauer(const EnergyLandscape& landscape, const Distribution& p) {
    require_same_size(landscape, p);
    const double kt = landscape.thermal_energy();
    const double log_z = log_partition_function(landscape);
    const std::vector<double> log_pi = gibbs_log_probabilities(landscape);
    Distribution gibbs = gibbs_distribution(landscape);

    // D(p || pi) against log pi directly so underflowed Gibbs entries stay exact.
    CompensatedSum kl;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0)
            kl.add(p[i] * (std::log(p[i]) - log_pi[i]));
    }

    const double f_p = free_energy(landscape, p);
    const double f_pi = free_energy(landscape, gibbs);
    const double available = f_p - f_pi;
    const InfoQuantity kl_nats(kl.value());

    return ThermoReport{
        .partition_value = std::exp(log_z),
        .log_partition = log_z,
        .gibbs = std::move(gibbs),
        .average_energy = average_energy(landscape, p),
        .free_energy_p = f_p,
        .free_energy_gibbs = f_pi,
        .available = available,
        .kl_nats = kl_nats,
        .residual = std::abs(available - kt * kl_nats.nats()),
        .proof_step_residual = std::abs(f_pi + kt * log_z),
        .scale = std::max(1.0, std::abs(f_p)),
    };
}

double available_free_energy(const EnergyLandscape& landscape, const Distribution& p) {
    return check_szilard_landauer(landscape, p).available;
}

}  // namespace thermobit
