#pragma once

// Seeded generators for property sweeps. Every instance draws from its own
// stream derived from (seed, index), so sweeps give the same answer serially
// or in parallel.

#include <cstdint>
#include <random>

#include "thermobit/information.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/thermo.hpp"

namespace thermobit::random {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent stream for instance `index` of sweep `stream` under `seed`.
Engine instance_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

std::size_t uniform_size(Engine& rng, std::size_t lo, std::size_t hi);
double uniform_real(Engine& rng, double lo, double hi);

/// Exponential weights; with `allow_zeros` some entries are exactly 0.
Distribution distribution(Engine& rng, std::size_t n, bool allow_zeros = false);

/// n states, E uniform in [-energy_span, energy_span] * k_B, T in [t_lo, t_hi].
EnergyLandscape landscape(Engine& rng, std::size_t n, double energy_span, double t_lo, double t_hi,
                          double boltzmann);

enum class ChannelKind { dense, sparse_cycle, drifting_rotation, permutation_mixture };

/// Random row-stochastic matrix of the given family. All families have a
/// stationary distribution; the non-dense families generally break detailed balance.
Channel channel(Engine& rng, std::size_t n, ChannelKind kind);
Channel channel(Engine& rng, std::size_t n);

JointDistribution joint(Engine& rng, std::size_t rows, std::size_t cols);

}  // namespace thermobit::random
