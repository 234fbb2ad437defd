#include "thermobit/random.hpp"

#include <algorithm>
#include <numeric>

namespace thermobit::random {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Engine instance_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t s = splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Engine(seq);
}

std::size_t uniform_size(Engine& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Engine& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

namespace {

std::vector<double> weights(Engine& rng, std::size_t n, bool allow_zeros) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(n);
    for (double& x : w)
        x = expo(rng) + 1e-300;
    if (allow_zeros && n > 1) {
        const std::size_t zeros = uniform_size(rng, 0, n - 1);
        for (std::size_t k = 0; k < zeros; ++k)
            w[uniform_size(rng, 0, n - 1)] = 0.0;
        if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
            w[uniform_size(rng, 0, n - 1)] = 1.0;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w)
        x /= total;
    return w;
}

std::vector<std::size_t> shuffled(Engine& rng, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

}  // namespace

Distribution distribution(Engine& rng, std::size_t n, bool allow_zeros) {
    return Distribution(weights(rng, n, allow_zeros));
}

EnergyLandscape landscape(Engine& rng, std::size_t n, double energy_span, double t_lo, double t_hi,
                          double boltzmann) {
    std::vector<double> e(n);
    for (double& x : e)
        x = uniform_real(rng, -energy_span, energy_span) * boltzmann;
    return EnergyLandscape(std::move(e), uniform_real(rng, t_lo, t_hi), boltzmann);
}

Channel channel(Engine& rng, std::size_t n, ChannelKind kind) {
    std::vector<double> m(n * n, 0.0);
    switch (kind) {
    case ChannelKind::dense:
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> row = weights(rng, n, false);
            std::copy(row.begin(), row.end(), m.begin() + static_cast<std::ptrdiff_t>(i * n));
        }
        break;
    case ChannelKind::sparse_cycle:
        // A few random targets per row plus the edge i -> i+1, which keeps the chain irreducible.
        for (std::size_t i = 0; i < n; ++i) {
            std::exponential_distribution<double> expo(1.0);
            m[i * n + (i + 1) % n] += expo(rng) + 0.1;
            const std::size_t extra = uniform_size(rng, 0, std::min<std::size_t>(n, 3));
            for (std::size_t k = 0; k < extra; ++k)
                m[i * n + uniform_size(rng, 0, n - 1)] += expo(rng);
            const double total = std::accumulate(m.begin() + static_cast<std::ptrdiff_t>(i * n),
                                                 m.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] /= total;
        }
        break;
    case ChannelKind::drifting_rotation: {
        const double eps = uniform_real(rng, 0.2, 0.6);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> row = weights(rng, n, false);
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] = eps * row[j];
            m[i * n + (i + 1) % n] += 1.0 - eps;
        }
        break;
    }
    case ChannelKind::permutation_mixture: {
        // Convex combination of permutations: doubly stochastic, uniform is stationary.
        const std::size_t count = uniform_size(rng, 2, 4);
        const std::vector<double> mix = weights(rng, count, false);
        for (std::size_t c = 0; c < count; ++c) {
            const std::vector<std::size_t> perm = shuffled(rng, n);
            for (std::size_t i = 0; i < n; ++i)
                m[i * n + perm[i]] += mix[c];
        }
        break;
    }
    }
    return Channel(n, std::move(m));
}

Channel channel(Engine& rng, std::size_t n) {
    const auto kind = static_cast<ChannelKind>(uniform_size(rng, 0, 3));
    return channel(rng, n, kind);
}

JointDistribution joint(Engine& rng, std::size_t rows, std::size_t cols) {
    return JointDistribution(rows, cols, weights(rng, rows * cols, true));
}

}  // namespace thermobit::random
