#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "thermobit/errors.hpp"
#include "thermobit/information.hpp"
#include "thermobit/thermo.hpp"

using namespace thermobit;

namespace {
const double kLog2 = std::log(2.0);

struct Instance {
    std::vector<double> energies;
    double temperature;
    double boltzmann;
    std::vector<double> p;
};

// Energies in [-10, 10] (scaled by k_B so SI landscapes are not degenerate), T in [0.1, 10].
Instance random_instance(Gen& g, std::size_t n, double boltzmann) {
    Instance x{{}, g.real(0.1, 10.0), boltzmann, g.simplex(n, g.coin(0.3))};
    for (std::size_t i = 0; i < n; ++i)
        x.energies.push_back(g.real(-10.0, 10.0) * boltzmann);
    return x;
}
}  // namespace

TEST_SUITE("landscape") {
    TEST_CASE("validation") {
        CHECK_THROWS_AS(EnergyLandscape({0.0}, 0.0), DomainError);
        CHECK_THROWS_AS(EnergyLandscape({0.0}, -1.0), DomainError);
        CHECK_THROWS_AS(EnergyLandscape({0.0}, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(EnergyLandscape({}, 1.0), DomainError);
        CHECK_THROWS_AS(EnergyLandscape({INFINITY}, 1.0), DomainError);
        CHECK_NOTHROW(EnergyLandscape({0.0, 1.0}, 300.0, kBoltzmannSI));
    }

    TEST_CASE("dimension mismatch") {
        const EnergyLandscape l({0.0, 1.0}, 1.0);
        CHECK_THROWS_AS(average_energy(l, Distribution::uniform(3)), ShapeError);
        CHECK_THROWS_AS(free_energy(l, Distribution::uniform(3)), ShapeError);
        CHECK_THROWS_AS(check_szilard_landauer(l, Distribution::uniform(3)), ShapeError);
    }
}

TEST_SUITE("partition") {
    TEST_CASE("two equal levels") { CHECK(log_partition_function(EnergyLandscape({0.0, 0.0}, 1.0)) == kLog2); }

    TEST_CASE("two-term closed form") {
        const double want = std::log(1.0 + std::exp(-1.0));
        CHECK(log_partition_function(EnergyLandscape({0.0, 1.0}, 1.0)) == doctest::Approx(want).epsilon(1e-15));
    }

    TEST_CASE("huge energies stay finite") {
        const EnergyLandscape l({1e6, 1e6 + 1}, 1.0);
        const double lz = log_partition_function(l);
        CHECK(std::isfinite(lz));
        CHECK(lz == doctest::Approx(-1e6 + std::log(1.0 + std::exp(-1.0))).epsilon(1e-15));
        const Distribution pi = gibbs_distribution(l);
        const Distribution shifted = gibbs_distribution(EnergyLandscape({0.0, 1.0}, 1.0));
        CHECK(pi.max_abs_diff(shifted) <= 1e-15);
    }

    TEST_CASE("agrees with the direct sum on moderate landscapes") {
        Gen g(21);
        for (int i = 0; i < 500; ++i) {
            const Instance x = random_instance(g, g.size(1, 64), 1.0);
            const EnergyLandscape l(x.energies, x.temperature);
            const oracle::Real want = oracle::log_z(x.energies, x.temperature);
            REQUIRE(std::abs(log_partition_function(l) - static_cast<double>(want)) <=
                    1e-13 * std::max<double>(1.0, std::abs(want)));
        }
    }
}

TEST_SUITE("gibbs") {
    TEST_CASE("equal energies give uniform") {
        for (std::size_t n : {1u, 2u, 7u, 64u}) {
            const Distribution pi = gibbs_distribution(EnergyLandscape(std::vector<double>(n, 3.5), 2.0));
            CHECK(pi.max_abs_diff(Distribution::uniform(n)) <= 1e-16);
        }
    }

    TEST_CASE("E = (0, kT log 2) gives (2/3, 1/3)") {
        const double t = 1.7;
        const Distribution pi = gibbs_distribution(EnergyLandscape({0.0, t * kLog2}, t));
        CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }

    TEST_CASE("shift by a constant leaves pi unchanged and moves F by exactly c") {
        Gen g(22);
        for (int i = 0; i < 500; ++i) {
            const Instance x = random_instance(g, g.size(1, 32), 1.0);
            const EnergyLandscape l(x.energies, x.temperature);
            const double c = g.real(-100.0, 100.0);
            const EnergyLandscape s = l.shifted(c);
            REQUIRE(gibbs_distribution(l).max_abs_diff(gibbs_distribution(s)) <= 1e-14);
            const Distribution p(x.p);
            REQUIRE(std::abs(free_energy(s, p) - free_energy(l, p) - c) <= 1e-12 * std::max(1.0, std::abs(c)));
        }
    }

    TEST_CASE("strictly positive, normalized, and matches the oracle") {
        Gen g(23);
        for (int i = 0; i < 500; ++i) {
            const Instance x = random_instance(g, g.size(1, 64), 1.0);
            const Distribution pi = gibbs_distribution(EnergyLandscape(x.energies, x.temperature));
            const std::vector<oracle::Real> want = oracle::gibbs(x.energies, x.temperature);
            double total = 0.0;
            for (std::size_t k = 0; k < pi.size(); ++k) {
                REQUIRE(pi[k] > 0.0);
                REQUIRE(std::abs(pi[k] - static_cast<double>(want[k])) <= 1e-14);
                total += pi[k];
            }
            REQUIRE(std::abs(total - 1.0) <= 1e-12);
        }
    }

    TEST_CASE("finite and normalized at |E/kT| up to 1e6") {
        Gen g(24);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> e(g.size(2, 16));
            for (double& v : e)
                v = g.real(-1e6, 1e6);
            const Distribution pi = gibbs_distribution(EnergyLandscape(e, 1.0));
            double total = 0.0;
            for (double v : pi.probs()) {
                REQUIRE(std::isfinite(v));
                total += v;
            }
            REQUIRE(std::abs(total - 1.0) <= 1e-12);
            REQUIRE(std::isfinite(log_partition_function(EnergyLandscape(e, 1.0))));
        }
    }
}

TEST_SUITE("energy and free energy") {
    TEST_CASE("average energy") {
        const EnergyLandscape l({0.0, 2.0}, 1.0);
        CHECK(average_energy(l, Distribution({0.0, 1.0})) == 2.0);
        CHECK(average_energy(l, Distribution::uniform(2)) == 1.0);
        CHECK(average_energy(EnergyLandscape({0.0, 4.0}, 1.0), Distribution({0.75, 0.25})) == 1.0);
    }

    TEST_CASE("free energy worked values") {
        const EnergyLandscape flat({0.0, 0.0}, 1.0);
        CHECK(free_energy(flat, Distribution({1.0, 0.0})) == 0.0);
        CHECK(free_energy(flat, Distribution::uniform(2)) == doctest::Approx(-log_partition_function(flat)).epsilon(1e-15));
        CHECK(free_energy(flat, Distribution::uniform(2)) == doctest::Approx(-kLog2).epsilon(1e-15));
    }

    TEST_CASE("F(pi) = -kT log Z") {
        Gen g(25);
        for (int i = 0; i < 1000; ++i) {
            const double kb = g.coin() ? 1.0 : kBoltzmannSI;
            const Instance x = random_instance(g, g.size(1, 64), kb);
            const EnergyLandscape l(x.energies, x.temperature, kb);
            const double f = free_energy(l, gibbs_distribution(l));
            const double want = -l.thermal_energy() * log_partition_function(l);
            REQUIRE(std::abs(f - want) <= 1e-12 * std::max(1.0, std::abs(f)));
        }
    }
}

TEST_SUITE("szilard-landauer identity") {
    TEST_CASE("p = pi gives zero available energy") {
        const EnergyLandscape l({0.3, -1.2, 4.0}, 0.7);
        const ThermoReport r = check_szilard_landauer(l, gibbs_distribution(l));
        CHECK(std::abs(r.available) <= 1e-15);
        CHECK(r.kl_nats.nats() <= 1e-15);
        CHECK(r.holds());
    }

    TEST_CASE("certain bit against a fair one") {
        const EnergyLandscape l({0.0, 0.0}, 1.0);
        const ThermoReport r = check_szilard_landauer(l, Distribution({1.0, 0.0}));
        CHECK(r.available == doctest::Approx(kLog2).epsilon(1e-15));
        CHECK(r.kl_nats.nats() == kLog2);
        CHECK(available_free_energy(l, Distribution({1.0, 0.0})) == doctest::Approx(kLog2).epsilon(1e-15));
    }

    TEST_CASE("certain state against pi = (pi1, pi2) is kT log(1/pi1)") {
        Gen g(26);
        for (int i = 0; i < 100; ++i) {
            const double t = g.real(0.1, 10.0);
            const EnergyLandscape l({g.real(-5, 5), g.real(-5, 5)}, t);
            const Distribution pi = gibbs_distribution(l);
            const double got = available_free_energy(l, Distribution({1.0, 0.0}));
            REQUIRE(got == doctest::Approx(t * std::log(1.0 / pi[0])).epsilon(1e-12));
        }
    }

    TEST_CASE("report invariants on random landscapes, both unit systems") {
        Gen g(27);
        for (int i = 0; i < 2000; ++i) {
            const double kb = (i % 2 == 0) ? 1.0 : kBoltzmannSI;
            const std::size_t n = (i % 50 == 0) ? 64 : g.size(2, 64);
            const Instance x = random_instance(g, n, kb);
            const EnergyLandscape l(x.energies, x.temperature, kb);
            const Distribution p(x.p);
            const ThermoReport r = check_szilard_landauer(l, p);
            const double scale = std::max(1.0, std::abs(r.free_energy_p));
            REQUIRE(r.scale == scale);
            REQUIRE(r.residual <= 1e-12 * scale);
            REQUIRE(r.proof_step_residual <= 1e-12 * scale);
            REQUIRE(r.available >= -1e-12 * scale);
            REQUIRE(r.holds());

            // Both sides evaluated independently from the definitions.
            const oracle::Real kt = static_cast<oracle::Real>(x.temperature) * kb;
            const std::vector<oracle::Real> pi = oracle::gibbs(x.energies, kt);
            const oracle::Real f_p = oracle::free_energy(x.energies, p.probs(), kt);
            const oracle::Real f_pi = oracle::free_energy(x.energies, pi, kt);
            oracle::Real d = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (p[k] > 0)
                    d += p[k] * std::log(p[k] / pi[k]);
            REQUIRE(std::abs(static_cast<double>(f_p - f_pi - kt * d)) <= 1e-12 * scale);
            REQUIRE(std::abs(r.available - static_cast<double>(f_p - f_pi)) <= 1e-12 * scale);
        }
    }

    TEST_CASE("Gibbs minimizes free energy") {
        Gen g(28);
        for (int i = 0; i < 1000; ++i) {
            const Instance x = random_instance(g, g.size(2, 32), 1.0);
            const EnergyLandscape l(x.energies, x.temperature);
            const double f_pi = free_energy(l, gibbs_distribution(l));
            const double f_p = free_energy(l, Distribution(x.p));
            REQUIRE(f_p >= f_pi - 1e-12 * std::max(1.0, std::abs(f_p)));
        }
    }

    TEST_CASE("extreme landscapes keep the identity") {
        const EnergyLandscape l({0.0, 800.0, -800.0, 1e5}, 1.0);
        const ThermoReport r = check_szilard_landauer(l, Distribution({0.25, 0.25, 0.25, 0.25}));
        CHECK(std::isfinite(r.log_partition));
        CHECK(std::isfinite(r.kl_nats.nats()));
        CHECK(r.holds());
    }
}
