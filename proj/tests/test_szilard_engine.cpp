#include <cmath>

#include "doctest.h"
#include "thermobit/errors.hpp"
#include "thermobit/szilard_engine.hpp"
#include "thermobit/thermo.hpp"

using namespace thermobit;

namespace {
const double kLog2 = std::log(2.0);

EngineConfig natural(std::size_t steps = kDefaultEngineSteps) {
    return {.temperature = 1.0, .boltzmann = 1.0, .volume = 1.0, .steps = steps};
}
}  // namespace

TEST_SUITE("isothermal work") {
    TEST_CASE("halving the volume costs kT log 2") {
        const double w = isothermal_work(natural(1'000'000), 1.0, 0.5);
        CHECK(std::abs(w - kLog2) <= 1e-9);
    }

    TEST_CASE("no volume change, no work") {
        for (std::size_t n : {1u, 7u, 1000u})
            CHECK(isothermal_work(natural(n), 3.0, 3.0) == 0.0);
    }

    TEST_CASE("quartering is two halvings") {
        const EngineConfig cfg = natural(1'000'000);
        const double direct = isothermal_work(cfg, 1.0, 0.25);
        const double stepwise = isothermal_work(cfg, 1.0, 0.5) + isothermal_work(cfg, 0.5, 0.25);
        CHECK(direct == doctest::Approx(2 * kLog2).epsilon(1e-10));
        CHECK(std::abs(direct - stepwise) <= 1e-9);
    }

    TEST_CASE("expansion is negative and a round trip nets to zero") {
        const EngineConfig cfg = natural(10'000);
        const double in = isothermal_work(cfg, 1.0, 0.5);
        const double out = isothermal_work(cfg, 0.5, 1.0);
        CHECK(out < 0.0);
        CHECK(std::abs(in + out) <= 1e-15);
    }

    TEST_CASE("error shrinks as 1/N^2") {
        for (double ratio : {2.0, 4.0, 10.0}) {
            const std::vector<ConvergenceRow> rows = convergence_table(natural(), ratio, 4000, 4);
            REQUIRE(rows.size() == 4);
            for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
                REQUIRE(rows[i + 1].steps * 2 == rows[i].steps);
                const double ratio_err = rows[i + 1].abs_error / rows[i].abs_error;
                CHECK(ratio_err >= 3.8);
                CHECK(ratio_err <= 4.2);
            }
        }
    }

    TEST_CASE("invalid inputs") {
        CHECK_THROWS_AS(isothermal_work(natural(), 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(isothermal_work(natural(), 1.0, -1.0), DomainError);
        CHECK_THROWS_AS(isothermal_work(natural(0), 1.0, 0.5), DomainError);
        CHECK_THROWS_AS(isothermal_work({.temperature = 0.0}, 1.0, 0.5), DomainError);
        CHECK_THROWS_AS(convergence_table(natural(), 0.0, 100, 2), DomainError);
    }

    TEST_CASE("convergence CSV") {
        const std::string csv = convergence_csv(convergence_table(natural(), 1.0, 4, 2));
        CHECK(csv == "N,work,abs_error\n4,0,0\n2,0,0\n");
    }
}

TEST_SUITE("bounds") {
    TEST_CASE("erase bound") {
        CHECK(erase_work_bound(natural()) == kLog2);
        const EngineConfig si{.temperature = 300.0, .boltzmann = kBoltzmannSI};
        CHECK(erase_work_bound(si) == doctest::Approx(2.87e-21).epsilon(1e-3));
        const EngineConfig hot{.temperature = 600.0, .boltzmann = kBoltzmannSI};
        CHECK(erase_work_bound(hot) == doctest::Approx(2 * erase_work_bound(si)).epsilon(1e-15));
        CHECK(std::abs(isothermal_work(natural(1'000'000), 1.0, 0.5) - erase_work_bound(natural())) <= 1e-9);
    }

    TEST_CASE("randomize yield mirrors the erase bound") {
        CHECK(randomize_work_yield(natural()) == erase_work_bound(natural()));
        CHECK(std::abs(-isothermal_work(natural(1'000'000), 0.5, 1.0) - randomize_work_yield(natural())) <= 1e-9);
    }

    TEST_CASE("pulley on the wrong side, and no information") {
        const EngineConfig cfg = natural();
        CHECK(pulley_work_yield(cfg, 0, 0) == kLog2);
        CHECK(pulley_work_yield(cfg, 1, 1) == kLog2);
        CHECK(pulley_work_yield(cfg, 0, 1) == -kLog2);
        CHECK(blind_work_yield(cfg, 0) == 0.0);
        CHECK(blind_work_yield(cfg, 1) == 0.0);
        CHECK(0.5 * (pulley_work_yield(cfg, 0, 1) + pulley_work_yield(cfg, 1, 1)) == blind_work_yield(cfg, 1));
        CHECK_THROWS_AS(pulley_work_yield(cfg, 2, 0), DomainError);
    }
}

TEST_SUITE("demon") {
    TEST_CASE("Szilard-copy measurement: no free lunch") {
        const CycleLedger l = demon_cycle(natural(), Measurement::szilard_copy);
        REQUIRE(l.entries.size() == 2);
        CHECK(l.entries[0].work == kLog2);
        CHECK(l.entries[1].work == -kLog2);
        CHECK(l.net_work >= 0.0);
        CHECK(l.net_work == 0.0);
        CHECK(l.net_info == 0.0);
        CHECK(l.free_energy_balance() >= 0.0);
    }

    TEST_CASE("Landauer-copy measurement: paid for by randomizing Y") {
        const EngineConfig cfg{.temperature = 2.0, .boltzmann = 1.0};
        const CycleLedger l = demon_cycle(cfg, Measurement::landauer_copy);
        REQUIRE(l.entries.size() == 2);
        CHECK(l.entries[0].work == 0.0);
        CHECK(l.net_work == -2.0 * kLog2);
        CHECK(l.net_info == -kLog2);
        CHECK(l.free_energy_balance() == 0.0);
        CHECK(l.final_state == Distribution::uniform(4));
        CHECK_FALSE(l.notes.empty());
    }

    TEST_CASE("no measurement, no expected yield") {
        const CycleLedger l = demon_cycle(natural(), Measurement::none);
        CHECK(l.net_work == 0.0);
        CHECK_FALSE(std::signbit(l.net_work));
        CHECK(l.net_info == 0.0);
    }

    TEST_CASE("net fields are the sums of entries") {
        for (Measurement m : {Measurement::szilard_copy, Measurement::landauer_copy, Measurement::none}) {
            const CycleLedger l = demon_cycle({.temperature = 300.0, .boltzmann = kBoltzmannSI}, m);
            double w = 0.0, info = 0.0;
            for (const CycleEntry& e : l.entries) {
                w += e.work;
                info += e.info_delta;
            }
            CHECK(l.net_work == w);
            CHECK(l.net_info == info);
            CHECK(l.free_energy_balance() >= -1e-12 * l.thermal_energy);
        }
    }
}
