#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "json.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI through the shell. `args` is appended verbatim.
Run cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" THERMOBIT_TEST_DATA "' && " + env + " '" THERMOBIT_CLI "' " + args;
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

Json cli_json(const std::string& args, int expected_status = 0) {
    const Run r = cli(args + " --format json");
    CHECK(r.status == expected_status);
    return Json::parse(r.out);
}

const double kLog2 = std::log(2.0);

}  // namespace

TEST_SUITE("check") {
    TEST_CASE("Gibbs state has nothing available") {
        const Json j = cli_json("check bit.tbit fair");
        CHECK(j["pass"] == Json(true));
        CHECK(j["available"].get<double>() == 0.0);
        CHECK(j["kl"]["bits"].get<double>() == 0.0);
    }

    TEST_CASE("a certain bit at unit temperature holds log 2") {
        const Json j = cli_json("check bit.tbit certain");
        CHECK(j["available"].get<double>() == doctest::Approx(kLog2).epsilon(1e-15));
        CHECK(j["kl"]["bits"].get<double>() == doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("inline landscape") {
        const Json j = cli_json("check --energies 0,1 --probs 1,0 -T 1");
        CHECK(j["available"].get<double>() == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-14));
        CHECK(j["pass"] == Json(true));
    }

    TEST_CASE("table is the default format") {
        const Run r = cli("check bit.tbit fair");
        CHECK(r.status == 0);
        CHECK(r.out.find("kl.bits") != std::string::npos);
        CHECK(r.out.find("pass") != std::string::npos);
    }

    TEST_CASE("csv output has one header and one row") {
        const Run r = cli("check bit.tbit fair --format csv");
        CHECK(r.status == 0);
        std::size_t lines = 0;
        for (char c : r.out)
            lines += c == '\n';
        CHECK(lines == 2);
        CHECK(r.out.rfind("command,", 0) == 0);
    }
}

TEST_SUITE("errors") {
    TEST_CASE("malformed document is reported with line and column") {
        const Run r = cli("check broken.tbit certain 2>&1");
        CHECK(r.status == 1);
        CHECK(r.out.find("broken.tbit:7:9: error: probabilities sum to 1.1") != std::string::npos);
        CHECK(r.out.find("broken.tbit:10:8: error: unknown system 'nowhere'") != std::string::npos);
    }

    TEST_CASE("fmt on a broken file fails") {
        CHECK(cli("fmt broken.tbit 2>/dev/null").status == 1);
    }

    TEST_CASE("usage errors") {
        CHECK(cli("2>/dev/null").status == 1);
        CHECK(cli("bogus 2>/dev/null").status == 1);
        CHECK(cli("check bit.tbit nodist 2>/dev/null").status == 1);
        CHECK(cli("check bit.tbit fair --format xml 2>/dev/null").status == 1);
        CHECK(cli("bitop frobnicate 2>/dev/null").status == 1);
        CHECK(cli("szilard --ratio 0 2>/dev/null").status == 1);
        CHECK(cli("check missing.tbit fair 2>/dev/null").status == 1);
    }

    TEST_CASE("strict mode refuses a non-canonical input") {
        const Run r = cli("bitop erase --mode strict --input 0.9,0.1 2>&1");
        CHECK(r.status == 1);
        CHECK(r.out.find("STAR") != std::string::npos);
    }
}

TEST_SUITE("audit") {
    TEST_CASE("mixing chain relaxes to the uniform bit") {
        const Json j = cli_json("audit bit.tbit mix certain --steps 5");
        CHECK(j["monotone"] == Json(true));
        CHECK(j["detailed_balance"] == Json(true));
        CHECK(j["steps_checked"] == Json(5));
        CHECK(j["D_initial"]["nats"].get<double>() == doctest::Approx(kLog2));
        // D_t = D(((1 + 2^-t)/2, (1 - 2^-t)/2) || uniform)
        const double a = (1.0 + std::pow(0.5, 5)) / 2.0;
        const double expected = a * std::log(2 * a) + (1 - a) * std::log(2 * (1 - a));
        CHECK(j["D_final"]["nats"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    }

    TEST_CASE("identity chain: D stays put, with a multiplicity warning") {
        const Json j = cli_json("audit bit.tbit stay skewed --steps 10");
        CHECK(j["monotone"] == Json(true));
        CHECK(j["multiplicity_warning"] == Json(true));
        CHECK(j["D_initial"]["nats"] == j["D_final"]["nats"]);
    }

    TEST_CASE("non-stationary reference can make D rise") {
        const Run r = cli("audit bit.tbit flatten skewed --reference skewed --steps 3 --format json");
        CHECK(r.status == 2);
        const Json j = Json::parse(r.out);
        CHECK(j["monotone"] == Json(false));
        const double rise = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
        CHECK(j["max_violation"].get<double>() == doctest::Approx(rise).epsilon(1e-12));
    }

    TEST_CASE("inline matrix and csv trajectory") {
        const Run r = cli("audit --matrix '0.5,0.5;0.5,0.5' --p0 1,0 --steps 2 --csv -");
        CHECK(r.status == 0);
        CHECK(r.out.find("step,p_1,p_2,D_nats,D_bits\n0,1,0,0.6931471805599453,1\n1,0.5,0.5,0,0\n2,0.5,0.5,0,0\n") !=
              std::string::npos);
    }
}

TEST_SUITE("bitop") {
    TEST_CASE("erase a fair bit") {
        const Json j = cli_json("bitop erase");
        CHECK(j["op_name"] == Json("erase"));
        CHECK(j["input_state"]["type"] == Json("STAR"));
        CHECK(j["output_state"]["type"] == Json("ZERO"));
        CHECK(j["delta_H"]["bits"].get<double>() == -1.0);
        CHECK(j["delta_D"]["bits"].get<double>() == 1.0);
        CHECK(j["min_energy"]["energy"].get<double>() == kLog2);
        CHECK(j["direction"] == Json("COSTS_AT_LEAST"));
    }

    TEST_CASE("randomize yields log 2") {
        const Json j = cli_json("bitop randomize");
        CHECK(j["min_energy"]["energy"].get<double>() == -kLog2);
        CHECK(j["direction"] == Json("YIELDS_AT_MOST"));
    }

    TEST_CASE("copies") {
        // Szilard copy compresses a STAR Y; Landauer copy writes into an initialized Y.
        const Json sz = cli_json("bitop copy-szilard");
        CHECK(sz["delta_H"]["nats"].get<double>() == doctest::Approx(-kLog2));
        CHECK(sz["min_energy"]["energy"].get<double>() == doctest::Approx(kLog2));
        const Json la = cli_json("bitop copy-landauer");
        CHECK(la["delta_H"]["nats"].get<double>() == 0.0);
        CHECK(la["min_energy"]["energy"].get<double>() == 0.0);
    }

    TEST_CASE("SI units at 300 K") {
        const Json j = cli_json("bitop erase --units SI -T 300");
        CHECK(j["min_energy"]["energy"].get<double>() == doctest::Approx(2.87e-21).epsilon(1e-3));
    }
}

TEST_SUITE("szilard") {
    TEST_CASE("no compression, no work") {
        const Json j = cli_json("szilard --ratio 1");
        CHECK(j["exact"].get<double>() == 0.0);
        for (const Json& row : j["rows"])
            CHECK(row["work"].get<double>() == 0.0);
    }

    TEST_CASE("halving converges to kT log 2") {
        const Json j = cli_json("szilard --ratio 2 -N 1000000");
        CHECK(std::abs(j["rows"].back()["work"].get<double>() - kLog2) <= 1e-9);
    }

    TEST_CASE("demon ledgers") {
        const Json sz = cli_json("szilard --demon szilard");
        CHECK(sz["net_work"].get<double>() >= 0.0);
        const Json la = cli_json("szilard --demon landauer");
        CHECK(la["free_energy_balance"].get<double>() == 0.0);
    }
}

TEST_SUITE("documents") {
    TEST_CASE("fmt output is a fixed point") {
        const Run once = cli("fmt bit.tbit");
        REQUIRE(once.status == 0);
        const Run twice = cli("fmt /dev/stdin <<'EOF'\n" + once.out + "EOF\n");
        CHECK(twice.status == 0);
        CHECK(twice.out == once.out);
    }

    TEST_CASE("run executes a protocol") {
        const Run r = cli("run bit.tbit demo");
        CHECK(r.status == 0);
        const Json j = Json::parse(r.out);
        CHECK(j["protocol"] == Json("demo"));
        CHECK(j["violation"] == Json(false));
        CHECK(j["steps"].size() == 6);
    }
}

TEST_SUITE("sweep") {
    TEST_CASE("small sweep passes") {
        const Json j = cli_json("sweep -M 200");
        CHECK(j["all_passed"] == Json(true));
        CHECK(j["sweeps"].size() == 3);
        for (const Json& s : j["sweeps"])
            CHECK(s["passed"] == Json(200));
    }

    TEST_CASE("corrupted chains are caught") {
        CHECK(cli("sweep -M 50 --corrupt >/dev/null").status == 2);
    }

    TEST_CASE("same seed, same bytes") {
        const Run a = cli("sweep -M 100 --seed 0x1234 --format json");
        const Run b = cli("sweep -M 100 --seed 0x1234 --format json");
        CHECK(a.status == 0);
        CHECK(a.out == b.out);
        const Run c = cli("sweep -M 100 --seed 0x1235 --format json");
        CHECK(c.out != a.out);
    }

    TEST_CASE("seed from the environment") {
        const Run env = cli("sweep -M 30 --format json", "THERMOBIT_SEED=0x99");
        const Run flag = cli("sweep -M 30 --seed 0x99 --format json");
        const Run dflt = cli("sweep -M 30 --format json");
        CHECK(env.out == flag.out);
        CHECK(env.out != dflt.out);
        CHECK(Json::parse(env.out)["seed"] == Json(0x99));
    }
}
