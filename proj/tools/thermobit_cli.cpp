// thermobit: command-line front end.
//
// Exit codes: 0 pass, 1 usage or parse error, 2 property violation.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermobit/bit_ops.hpp"
#include "thermobit/dsl.hpp"
#include "thermobit/errors.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/protocol_runner.hpp"
#include "thermobit/report.hpp"
#include "thermobit/sweep.hpp"
#include "thermobit/szilard_engine.hpp"
#include "thermobit/thermo.hpp"

namespace {

using thermobit::report::Format;
using thermobit::report::Json;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

/// Bad input detected by the CLI itself; reported on stderr with exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string format;
    std::string units = "natural";
    double tolerance = thermobit::kDefaultIdentityTolerance;
};

double parse_double(std::string_view s) {
    double x = 0.0;
    const std::string_view body = !s.empty() && s[0] == '+' ? s.substr(1) : s;
    auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), x);
    if (ec != std::errc() || end != body.data() + body.size() || body.empty())
        throw UsageError("not a number: '" + std::string(s) + "'");
    return x;
}

std::vector<double> parse_list(std::string_view s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(',', start);
        if (end == std::string_view::npos)
            end = s.size();
        std::string_view item = s.substr(start, end - start);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        out.push_back(parse_double(item));
        start = end + 1;
    }
    return out;
}

bool looks_numeric(std::string_view s) {
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' || s[0] == '-' || s[0] == '+');
}

std::vector<std::vector<double>> parse_matrix(std::string_view s) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(';', start);
        if (end == std::string_view::npos)
            end = s.size();
        rows.push_back(parse_list(s.substr(start, end - start)));
        start = end + 1;
    }
    return rows;
}

std::uint64_t parse_seed(std::string_view s) {
    std::uint64_t v = 0;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        throw UsageError("invalid seed '" + std::string(s) + "'");
    return v;
}

Format output_format(const Common& c, Format fallback) {
    if (c.format.empty())
        return fallback;
    return thermobit::report::parse_format(c.format);
}

double default_boltzmann(const Common& c) {
    return c.units == "SI" ? thermobit::kBoltzmannSI : 1.0;
}

thermobit::dsl::ProtocolSpec load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const thermobit::dsl::ParseResult parsed = thermobit::dsl::parse(buf.str());
    for (const auto& d : parsed.diagnostics)
        std::cerr << d.render(path) << '\n';
    if (!parsed.ok())
        throw UsageError(path + ": " + std::to_string(parsed.error_count()) + " error(s)");
    return *parsed.document;
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
    std::string file;
    std::string dist;
    std::string energies;
    std::string probs;
    std::optional<double> temperature;
    std::optional<double> boltzmann;
};

int cmd_check(const CheckArgs& a, const Common& c) {
    const bool inline_mode = !a.energies.empty() || !a.probs.empty();
    if (inline_mode == !a.file.empty())
        throw UsageError("check needs exactly one input: FILE DIST, or --energies/--probs/--temperature");
    std::optional<thermobit::EnergyLandscape> land;
    std::optional<thermobit::Distribution> p;
    Json head;
    if (inline_mode) {
        if (a.energies.empty() || a.probs.empty() || !a.temperature)
            throw UsageError("inline check needs --energies, --probs and --temperature");
        land.emplace(parse_list(a.energies), *a.temperature, a.boltzmann.value_or(default_boltzmann(c)));
        p.emplace(parse_list(a.probs));
        head = Json{{"command", "check"}, {"input", "inline"}};
    } else {
        if (a.dist.empty())
            throw UsageError("check FILE needs a distribution name");
        const auto doc = load_document(a.file);
        if (!doc.find_distribution(a.dist))
            throw UsageError("no dist named '" + a.dist + "' in " + a.file);
        land.emplace(doc.landscape_of_distribution(a.dist));
        p.emplace(doc.distribution(a.dist));
        head = Json{{"command", "check"}, {"input", a.file}, {"dist", a.dist}};
    }
    const thermobit::ThermoReport r = thermobit::check_szilard_landauer(*land, *p);
    Json out = head;
    out.update(thermobit::report::to_json(r, land->thermal_energy(), c.tolerance));
    std::cout << thermobit::report::render(out, output_format(c, Format::table));
    return r.holds(c.tolerance) ? kExitPass : kExitViolation;
}

// ---- audit ----------------------------------------------------------------

struct AuditArgs {
    std::string file;
    std::string channel;
    std::string p0;
    std::string p0_inline;
    std::string matrix;
    std::string reference;
    std::string csv_path;
    std::size_t steps = 100;
};

int cmd_audit(const AuditArgs& a, const Common& c) {
    const bool inline_mode = !a.matrix.empty();
    if (inline_mode == !a.file.empty())
        throw UsageError("audit needs exactly one input: FILE CHANNEL P0, or --matrix with --p0");
    if (a.steps < 1)
        throw UsageError("--steps must be at least 1");
    std::optional<thermobit::Channel> k;
    std::optional<thermobit::Distribution> p0;
    std::optional<thermobit::Distribution> reference;
    Json out{{"command", "audit"}};
    if (inline_mode) {
        if (a.p0_inline.empty())
            throw UsageError("inline audit needs --p0");
        k.emplace(parse_matrix(a.matrix));
        p0.emplace(parse_list(a.p0_inline));
        if (!a.reference.empty())
            reference.emplace(parse_list(a.reference));
        out["input"] = "inline";
    } else {
        if (a.channel.empty() || a.p0.empty())
            throw UsageError("audit FILE needs a channel name and a starting dist name");
        const auto doc = load_document(a.file);
        if (!doc.find_channel(a.channel))
            throw UsageError("no channel named '" + a.channel + "' in " + a.file);
        if (!doc.find_distribution(a.p0))
            throw UsageError("no dist named '" + a.p0 + "' in " + a.file);
        k.emplace(doc.channel(a.channel));
        p0.emplace(doc.distribution(a.p0));
        if (!a.reference.empty()) {
            if (looks_numeric(a.reference))
                reference.emplace(parse_list(a.reference));
            else if (doc.find_distribution(a.reference))
                reference.emplace(doc.distribution(a.reference));
            else
                throw UsageError("no dist named '" + a.reference + "' in " + a.file);
        }
        out["input"] = a.file;
        out["channel"] = a.channel;
        out["p0"] = a.p0;
    }
    const thermobit::AuditVerdict v = thermobit::second_law_audit(*p0, *k, a.steps, reference);
    out["reference"] = reference ? "explicit" : "stationary";
    out.update(thermobit::report::to_json(v));
    std::cout << thermobit::report::render(out, output_format(c, Format::table));
    if (!a.csv_path.empty() && v.trajectory) {
        if (a.csv_path == "-") {
            std::cout << v.trajectory->to_csv();
        } else {
            std::ofstream csv(a.csv_path, std::ios::binary);
            if (!csv)
                throw UsageError("cannot write '" + a.csv_path + "'");
            csv << v.trajectory->to_csv();
        }
    }
    const bool checked = reference.has_value() || v.stationary_found;
    if (!checked)
        std::cerr << "audit: no stationary distribution: " << v.error << '\n';
    else if (!v.monotone)
        std::cerr << "audit: relative entropy increased by " << v.max_violation << " nats\n";
    return checked && v.monotone ? kExitPass : kExitViolation;
}

// ---- bitop ----------------------------------------------------------------

struct BitopArgs {
    std::string op;
    std::string mode = "strict";
    double temperature = 1.0;
    std::optional<double> boltzmann;
    std::string input;
    std::optional<double> success;
};

int cmd_bitop(const BitopArgs& a, const Common& c) {
    using namespace thermobit;
    if (a.mode != "strict" && a.mode != "lenient")
        throw UsageError("--mode must be strict or lenient");
    const BitOpSettings settings{.mode = a.mode == "strict" ? BitOpMode::strict : BitOpMode::lenient,
                                 .temperature = a.temperature,
                                 .boltzmann = a.boltzmann.value_or(default_boltzmann(c))};
    if (!(settings.temperature > 0.0) || !(settings.boltzmann > 0.0))
        throw UsageError("--temperature and --kB must be positive");

    const std::optional<std::vector<double>> input =
        a.input.empty() ? std::nullopt : std::optional(parse_list(a.input));
    auto bit = [&](BitState nominal) { return input ? BitState(Distribution(*input)) : nominal; };
    auto pair = [&](BitPairState nominal) {
        return input ? BitPairState(JointDistribution(2, 2, *input)) : nominal;
    };

    const std::string& op = a.op;
    auto run = [&]() -> OpLedger {
        if (op == "erase" && a.success)
            return erase_with_success(bit(BitState::star()), *a.success, settings).ledger;
        if (op == "erase")
            return erase(bit(BitState::star()), settings).ledger;
        if (op == "copy-szilard")
            return copy_szilard(pair(BitPairState::independent(BitState::star(), BitState::star())), settings).ledger;
        if (op == "copy-landauer")
            return copy_landauer(pair(BitPairState::independent(BitState::star(), BitState::zero())), settings).ledger;
        if (op == "not")
            return not_op(bit(BitState::star()), settings).ledger;
        if (op == "switch-0-1")
            return switch_bit(bit(BitState::zero()), 0, 1, settings).ledger;
        if (op == "switch-1-0")
            return switch_bit(bit(BitState::one()), 1, 0, settings).ledger;
        if (op == "randomize")
            return randomize(bit(BitState::zero()), settings).ledger;
        throw UsageError("unknown bit operation '" + op +
                         "'; expected erase, copy-szilard, copy-landauer, not, switch-0-1, switch-1-0 or randomize");
    };
    const OpLedger ledger = run();
    std::cout << report::render(report::to_json(ledger), output_format(c, Format::json));
    return kExitPass;
}

// ---- szilard / demon ------------------------------------------------------

struct SzilardArgs {
    double ratio = 2.0;
    std::size_t steps = thermobit::kDefaultEngineSteps;
    double temperature = 1.0;
    std::optional<double> boltzmann;
    std::size_t levels = 1;
    std::string demon;
};

int cmd_szilard(const SzilardArgs& a, const Common& c) {
    using namespace thermobit;
    EngineConfig cfg{.temperature = a.temperature,
                     .boltzmann = a.boltzmann.value_or(default_boltzmann(c)),
                     .volume = 1.0,
                     .steps = a.steps};
    cfg.validate();
    const Format fmt = output_format(c, Format::table);
    if (!a.demon.empty()) {
        Measurement m = Measurement::none;
        if (a.demon == "szilard")
            m = Measurement::szilard_copy;
        else if (a.demon == "landauer")
            m = Measurement::landauer_copy;
        else if (a.demon != "none")
            throw UsageError("--demon must be szilard, landauer or none");
        const CycleLedger ledger = demon_cycle(cfg, m);
        Json out{{"command", "demon"}, {"measurement", std::string(to_string(m))}};
        out.update(report::to_json(ledger));
        std::cout << report::render(out, fmt);
        return ledger.free_energy_balance() >= -1e-12 * std::max(1.0, cfg.thermal_energy()) ? kExitPass
                                                                                             : kExitViolation;
    }
    const std::vector<ConvergenceRow> rows = convergence_table(cfg, a.ratio, a.steps, std::max<std::size_t>(1, a.levels));
    if (fmt == Format::csv) {
        std::cout << convergence_csv(rows);
        return kExitPass;
    }
    Json table = Json::array();
    for (const ConvergenceRow& r : rows)
        table.push_back(Json{{"N", r.steps}, {"work", report::number(r.work)}, {"abs_error", report::number(r.abs_error)}});
    Json out{{"command", "szilard"},
             {"ratio", report::number(a.ratio)},
             {"kT", report::number(cfg.thermal_energy())},
             {"exact", report::number(cfg.thermal_energy() * std::log(a.ratio))},
             {"erase_bound", report::number(erase_work_bound(cfg))},
             {"randomize_yield", report::number(randomize_work_yield(cfg))},
             {"rows", table}};
    std::cout << report::render(out, fmt);
    return kExitPass;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(thermobit::sweep::Options opts, const std::string& seed_text, const Common& c) {
    if (!seed_text.empty())
        opts.seed = parse_seed(seed_text);
    else if (const char* env = std::getenv("THERMOBIT_SEED"); env && *env)
        opts.seed = parse_seed(env);
    if (opts.instances == 0)
        throw UsageError("--instances must be positive");
    if (opts.max_states < 2)
        throw UsageError("--max-states must be at least 2");
    const thermobit::sweep::Summary summary = thermobit::sweep::run_all(opts);
    const Format fmt = output_format(c, Format::table);
    if (fmt == Format::csv) {
        std::cout << "sweep,instances,passed,failed,worst,worst_instance,tolerance\n";
        for (const auto& r : summary.results)
            std::cout << r.name << ',' << r.instances << ',' << r.passed << ',' << (r.instances - r.passed) << ','
                      << thermobit::report::number(r.worst).dump() << ',' << r.worst_instance << ',' << r.tolerance
                      << '\n';
    } else {
        std::cout << thermobit::report::render(summary.to_json(), fmt);
    }
    return summary.all_passed() ? kExitPass : kExitViolation;
}

// ---- fmt / run ------------------------------------------------------------

int cmd_fmt(const std::string& file) {
    std::cout << thermobit::dsl::format_document(load_document(file));
    return kExitPass;
}

int cmd_run(const std::string& file, const std::vector<std::string>& names, const Common& c) {
    const auto doc = load_document(file);
    std::vector<std::string> selected = names;
    if (selected.empty())
        for (const auto& p : doc.protocols)
            selected.push_back(p.name);
    for (const auto& n : selected)
        if (!doc.find_protocol(n))
            throw UsageError("no protocol named '" + n + "' in " + file);
    bool violation = false;
    for (const auto& n : selected) {
        const thermobit::ProtocolRun run = thermobit::run_protocol(doc, n, c.tolerance);
        Format fmt = output_format(c, run.format.value_or(Format::table));
        if (!c.format.empty())
            fmt = thermobit::report::parse_format(c.format);
        std::cout << thermobit::report::render(run.to_json(), fmt);
        if (!run.error.empty())
            std::cerr << "run " << n << ": " << run.error << '\n';
        violation = violation || run.violation || !run.error.empty();
    }
    return violation ? kExitViolation : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermobit: information and free-energy bookkeeping over finite state spaces"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--format", common.format, "Output format: table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--units", common.units, "Default k_B for inline parameters: natural (1) or SI")
        ->check(CLI::IsMember({"natural", "SI"}));
    app.add_option("--tol", common.tolerance, "Relative tolerance for identity checks")->check(CLI::PositiveNumber);

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "Verify F(p) - F(pi) = kT D(p||pi) for one distribution");
    check_cmd->add_option("file", check.file, "Document file");
    check_cmd->add_option("dist", check.dist, "Distribution name in the document");
    check_cmd->add_option("--energies", check.energies, "Inline energies, comma separated");
    check_cmd->add_option("--probs", check.probs, "Inline probabilities, comma separated");
    check_cmd->add_option("--temperature,-T", check.temperature, "Inline temperature");
    check_cmd->add_option("--kB", check.boltzmann, "Inline Boltzmann constant");

    AuditArgs audit;
    auto* audit_cmd = app.add_subcommand("audit", "Check that D(p_t||pi) never increases along a chain");
    audit_cmd->add_option("file", audit.file, "Document file");
    audit_cmd->add_option("channel", audit.channel, "Channel name");
    audit_cmd->add_option("start", audit.p0, "Starting distribution name");
    audit_cmd->add_option("--matrix", audit.matrix, "Inline channel: rows separated by ';', entries by ','");
    audit_cmd->add_option("--p0", audit.p0_inline, "Inline starting distribution");
    audit_cmd->add_option("--steps", audit.steps, "Number of chain steps");
    audit_cmd->add_option("--reference", audit.reference, "Audit against this distribution instead of the stationary one");
    audit_cmd->add_option("--csv", audit.csv_path, "Write the trajectory as CSV ('-' for stdout)");

    BitopArgs bitop;
    auto* bitop_cmd = app.add_subcommand("bitop", "Ledger for one bit operation");
    bitop_cmd->add_option("op", bitop.op, "erase, copy-szilard, copy-landauer, not, switch-0-1, switch-1-0, randomize")
        ->required();
    bitop_cmd->add_option("--mode", bitop.mode, "strict or lenient");
    bitop_cmd->add_option("--temperature,-T", bitop.temperature, "Temperature");
    bitop_cmd->add_option("--kB", bitop.boltzmann, "Boltzmann constant");
    bitop_cmd->add_option("--input", bitop.input, "Input distribution (2 entries, or 4 for pair ops: 00,01,10,11)");
    bitop_cmd->add_option("--success", bitop.success, "Erase success probability");

    SzilardArgs szilard;
    auto* szilard_cmd = app.add_subcommand("szilard", "Isothermal compression work of the one-molecule engine");
    szilard_cmd->add_option("--ratio", szilard.ratio, "Compression ratio V_start / V_end");
    szilard_cmd->add_option("--steps,-N", szilard.steps, "Midpoint-rule steps");
    szilard_cmd->add_option("--temperature,-T", szilard.temperature, "Temperature");
    szilard_cmd->add_option("--kB", szilard.boltzmann, "Boltzmann constant");
    szilard_cmd->add_option("--levels", szilard.levels, "Rows of the convergence table, halving N each row");
    szilard_cmd->add_option("--demon", szilard.demon, "Demon cycle ledger: szilard, landauer or none");

    thermobit::sweep::Options sweep_opts;
    std::string seed_text;
    auto* sweep_cmd = app.add_subcommand("sweep", "Randomized identity, data-processing and Second-Law sweeps");
    sweep_cmd->add_option("--instances,-M", sweep_opts.instances, "Instances per sweep");
    sweep_cmd->add_option("--max-states", sweep_opts.max_states, "Largest state space");
    sweep_cmd->add_option("--seed", seed_text, "Seed (default THERMOBIT_SEED or 0xC0FFEE)");
    sweep_cmd->add_option("--steps", sweep_opts.audit_steps, "Chain steps per audit");
    sweep_cmd->add_option("--jobs,-j", sweep_opts.jobs, "Worker threads");
    sweep_cmd->add_flag("--corrupt", sweep_opts.corrupt, "Audit against a corrupted channel (must fail)")
        ->group("");

    std::string fmt_file;
    auto* fmt_cmd = app.add_subcommand("fmt", "Print a document in canonical form");
    fmt_cmd->add_option("file", fmt_file, "Document file")->required();

    std::string run_file;
    std::vector<std::string> run_names;
    auto* run_cmd = app.add_subcommand("run", "Execute protocols from a document");
    run_cmd->add_option("file", run_file, "Document file")->required();
    run_cmd->add_option("protocols", run_names, "Protocol names (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*check_cmd)
            return cmd_check(check, common);
        if (*audit_cmd)
            return cmd_audit(audit, common);
        if (*bitop_cmd)
            return cmd_bitop(bitop, common);
        if (*szilard_cmd)
            return cmd_szilard(szilard, common);
        if (*sweep_cmd)
            return cmd_sweep(sweep_opts, seed_text, common);
        if (*fmt_cmd)
            return cmd_fmt(fmt_file);
        if (*run_cmd)
            return cmd_run(run_file, run_names, common);
    } catch (const thermobit::ContractError& e) {
        std::cerr << "thermobit: contract error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "thermobit: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
