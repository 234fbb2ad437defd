#include "thermobit/protocol_runner.hpp"

#include <stdexcept>

#include "thermobit/bit_ops.hpp"
#include "thermobit/errors.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/thermo.hpp"

namespace thermobit {
namespace {

std::string describe(const dsl::Directive& d) {
    std::string s(dsl::keyword(d.kind));
    if (d.kind == dsl::DirectiveKind::evolve || d.kind == dsl::DirectiveKind::audit)
        s += " " + std::to_string(d.steps);
    if (!d.target.empty())
        s += " " + d.target;
    return s;
}

struct BitStep {
    Distribution state;
    OpLedger ledger;
};

BitStep run_bitop(std::string_view op, const Distribution& p, const BitOpSettings& settings) {
    if (p.size() == 2) {
        const BitState b(p);
        BitOpResult<BitState> r = [&] {
            if (op == "erase") return erase(b, settings);
            if (op == "not") return not_op(b, settings);
            if (op == "switch-0-1") return switch_bit(b, 0, 1, settings);
            if (op == "switch-1-0") return switch_bit(b, 1, 0, settings);
            if (op == "randomize") return randomize(b, settings);
            throw std::invalid_argument("unknown single-bit operation '" + std::string(op) + "'");
        }();
        return {r.state.dist(), std::move(r.ledger)};
    }
    const BitPairState pair(JointDistribution(2, 2, std::vector<double>(p.probs().begin(), p.probs().end())));
    BitOpResult<BitPairState> r = [&] {
        if (op == "copy-szilard") return copy_szilard(pair, settings);
        if (op == "copy-landauer") return copy_landauer(pair, settings);
        if (op == "randomize-first") return randomize_pair_bit(pair, 0, settings);
        if (op == "randomize-second") return randomize_pair_bit(pair, 1, settings);
        throw std::invalid_argument("unknown bit-pair operation '" + std::string(op) + "'");
    }();
    return {r.state.joint().flattened(), std::move(r.ledger)};
}

}  // namespace

report::Json ProtocolRun::to_json() const {
    report::Json j{{"protocol", protocol}, {"steps", steps}, {"violation", violation}};
    if (!error.empty())
        j["error"] = error;
    return j;
}

ProtocolRun run_protocol(const dsl::ProtocolSpec& doc, std::string_view name, double relative_tol) {
    const dsl::ProtocolDecl* proto = doc.find_protocol(name);
    if (!proto)
        throw std::out_of_range("unknown protocol '" + std::string(name) + "'");

    ProtocolRun run;
    run.protocol = proto->name;
    std::optional<Distribution> state;
    const dsl::SystemDecl* system = nullptr;
    std::optional<Channel> last_channel;

    for (const dsl::Directive& d : proto->directives) {
        report::Json rec{{"directive", describe(d)}};
        try {
            switch (d.kind) {
            case dsl::DirectiveKind::start: {
                const dsl::DistDecl* decl = doc.find_distribution(d.target);
                system = doc.find_system(decl->system);
                state = doc.distribution(d.target);
                last_channel.reset();
                rec["state"] = report::to_json(*state);
                break;
            }
            case dsl::DirectiveKind::apply:
                last_channel = doc.channel(d.target);
                state = apply_channel(*state, *last_channel);
                rec["state"] = report::to_json(*state);
                break;
            case dsl::DirectiveKind::evolve: {
                if (!d.target.empty())
                    last_channel = doc.channel(d.target);
                const Trajectory traj = evolve(*state, *last_channel, d.steps);
                state = traj.states.back();
                rec["D_initial"] = report::to_json(traj.divergence.front());
                rec["D_final"] = report::to_json(traj.divergence.back());
                rec["state"] = report::to_json(*state);
                break;
            }
            case dsl::DirectiveKind::audit: {
                if (!d.target.empty())
                    last_channel = doc.channel(d.target);
                const AuditVerdict v = second_law_audit(*state, *last_channel, d.steps);
                rec["audit"] = report::to_json(v);
                if (!v.stationary_found || !v.monotone)
                    run.violation = true;
                break;
            }
            case dsl::DirectiveKind::check_correspondence: {
                const EnergyLandscape land = system->landscape();
                const ThermoReport r = check_szilard_landauer(land, *state);
                rec["check"] = report::to_json(r, land.thermal_energy(), relative_tol);
                if (!r.holds(relative_tol))
                    run.violation = true;
                break;
            }
            case dsl::DirectiveKind::bitop: {
                const BitOpSettings settings{.mode = BitOpMode::lenient,
                                             .temperature = system->temperature,
                                             .boltzmann = system->boltzmann};
                BitStep step = run_bitop(d.target, *state, settings);
                rec["ledger"] = report::to_json(step.ledger);
                state = Distribution(std::vector<double>(step.state.probs().begin(), step.state.probs().end()),
                                     system->states);
                break;
            }
            case dsl::DirectiveKind::report:
                run.format = report::parse_format(d.target);
                break;
            }
        } catch (const std::exception& e) {
            rec["error"] = e.what();
            run.steps.push_back(std::move(rec));
            run.error = describe(d) + ": " + e.what();
            return run;
        }
        run.steps.push_back(std::move(rec));
    }
    return run;
}

}  // namespace thermobit
