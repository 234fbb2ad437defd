#include "thermobit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "thermobit/errors.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/random.hpp"
#include "thermobit/thermo.hpp"

namespace thermobit::sweep {
namespace {

enum Stream : std::uint64_t { kIdentityStream = 1, kDpiStream = 2, kMonotoneStream = 3 };

struct Outcome {
    bool pass = false;
    double measure = 0.0;
};

// Runs `one` for every index, spread over `jobs` threads; the reduction is serial
// and in index order, so the result does not depend on `jobs`.
Result run_instances(std::string name, const Options& opts, double tolerance, std::string rule,
                     const std::function<Outcome(std::size_t)>& one) {
    std::vector<Outcome> outcomes(opts.instances);
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, opts.instances));
    if (jobs == 1) {
        for (std::size_t i = 0; i < opts.instances; ++i)
            outcomes[i] = one(i);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < opts.instances; i += jobs)
                    outcomes[i] = one(i);
            });
        for (std::thread& t : workers)
            t.join();
    }
    Result r{.name = std::move(name), .instances = opts.instances, .tolerance = tolerance,
             .tolerance_rule = std::move(rule)};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].pass)
            ++r.passed;
        if (i == 0 || outcomes[i].measure > r.worst) {
            r.worst = outcomes[i].measure;
            r.worst_instance = i;
        }
    }
    return r;
}

}  // namespace

bool Summary::all_passed() const noexcept {
    return std::all_of(results.begin(), results.end(), [](const Result& r) { return r.all_passed(); });
}

report::Json Summary::to_json() const {
    report::Json sweeps = report::Json::array();
    for (const Result& r : results)
        sweeps.push_back(report::Json{{"name", r.name},
                                      {"instances", r.instances},
                                      {"passed", r.passed},
                                      {"failed", r.instances - r.passed},
                                      {"worst", report::number(r.worst)},
                                      {"worst_instance", r.worst_instance},
                                      {"tolerance", report::number(r.tolerance)},
                                      {"tolerance_rule", r.tolerance_rule}});
    return report::Json{{"seed", seed}, {"sweeps", sweeps}, {"all_passed", all_passed()}};
}

Result identity_sweep(const Options& opts) {
    const std::size_t max_n = std::max<std::size_t>(2, opts.max_states);
    return run_instances(
        "szilard_landauer_identity", opts, kDefaultIdentityTolerance, "relative to max(1,|F(p)|)",
        [&](std::size_t i) {
            auto rng = random::instance_engine(opts.seed, kIdentityStream, i);
            const std::size_t n = random::uniform_size(rng, 2, max_n);
            const double kb = (i % 2 == 0) ? 1.0 : kBoltzmannSI;
            const EnergyLandscape land = random::landscape(rng, n, 10.0, 0.1, 10.0, kb);
            const Distribution p = random::distribution(rng, n, true);
            const ThermoReport r = check_szilard_landauer(land, p);
            const double relative = std::max(r.residual, r.proof_step_residual) / r.scale;
            return Outcome{r.holds() && r.available >= -kDefaultIdentityTolerance * r.scale, relative};
        });
}

Result data_processing_sweep(const Options& opts) {
    const std::size_t max_n = std::clamp<std::size_t>(opts.max_states, 2, 16);
    return run_instances("data_processing", opts, kMonotoneSlack, "absolute, nats", [&](std::size_t i) {
        auto rng = random::instance_engine(opts.seed, kDpiStream, i);
        const std::size_t n = random::uniform_size(rng, 2, max_n);
        const Distribution p = random::distribution(rng, n, true);
        const Distribution q = random::distribution(rng, n, false);
        const Channel k = random::channel(rng, n);
        const DataProcessing d = data_processing_check(p, q, k);
        return Outcome{d.ok, d.after.nats() - d.before.nats()};
    });
}

Result monotonicity_sweep(const Options& opts) {
    const std::size_t max_n = std::clamp<std::size_t>(opts.max_states, 2, 32);
    return run_instances("second_law_monotonicity", opts, kMonotoneSlack, "absolute per step, nats",
                         [&](std::size_t i) {
        auto rng = random::instance_engine(opts.seed, kMonotoneStream, i);
        const std::size_t n = random::uniform_size(rng, 2, max_n);
        const Channel k = random::channel(rng, n);
        const Distribution p0 = random::distribution(rng, n, true);
        try {
            if (opts.corrupt) {
                // Evolve under a channel that ignores the input and audit against the
                // original chain's stationary distribution: D must jump up from 0.
                const Distribution pi = stationary_distribution(k).distribution;
                const std::size_t worst_state = static_cast<std::size_t>(
                    std::min_element(pi.probs().begin(), pi.probs().end()) - pi.probs().begin());
                const Channel corrupted = Channel::constant(Distribution::degenerate(n, worst_state));
                const AuditVerdict v = second_law_audit(pi, corrupted, opts.audit_steps, pi);
                return Outcome{v.max_violation <= kMonotoneSlack, v.max_violation};
            }
            const AuditVerdict v = second_law_audit(p0, k, opts.audit_steps);
            if (!v.stationary_found)
                return Outcome{false, std::numeric_limits<double>::infinity()};
            return Outcome{v.max_violation <= kMonotoneSlack, v.max_violation};
        } catch (const NoStationaryError&) {
            return Outcome{false, std::numeric_limits<double>::infinity()};
        }
    });
}

Summary run_all(const Options& opts) {
    Summary s;
    s.seed = opts.seed;
    s.results.push_back(identity_sweep(opts));
    s.results.push_back(data_processing_sweep(opts));
    s.results.push_back(monotonicity_sweep(opts));
    return s;
}

}  // namespace thermobit::sweep
