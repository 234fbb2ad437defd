#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "thermobit/report.hpp"

namespace thermobit::sweep {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

struct Options {
    std::size_t instances = 10'000;
    std::size_t max_states = 64;        // identity sweep; chains use min(max_states, 32)
    std::uint64_t seed = kDefaultSeed;
    std::size_t audit_steps = 100;
    std::size_t jobs = 1;
    bool corrupt = false;               // test hook: audit each chain against a corrupted channel
};

struct Result {
    std::string name;
    std::size_t instances = 0;
    std::size_t passed = 0;
    double worst = 0.0;                 // largest residual / violation seen
    std::size_t worst_instance = 0;
    double tolerance = 0.0;
    std::string tolerance_rule;

    bool all_passed() const noexcept { return passed == instances; }
};

struct Summary {
    std::uint64_t seed = kDefaultSeed;
    std::vector<Result> results;

    bool all_passed() const noexcept;
    report::Json to_json() const;
};

/// |F(p) - F(pi) - kT D(p||pi)| <= 1e-12 max(1, |F(p)|), with F(pi) = -kT log Z likewise.
Result identity_sweep(const Options& opts);
/// D(pK || qK) <= D(p || q) + 1e-12.
Result data_processing_sweep(const Options& opts);
/// D(p_t || pi) non-increasing within 1e-12 per step.
Result monotonicity_sweep(const Options& opts);

Summary run_all(const Options& opts);

}  // namespace thermobit::sweep
