#pragma once

// Line-oriented document format for systems, distributions, channels and protocols.
//
//   # comment
//   system bit
//     states s0 s1
//     temperature 300
//     boltzmann 1.380649e-23      # optional, default 1
//     energy s1 4.1e-21           # optional per state, default 0
//
//   dist p0
//     over bit
//     probs 1 0
//
//   channel mix
//     over bit
//     from s0: s0 0.75 s1 0.25
//     from s1: s0 0.25 s1 0.75
//
//   protocol demo
//     start p0
//     apply mix
//     evolve 20            # channel defaults to the last one applied
//     audit 50 mix
//     check-correspondence
//     bitop erase
//     report json
//
// Headers start in column 1; every line of a block body is indented.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermobit/information.hpp"
#include "thermobit/markov.hpp"
#include "thermobit/thermo.hpp"

namespace thermobit::dsl {

struct SystemDecl {
    std::string name;
    std::vector<std::string> states;
    std::vector<double> energies;  // one per state
    double temperature = 1.0;
    double boltzmann = 1.0;

    EnergyLandscape landscape() const;
    std::optional<std::size_t> state_index(std::string_view label) const;

    friend bool operator==(const SystemDecl&, const SystemDecl&) = default;
};

struct DistDecl {
    std::string name;
    std::string system;
    std::vector<double> probs;  // as written

    friend bool operator==(const DistDecl&, const DistDecl&) = default;
};

struct ChannelDecl {
    std::string name;
    std::string system;
    std::vector<double> matrix;  // dense row-major, as written; unlisted targets are 0

    friend bool operator==(const ChannelDecl&, const ChannelDecl&) = default;
};

enum class DirectiveKind { start, apply, evolve, check_correspondence, audit, bitop, report };

std::string_view keyword(DirectiveKind kind);

/// Bit operations a protocol may run, applied leniently to the current state.
inline constexpr std::string_view kSingleBitOps[] = {"erase", "not", "switch-0-1", "switch-1-0", "randomize"};
inline constexpr std::string_view kPairBitOps[] = {"copy-szilard", "copy-landauer", "randomize-first",
                                                    "randomize-second"};
inline constexpr std::string_view kReportFormats[] = {"table", "json", "csv"};

struct Directive {
    DirectiveKind kind = DirectiveKind::start;
    std::string target;     // dist, channel, bit-op or format name; empty when not used
    std::size_t steps = 0;  // evolve / audit

    friend bool operator==(const Directive&, const Directive&) = default;
};

struct ProtocolDecl {
    std::string name;
    std::vector<Directive> directives;

    friend bool operator==(const ProtocolDecl&, const ProtocolDecl&) = default;
};

/// A validated document: names unique per kind, every reference resolved,
/// every dimension consistent.
struct ProtocolSpec {
    std::vector<SystemDecl> systems;
    std::vector<DistDecl> distributions;
    std::vector<ChannelDecl> channels;
    std::vector<ProtocolDecl> protocols;

    bool empty() const noexcept;

    const SystemDecl* find_system(std::string_view name) const;
    const DistDecl* find_distribution(std::string_view name) const;
    const ChannelDecl* find_channel(std::string_view name) const;
    const ProtocolDecl* find_protocol(std::string_view name) const;

    /// Throws std::out_of_range for unknown names.
    Distribution distribution(std::string_view name) const;
    Channel channel(std::string_view name) const;
    EnergyLandscape landscape_of_distribution(std::string_view dist_name) const;

    friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

enum class Severity { error, warning };

struct ParseDiagnostic {
    Severity severity = Severity::error;
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based
    std::string message;
    std::string excerpt;

    /// "<origin>:<line>:<column>: error: <message>" followed by the excerpt.
    std::string render(std::string_view origin = "<input>") const;
};

struct ParseResult {
    std::optional<ProtocolSpec> document;  // absent whenever an error was reported
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const noexcept { return document.has_value(); }
    std::size_t error_count() const noexcept;
};

ParseResult parse(std::string_view source);

/// Canonical text; parse(format_document(d)) yields a document equal to d.
std::string format_document(const ProtocolSpec& doc);

}  // namespace thermobit::dsl
