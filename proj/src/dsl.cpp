#include "thermobit/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit::dsl {
namespace {

struct Loc {
    std::size_t line = 1;
    std::size_t column = 1;
};

struct Token {
    std::string_view text;
    std::size_t column;
};

struct SourceLine {
    std::size_t number;
    std::string_view text;  // comment and trailing CR removed
    bool indented;
    std::vector<Token> tokens;
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_name(std::string_view s) {
    if (s.empty() || !(is_alpha(s[0]) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '.' || c == '-'; });
}

bool is_label(std::string_view s) {
    if (s.empty() || !(is_alpha(s[0]) || is_digit(s[0]) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '.' || c == '-'; });
}

// Decimal with optional sign, fraction and exponent. Returns an error message on failure.
std::optional<std::string> parse_number(std::string_view s, double& out) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-'))
        ++i;
    std::size_t digits = 0;
    while (i < s.size() && is_digit(s[i]))
        ++i, ++digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i]))
            ++i, ++digits;
    }
    if (digits == 0)
        return "expected a number, got '" + std::string(s) + "'";
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-'))
            ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && is_digit(s[i]))
            ++i, ++exp_digits;
        if (exp_digits == 0)
            return "malformed exponent in '" + std::string(s) + "'";
    }
    if (i != s.size())
        return "expected a number, got '" + std::string(s) + "'";
    std::string_view body = s[0] == '+' ? s.substr(1) : s;
    auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
    if (ec == std::errc::result_out_of_range)
        return "number out of range: '" + std::string(s) + "'";
    if (ec != std::errc() || end != body.data() + body.size())
        return "expected a number, got '" + std::string(s) + "'";
    return std::nullopt;
}

std::optional<std::string> parse_count(std::string_view s, std::size_t& out) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), is_digit))
        return "expected a non-negative integer, got '" + std::string(s) + "'";
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || end != s.data() + s.size())
        return "integer out of range: '" + std::string(s) + "'";
    return std::nullopt;
}

std::vector<SourceLine> split_lines(std::string_view source) {
    std::vector<SourceLine> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos)
            end = source.size();
        ++number;
        std::string_view text = source.substr(start, end - start);
        if (const std::size_t hash = text.find('#'); hash != std::string_view::npos)
            text = text.substr(0, hash);
        while (!text.empty() && is_space(text.back()))
            text.remove_suffix(1);

        SourceLine line{number, text, !text.empty() && is_space(text.front()), {}};
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && is_space(text[i]))
                ++i;
            if (i >= text.size())
                break;
            const std::size_t begin = i;
            while (i < text.size() && !is_space(text[i]))
                ++i;
            line.tokens.push_back({text.substr(begin, i - begin), begin + 1});
        }
        lines.push_back(std::move(line));
        if (end == source.size())
            break;
        start = end + 1;
    }
    return lines;
}

// Raw, located block contents gathered before cross-block validation.
struct Named {
    std::string name;
    Loc loc;
};

struct RawSystem {
    Named header;
    std::optional<std::vector<Named>> states;
    std::optional<std::pair<double, Loc>> temperature;
    std::optional<std::pair<double, Loc>> boltzmann;
    struct Energy {
        Named label;
        double value;
    };
    std::vector<Energy> energies;
};

struct RawDist {
    Named header;
    std::optional<Named> over;
    std::optional<std::pair<std::vector<double>, Loc>> probs;
};

struct RawChannel {
    Named header;
    std::optional<Named> over;
    struct Target {
        Named label;
        double value;
    };
    struct Row {
        Named from;
        std::vector<Target> targets;
    };
    std::vector<Row> rows;
};

struct RawProtocol {
    Named header;
    struct Step {
        Directive directive;
        Loc keyword;
        Loc target;
        Loc steps;
    };
    std::vector<Step> steps;
};

enum class BlockKind { none, system, dist, channel, protocol };

class Parser {
public:
    explicit Parser(std::string_view source) : lines_(split_lines(source)) {}

    ParseResult run() {
        for (const SourceLine& line : lines_) {
            if (line.tokens.empty())
                continue;
            if (!line.indented)
                open_block(line);
            else if (skipping_)
                continue;
            else if (current_ == BlockKind::none)
                fail(line.number, line.tokens.front().column, "indented line outside any block");
            else
                body_line(line);
        }
        validate();
        ParseResult result;
        const bool has_error = std::any_of(diags_.begin(), diags_.end(),
                                           [](const ParseDiagnostic& d) { return d.severity == Severity::error; });
        if (!has_error)
            result.document = std::move(doc_);
        std::stable_sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
            return std::tie(a.line, a.column) < std::tie(b.line, b.column);
        });
        result.diagnostics = std::move(diags_);
        return result;
    }

private:
    void report(Severity severity, std::size_t line, std::size_t column, std::string message) {
        std::string excerpt;
        if (line >= 1 && line <= lines_.size()) {
            std::string_view t = lines_[line - 1].text;
            while (!t.empty() && is_space(t.front()))
                t.remove_prefix(1);
            excerpt = std::string(t.substr(0, 120));
        }
        diags_.push_back({severity, line, column, std::move(message), std::move(excerpt)});
    }

    void error(std::size_t line, std::size_t column, std::string message) {
        report(Severity::error, line, column, std::move(message));
    }

    void error(const Loc& loc, std::string message) {
        error(loc.line, loc.column, std::move(message));
    }

    // Syntax error inside a block: drop the block and skip to the next header.
    void fail(std::size_t line, std::size_t column, std::string message) {
        error(line, column, std::move(message));
        discard_current();
        skipping_ = true;
    }

    void discard_current() {
        switch (current_) {
        case BlockKind::system:
            failed_systems_.insert(systems_.back().header.name);
            systems_.pop_back();
            break;
        case BlockKind::dist:
            failed_dists_.insert(dists_.back().header.name);
            dists_.pop_back();
            break;
        case BlockKind::channel:
            failed_channels_.insert(channels_.back().header.name);
            channels_.pop_back();
            break;
        case BlockKind::protocol:
            protocols_.pop_back();
            break;
        case BlockKind::none:
            break;
        }
        current_ = BlockKind::none;
    }

    void open_block(const SourceLine& line) {
        current_ = BlockKind::none;
        skipping_ = false;
        const Token& kw = line.tokens[0];
        BlockKind kind = BlockKind::none;
        if (kw.text == "system")
            kind = BlockKind::system;
        else if (kw.text == "dist")
            kind = BlockKind::dist;
        else if (kw.text == "channel")
            kind = BlockKind::channel;
        else if (kw.text == "protocol")
            kind = BlockKind::protocol;
        if (kind == BlockKind::none) {
            fail(line.number, kw.column,
                 "unknown block keyword '" + std::string(kw.text) + "'; expected system, dist, channel or protocol");
            return;
        }
        if (line.tokens.size() < 2) {
            fail(line.number, kw.column + kw.text.size(), "'" + std::string(kw.text) + "' needs a name");
            return;
        }
        const Token& name = line.tokens[1];
        if (!is_name(name.text)) {
            fail(line.number, name.column, "invalid name '" + std::string(name.text) + "'");
            return;
        }
        if (line.tokens.size() > 2) {
            fail(line.number, line.tokens[2].column, "unexpected text after block name");
            return;
        }
        const Named header{std::string(name.text), {line.number, name.column}};
        switch (kind) {
        case BlockKind::system: systems_.emplace_back().header = header; break;
        case BlockKind::dist: dists_.emplace_back().header = header; break;
        case BlockKind::channel: channels_.emplace_back().header = header; break;
        case BlockKind::protocol: protocols_.emplace_back().header = header; break;
        case BlockKind::none: break;
        }
        current_ = kind;
    }

    void body_line(const SourceLine& line) {
        switch (current_) {
        case BlockKind::system: system_line(line); break;
        case BlockKind::dist: dist_line(line); break;
        case BlockKind::channel: channel_line(line); break;
        case BlockKind::protocol: protocol_line(line); break;
        case BlockKind::none: break;
        }
    }

    bool expect_args(const SourceLine& line, std::size_t min, std::size_t max) {
        const std::size_t args = line.tokens.size() - 1;
        const Token& key = line.tokens[0];
        if (args < min) {
            fail(line.number, key.column + key.text.size(),
                 "'" + std::string(key.text) + "' expects " + (min == 1 ? "an argument" : "more arguments"));
            return false;
        }
        if (args > max) {
            fail(line.number, line.tokens[max + 1].column,
                 "unexpected extra argument to '" + std::string(key.text) + "'");
            return false;
        }
        return true;
    }

    bool number_at(const SourceLine& line, std::size_t index, double& out) {
        const Token& t = line.tokens[index];
        if (auto err = parse_number(t.text, out)) {
            fail(line.number, t.column, *err);
            return false;
        }
        return true;
    }

    bool name_at(const SourceLine& line, std::size_t index, Named& out, bool label) {
        const Token& t = line.tokens[index];
        if (!(label ? is_label(t.text) : is_name(t.text))) {
            fail(line.number, t.column, std::string("invalid ") + (label ? "state label" : "name") + " '" +
                                            std::string(t.text) + "'");
            return false;
        }
        out = {std::string(t.text), {line.number, t.column}};
        return true;
    }

    void duplicate_key(const SourceLine& line) {
        fail(line.number, line.tokens[0].column, "duplicate '" + std::string(line.tokens[0].text) + "' line");
    }

    void unknown_key(const SourceLine& line, std::string_view block, std::string_view allowed) {
        fail(line.number, line.tokens[0].column,
             "unknown key '" + std::string(line.tokens[0].text) + "' in " + std::string(block) + " block; expected " +
                 std::string(allowed));
    }

    void system_line(const SourceLine& line) {
        RawSystem& sys = systems_.back();
        const std::string_view key = line.tokens[0].text;
        if (key == "states") {
            if (sys.states)
                return duplicate_key(line);
            if (!expect_args(line, 1, SIZE_MAX))
                return;
            std::vector<Named> states;
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                Named label;
                if (!name_at(line, i, label, true))
                    return;
                states.push_back(std::move(label));
            }
            sys.states = std::move(states);
        } else if (key == "temperature" || key == "boltzmann") {
            auto& slot = key == "temperature" ? sys.temperature : sys.boltzmann;
            if (slot)
                return duplicate_key(line);
            double value = 0.0;
            if (!expect_args(line, 1, 1) || !number_at(line, 1, value))
                return;
            slot = std::make_pair(value, Loc{line.number, line.tokens[1].column});
        } else if (key == "energy") {
            Named label;
            double value = 0.0;
            if (!expect_args(line, 2, 2) || !name_at(line, 1, label, true) || !number_at(line, 2, value))
                return;
            sys.energies.push_back({std::move(label), value});
        } else {
            unknown_key(line, "system", "states, temperature, boltzmann or energy");
        }
    }

    bool over_line(const SourceLine& line, std::optional<Named>& over) {
        if (over) {
            duplicate_key(line);
            return false;
        }
        Named target;
        if (!expect_args(line, 1, 1) || !name_at(line, 1, target, false))
            return false;
        over = std::move(target);
        return true;
    }

    void dist_line(const SourceLine& line) {
        RawDist& dist = dists_.back();
        const std::string_view key = line.tokens[0].text;
        if (key == "over") {
            over_line(line, dist.over);
        } else if (key == "probs") {
            if (dist.probs)
                return duplicate_key(line);
            if (!expect_args(line, 1, SIZE_MAX))
                return;
            std::vector<double> probs;
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                double x = 0.0;
                if (!number_at(line, i, x))
                    return;
                probs.push_back(x);
            }
            dist.probs = std::make_pair(std::move(probs), Loc{line.number, line.tokens[1].column});
        } else {
            unknown_key(line, "dist", "over or probs");
        }
    }

    void channel_line(const SourceLine& line) {
        RawChannel& ch = channels_.back();
        const std::string_view key = line.tokens[0].text;
        if (key == "over") {
            over_line(line, ch.over);
            return;
        }
        if (key != "from")
            return unknown_key(line, "channel", "over or from");
        if (!expect_args(line, 1, SIZE_MAX))
            return;
        // "from a: b x c y" or "from a : b x c y"
        const Token& src = line.tokens[1];
        std::string_view label = src.text;
        std::size_t next = 2;
        if (!label.empty() && label.back() == ':') {
            label.remove_suffix(1);
        } else if (line.tokens.size() > 2 && line.tokens[2].text == ":") {
            next = 3;
        } else {
            return fail(line.number, src.column + src.text.size(), "expected ':' after source state");
        }
        if (!is_label(label))
            return fail(line.number, src.column, "invalid state label '" + std::string(label) + "'");
        RawChannel::Row row{{std::string(label), {line.number, src.column}}, {}};
        if (next >= line.tokens.size())
            return fail(line.number, src.column, "row lists no targets");
        for (std::size_t i = next; i < line.tokens.size(); i += 2) {
            Named target;
            if (!name_at(line, i, target, true))
                return;
            if (i + 1 >= line.tokens.size())
                return fail(line.number, line.tokens[i].column + line.tokens[i].text.size(),
                            "expected a probability after target '" + target.name + "'");
            double value = 0.0;
            if (!number_at(line, i + 1, value))
                return;
            row.targets.push_back({std::move(target), value});
        }
        ch.rows.push_back(std::move(row));
    }

    void protocol_line(const SourceLine& line) {
        RawProtocol& proto = protocols_.back();
        const Token& kw = line.tokens[0];
        RawProtocol::Step step;
        step.keyword = {line.number, kw.column};
        auto target_at = [&](std::size_t index, bool name) {
            const Token& t = line.tokens[index];
            if (name && !is_name(t.text)) {
                fail(line.number, t.column, "invalid name '" + std::string(t.text) + "'");
                return false;
            }
            step.directive.target = std::string(t.text);
            step.target = {line.number, t.column};
            return true;
        };
        auto steps_at = [&](std::size_t index) {
            const Token& t = line.tokens[index];
            if (auto err = parse_count(t.text, step.directive.steps)) {
                fail(line.number, t.column, *err);
                return false;
            }
            step.steps = {line.number, t.column};
            return true;
        };

        const std::string_view k = kw.text;
        if (k == "start" || k == "apply") {
            step.directive.kind = k == "start" ? DirectiveKind::start : DirectiveKind::apply;
            if (!expect_args(line, 1, 1) || !target_at(1, true))
                return;
        } else if (k == "evolve" || k == "audit") {
            step.directive.kind = k == "evolve" ? DirectiveKind::evolve : DirectiveKind::audit;
            if (!expect_args(line, 1, 2) || !steps_at(1))
                return;
            if (line.tokens.size() == 3 && !target_at(2, true))
                return;
        } else if (k == "check-correspondence") {
            step.directive.kind = DirectiveKind::check_correspondence;
            if (!expect_args(line, 0, 0))
                return;
        } else if (k == "bitop" || k == "report") {
            step.directive.kind = k == "bitop" ? DirectiveKind::bitop : DirectiveKind::report;
            if (!expect_args(line, 1, 1) || !target_at(1, false))
                return;
        } else {
            return fail(line.number, kw.column,
                        "unknown directive '" + std::string(k) +
                            "'; expected start, apply, evolve, check-correspondence, audit, bitop or report");
        }
        proto.steps.push_back(std::move(step));
    }

    // Cross-block checks. Blocks that fail here are left out of the document;
    // references to blocks that already failed are not reported again.
    void validate() {
        std::set<std::string> seen;
        for (RawSystem& raw : systems_)
            if (unique(seen, raw.header, "system"))
                validate_system(raw);
        seen.clear();
        for (RawDist& raw : dists_)
            if (unique(seen, raw.header, "dist"))
                validate_dist(raw);
        seen.clear();
        for (RawChannel& raw : channels_)
            if (unique(seen, raw.header, "channel"))
                validate_channel(raw);
        seen.clear();
        for (RawProtocol& raw : protocols_)
            if (unique(seen, raw.header, "protocol"))
                validate_protocol(raw);
    }

    bool unique(std::set<std::string>& seen, const Named& header, std::string_view kind) {
        if (seen.insert(header.name).second)
            return true;
        error(header.loc, "duplicate " + std::string(kind) + " name '" + header.name + "'");
        return false;
    }

    Loc header_loc(const Named& header) const {
        return {header.loc.line, 1};
    }

    void validate_system(const RawSystem& raw) {
        bool ok = true;
        auto bad = [&](const Loc& loc, std::string msg) {
            error(loc, std::move(msg));
            ok = false;
        };
        if (!raw.states)
            bad(header_loc(raw.header), "system '" + raw.header.name + "' is missing a 'states' line");
        if (!raw.temperature)
            bad(header_loc(raw.header), "system '" + raw.header.name + "' is missing a 'temperature' line");
        SystemDecl decl;
        decl.name = raw.header.name;
        if (raw.temperature) {
            decl.temperature = raw.temperature->first;
            if (!(decl.temperature > 0.0))
                bad(raw.temperature->second, "temperature must be positive, got " + brief_repr(decl.temperature));
        }
        if (raw.boltzmann) {
            decl.boltzmann = raw.boltzmann->first;
            if (!(decl.boltzmann > 0.0))
                bad(raw.boltzmann->second, "boltzmann must be positive, got " + brief_repr(decl.boltzmann));
        }
        if (ok && !std::isfinite(decl.temperature * decl.boltzmann))
            bad(raw.temperature->second, "k_B * T overflows");
        if (ok && decl.temperature * decl.boltzmann == 0.0)
            bad(raw.temperature->second, "k_B * T underflows to zero");
        if (raw.states) {
            std::set<std::string> labels;
            for (const Named& s : *raw.states) {
                if (!labels.insert(s.name).second)
                    bad(s.loc, "duplicate state label '" + s.name + "'");
                decl.states.push_back(s.name);
            }
            decl.energies.assign(decl.states.size(), 0.0);
            std::set<std::string> assigned;
            for (const RawSystem::Energy& e : raw.energies) {
                const auto idx = decl.state_index(e.label.name);
                if (!idx)
                    bad(e.label.loc, "energy given for unknown state '" + e.label.name + "'");
                else if (!assigned.insert(e.label.name).second)
                    bad(e.label.loc, "energy for state '" + e.label.name + "' given twice");
                else
                    decl.energies[*idx] = e.value;
            }
        }
        if (ok)
            doc_.systems.push_back(std::move(decl));
        else
            failed_systems_.insert(raw.header.name);
    }

    // Looks up a system reference; reports unresolved names unless the target already failed.
    const SystemDecl* resolve_system(const std::optional<Named>& over, const Named& header, std::string_view kind) {
        if (!over) {
            error(header_loc(header), std::string(kind) + " '" + header.name + "' is missing an 'over' line");
            return nullptr;
        }
        if (const SystemDecl* sys = doc_.find_system(over->name))
            return sys;
        if (!failed_systems_.contains(over->name))
            error(over->loc, "unknown system '" + over->name + "'");
        return nullptr;
    }

    void validate_dist(const RawDist& raw) {
        const SystemDecl* sys = resolve_system(raw.over, raw.header, "dist");
        if (!raw.probs)
            error(header_loc(raw.header), "dist '" + raw.header.name + "' is missing a 'probs' line");
        if (!sys || !raw.probs) {
            failed_dists_.insert(raw.header.name);
            return;
        }
        const auto& [probs, loc] = *raw.probs;
        if (probs.size() != sys->states.size()) {
            error(loc, "dist '" + raw.header.name + "' lists " + std::to_string(probs.size()) +
                           " probabilities but system '" + sys->name + "' has " +
                           std::to_string(sys->states.size()) + " states");
            failed_dists_.insert(raw.header.name);
            return;
        }
        try {
            (void)Distribution(probs);
        } catch (const DomainError& e) {
            error(loc, e.what());
            failed_dists_.insert(raw.header.name);
            return;
        }
        doc_.distributions.push_back({raw.header.name, sys->name, probs});
    }

    void validate_channel(const RawChannel& raw) {
        const SystemDecl* sys = resolve_system(raw.over, raw.header, "channel");
        if (!sys) {
            failed_channels_.insert(raw.header.name);
            return;
        }
        const std::size_t n = sys->states.size();
        std::vector<double> matrix(n * n, 0.0);
        std::vector<bool> has_row(n, false);
        bool ok = true;
        auto bad = [&](const Loc& loc, std::string msg) {
            error(loc, std::move(msg));
            ok = false;
        };
        for (const RawChannel::Row& row : raw.rows) {
            const auto from = sys->state_index(row.from.name);
            if (!from) {
                bad(row.from.loc, "unknown state '" + row.from.name + "' in system '" + sys->name + "'");
                continue;
            }
            if (has_row[*from]) {
                bad(row.from.loc, "second row for state '" + row.from.name + "'");
                continue;
            }
            has_row[*from] = true;
            std::vector<bool> listed(n, false);
            bool row_ok = true;
            for (const RawChannel::Target& t : row.targets) {
                const auto to = sys->state_index(t.label.name);
                if (!to) {
                    bad(t.label.loc, "unknown state '" + t.label.name + "' in system '" + sys->name + "'");
                    row_ok = false;
                } else if (listed[*to]) {
                    bad(t.label.loc, "target '" + t.label.name + "' listed twice");
                    row_ok = false;
                } else {
                    listed[*to] = true;
                    matrix[*from * n + *to] = t.value;
                }
            }
            if (!row_ok)
                continue;
            try {
                (void)Distribution(std::vector<double>(matrix.begin() + static_cast<std::ptrdiff_t>(*from * n),
                                                       matrix.begin() + static_cast<std::ptrdiff_t>((*from + 1) * n)));
            } catch (const DomainError& e) {
                bad(row.from.loc, "row '" + row.from.name + "': " + e.what());
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!has_row[i])
                bad(header_loc(raw.header), "channel '" + raw.header.name + "' has no row for state '" +
                                                sys->states[i] + "'");
        if (ok)
            doc_.channels.push_back({raw.header.name, sys->name, std::move(matrix)});
        else
            failed_channels_.insert(raw.header.name);
    }

    void validate_protocol(const RawProtocol& raw) {
        bool ok = true;
        auto bad = [&](const Loc& loc, std::string msg) {
            error(loc, std::move(msg));
            ok = false;
        };
        const SystemDecl* system = nullptr;
        bool state_known = false;  // false after an unresolvable start: skip dependent checks
        std::string last_channel;

        auto check_channel = [&](const std::string& name, const Loc& loc) {
            const ChannelDecl* ch = doc_.find_channel(name);
            if (!ch) {
                if (!failed_channels_.contains(name))
                    bad(loc, "unknown channel '" + name + "'");
                else
                    ok = false;
                return false;
            }
            if (system && ch->system != system->name) {
                bad(loc, "channel '" + name + "' is over system '" + ch->system + "' but the protocol state is over '" +
                             system->name + "'");
                return false;
            }
            return true;
        };

        if (raw.steps.empty())
            report(Severity::warning, raw.header.loc.line, raw.header.loc.column,
                   "protocol '" + raw.header.name + "' has no directives");

        for (std::size_t idx = 0; idx < raw.steps.size(); ++idx) {
            const RawProtocol::Step& step = raw.steps[idx];
            const Directive& d = step.directive;
            if (idx == 0 && d.kind != DirectiveKind::start) {
                bad(step.keyword, "a protocol must begin with 'start <dist>'");
                break;
            }
            switch (d.kind) {
            case DirectiveKind::start: {
                const DistDecl* dist = doc_.find_distribution(d.target);
                if (!dist) {
                    if (!failed_dists_.contains(d.target))
                        bad(step.target, "unknown dist '" + d.target + "'");
                    else
                        ok = false;
                    state_known = false;
                    system = nullptr;
                } else {
                    system = doc_.find_system(dist->system);
                    state_known = true;
                }
                last_channel.clear();
                break;
            }
            case DirectiveKind::apply:
                if (state_known && check_channel(d.target, step.target))
                    last_channel = d.target;
                break;
            case DirectiveKind::evolve:
            case DirectiveKind::audit: {
                if (d.kind == DirectiveKind::audit && d.steps < 1)
                    bad(step.steps, "audit needs at least 1 step");
                if (!state_known)
                    break;
                if (!d.target.empty()) {
                    if (check_channel(d.target, step.target))
                        last_channel = d.target;
                } else if (last_channel.empty()) {
                    bad(step.keyword, "'" + std::string(keyword(d.kind)) +
                                          "' needs a channel: name one or 'apply' one first");
                }
                break;
            }
            case DirectiveKind::check_correspondence:
                break;
            case DirectiveKind::bitop: {
                const bool single = std::find(std::begin(kSingleBitOps), std::end(kSingleBitOps), d.target) !=
                                    std::end(kSingleBitOps);
                const bool pair = std::find(std::begin(kPairBitOps), std::end(kPairBitOps), d.target) !=
                                  std::end(kPairBitOps);
                if (!single && !pair) {
                    bad(step.target, "unknown bit operation '" + d.target + "'");
                    break;
                }
                const std::size_t need = single ? 2 : 4;
                if (state_known && system && system->states.size() != need)
                    bad(step.target, "bit operation '" + d.target + "' needs a " + std::to_string(need) +
                                         "-state system, '" + system->name + "' has " +
                                         std::to_string(system->states.size()));
                break;
            }
            case DirectiveKind::report:
                if (std::find(std::begin(kReportFormats), std::end(kReportFormats), d.target) ==
                    std::end(kReportFormats))
                    bad(step.target, "unknown report format '" + d.target + "'; expected table, json or csv");
                break;
            }
        }
        if (!ok)
            return;
        ProtocolDecl decl{raw.header.name, {}};
        for (const RawProtocol::Step& step : raw.steps)
            decl.directives.push_back(step.directive);
        doc_.protocols.push_back(std::move(decl));
    }

    std::vector<SourceLine> lines_;
    std::vector<ParseDiagnostic> diags_;
    BlockKind current_ = BlockKind::none;
    bool skipping_ = false;

    std::vector<RawSystem> systems_;
    std::vector<RawDist> dists_;
    std::vector<RawChannel> channels_;
    std::vector<RawProtocol> protocols_;
    std::set<std::string> failed_systems_;
    std::set<std::string> failed_dists_;
    std::set<std::string> failed_channels_;

    ProtocolSpec doc_;
};

template <class T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
    for (const T& item : items)
        if (item.name == name)
            return &item;
    return nullptr;
}

}  // namespace

EnergyLandscape SystemDecl::landscape() const {
    return EnergyLandscape(energies, temperature, boltzmann);
}

std::optional<std::size_t> SystemDecl::state_index(std::string_view label) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == label)
            return i;
    return std::nullopt;
}

std::string_view keyword(DirectiveKind kind) {
    switch (kind) {
    case DirectiveKind::start: return "start";
    case DirectiveKind::apply: return "apply";
    case DirectiveKind::evolve: return "evolve";
    case DirectiveKind::check_correspondence: return "check-correspondence";
    case DirectiveKind::audit: return "audit";
    case DirectiveKind::bitop: return "bitop";
    case DirectiveKind::report: return "report";
    }
    return "?";
}

bool ProtocolSpec::empty() const noexcept {
    return systems.empty() && distributions.empty() && channels.empty() && protocols.empty();
}

const SystemDecl* ProtocolSpec::find_system(std::string_view name) const {
    return find_named(systems, name);
}

const DistDecl* ProtocolSpec::find_distribution(std::string_view name) const {
    return find_named(distributions, name);
}

const ChannelDecl* ProtocolSpec::find_channel(std::string_view name) const {
    return find_named(channels, name);
}

const ProtocolDecl* ProtocolSpec::find_protocol(std::string_view name) const {
    return find_named(protocols, name);
}

Distribution ProtocolSpec::distribution(std::string_view name) const {
    const DistDecl* d = find_distribution(name);
    if (!d)
        throw std::out_of_range("unknown dist '" + std::string(name) + "'");
    return Distribution(d->probs, find_system(d->system)->states);
}

Channel ProtocolSpec::channel(std::string_view name) const {
    const ChannelDecl* c = find_channel(name);
    if (!c)
        throw std::out_of_range("unknown channel '" + std::string(name) + "'");
    const SystemDecl* sys = find_system(c->system);
    return Channel(sys->states.size(), c->matrix, sys->states);
}

EnergyLandscape ProtocolSpec::landscape_of_distribution(std::string_view dist_name) const {
    const DistDecl* d = find_distribution(dist_name);
    if (!d)
        throw std::out_of_range("unknown dist '" + std::string(dist_name) + "'");
    return find_system(d->system)->landscape();
}

std::string ParseDiagnostic::render(std::string_view origin) const {
    std::ostringstream out;
    out << origin << ':' << line << ':' << column << ": " << (severity == Severity::error ? "error" : "warning")
        << ": " << message;
    if (!excerpt.empty())
        out << "\n    " << excerpt;
    return out.str();
}

std::size_t ParseResult::error_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [](const ParseDiagnostic& d) { return d.severity == Severity::error; }));
}

ParseResult parse(std::string_view source) {
    return Parser(source).run();
}

std::string format_document(const ProtocolSpec& doc) {
    std::ostringstream out;
    bool first = true;
    auto separate = [&] {
        if (!first)
            out << '\n';
        first = false;
    };
    for (const SystemDecl& s : doc.systems) {
        separate();
        out << "system " << s.name << '\n';
        out << "  states";
        for (const std::string& label : s.states)
            out << ' ' << label;
        out << '\n';
        out << "  temperature " << shortest_repr(s.temperature) << '\n';
        out << "  boltzmann " << shortest_repr(s.boltzmann) << '\n';
        for (std::size_t i = 0; i < s.states.size(); ++i)
            out << "  energy " << s.states[i] << ' ' << shortest_repr(s.energies[i]) << '\n';
    }
    for (const DistDecl& d : doc.distributions) {
        separate();
        out << "dist " << d.name << '\n';
        out << "  over " << d.system << '\n';
        out << "  probs";
        for (double x : d.probs)
            out << ' ' << shortest_repr(x);
        out << '\n';
    }
    for (const ChannelDecl& c : doc.channels) {
        separate();
        const SystemDecl* sys = doc.find_system(c.system);
        out << "channel " << c.name << '\n';
        out << "  over " << c.system << '\n';
        const std::size_t n = sys ? sys->states.size() : 0;
        for (std::size_t i = 0; i < n; ++i) {
            out << "  from " << sys->states[i] << ':';
            for (std::size_t j = 0; j < n; ++j) {
                const double x = c.matrix[i * n + j];
                if (x != 0.0)
                    out << ' ' << sys->states[j] << ' ' << shortest_repr(x);
            }
            out << '\n';
        }
    }
    for (const ProtocolDecl& p : doc.protocols) {
        separate();
        out << "protocol " << p.name << '\n';
        for (const Directive& d : p.directives) {
            out << "  " << keyword(d.kind);
            if (d.kind == DirectiveKind::evolve || d.kind == DirectiveKind::audit)
                out << ' ' << d.steps;
            if (!d.target.empty())
                out << ' ' << d.target;
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace thermobit::dsl
