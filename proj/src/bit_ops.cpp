#include "thermobit/bit_ops.hpp"

#include <cmath>

#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit {
namespace {

bool near(double a, double b) {
    return std::abs(a - b) <= kBitTypeTolerance;
}

BitType classify(const Distribution& d) {
    if (near(d[0], 1.0) && near(d[1], 0.0))
        return BitType::zero;
    if (near(d[0], 0.0) && near(d[1], 1.0))
        return BitType::one;
    if (near(d[0], 0.5) && near(d[1], 0.5))
        return BitType::star;
    return BitType::other;
}

std::string describe(const BitPairState& s) {
    return std::string(to_string(s.relation())) + "(" + std::string(to_string(s.first().type())) + "," +
           std::string(to_string(s.second().type())) + ")";
}

void require(bool ok, const BitOpSettings& settings, const std::string& message) {
    if (!ok && settings.mode == BitOpMode::strict)
        throw ContractError(message);
}

std::string got(const BitState& b) {
    return std::string(to_string(b.type()));
}

BitOpResult<BitState> run_single(std::string name, const BitState& b, const Channel& k,
                                 const BitOpSettings& settings) {
    BitState out(apply_channel(b.dist(), k));
    OpLedger ledger = make_ledger(std::move(name), b.dist(), got(b), out.dist(), got(out), settings.thermal_energy());
    return {std::move(out), std::move(ledger)};
}

BitOpResult<BitPairState> run_pair(std::string name, const BitPairState& pair, const Channel& k,
                                   const BitOpSettings& settings) {
    const Distribution in = pair.joint().flattened();
    const Distribution next = apply_channel(in, k);
    BitPairState out(JointDistribution(2, 2, std::vector<double>(next.probs().begin(), next.probs().end())));
    OpLedger ledger = make_ledger(std::move(name), in, describe(pair), next, describe(out), settings.thermal_energy());
    return {std::move(out), std::move(ledger)};
}

std::size_t pair_index(int b1, int b2) {
    return static_cast<std::size_t>(2 * b1 + b2);
}

void require_bit_value(int v) {
    if (v != 0 && v != 1)
        throw DomainError("bit value must be 0 or 1, got " + std::to_string(v));
}

}  // namespace

std::string_view to_string(BitType t) {
    switch (t) {
    case BitType::zero: return "ZERO";
    case BitType::one: return "ONE";
    case BitType::star: return "STAR";
    case BitType::other: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(PairRelation r) {
    switch (r) {
    case PairRelation::correlated: return "CORRELATED";
    case PairRelation::anticorrelated: return "ANTICORRELATED";
    case PairRelation::independent: return "INDEPENDENT";
    case PairRelation::other: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(EnergyDirection d) {
    switch (d) {
    case EnergyDirection::costs_at_least: return "COSTS_AT_LEAST";
    case EnergyDirection::yields_at_most: return "YIELDS_AT_MOST";
    case EnergyDirection::free: return "FREE";
    }
    return "FREE";
}

BitState::BitState(Distribution dist) : dist_(std::move(dist)), type_(BitType::other) {
    if (dist_.size() != 2)
        throw ShapeError("a bit has exactly two states, got " + std::to_string(dist_.size()));
    type_ = classify(dist_);
}

BitState BitState::zero() { return BitState(Distribution({1.0, 0.0})); }
BitState BitState::one() { return BitState(Distribution({0.0, 1.0})); }
BitState BitState::star() { return BitState(Distribution({0.5, 0.5})); }

BitState BitState::of(BitType t) {
    switch (t) {
    case BitType::zero: return zero();
    case BitType::one: return one();
    case BitType::star: return star();
    case BitType::other: break;
    }
    throw DomainError("OTHER is not a concrete bit type");
}

BitPairState::BitPairState(JointDistribution joint) : joint_(std::move(joint)), relation_(PairRelation::other) {
    if (joint_.rows() != 2 || joint_.cols() != 2)
        throw ShapeError("a bit pair is a 2 x 2 joint distribution");
    const double equal = joint_(0, 0) + joint_(1, 1);
    if (near(equal, 1.0))
        relation_ = PairRelation::correlated;
    else if (near(equal, 0.0))
        relation_ = PairRelation::anticorrelated;
    else if (is_independent())
        relation_ = PairRelation::independent;
}

BitPairState BitPairState::independent(const BitState& first, const BitState& second) {
    return BitPairState(JointDistribution::product(first.dist(), second.dist()));
}

BitPairState BitPairState::correlated_star() {
    return BitPairState(JointDistribution(2, 2, {0.5, 0.0, 0.0, 0.5}));
}

BitPairState BitPairState::anticorrelated_star() {
    return BitPairState(JointDistribution(2, 2, {0.0, 0.5, 0.5, 0.0}));
}

bool BitPairState::is_independent() const {
    const Distribution a = joint_.marginal_first();
    const Distribution b = joint_.marginal_second();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            if (!near(joint_(i, j), a[i] * b[j]))
                return false;
    return true;
}

BitState BitPairState::first() const { return BitState(joint_.marginal_first()); }
BitState BitPairState::second() const { return BitState(joint_.marginal_second()); }

OpLedger make_ledger(std::string op_name, const Distribution& in, std::string in_type, const Distribution& out,
                     std::string out_type, double thermal_energy) {
    const double h_in = shannon_entropy(in).nats();
    const double h_out = shannon_entropy(out).nats();
    const double delta_h = h_out - h_in;
    // Against uniform equilibrium D(p||u) = log n - H(p), so the D change is exactly -dH.
    const double delta_d = 0.0 - delta_h;
    EnergyDirection dir = EnergyDirection::free;
    if (delta_d > 0.0)
        dir = EnergyDirection::costs_at_least;
    else if (delta_d < 0.0)
        dir = EnergyDirection::yields_at_most;
    return OpLedger{
        .op_name = std::move(op_name),
        .input_state = in,
        .input_type = std::move(in_type),
        .output_state = out,
        .output_type = std::move(out_type),
        .delta_H = InfoQuantity(delta_h),
        .delta_D = InfoQuantity(delta_d),
        .min_energy = thermal_energy * delta_d,
        .thermal_energy = thermal_energy,
        .direction = dir,
    };
}

namespace channels {

Channel erase() {
    return Channel::constant(Distribution({1.0, 0.0}));
}

Channel erase_with_success(double success) {
    if (!(success >= 0.0 && success <= 1.0))
        throw DomainError("success probability must lie in [0, 1]");
    return Channel(2, {1.0, 0.0, success, 1.0 - success});
}

Channel copy_first_to_second() {
    std::vector<std::size_t> target(4);
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            target[pair_index(b1, b2)] = pair_index(b1, b1);
    std::vector<double> m(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        m[i * 4 + target[i]] = 1.0;
    return Channel(4, std::move(m));
}

Channel not_op() {
    return Channel::permutation({1, 0});
}

Channel set_to(int value) {
    require_bit_value(value);
    return Channel::constant(Distribution::degenerate(2, static_cast<std::size_t>(value)));
}

Channel randomize() {
    return Channel::constant(Distribution::uniform(2));
}

Channel randomize_pair_bit(int index) {
    if (index != 0 && index != 1)
        throw DomainError("pair bit index must be 0 or 1");
    std::vector<double> m(16, 0.0);
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            for (int fresh = 0; fresh < 2; ++fresh) {
                const std::size_t to = index == 0 ? pair_index(fresh, b2) : pair_index(b1, fresh);
                m[pair_index(b1, b2) * 4 + to] += 0.5;
            }
    return Channel(4, std::move(m));
}

}  // namespace channels

BitOpResult<BitState> erase(const BitState& b, const BitOpSettings& settings) {
    require(b.type() == BitType::star, settings, "erase expects a STAR bit, got " + got(b));
    return run_single("erase", b, channels::erase(), settings);
}

BitOpResult<BitPairState> copy_szilard(const BitPairState& pair, const BitOpSettings& settings) {
    const bool nominal = pair.first().type() == BitType::star && pair.second().type() == BitType::star &&
                         pair.is_independent();
    require(nominal, settings, "copy_szilard expects independent (STAR, STAR), got " + describe(pair));
    return run_pair("copy_szilard", pair, channels::copy_first_to_second(), settings);
}

BitOpResult<BitPairState> copy_landauer(const BitPairState& pair, const BitOpSettings& settings) {
    const bool nominal = pair.first().type() == BitType::star && pair.second().type() == BitType::zero &&
                         pair.is_independent();
    require(nominal, settings, "copy_landauer expects independent (STAR, ZERO), got " + describe(pair));
    return run_pair("copy_landauer", pair, channels::copy_first_to_second(), settings);
}

BitOpResult<BitState> not_op(const BitState& b, const BitOpSettings& settings) {
    return run_single("not", b, channels::not_op(), settings);
}

BitOpResult<BitState> switch_bit(const BitState& b, int from, int to, const BitOpSettings& settings) {
    require_bit_value(from);
    require_bit_value(to);
    const BitType expected = from == 0 ? BitType::zero : BitType::one;
    require(b.type() == expected, settings,
            "switch(" + std::to_string(from) + "->" + std::to_string(to) + ") expects " +
                std::string(to_string(expected)) + ", got " + got(b));
    return run_single("switch_" + std::to_string(from) + "_" + std::to_string(to), b, channels::set_to(to), settings);
}

BitOpResult<BitState> randomize(const BitState& b, const BitOpSettings& settings) {
    require(b.type() == BitType::zero || b.type() == BitType::one, settings,
            "randomize expects ZERO or ONE, got " + got(b));
    return run_single("randomize", b, channels::randomize(), settings);
}

BitOpResult<BitState> erase_with_success(const BitState& b, double success, const BitOpSettings& settings) {
    require(b.type() == BitType::star, settings, "erase expects a STAR bit, got " + got(b));
    return run_single("erase_with_success", b, channels::erase_with_success(success), settings);
}

BitOpResult<BitPairState> randomize_pair_bit(const BitPairState& pair, int index, const BitOpSettings& settings) {
    return run_pair(index == 0 ? "randomize_first" : "randomize_second", pair, channels::randomize_pair_bit(index),
                    settings);
}

}  // namespace thermobit
