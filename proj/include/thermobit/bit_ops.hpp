#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "thermobit/information.hpp"
#include "thermobit/markov.hpp"

namespace thermobit {

inline constexpr double kBitTypeTolerance = 1e-9;

enum class BitType { zero, one, star, other };
enum class PairRelation { correlated, anticorrelated, independent, other };
enum class EnergyDirection { costs_at_least, yields_at_most, free };

std::string_view to_string(BitType t);
std::string_view to_string(PairRelation r);
std::string_view to_string(EnergyDirection d);

/// One bit as a Bernoulli variable; classification derives from the distribution.
class BitState {
public:
    explicit BitState(Distribution dist);

    static BitState zero();
    static BitState one();
    static BitState star();
    static BitState of(BitType t);

    const Distribution& dist() const noexcept { return dist_; }
    BitType type() const noexcept { return type_; }

private:
    Distribution dist_;
    BitType type_;
};

/// Two bits, states ordered 00, 01, 10, 11.
class BitPairState {
public:
    explicit BitPairState(JointDistribution joint);

    static BitPairState independent(const BitState& first, const BitState& second);
    /// Uniform on {00, 11}.
    static BitPairState correlated_star();
    /// Uniform on {01, 10}.
    static BitPairState anticorrelated_star();

    const JointDistribution& joint() const noexcept { return joint_; }
    PairRelation relation() const noexcept { return relation_; }
    bool is_independent() const;
    BitState first() const;
    BitState second() const;

private:
    JointDistribution joint_;
    PairRelation relation_;
};

enum class BitOpMode { strict, lenient };

struct BitOpSettings {
    BitOpMode mode = BitOpMode::strict;
    double temperature = 1.0;
    double boltzmann = 1.0;

    double thermal_energy() const noexcept { return boltzmann * temperature; }
};

/// Information and minimum-energy accounting for one operation, relative to
/// uniform equilibrium. min_energy > 0 is work that must be supplied; < 0 bounds
/// the work that can be extracted.
struct OpLedger {
    std::string op_name;
    Distribution input_state;
    std::string input_type;
    Distribution output_state;
    std::string output_type;
    InfoQuantity delta_H;
    InfoQuantity delta_D;
    double min_energy = 0.0;
    double thermal_energy = 1.0;  // k_B T used for min_energy
    EnergyDirection direction = EnergyDirection::free;
};

template <class State>
struct BitOpResult {
    State state;
    OpLedger ledger;
};

BitOpResult<BitState> erase(const BitState& b, const BitOpSettings& settings = {});
BitOpResult<BitPairState> copy_szilard(const BitPairState& pair, const BitOpSettings& settings = {});
BitOpResult<BitPairState> copy_landauer(const BitPairState& pair, const BitOpSettings& settings = {});
BitOpResult<BitState> not_op(const BitState& b, const BitOpSettings& settings = {});
/// Sets the bit to `to`; strict mode requires the degenerate state at `from`.
BitOpResult<BitState> switch_bit(const BitState& b, int from, int to, const BitOpSettings& settings = {});
/// Strict mode accepts ZERO or ONE.
BitOpResult<BitState> randomize(const BitState& b, const BitOpSettings& settings = {});

/// Erase that lands on 0 with probability `success` and otherwise leaves the bit alone.
BitOpResult<BitState> erase_with_success(const BitState& b, double success, const BitOpSettings& settings = {});

/// Replaces bit `index` (0 = first) of the pair with a fresh uniform bit, keeping the other.
BitOpResult<BitPairState> randomize_pair_bit(const BitPairState& pair, int index,
                                             const BitOpSettings& settings = {});

/// Canonical stochastic matrices backing the operations.
namespace channels {
Channel erase();
Channel erase_with_success(double success);
Channel copy_first_to_second();  // (b1, b2) -> (b1, b1)
Channel not_op();
Channel set_to(int value);
Channel randomize();
Channel randomize_pair_bit(int index);
}  // namespace channels

/// Ledger for an arbitrary in -> out transition under uniform equilibrium.
OpLedger make_ledger(std::string op_name, const Distribution& in, std::string in_type, const Distribution& out,
                     std::string out_type, double thermal_energy);

}  // namespace thermobit
