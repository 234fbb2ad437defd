#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "thermobit/information.hpp"

namespace thermobit {

inline constexpr double kStationaryStepTolerance = 1e-13;
inline constexpr double kStationaryVerifyTolerance = 1e-10;
inline constexpr double kMultiplicityTolerance = 1e-8;
inline constexpr double kDetailedBalanceTolerance = 1e-10;
inline constexpr double kMonotoneSlack = 1e-12;
inline constexpr double kMonotoneVerdictTolerance = 1e-10;
inline constexpr std::size_t kStationaryMaxIterations = 1'000'000;
inline constexpr std::size_t kPerturbedStarts = 8;

/// Row-stochastic n x n transition matrix; row i is the next-state law from state i.
class Channel {
public:
    /// Rows are checked and renormalized with the Distribution rules.
    Channel(std::size_t n, std::vector<double> row_major, std::vector<std::string> labels = {});
    explicit Channel(const std::vector<std::vector<double>>& rows, std::vector<std::string> labels = {});

    static Channel identity(std::size_t n);
    /// State i moves to state perm[i].
    static Channel permutation(const std::vector<std::size_t>& perm);
    /// Every row equal to `target`.
    static Channel constant(const Distribution& target);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t from, std::size_t to) const { return matrix_[from * n_ + to]; }
    const std::vector<double>& matrix() const noexcept { return matrix_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Lazy version (I + K) / 2; same stationary set, aperiodic.
    Channel lazy() const;
    /// Apply this, then `next`.
    Channel then(const Channel& next) const;

    friend bool operator==(const Channel& a, const Channel& b) { return a.n_ == b.n_ && a.matrix_ == b.matrix_; }

private:
    std::size_t n_;
    std::vector<double> matrix_;
    std::vector<std::string> labels_;
};

/// (pK)_j = sum_i p_i K_ij.
Distribution apply_channel(const Distribution& p, const Channel& k);

struct StationaryResult {
    Distribution distribution;
    bool multiplicity_warning = false;  // perturbed starts converged to different limits
    std::size_t iterations = 0;
    double verify_residual = 0.0;       // ||pi K - pi||_inf
};

/// Power iteration on the lazy chain from the uniform start, then probes
/// kPerturbedStarts perturbed starts. Throws NoStationaryError if the iteration
/// cap is hit or the limit fails verification. When the probes agree, the limit
/// is refined by a direct linear solve (kept only if its residual is no worse).
StationaryResult stationary_distribution(const Channel& k, std::size_t perturbed_starts = kPerturbedStarts);

struct DetailedBalance {
    bool holds;
    double max_residual;  // max_ij |pi_i K_ij - pi_j K_ji|
};

DetailedBalance check_detailed_balance(const Channel& k, const Distribution& pi);

struct Trajectory {
    std::vector<Distribution> states;   // p_0 .. p_T
    std::vector<InfoQuantity> divergence;  // D(p_t || reference)
    Distribution reference;

    /// Columns step, p_1..p_n, D_nats, D_bits.
    std::string to_csv() const;
};

/// Steps the chain `steps` times, recording D against `reference`, or against
/// the stationary distribution when no reference is given.
Trajectory evolve(const Distribution& p0, const Channel& k, std::size_t steps,
                  const std::optional<Distribution>& reference = std::nullopt);

struct AuditVerdict {
    bool stationary_found = false;
    std::optional<Distribution> stationary;
    bool multiplicity_warning = false;
    bool detailed_balance = false;
    double detailed_balance_residual = 0.0;
    bool monotone = false;
    double max_violation = 0.0;  // largest D_{t+1} - D_t, nats; <= 0 when D never rises
    std::size_t steps_checked = 0;
    std::optional<Trajectory> trajectory;
    std::string error;  // why no stationary distribution was found
};

/// Second-Law audit: is D(p_t || pi) non-increasing along the chain?
///
/// The audit is taken against `reference` when given, otherwise against the
/// stationary distribution found by power iteration. A failed stationary search
/// is recorded in the verdict, not thrown.
AuditVerdict second_law_audit(const Distribution& p0, const Channel& k, std::size_t steps,
                              const std::optional<Distribution>& reference = std::nullopt);

struct DataProcessing {
    InfoQuantity before;  // D(p || q)
    InfoQuantity after;   // D(pK || qK)
    bool ok;
};

DataProcessing data_processing_check(const Distribution& p, const Distribution& q, const Channel& k);

}  // namespace thermobit
