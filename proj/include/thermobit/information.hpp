#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace thermobit {

/// Inputs whose entries sum to within this of 1 are renormalized; worse ones are rejected.
inline constexpr double kNormalizationTolerance = 1e-9;

/// An amount of information. Stored in nats; +inf marks an absolute-continuity violation.
class InfoQuantity {
public:
    constexpr InfoQuantity() = default;
    explicit InfoQuantity(double nats);

    static InfoQuantity infinite();

    double nats() const noexcept { return nats_; }
    double bits() const noexcept;
    bool is_infinite() const noexcept;

    friend InfoQuantity operator+(InfoQuantity a, InfoQuantity b) { return InfoQuantity(a.nats_ + b.nats_); }
    friend InfoQuantity operator-(InfoQuantity a, InfoQuantity b) { return InfoQuantity(a.nats_ - b.nats_); }
    friend bool operator==(InfoQuantity, InfoQuantity) = default;

private:
    double nats_ = 0.0;
};

/// Finite probability vector over an ordered state space.
///
/// Construction rejects negative or non-finite entries and sums further than
/// kNormalizationTolerance from 1; anything inside the tolerance is divided
/// through by its sum.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs, std::vector<std::string> labels = {});

    static Distribution uniform(std::size_t n);
    static Distribution degenerate(std::size_t n, std::size_t state);

    std::size_t size() const noexcept { return probs_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Max-norm distance; both must have the same length.
    double max_abs_diff(const Distribution& other) const;
    bool approx_equal(const Distribution& other, double tol) const;

    friend bool operator==(const Distribution& a, const Distribution& b) { return a.probs_ == b.probs_; }

private:
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

/// Distribution over a product space S1 x S2, row-major (row = state of S1).
class JointDistribution {
public:
    JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs);

    static JointDistribution product(const Distribution& first, const Distribution& second);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return probs_[i * cols_ + j]; }
    std::span<const double> probs() const noexcept { return probs_; }

    Distribution marginal_first() const;
    Distribution marginal_second() const;
    /// Same probabilities viewed as one distribution over rows*cols states.
    Distribution flattened() const;

    friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> probs_;
};

/// log(1/p); p = 0 gives +inf. Throws DomainError outside [0, 1].
InfoQuantity self_information(double p);

/// Shannon entropy with 0 log 0 = 0.
InfoQuantity shannon_entropy(const Distribution& p);

/// D(p || q). Terms with p_i = 0 contribute nothing; p_i > 0 with q_i = 0 gives +inf.
InfoQuantity relative_entropy(const Distribution& p, const Distribution& q);

/// D(j || j1 (x) j2).
InfoQuantity mutual_information(const JointDistribution& joint);

struct InfoDecomposition {
    InfoQuantity total;        // D(p || pi1 (x) pi2)
    InfoQuantity part1;        // D(p1 || pi1)
    InfoQuantity part2;        // D(p2 || pi2)
    InfoQuantity correlation;  // I(S1, S2)

    double residual() const noexcept;
};

/// Splits the information in a joint state into per-system and correlation parts.
/// pi1 and pi2 must be strictly positive.
InfoDecomposition decompose_information(const JointDistribution& joint, const Distribution& pi1,
                                        const Distribution& pi2);

}  // namespace thermobit
