#include "thermobit/information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit {
namespace {

std::vector<double> validated(std::vector<double> probs, const char* what) {
    if (probs.empty())
        throw DomainError(std::string(what) + " must have at least one state");
    CompensatedSum total;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double x = probs[i];
        if (!std::isfinite(x) || x < 0.0)
            throw DomainError(std::string(what) + " entry " + std::to_string(i + 1) +
                              " is not a non-negative finite number: " + brief_repr(x));
        total.add(x);
    }
    const double sum = total.value();
    if (std::abs(sum - 1.0) > kNormalizationTolerance)
        throw DomainError("probabilities sum to " + brief_repr(sum));
    if (sum != 1.0) {
        for (double& x : probs)
            x /= sum;
    }
    return probs;
}

// Sum of p_i log(p_i / q_i) with the 0 log 0 convention; +inf on a support violation.
double kl_terms(std::span<const double> p, std::span<const double> q) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            continue;
        if (q[i] == 0.0)
            return std::numeric_limits<double>::infinity();
        acc.add(p[i] * std::log(p[i] / q[i]));
    }
    return acc.value();
}

}  // namespace

InfoQuantity::InfoQuantity(double nats) : nats_(nats) {
    if (std::isnan(nats))
        throw DomainError("information quantity is NaN");
}

InfoQuantity InfoQuantity::infinite() {
    return InfoQuantity(std::numeric_limits<double>::infinity());
}

double InfoQuantity::bits() const noexcept {
    return nats_ / std::log(2.0);
}

bool InfoQuantity::is_infinite() const noexcept {
    return std::isinf(nats_);
}

Distribution::Distribution(std::vector<double> probs, std::vector<std::string> labels)
    : probs_(validated(std::move(probs), "distribution")), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != probs_.size())
        throw ShapeError("distribution has " + std::to_string(probs_.size()) + " entries but " +
                         std::to_string(labels_.size()) + " labels");
}

Distribution Distribution::uniform(std::size_t n) {
    if (n == 0)
        throw DomainError("distribution must have at least one state");
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::degenerate(std::size_t n, std::size_t state) {
    if (state >= n)
        throw ShapeError("degenerate state index out of range");
    std::vector<double> probs(n, 0.0);
    probs[state] = 1.0;
    return Distribution(std::move(probs));
}

double Distribution::max_abs_diff(const Distribution& other) const {
    if (other.size() != size())
        throw ShapeError("distribution length mismatch: " + std::to_string(size()) + " vs " +
                         std::to_string(other.size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        worst = std::max(worst, std::abs(probs_[i] - other.probs_[i]));
    return worst;
}

bool Distribution::approx_equal(const Distribution& other, double tol) const {
    return other.size() == size() && max_abs_diff(other) <= tol;
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0)
        throw DomainError("joint distribution needs at least one state per system");
    if (probs.size() != rows * cols)
        throw ShapeError("joint distribution expects " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(probs.size()));
    probs_ = validated(std::move(probs), "joint distribution");
}

JointDistribution JointDistribution::product(const Distribution& first, const Distribution& second) {
    std::vector<double> probs;
    probs.reserve(first.size() * second.size());
    for (double a : first.probs())
        for (double b : second.probs())
            probs.push_back(a * b);
    return JointDistribution(first.size(), second.size(), std::move(probs));
}

Distribution JointDistribution::marginal_first() const {
    std::vector<double> m(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        m[i] = compensated_sum(std::span(probs_).subspan(i * cols_, cols_));
    return Distribution(std::move(m));
}

Distribution JointDistribution::marginal_second() const {
    std::vector<double> m(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
        CompensatedSum s;
        for (std::size_t i = 0; i < rows_; ++i)
            s.add((*this)(i, j));
        m[j] = s.value();
    }
    return Distribution(std::move(m));
}

Distribution JointDistribution::flattened() const {
    return Distribution(probs_);
}

InfoQuantity self_information(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("self-information needs a probability in [0, 1], got " + brief_repr(p));
    if (p == 0.0)
        return InfoQuantity::infinite();
    return InfoQuantity(-std::log(p));
}

InfoQuantity shannon_entropy(const Distribution& p) {
    CompensatedSum acc;
    for (double x : p.probs()) {
        if (x > 0.0)
            acc.add(-x * std::log(x));
    }
    return InfoQuantity(acc.value());
}

InfoQuantity relative_entropy(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size())
        throw ShapeError("relative entropy of distributions with " + std::to_string(p.size()) +
                         " and " + std::to_string(q.size()) + " states");
    return InfoQuantity(kl_terms(p.probs(), q.probs()));
}

InfoQuantity mutual_information(const JointDistribution& joint) {
    const Distribution p1 = joint.marginal_first();
    const Distribution p2 = joint.marginal_second();
    CompensatedSum acc;
    for (std::size_t i = 0; i < joint.rows(); ++i) {
        for (std::size_t j = 0; j < joint.cols(); ++j) {
            const double pij = joint(i, j);
            if (pij > 0.0)
                acc.add(pij * std::log(pij / (p1[i] * p2[j])));
        }
    }
    return InfoQuantity(std::max(0.0, acc.value()));
}

double InfoDecomposition::residual() const noexcept {
    CompensatedSum parts;
    parts.add(part1.nats());
    parts.add(part2.nats());
    parts.add(correlation.nats());
    return total.nats() - parts.value();
}

InfoDecomposition decompose_information(const JointDistribution& joint, const Distribution& pi1,
                                        const Distribution& pi2) {
    if (pi1.size() != joint.rows() || pi2.size() != joint.cols())
        throw ShapeError("equilibrium distributions are " + std::to_string(pi1.size()) + " x " +
                         std::to_string(pi2.size()) + " but the joint is " +
                         std::to_string(joint.rows()) + " x " + std::to_string(joint.cols()));
    for (const Distribution* pi : {&pi1, &pi2}) {
        for (double x : pi->probs())
            if (x <= 0.0)
                throw DomainError("equilibrium distributions must be strictly positive");
    }
    const JointDistribution reference = JointDistribution::product(pi1, pi2);
    return InfoDecomposition{
        .total = InfoQuantity(kl_terms(joint.probs(), reference.probs())),
        .part1 = relative_entropy(joint.marginal_first(), pi1),
        .part2 = relative_entropy(joint.marginal_second(), pi2),
        .correlation = mutual_information(joint),
    };
}

}  // namespace thermobit
