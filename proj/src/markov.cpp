#include "thermobit/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "thermobit/errors.hpp"
#include "thermobit/numeric.hpp"

namespace thermobit {
namespace {

void require_size(const Distribution& p, const Channel& k) {
    if (p.size() != k.size())
        throw ShapeError("distribution has " + std::to_string(p.size()) + " states but the channel is " +
                         std::to_string(k.size()) + " x " + std::to_string(k.size()));
}

// One step without the Distribution validation; used inside tight power-iteration loops.
void step_raw(const std::vector<double>& p, const Channel& k, std::vector<double>& out) {
    const std::size_t n = k.size();
    const std::vector<double>& m = k.matrix();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double pi = p[i];
        if (pi == 0.0)
            continue;
        const double* row = m.data() + i * n;
        for (std::size_t j = 0; j < n; ++j)
            out[j] += pi * row[j];
    }
    // Keep iterates on the simplex against slow drift.
    const double total = compensated_sum(out);
    for (double& x : out)
        x /= total;
}

double max_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

struct IterationOutcome {
    std::vector<double> limit;
    std::size_t iterations = 0;
    bool converged = false;
};

IterationOutcome iterate_to_fixed_point(const Channel& lazy, std::vector<double> start) {
    IterationOutcome out;
    std::vector<double> next(start.size());
    for (std::size_t it = 1; it <= kStationaryMaxIterations; ++it) {
        step_raw(start, lazy, next);
        const double diff = max_norm_diff(start, next);
        start.swap(next);
        if (diff < kStationaryStepTolerance) {
            out.iterations = it;
            out.converged = true;
            break;
        }
    }
    if (!out.converged)
        out.iterations = kStationaryMaxIterations;
    out.limit = std::move(start);
    return out;
}

std::vector<double> rows_from(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != rows.size())
            throw ShapeError("channel must be square: row of length " + std::to_string(r.size()) +
                             " in a " + std::to_string(rows.size()) + "-state channel");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

// Direct solve of pi (I - K) = 0, sum(pi) = 1 by Gaussian elimination with partial
// pivoting. Only meaningful when the stationary distribution is unique; returns
// nothing if the system is numerically singular or the solution leaves the simplex.
std::optional<std::vector<double>> solve_stationary(const Channel& k) {
    const std::size_t n = k.size();
    std::vector<double> a(n * n);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = (i == j ? 1.0 : 0.0) - k(j, i);
    std::fill(a.begin() + static_cast<std::ptrdiff_t>((n - 1) * n), a.end(), 1.0);
    b[n - 1] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-12)
            return std::nullopt;
        if (pivot != col) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(col * n),
                             a.begin() + static_cast<std::ptrdiff_t>((col + 1) * n),
                             a.begin() + static_cast<std::ptrdiff_t>(pivot * n));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0)
                continue;
            for (std::size_t c = col; c < n; ++c)
                a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        CompensatedSum s;
        s.add(b[r]);
        for (std::size_t c = r + 1; c < n; ++c)
            s.add(-a[r * n + c] * x[c]);
        x[r] = s.value() / a[r * n + r];
    }
    for (double& v : x) {
        if (!std::isfinite(v) || v < -1e-12)
            return std::nullopt;
        v = std::max(v, 0.0);
    }
    const double total = compensated_sum(x);
    if (!(total > 0.0))
        return std::nullopt;
    for (double& v : x)
        v /= total;
    return x;
}

}  // namespace

Channel::Channel(std::size_t n, std::vector<double> row_major, std::vector<std::string> labels)
    : n_(n), matrix_(std::move(row_major)), labels_(std::move(labels)) {
    if (n_ == 0)
        throw DomainError("channel needs at least one state");
    if (matrix_.size() != n_ * n_)
        throw ShapeError("channel over " + std::to_string(n_) + " states needs " +
                         std::to_string(n_ * n_) + " entries, got " + std::to_string(matrix_.size()));
    if (!labels_.empty() && labels_.size() != n_)
        throw ShapeError("channel has " + std::to_string(n_) + " states but " +
                         std::to_string(labels_.size()) + " labels");
    for (std::size_t i = 0; i < n_; ++i) {
        std::vector<double> row(matrix_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                                matrix_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
        try {
            Distribution normalized(std::move(row));
            std::copy(normalized.probs().begin(), normalized.probs().end(),
                      matrix_.begin() + static_cast<std::ptrdiff_t>(i * n_));
        } catch (const DomainError& e) {
            throw DomainError("channel row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
}

Channel::Channel(const std::vector<std::vector<double>>& rows, std::vector<std::string> labels)
    : Channel(rows.size(), rows_from(rows), std::move(labels)) {}

Channel Channel::identity(std::size_t n) {
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        m[i * n + i] = 1.0;
    return Channel(n, std::move(m));
}

Channel Channel::permutation(const std::vector<std::size_t>& perm) {
    const std::size_t n = perm.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (perm[i] >= n)
            throw ShapeError("permutation target out of range");
        if (std::find(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(i), perm[i]) !=
            perm.begin() + static_cast<std::ptrdiff_t>(i))
            throw DomainError("state " + std::to_string(perm[i]) + " is targeted twice; not a permutation");
        m[i * n + perm[i]] = 1.0;
    }
    return Channel(n, std::move(m));
}

Channel Channel::constant(const Distribution& target) {
    const std::size_t n = target.size();
    std::vector<double> m;
    m.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        m.insert(m.end(), target.probs().begin(), target.probs().end());
    return Channel(n, std::move(m));
}

Channel Channel::lazy() const {
    std::vector<double> m = matrix_;
    for (double& x : m)
        x *= 0.5;
    for (std::size_t i = 0; i < n_; ++i)
        m[i * n_ + i] += 0.5;
    return Channel(n_, std::move(m), labels_);
}

Channel Channel::then(const Channel& next) const {
    if (next.n_ != n_)
        throw ShapeError("cannot compose channels of different sizes");
    std::vector<double> m(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0)
                continue;
            for (std::size_t j = 0; j < n_; ++j)
                m[i * n_ + j] += a * next(k, j);
        }
    return Channel(n_, std::move(m), labels_);
}

Distribution apply_channel(const Distribution& p, const Channel& k) {
    require_size(p, k);
    const std::size_t n = k.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        CompensatedSum s;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = p[i] * k(i, j);
            if (w != 0.0)
                s.add(w);
        }
        out[j] = s.value();
    }
    return Distribution(std::move(out), p.labels());
}

StationaryResult stationary_distribution(const Channel& k, std::size_t perturbed_starts) {
    const std::size_t n = k.size();
    const Channel lazy = k.lazy();
    IterationOutcome main = iterate_to_fixed_point(lazy, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    if (!main.converged)
        throw NoStationaryError("power iteration did not converge within " +
                                std::to_string(kStationaryMaxIterations) + " iterations");

    std::vector<double> image(n);
    step_raw(main.limit, k, image);
    const double verify = max_norm_diff(image, main.limit);
    if (!(verify < kStationaryVerifyTolerance))
        throw NoStationaryError("limit fails stationarity check, ||pi K - pi|| = " + brief_repr(verify));

    StationaryResult result{
        .distribution = Distribution(main.limit, k.labels()),
        .multiplicity_warning = false,
        .iterations = main.iterations,
        .verify_residual = verify,
    };

    std::mt19937_64 rng(0x9E3779B97F4A7C15ULL ^ n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < perturbed_starts && !result.multiplicity_warning; ++s) {
        std::vector<double> start(n);
        double total = 0.0;
        for (double& x : start) {
            x = unit(rng) + 1e-3;
            total += x;
        }
        for (double& x : start)
            x /= total;
        const IterationOutcome probe = iterate_to_fixed_point(lazy, std::move(start));
        if (!probe.converged || max_norm_diff(probe.limit, main.limit) > kMultiplicityTolerance)
            result.multiplicity_warning = true;
    }

    // The stopping rule leaves an error of order step / (1 - lambda_2), which for slowly
    // mixing chains is large enough to show up as spurious jumps in D(p_t || pi).
    if (!result.multiplicity_warning && perturbed_starts > 0) {
        if (auto polished = solve_stationary(k)) {
            step_raw(*polished, k, image);
            const double residual = max_norm_diff(image, *polished);
            if (residual <= verify && max_norm_diff(*polished, main.limit) <= kMultiplicityTolerance) {
                result.distribution = Distribution(std::move(*polished), k.labels());
                result.verify_residual = residual;
            }
        }
    }
    return result;
}

DetailedBalance check_detailed_balance(const Channel& k, const Distribution& pi) {
    require_size(pi, k);
    double worst = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = i + 1; j < k.size(); ++j)
            worst = std::max(worst, std::abs(pi[i] * k(i, j) - pi[j] * k(j, i)));
    return {worst < kDetailedBalanceTolerance, worst};
}

std::string Trajectory::to_csv() const {
    std::ostringstream out;
    const std::size_t n = reference.size();
    out << "step";
    for (std::size_t i = 1; i <= n; ++i)
        out << ",p_" << i;
    out << ",D_nats,D_bits\n";
    auto render = [](double x) { return std::isinf(x) ? std::string("inf") : shortest_repr(x); };
    for (std::size_t t = 0; t < states.size(); ++t) {
        out << t;
        for (double x : states[t].probs())
            out << ',' << render(x);
        out << ',' << render(divergence[t].nats()) << ',' << render(divergence[t].bits()) << '\n';
    }
    return out.str();
}

Trajectory evolve(const Distribution& p0, const Channel& k, std::size_t steps,
                  const std::optional<Distribution>& reference) {
    require_size(p0, k);
    Distribution ref = reference ? *reference : stationary_distribution(k).distribution;
    if (ref.size() != p0.size())
        throw ShapeError("reference distribution has the wrong number of states");
    Trajectory traj{.states = {}, .divergence = {}, .reference = ref};
    traj.states.reserve(steps + 1);
    traj.divergence.reserve(steps + 1);
    traj.states.push_back(p0);
    traj.divergence.push_back(relative_entropy(p0, ref));
    for (std::size_t t = 0; t < steps; ++t) {
        traj.states.push_back(apply_channel(traj.states.back(), k));
        traj.divergence.push_back(relative_entropy(traj.states.back(), ref));
    }
    return traj;
}

AuditVerdict second_law_audit(const Distribution& p0, const Channel& k, std::size_t steps,
                              const std::optional<Distribution>& reference) {
    require_size(p0, k);
    if (steps == 0)
        throw DomainError("audit needs at least one step");
    AuditVerdict verdict;
    try {
        StationaryResult st = stationary_distribution(k);
        verdict.stationary_found = true;
        verdict.multiplicity_warning = st.multiplicity_warning;
        const DetailedBalance db = check_detailed_balance(k, st.distribution);
        verdict.detailed_balance = db.holds;
        verdict.detailed_balance_residual = db.max_residual;
        verdict.stationary = std::move(st.distribution);
    } catch (const NoStationaryError& e) {
        verdict.error = e.what();
    }

    const std::optional<Distribution>& ref = reference ? reference : verdict.stationary;
    if (!ref)
        return verdict;

    Trajectory traj = evolve(p0, k, steps, ref);
    double worst = 0.0;
    for (std::size_t t = 0; t + 1 < traj.divergence.size(); ++t) {
        const double a = traj.divergence[t].nats();
        const double b = traj.divergence[t + 1].nats();
        if (std::isinf(a))
            continue;
        worst = std::max(worst, b - a);
    }
    verdict.max_violation = worst;
    verdict.monotone = worst <= kMonotoneVerdictTolerance;
    verdict.steps_checked = steps;
    verdict.trajectory = std::move(traj);
    return verdict;
}

DataProcessing data_processing_check(const Distribution& p, const Distribution& q, const Channel& k) {
    const InfoQuantity before = relative_entropy(p, q);
    const InfoQuantity after = relative_entropy(apply_channel(p, k), apply_channel(q, k));
    return {before, after, after.nats() <= before.nats() + kMonotoneSlack};
}

}  // namespace thermobit
