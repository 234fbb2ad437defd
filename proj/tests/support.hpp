#pragma once

// Reference implementations and generators for the test suites.
//
// The oracles evaluate textbook formulas directly in long double, without
// max-shifts, compensated sums or any code from the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using Real = long double;

inline Real kl(std::span<const double> p, std::span<const double> q) {
    Real s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            continue;
        if (q[i] == 0.0)
            return INFINITY;
        s += static_cast<Real>(p[i]) * std::log(static_cast<Real>(p[i]) / static_cast<Real>(q[i]));
    }
    return s;
}

inline Real entropy(std::span<const double> p) {
    Real s = 0;
    for (double x : p)
        if (x > 0.0)
            s -= static_cast<Real>(x) * std::log(static_cast<Real>(x));
    return s;
}

// Direct sum; callers keep |E / kT| small enough that nothing overflows.
inline Real log_z(const std::vector<double>& e, Real kt) {
    Real z = 0;
    for (double x : e)
        z += std::exp(-static_cast<Real>(x) / kt);
    return std::log(z);
}

inline std::vector<Real> gibbs(const std::vector<double>& e, Real kt) {
    Real z = 0;
    std::vector<Real> w;
    for (double x : e) {
        w.push_back(std::exp(-static_cast<Real>(x) / kt));
        z += w.back();
    }
    for (Real& x : w)
        x /= z;
    return w;
}

inline Real free_energy(const std::vector<double>& e, std::span<const double> p, Real kt) {
    Real avg = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
        avg += static_cast<Real>(p[i]) * static_cast<Real>(e[i]);
    return avg - kt * entropy(p);
}

inline Real free_energy(const std::vector<double>& e, const std::vector<Real>& p, Real kt) {
    Real avg = 0;
    Real h = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        avg += p[i] * static_cast<Real>(e[i]);
        if (p[i] > 0)
            h -= p[i] * std::log(p[i]);
    }
    return avg - kt * h;
}

// p K for a row-major n x n matrix.
inline std::vector<double> step(std::span<const double> p, const std::vector<double>& k) {
    const std::size_t n = p.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        Real s = 0;
        for (std::size_t i = 0; i < n; ++i)
            s += static_cast<Real>(p[i]) * static_cast<Real>(k[i * n + j]);
        out[j] = static_cast<double>(s);
    }
    return out;
}

// D(joint || product of marginals), rows x cols row-major.
inline Real mutual_information(std::span<const double> j, std::size_t rows, std::size_t cols) {
    std::vector<Real> a(rows, 0), b(cols, 0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            a[r] += j[r * cols + c];
            b[c] += j[r * cols + c];
        }
    Real s = 0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const Real x = j[r * cols + c];
            if (x > 0)
                s += x * std::log(x / (a[r] * b[c]));
        }
    return s;
}

}  // namespace oracle

// Small hand-rolled generator for property tests.
struct Gen {
    std::mt19937_64 rng;

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }

    // Random point of the simplex; some entries zero when `zeros` is set.
    std::vector<double> simplex(std::size_t n, bool zeros = false) {
        std::vector<double> v(n);
        double total = 0.0;
        for (double& x : v) {
            x = (zeros && coin(0.2)) ? 0.0 : -std::log(real(1e-12, 1.0));
            total += x;
        }
        if (total == 0.0) {
            v[size(0, n - 1)] = 1.0;
            return v;
        }
        for (double& x : v)
            x /= total;
        return v;
    }

    std::vector<double> strictly_positive(std::size_t n) {
        std::vector<double> v = simplex(n);
        double total = 0.0;
        for (double& x : v) {
            x += 1e-3;
            total += x;
        }
        for (double& x : v)
            x /= total;
        return v;
    }

    std::vector<double> stochastic_matrix(std::size_t n, bool sparse = false) {
        std::vector<double> m;
        m.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row = simplex(n, sparse);
            m.insert(m.end(), row.begin(), row.end());
        }
        return m;
    }
};
