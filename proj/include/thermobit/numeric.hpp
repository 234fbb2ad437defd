#pragma once

#include <cmath>
#include <span>

namespace thermobit {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    return s.value();
}

}  // namespace thermobit

#include <array>
#include <charconv>
#include <cstdio>
#include <string>

namespace thermobit {

/// Shortest decimal text that parses back to exactly `x`.
inline std::string shortest_repr(double x) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

/// Human-oriented rendering for diagnostics ("1.1", "2.5e-07").
inline std::string brief_repr(double x) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", x);
    return buf.data();
}

}  // namespace thermobit
