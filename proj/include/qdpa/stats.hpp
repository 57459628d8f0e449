#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qdpa::stats {

inline double mean(std::span<const double> v)
{
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Half-width of a normal-approximation 95% confidence interval of the mean.
inline double ci95_halfwidth(std::span<const double> v)
{
    if (v.size() < 2) return 0.0;
    return 1.959963984540054 * stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

/// P(X >= successes) for X ~ Binomial(n, 1/2).
inline double binomial_upper_tail_half(std::size_t successes, std::size_t n)
{
    if (successes == 0) return 1.0;
    if (successes > n) return 0.0;
    // log-space binomial coefficients keep this exact enough for n in the thousands
    double p = 0.0;
    for (std::size_t k = successes; k <= n; ++k) {
        const double log_c = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(n - k) + 1.0);
        p += std::exp(log_c - static_cast<double>(n) * std::log(2.0));
    }
    return p;
}

struct SignTest {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t ties = 0;
    double p_value = 1.0; // one-sided, H1: median difference > 0
};

/// Sign test on paired differences; zero differences are dropped.
inline SignTest sign_test_greater(std::span<const double> differences)
{
    SignTest t;
    for (double d : differences) {
        if (d > 0.0) ++t.positive;
        else if (d < 0.0) ++t.negative;
        else ++t.ties;
    }
    t.p_value = binomial_upper_tail_half(t.positive, t.positive + t.negative);
    return t;
}

} // namespace qdpa::stats
