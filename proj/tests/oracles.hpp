#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// P(Z > u) for a standard normal Z.
inline double normal_upper_tail(double u) { return 0.5 * std::erfc(u / std::sqrt(2.0)); }

/// sup over a uniform lambda grid on [0, lambda_max] of lambda u - g(lambda).
inline double conjugate_grid(const std::function<double(double)>& g, double u, double lambda_max,
                             int points = 200001) {
    double best = -INFINITY;
    for (int i = 0; i < points; ++i) {
        const double l = lambda_max * i / (points - 1);
        best = std::max(best, l * u - g(l));
    }
    return best;
}

inline double binomial(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

/// E|R_1 + ... + R_n|^p for iid Rademacher signs, from the binomial law.
inline double rademacher_sum_abs_moment(int n, double p) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k) s += binomial(n, k) * std::pow(std::abs(n - 2.0 * k), p);
    return s / std::pow(2.0, n);
}

/// min over a log-spaced z grid of (z^q + 1)^{1/q} / (z^p + 1)^{1/p}, brute force.
inline double theta_grid(double p, double q, int points = 200001) {
    double best = INFINITY;
    for (int i = 0; i < points; ++i) {
        const double t = -30.0 + 60.0 * i / (points - 1);
        const double z = std::exp(t);
        best = std::min(best, std::pow(std::pow(z, q) + 1.0, 1.0 / q) / std::pow(std::pow(z, p) + 1.0, 1.0 / p));
    }
    return best;
}

/// Tiny deterministic generator for property-test inputs.
struct Lcg {
    std::uint64_t s;
    double next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }
};

}  // namespace oracle
