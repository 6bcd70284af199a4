#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gls/moment_engine.hpp"
#include "gls/rv_models.hpp"

namespace gls {

// ---- upper bounds --------------------------------------------------------

/// exp(-nu(u / tau)) with tau = ||xi||_{B(phi)} and nu the conjugate of phi.
double tail_upper_chernoff(const RandomVariableModel& model, const PhiFunction& phi, double u);
double tail_upper_chernoff(const SumModel& sum, const PhiFunction& phi, double u);

/// Same bound for a subgaussian sum, with tau taken from the sum-norm
/// estimate sqrt(sum ||X_i||_Sub^2) (times the normalization).
double tail_upper_subgaussian_sum(const SumModel& sum, double u);

/// exp(-nu(u / tau)) for a precomputed tau.
double chernoff_from_norm(const PhiFunction& phi, double tau, double u);

// ---- lower bounds --------------------------------------------------------

/// Paley-Zygmund on |S|^p: with t = u / |S|_p < 1,
/// P(|S| > u) >= (1 - t^p)^2 |S|_p^{2p} / |S|_{2p}^{2p}; 0 when t >= 1.
double paley_zygmund_lower(double u, double p, double norm_p, double norm_2p);

/// The bound above with |S|_p and |S|_{2p} read from a profile that
/// contains both (two-sided tail P(|S| > u)).
double tail_lower_from_moments(const MomentProfile& profile, double u, double p);

struct BestLowerBound {
    double value = 0.0;
    double p = 0.0;
};

/// Maximum over every profile grid point p whose 2p is also tabulated.
BestLowerBound tail_lower_best(const MomentProfile& profile, double u);

/// Exact |S|_p at p = 2, 4, ..., max_even.
MomentProfile even_moment_profile(const SumModel& sum, int max_even = 64);

// ---- envelopes -----------------------------------------------------------

enum class TailFamily { subgaussian, weibull };

struct EnvelopeFamily {
    TailFamily kind = TailFamily::subgaussian;
    double m = 2.0;

    /// 2 for subgaussian, min(m, 2) for weibull(m).
    double exponent() const;
    std::string name() const;
};

/// Two exponential curves bracketing the one-sided tail P(S > u):
/// upper = exp(-C_upper u^e), lower = exp(-C_lower u^e), C_upper <= C_lower.
struct TailEnvelope {
    std::string label;
    EnvelopeFamily family;
    std::vector<double> u_grid;
    std::vector<double> lower;
    std::vector<double> upper;
    /// Bound curves the constants were fitted to.
    std::vector<double> computed_lower;
    std::vector<double> computed_upper;
    /// C_upper, C_lower, exponent, exponent_computed and the short
    /// aliases (C4/C3 for subgaussian, C10/C9 for weibull).
    std::map<std::string, double> constants;
    double valid_lo = 1.0;
    double valid_hi = 3.0;

    double exponent() const { return constants.at("exponent"); }
    double c_upper() const { return constants.at("C_upper"); }
    double c_lower() const { return constants.at("C_lower"); }
    bool satisfies_invariants() const;
};

inline constexpr double kExponentTolerance = 0.15;
/// Highest exact even moment used by the envelope's lower curve.
inline constexpr int kLowerMaxMoment = 128;

/// {1.0, 1.25, ..., 3.0}.
std::vector<double> default_u_grid();

/// Tail exponent m of the base law from the growth p^{1/m} of its natural
/// function (secant of log |X|_p against log p between p = 64 and 256).
double tail_exponent_estimate(const RandomVariableModel& base);

/// Requires a symmetric base law and u_grid within [1, inf).
TailEnvelope fit_envelope(const SumModel& sum, EnvelopeFamily family,
                          std::span<const double> u_grid = {});

/// CSV `u,lower,upper,empirical,ci_halfwidth` preceded by a
/// `# C_upper=..., C_lower=..., exponent=...` line. Empirical columns may be
/// empty, in which case they are written as nan.
void write_envelope_csv(std::ostream& out, const TailEnvelope& env,
                        std::span<const double> empirical = {},
                        std::span<const double> ci_halfwidth = {});

struct EnvelopeTable {
    std::vector<double> u, lower, upper, empirical, ci_halfwidth;
    std::map<std::string, double> constants;
};

EnvelopeTable read_envelope_csv(std::istream& in);

}  // namespace gls
