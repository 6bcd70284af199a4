#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gls/gls_calculus.hpp"
#include "gls/rv_models.hpp"
#include "gls/tail_engine.hpp"

namespace gls {

enum class Verdict { holds, holds_within_noise, violated };

std::string to_string(Verdict v);

struct VerificationReport {
    std::string inequality;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    /// Combined standard error of lhs - rhs (0 for exact evaluations).
    double sigma = 0.0;
    Verdict verdict = Verdict::holds;
    std::uint64_t seed = 0;
    /// Draws per side, or the number of enumerated outcomes.
    std::int64_t count = 0;
    bool exact = false;
    /// Violations of exempt checks do not fail a run.
    bool exempt = false;
};

/// Below this, a margin counts as zero even for exact evaluations.
inline constexpr double kNoiseFloor = 1e-12;

/// holds if margin >= 3 sigma, violated if margin <= -3 sigma, else
/// holds-within-noise; sigma is floored at kNoiseFloor / 3.
Verdict classify(double margin, double sigma);

inline constexpr std::int64_t kDefaultCount = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// |X + Y|_q >= (|X|_q^q + |Y|_q^q)^{1/q}. Exact when both laws are finite
/// and analytic, Monte Carlo otherwise (X on stream 0, Y on stream 1).
VerificationReport verify_naor_pair(const RandomVariableModel& x, const RandomVariableModel& y,
                                    double q, std::int64_t count = kDefaultCount,
                                    std::uint64_t seed = kDefaultSeed);

/// Two reports: |X_1 + ... + X_n|_q >= n^{1/q} |X_1|_q, and the normalized
/// form |n^{-1/2} sum X_i|_q >= n^{1/q - 1/2} |X_1|_q.
std::vector<VerificationReport> verify_naor_n(const RandomVariableModel& x, int n, double q,
                                              std::int64_t count = kDefaultCount,
                                              std::uint64_t seed = kDefaultSeed);

/// Restricted p-range used when the anti-norm of a sum is estimated from
/// samples (keeps p well below log2 of the sample size).
inline constexpr PRange kSampledRange{2.0, 16.0};

/// V(X_1 + ... + X_n) >= kappa_b(p) (sum V(X_i)^p)^{1/p} with b = psi.b().
/// The left side comes from the exact sum profile when one exists, else from
/// a sampled profile on kSampledRange; V(X_i) is computed on the same range.
VerificationReport verify_sum_anti_norm(const RandomVariableModel& x, const GeneratingFunction& psi,
                                    int n, double p, std::int64_t count = kDefaultCount,
                                    std::uint64_t seed = kDefaultSeed);

/// V(X + Y) >= V(X) + V(Y). Exempt: the inequality can fail and the check
/// only reports it.
VerificationReport verify_anti_triangle(const RandomVariableModel& x, const RandomVariableModel& y,
                                        const GeneratingFunction& psi,
                                        std::int64_t count = kDefaultCount,
                                        std::uint64_t seed = kDefaultSeed);

struct EnvelopeRow {
    double u = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double empirical = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    Verdict verdict = Verdict::holds;
};

struct EnvelopeCheck {
    std::vector<EnvelopeRow> rows;
    /// Worst row, as a report.
    VerificationReport overall;
    /// The CI at the largest u is wider than the envelope gap there.
    bool insufficient_samples = false;
};

/// Wilson score interval for k successes in n trials.
struct WilsonInterval {
    double lo;
    double hi;
};
WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z = 3.0);

/// Empirical one-sided tail P(S > u) on the envelope's u-grid, with a z = 3
/// Wilson interval per u. A row is violated when its interval misses
/// [lower, upper], holds when it lies inside.
EnvelopeCheck verify_envelope(const TailEnvelope& envelope, const SumModel& sum,
                              std::int64_t count = 10'000'000, std::uint64_t seed = kDefaultSeed);

/// exp(-nu(u / ||X||)) >= P(X > u) for the phi2 norm of X (Wilson upper end).
VerificationReport verify_chernoff(const RandomVariableModel& x, double u,
                                   std::int64_t count = 10'000'000,
                                   std::uint64_t seed = kDefaultSeed);

/// ||n^{-1/2} sum X_i||_{phi2} equals ||X_1||_{phi2} within tol.
VerificationReport verify_subgaussian_stability(const RandomVariableModel& x, int n,
                                                double tol = 1e-6);

struct SuiteOptions {
    std::uint64_t seed = kDefaultSeed;
    /// Draws for moment checks; tail checks use 10x this.
    std::int64_t count = kDefaultCount;
    /// Equality tolerance of the norm-stability checks.
    double tolerance = 1e-6;
};

/// The shipped instance list, in a fixed order.
std::vector<VerificationReport> run_suite(const SuiteOptions& options = {});

/// True when some non-exempt report is violated.
bool has_violation(const std::vector<VerificationReport>& reports);

/// CSV `inequality,instance,lhs,rhs,margin,sigma,verdict,seed,count`.
void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports);
/// One human-readable line per report.
void write_reports_text(std::ostream& out, const std::vector<VerificationReport>& reports);

/// Caps OpenMP parallelism; values < 1 are ignored.
void set_worker_count(int workers);

}  // namespace gls
