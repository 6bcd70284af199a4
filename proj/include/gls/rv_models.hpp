#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gls {

// Model kinds. Every analytic kind is symmetric about zero.

/// Density 0.5 |x| exp(-x^2/2).
struct ExampleA {};

struct Gaussian {
    double sigma = 1.0;
};

struct Rademacher {};

/// Symmetric Weibull: |X| = scale * E^{1/shape} with E standard exponential,
/// so P(|X| > u) = exp(-(u/scale)^shape) exactly.
struct WeibullSym {
    double shape = 1.0;
    double scale = 1.0;
};

struct Atom {
    double value = 0.0;
    double probability = 0.0;
};

struct FiniteDiscrete {
    std::vector<Atom> atoms;
};

/// Equal-weight law on the stored (already centered) samples.
struct Empirical {
    std::vector<double> samples;
};

using ModelKind =
    std::variant<ExampleA, Gaussian, Rademacher, WeibullSym, FiniteDiscrete, Empirical>;

/// A centered real random variable. Immutable after construction.
class RandomVariableModel {
  public:
    static RandomVariableModel example_a();
    static RandomVariableModel gaussian(double sigma = 1.0);
    static RandomVariableModel rademacher();
    static RandomVariableModel weibull_sym(double shape, double scale = 1.0);
    /// Throws InvalidArgument unless probabilities are >= 0, sum to 1 and the
    /// mean is zero (all within 1e-12).
    static RandomVariableModel finite_discrete(std::vector<Atom> atoms);
    /// Subtracts the sample mean.
    static RandomVariableModel empirical(std::vector<double> samples, std::string label = {});

    const ModelKind& kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }

    /// ExampleA, Gaussian or WeibullSym: the law has a density.
    bool has_density() const noexcept;
    /// All absolute moments have a closed form (ExampleA, Gaussian,
    /// Rademacher, WeibullSym, FiniteDiscrete).
    bool is_analytic() const noexcept;
    bool is_discrete() const noexcept;
    bool is_symmetric() const;

    /// Atoms of a Rademacher, FiniteDiscrete or Empirical law.
    std::vector<Atom> atoms() const;

    /// Canonical text form accepted by parse_model().
    std::string spec() const;

  private:
    RandomVariableModel(ModelKind kind, std::string label);

    ModelKind kind_;
    std::string label_;
};

enum class Normalization { none, inv_sqrt_n };

/// Sum of n iid copies of base, optionally scaled by n^{-1/2}.
struct SumModel {
    RandomVariableModel base;
    int n = 1;
    Normalization normalization = Normalization::inv_sqrt_n;

    SumModel(RandomVariableModel base_model, int terms,
             Normalization norm = Normalization::inv_sqrt_n);

    /// Factor applied to each summand.
    double scale() const noexcept;
    std::string label() const;
};

struct SampleSet {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string model_label;
};

enum class Execution { serial, parallel };

double density(const RandomVariableModel& model, double x);

/// P(X <= x) for density kinds.
double cdf(const RandomVariableModel& model, double x);

/// P(|X| > t); defined for every analytic kind.
double abs_tail(const RandomVariableModel& model, double t);

/// E X^k (raw, signed).
double raw_moment(const RandomVariableModel& model, int k);

/// Radius lambda0 of the open interval on which E exp(lambda X) is finite.
double mgf_radius(const RandomVariableModel& model);

SampleSet sample(const RandomVariableModel& model, std::int64_t count, std::uint64_t seed,
                 Execution exec = Execution::parallel, std::uint64_t stream = 0);

SampleSet sample_sum(const SumModel& sum, std::int64_t count, std::uint64_t seed,
                     Execution exec = Execution::parallel, std::uint64_t stream = 0);

/// Text forms: "examplea", "gaussian:sigma=S", "rademacher",
/// "weibull:m=M,scale=S", "discrete:v1@p1,v2@p2,...", "empirical:PATH".
RandomVariableModel parse_model(std::string_view text);

void write_samples(const std::filesystem::path& path, const SampleSet& set);
std::vector<double> read_samples(const std::filesystem::path& path);

}  // namespace gls
