#pragma once

// Block-parallel Monte Carlo kernels. Each kernel has an OpenMP path and a
// serial reference path; both produce bit-identical output because every
// block owns its RNG stream and partial results are merged in block order.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gls/rng.hpp"
#include "gls/rv_models.hpp"

namespace gls::kernels {

inline constexpr std::int64_t block_size = 1 << 16;

struct ExampleASampler {
    double operator()(Xoshiro256& g) const noexcept {
        return random_sign(g) * std::sqrt(2.0 * standard_exponential(g));
    }
};

struct GaussianSampler {
    double sigma;
    double operator()(Xoshiro256& g) const noexcept { return sigma * standard_normal(g); }
};

struct RademacherSampler {
    double operator()(Xoshiro256& g) const noexcept { return random_sign(g); }
};

struct WeibullSampler {
    double inv_shape;
    double scale;
    double operator()(Xoshiro256& g) const noexcept {
        const double e = standard_exponential(g);
        const double r = inv_shape == 1.0 ? e : std::pow(e, inv_shape);
        return random_sign(g) * scale * r;
    }
};

/// Inverse-CDF lookup over cumulative probabilities.
struct DiscreteSampler {
    std::vector<double> values;
    std::vector<double> cumulative;
    double operator()(Xoshiro256& g) const noexcept;
};

/// Uniform resampling of a stored sample.
struct BootstrapSampler {
    const std::vector<double>* samples;
    double operator()(Xoshiro256& g) const noexcept {
        const auto n = static_cast<unsigned __int128>(samples->size());
        const auto idx = static_cast<std::size_t>((n * g()) >> 64);
        return (*samples)[idx];
    }
};

using Sampler = std::variant<ExampleASampler, GaussianSampler, RademacherSampler,
                             WeibullSampler, DiscreteSampler, BootstrapSampler>;

/// The returned sampler may reference the model's storage (Empirical kind).
Sampler make_sampler(const RandomVariableModel& model);

/// What one draw means: scale * (X_1 + ... + X_terms).
struct DrawSpec {
    const Sampler* sampler;
    int terms = 1;
    double scale = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

DrawSpec draw_spec(const SumModel& sum, const Sampler& sampler, std::uint64_t seed,
                   std::uint64_t stream);

void fill(const DrawSpec& spec, std::span<double> out, Execution exec);

/// Per-p sums of |x|^p and |x|^{2p}.
struct PowerSums {
    std::vector<double> sum_p;
    std::vector<double> sum_2p;
    std::int64_t count = 0;
};

PowerSums abs_power_sums(std::span<const double> values, std::span<const double> p_grid,
                         Execution exec);

/// Streaming variant: draws count values without storing them.
PowerSums abs_power_sums(const DrawSpec& spec, std::int64_t count,
                         std::span<const double> p_grid, Execution exec);

/// Number of draws with x > u (or |x| > u when two_sided) for each u.
std::vector<std::int64_t> count_exceedances(const DrawSpec& spec, std::int64_t count,
                                            std::span<const double> u_grid, bool two_sided,
                                            Execution exec);

}  // namespace gls::kernels
