#include "gls/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "gls/errors.hpp"

namespace gls::kernels {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t block_count(std::int64_t count) { return (count + block_size - 1) / block_size; }

void fill_block(const DrawSpec& spec, std::int64_t block, std::span<double> out) {
    Xoshiro256 g(derive_seed(spec.seed, spec.stream, static_cast<std::uint64_t>(block)));
    std::visit(
        [&](const auto& draw) {
            for (double& v : out) {
                double s = 0.0;
                for (int j = 0; j < spec.terms; ++j) s += draw(g);
                v = spec.scale * s;
            }
        },
        *spec.sampler);
}

std::span<double> block_slice(std::span<double> out, std::int64_t block) {
    const auto begin = block * block_size;
    const auto len = std::min<std::int64_t>(block_size, static_cast<std::int64_t>(out.size()) - begin);
    return out.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(len));
}

void accumulate_block(std::span<const double> values, std::span<const double> p_grid,
                      double* sum_p, double* sum_2p) {
    const std::size_t np = p_grid.size();
    for (double x : values) {
        const double a = std::abs(x);
        if (a == 0.0) continue;
        const double la = std::log(a);
        for (std::size_t k = 0; k < np; ++k) {
            const double t = std::exp(p_grid[k] * la);
            sum_p[k] += t;
            sum_2p[k] += t * t;
        }
    }
}

PowerSums merge(const std::vector<double>& partial_p, const std::vector<double>& partial_2p,
                std::int64_t blocks, std::size_t np, std::int64_t count) {
    PowerSums out;
    out.sum_p.assign(np, 0.0);
    out.sum_2p.assign(np, 0.0);
    out.count = count;
    for (std::int64_t b = 0; b < blocks; ++b)
        for (std::size_t k = 0; k < np; ++k) {
            out.sum_p[k] += partial_p[static_cast<std::size_t>(b) * np + k];
            out.sum_2p[k] += partial_2p[static_cast<std::size_t>(b) * np + k];
        }
    return out;
}

}  // namespace

double DiscreteSampler::operator()(Xoshiro256& g) const noexcept {
    const double u = uniform01(g);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return values[static_cast<std::size_t>(it - cumulative.begin())];
}

Sampler make_sampler(const RandomVariableModel& model) {
    return std::visit(
        overloaded{[](const ExampleA&) -> Sampler { return ExampleASampler{}; },
                   [](const Gaussian& g) -> Sampler { return GaussianSampler{g.sigma}; },
                   [](const Rademacher&) -> Sampler { return RademacherSampler{}; },
                   [](const WeibullSym& w) -> Sampler {
                       return WeibullSampler{1.0 / w.shape, w.scale};
                   },
                   [](const FiniteDiscrete& d) -> Sampler {
                       DiscreteSampler s;
                       double c = 0.0;
                       for (const auto& a : d.atoms) {
                           if (a.probability <= 0) continue;
                           c += a.probability;
                           s.values.push_back(a.value);
                           s.cumulative.push_back(c);
                       }
                       s.cumulative.back() = 1.0;
                       return s;
                   },
                   [](const Empirical& e) -> Sampler { return BootstrapSampler{&e.samples}; }},
        model.kind());
}

DrawSpec draw_spec(const SumModel& sum, const Sampler& sampler, std::uint64_t seed,
                   std::uint64_t stream) {
    return DrawSpec{&sampler, sum.n, sum.scale(), seed, stream};
}

void fill(const DrawSpec& spec, std::span<double> out, Execution exec) {
    const std::int64_t blocks = block_count(static_cast<std::int64_t>(out.size()));
    if (exec == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) fill_block(spec, b, block_slice(out, b));
        return;
    }
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < blocks; ++b) fill_block(spec, b, block_slice(out, b));
}

PowerSums abs_power_sums(std::span<const double> values, std::span<const double> p_grid,
                         Execution exec) {
    const auto count = static_cast<std::int64_t>(values.size());
    const std::int64_t blocks = block_count(count);
    const std::size_t np = p_grid.size();
    std::vector<double> partial_p(static_cast<std::size_t>(blocks) * np, 0.0);
    std::vector<double> partial_2p(partial_p.size(), 0.0);
    auto body = [&](std::int64_t b) {
        const auto begin = b * block_size;
        const auto len = std::min(block_size, count - begin);
        accumulate_block(values.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(len)),
                         p_grid, partial_p.data() + b * static_cast<std::int64_t>(np),
                         partial_2p.data() + b * static_cast<std::int64_t>(np));
    };
    if (exec == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    }
    return merge(partial_p, partial_2p, blocks, np, count);
}

PowerSums abs_power_sums(const DrawSpec& spec, std::int64_t count, std::span<const double> p_grid,
                         Execution exec) {
    if (count < 1) throw InvalidArgument("abs_power_sums: count must be >= 1");
    const std::int64_t blocks = block_count(count);
    const std::size_t np = p_grid.size();
    std::vector<double> partial_p(static_cast<std::size_t>(blocks) * np, 0.0);
    std::vector<double> partial_2p(partial_p.size(), 0.0);
    auto body = [&](std::int64_t b) {
        const auto len = std::min(block_size, count - b * block_size);
        std::vector<double> buf(static_cast<std::size_t>(len));
        fill_block(spec, b, buf);
        accumulate_block(buf, p_grid, partial_p.data() + b * static_cast<std::int64_t>(np),
                         partial_2p.data() + b * static_cast<std::int64_t>(np));
    };
    if (exec == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    }
    return merge(partial_p, partial_2p, blocks, np, count);
}

std::vector<std::int64_t> count_exceedances(const DrawSpec& spec, std::int64_t count,
                                            std::span<const double> u_grid, bool two_sided,
                                            Execution exec) {
    if (count < 1) throw InvalidArgument("count_exceedances: count must be >= 1");
    const std::int64_t blocks = block_count(count);
    const std::size_t nu = u_grid.size();
    std::vector<std::int64_t> partial(static_cast<std::size_t>(blocks) * nu, 0);
    auto body = [&](std::int64_t b) {
        const auto len = std::min(block_size, count - b * block_size);
        std::vector<double> buf(static_cast<std::size_t>(len));
        fill_block(spec, b, buf);
        std::int64_t* row = partial.data() + b * static_cast<std::int64_t>(nu);
        for (double x : buf) {
            const double v = two_sided ? std::abs(x) : x;
            for (std::size_t k = 0; k < nu; ++k) row[k] += v > u_grid[k];
        }
    };
    if (exec == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    }
    std::vector<std::int64_t> out(nu, 0);
    for (std::int64_t b = 0; b < blocks; ++b)
        for (std::size_t k = 0; k < nu; ++k) out[k] += partial[static_cast<std::size_t>(b) * nu + k];
    return out;
}

}  // namespace gls::kernels
