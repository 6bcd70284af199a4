#include "gls/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "gls/errors.hpp"
#include "gls/format.hpp"
#include "gls/kernels.hpp"
#include "gls/quadrature.hpp"

namespace gls {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must lie in [1, inf)");
}

// Evaluates f over xs with OpenMP; results land in grid order and the first
// exception (by index) is rethrown.
std::vector<double> parallel_map(std::span<const double> xs, const std::function<double(double)>& f) {
    const auto n = static_cast<std::int64_t>(xs.size());
    std::vector<double> out(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

double discrete_lp(const std::vector<Atom>& atoms, double p) {
    double vmax = 0.0;
    for (const auto& a : atoms)
        if (a.probability > 0) vmax = std::max(vmax, std::abs(a.value));
    if (vmax == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& a : atoms) s += a.probability * std::pow(std::abs(a.value) / vmax, p);
    return vmax * std::pow(s, 1.0 / p);
}

// ln E exp(lambda X) for a finite law, both signs, accurate near 0.
double discrete_mgf_log(const std::vector<Atom>& atoms, double lambda) {
    double vmax = 0.0;
    for (const auto& a : atoms) vmax = std::max(vmax, std::abs(a.value));
    double best = -kInf;
    for (double alpha : {1.0, -1.0}) {
        const double l = alpha * lambda;
        double r;
        if (std::abs(l) * vmax < 1.0) {
            double s = 0.0;
            for (const auto& a : atoms) s += a.probability * std::expm1(l * a.value);
            r = std::log1p(s);
        } else {
            double c = -kInf;
            for (const auto& a : atoms)
                if (a.probability > 0) c = std::max(c, l * a.value);
            double s = 0.0;
            for (const auto& a : atoms)
                if (a.probability > 0) s += a.probability * std::exp(l * a.value - c);
            r = c + std::log(s);
        }
        best = std::max(best, r);
    }
    return best;
}

double log_add_exp0(double a) { return a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

// ln E cosh(lambda X) for the symmetric Weibull law with shape > 1.
double weibull_mgf_log(const WeibullSym& w, double lambda) {
    const double m = w.shape, s = w.scale;
    const double l = std::abs(lambda);
    if (l == 0.0) return 0.0;
    auto log_g = [m, s](double t) {
        return std::log(m / s) + (m - 1.0) * std::log(t / s) - std::pow(t / s, m);
    };
    if (l * s <= 1.0) {
        auto integrand = [&](double t) {
            if (t <= 0.0) return 0.0;
            // 2 g(t) sinh^2(l t / 2), in logs so that the far tail gives 0, not inf * 0.
            const double x = 0.5 * l * t;
            const double log_sinh = x > 20.0 ? x - std::log(2.0) : std::log(std::sinh(x));
            return 2.0 * std::exp(log_g(t) + 2.0 * log_sinh);
        };
        const auto r = integrate_to_infinity(integrand, 0.0, "weibull mgf");
        return std::log1p(r.value);
    }
    // Peak of ln g(t) + l t (concave for m > 1); shift by it before integrating.
    double a = 0.0, b = s;
    auto h = [&](double t) { return t <= 0.0 ? -kInf : log_g(t) + l * t; };
    while (h(2.0 * b) > h(b)) b *= 2.0;
    b *= 2.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200 && b - a > 1e-12 * b; ++it) {
        const double c = b - gr * (b - a), d = a + gr * (b - a);
        if (h(c) < h(d)) a = c; else b = d;
    }
    const double peak = 0.5 * (a + b);
    const double shift = h(peak);
    auto integrand = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp(h(t) - shift) * 0.5 * (1.0 + std::exp(-2.0 * l * t));
    };
    const double left = integrate_finite(integrand, 0.0, peak, "weibull mgf").value;
    const double right = integrate_to_infinity(integrand, peak, "weibull mgf").value;
    return shift + std::log(left + right);
}

double example_a_mgf_log(double lambda) {
    const double l = std::abs(lambda);
    if (l == 0.0) return 0.0;
    // E cosh(lX) = 1 + l exp(l^2/2) sqrt(pi/2) erf(l/sqrt 2)
    const double a = std::log(l) + 0.5 * std::log(0.5 * std::numbers::pi) +
                     std::log(std::erf(l / std::numbers::sqrt2)) + 0.5 * l * l;
    return log_add_exp0(a);
}

double rademacher_mgf_log(double lambda) {
    const double l = std::abs(lambda);
    if (l < 1.0) {
        const double h = std::sinh(0.5 * l);
        return std::log1p(2.0 * h * h);
    }
    return l + std::log1p(std::exp(-2.0 * l)) - std::numbers::ln2;
}

bool is_even_integer(double p) { return p == std::floor(p) && std::fmod(p, 2.0) == 0.0; }

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::analytic: return "analytic";
        case Provenance::quadrature: return "quadrature";
        case Provenance::empirical: return "empirical";
    }
    return "analytic";
}

Provenance parse_provenance(std::string_view text) {
    if (text == "analytic") return Provenance::analytic;
    if (text == "quadrature") return Provenance::quadrature;
    if (text == "empirical") return Provenance::empirical;
    throw ParseError("unknown provenance '" + std::string(text) + "'");
}

double MomentProfile::at(double p) const {
    if (grid.empty() || p < grid.front() || p > grid.back())
        throw OutOfDomain("profile: p=" + format_double(p) + " outside tabulated range");
    const auto it = std::lower_bound(grid.begin(), grid.end(), p);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == p) return values[i];
    const double x0 = std::log(grid[i - 1]), x1 = std::log(grid[i]);
    const double w = (std::log(p) - x0) / (x1 - x0);
    if (values[i - 1] <= 0.0 || values[i] <= 0.0) return (1 - w) * values[i - 1] + w * values[i];
    return std::exp((1 - w) * std::log(values[i - 1]) + w * std::log(values[i]));
}

double MomentProfile::ci_at(double p) const {
    if (ci_halfwidths.empty()) return 0.0;
    if (grid.empty() || p < grid.front() || p > grid.back())
        throw OutOfDomain("profile: p outside tabulated range");
    const auto it = std::lower_bound(grid.begin(), grid.end(), p);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == p) return ci_halfwidths[i];
    const double w = (p - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1 - w) * ci_halfwidths[i - 1] + w * ci_halfwidths[i];
}

bool MomentProfile::is_monotone(double tol) const {
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        double slack = tol;
        if (provenance == Provenance::empirical && !ci_halfwidths.empty())
            slack += ci_halfwidths[i] + ci_halfwidths[i + 1];
        if (values[i + 1] < values[i] - slack) return false;
    }
    return true;
}

void write_profile_csv(std::ostream& out, const MomentProfile& profile) {
    out << "p,value,ci_halfwidth,provenance\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double ci = profile.ci_halfwidths.empty() ? 0.0 : profile.ci_halfwidths[i];
        out << format_double(profile.grid[i]) << ',' << format_double(profile.values[i]) << ','
            << format_double(ci) << ',' << to_string(profile.provenance) << '\n';
    }
}

MomentProfile read_profile_csv(std::istream& in) {
    MomentProfile prof;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header) {
            if (t != "p,value,ci_halfwidth,provenance") throw ParseError("bad profile header: " + line);
            header = true;
            continue;
        }
        const auto cols = split(t, ',');
        if (cols.size() != 4) throw ParseError("bad profile row: " + line);
        prof.grid.push_back(parse_double(cols[0]));
        prof.values.push_back(parse_double(cols[1]));
        prof.ci_halfwidths.push_back(parse_double(cols[2]));
        prof.provenance = parse_provenance(cols[3]);
    }
    if (!header) throw ParseError("profile: missing header");
    return prof;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0) || !(hi >= lo)) throw InvalidArgument("geometric_grid: need 0 < lo <= hi");
    if (count < 1) throw InvalidArgument("geometric_grid: count must be >= 1");
    if (count == 1 || lo == hi) return {lo};
    std::vector<double> g(static_cast<std::size_t>(count));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0) || !(hi >= lo)) throw InvalidArgument("linear_grid: need step > 0, hi >= lo");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double x = lo + i * step;
        if (x > hi + 1e-12 * std::max(1.0, std::abs(hi))) break;
        g.push_back(x);
    }
    return g;
}

// ---------------------------------------------------------------------------

double lp_norm(const RandomVariableModel& model, double p) {
    check_p(p);
    return std::visit(
        overloaded{
            [p](const ExampleA&) {
                return std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * p + 1.0) / p);
            },
            [p](const Gaussian& g) {
                return g.sigma * std::exp((0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) -
                                           0.5 * std::log(std::numbers::pi)) / p);
            },
            [](const Rademacher&) { return 1.0; },
            [p](const WeibullSym& w) { return w.scale * std::exp(std::lgamma(1.0 + p / w.shape) / p); },
            [p](const FiniteDiscrete& d) { return discrete_lp(d.atoms, p); },
            [p, &model](const Empirical& e) {
                const double limit = std::log2(static_cast<double>(e.samples.size()));
                if (p > limit)
                    throw DomainError("empirical moment refused: p=" + format_double(p) +
                                      " exceeds log2(sample count)=" + format_double(limit));
                return discrete_lp(model.atoms(), p);
            }},
        model.kind());
}

double lp_norm_quadrature(const RandomVariableModel& model, double p) {
    check_p(p);
    if (!model.has_density()) throw UnsupportedKind("lp_norm_quadrature: law has no density");
    // Symmetric densities: E|X|^p = 2 * int_0^inf x^p f(x) dx.
    auto integrand = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double f = density(model, x);
        if (f == 0.0) return 0.0;
        return 2.0 * std::exp(p * std::log(x) + std::log(f));
    };
    const auto r = integrate_to_infinity(integrand, 0.0, "lp_norm");
    return std::pow(r.value, 1.0 / p);
}

std::uint64_t joint_outcome_count(const SumModel& sum) {
    if (!sum.base.is_discrete()) return UINT64_MAX;
    std::uint64_t k = 0;
    for (const auto& a : sum.base.atoms())
        if (a.probability > 0) ++k;
    std::uint64_t total = 1;
    for (int i = 0; i < sum.n; ++i) {
        if (k != 0 && total > UINT64_MAX / k) return UINT64_MAX;
        total *= k;
    }
    return total;
}

std::vector<Atom> enumerate_sum(const SumModel& sum) {
    if (!sum.base.is_discrete()) throw UnsupportedKind("enumerate_sum: base law is not discrete");
    if (joint_outcome_count(sum) > kMaxEnumeration)
        throw DomainError("enumerate_sum: more than 2^20 joint outcomes");
    std::vector<Atom> atoms;
    for (const auto& a : sum.base.atoms())
        if (a.probability > 0) atoms.push_back(a);
    const std::size_t k = atoms.size();
    const double scale = sum.scale();
    std::map<double, double> law;
    std::vector<std::size_t> idx(static_cast<std::size_t>(sum.n), 0);
    while (true) {
        double s = 0.0, prob = 1.0;
        for (std::size_t i : idx) {
            s += atoms[i].value;
            prob *= atoms[i].probability;
        }
        law[scale * s] += prob;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == k) idx[pos++] = 0;
        if (pos == idx.size()) break;
    }
    std::vector<Atom> out;
    out.reserve(law.size());
    for (const auto& [v, pr] : law) out.push_back({v, pr});
    return out;
}

std::vector<double> moments_of_sum(const SumModel& sum, int max_order) {
    if (max_order < 0) throw InvalidArgument("moments_of_sum: negative order");
    const auto K = static_cast<std::size_t>(max_order);
    const double c = sum.scale();
    std::vector<double> mu(K + 1);
    for (std::size_t j = 0; j <= K; ++j)
        mu[j] = raw_moment(sum.base, static_cast<int>(j)) * std::pow(c, static_cast<double>(j));
    // binom[k][j]
    std::vector<std::vector<double>> binom(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        binom[k].assign(k + 1, 1.0);
        for (std::size_t j = 1; j < k; ++j) binom[k][j] = binom[k - 1][j - 1] + binom[k - 1][j];
    }
    std::vector<double> m = mu;
    for (int i = 1; i < sum.n; ++i) {
        std::vector<double> next(K + 1, 0.0);
        for (std::size_t k = 0; k <= K; ++k)
            for (std::size_t j = 0; j <= k; ++j) next[k] += binom[k][j] * m[k - j] * mu[j];
        m = std::move(next);
    }
    return m;
}

double lp_norm(const SumModel& sum, double p) {
    check_p(p);
    if (sum.n == 1) return sum.scale() * lp_norm(sum.base, p);
    if (const auto* g = std::get_if<Gaussian>(&sum.base.kind())) {
        const double sigma = g->sigma * std::sqrt(static_cast<double>(sum.n)) * sum.scale();
        return lp_norm(RandomVariableModel::gaussian(sigma), p);
    }
    if (sum.base.is_analytic() && sum.base.is_discrete() && joint_outcome_count(sum) <= kMaxEnumeration)
        return discrete_lp(enumerate_sum(sum), p);
    if (sum.base.is_analytic() && is_even_integer(p)) {
        const auto m = moments_of_sum(sum, static_cast<int>(p));
        return std::pow(m.back(), 1.0 / p);
    }
    throw UnsupportedKind("lp_norm: no exact route for " + sum.label() + " at p=" + format_double(p) +
                          "; use a sampled profile");
}

MomentProfile natural_function(const RandomVariableModel& model, std::span<const double> grid) {
    MomentProfile prof;
    prof.grid.assign(grid.begin(), grid.end());
    prof.values = parallel_map(grid, [&](double p) { return lp_norm(model, p); });
    prof.ci_halfwidths.assign(grid.size(), 0.0);
    prof.provenance = model.is_analytic() ? Provenance::analytic : Provenance::empirical;
    return prof;
}

MomentProfile natural_function(const SumModel& sum, std::span<const double> grid) {
    MomentProfile prof;
    prof.grid.assign(grid.begin(), grid.end());
    prof.values = parallel_map(grid, [&](double p) { return lp_norm(sum, p); });
    prof.ci_halfwidths.assign(grid.size(), 0.0);
    prof.provenance = Provenance::analytic;
    return prof;
}

namespace {

MomentProfile profile_from_sums(const kernels::PowerSums& sums, std::span<const double> grid) {
    const double n = static_cast<double>(sums.count);
    MomentProfile prof;
    prof.grid.assign(grid.begin(), grid.end());
    prof.provenance = Provenance::empirical;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = grid[k];
        const double m = sums.sum_p[k] / n;
        const double var = std::max(0.0, sums.sum_2p[k] / n - m * m) * n / std::max(1.0, n - 1.0);
        const double se = std::sqrt(var / n);
        const double norm = std::pow(m, 1.0 / p);
        const double sigma = m > 0 ? norm / (p * m) * se : 0.0;
        prof.values.push_back(norm);
        prof.ci_halfwidths.push_back(3.0 * sigma);
    }
    return prof;
}

void check_empirical_grid(std::span<const double> grid, std::int64_t count) {
    const double limit = std::log2(static_cast<double>(count));
    for (double p : grid) {
        check_p(p);
        if (p > limit)
            throw DomainError("empirical moment refused: p=" + format_double(p) +
                              " exceeds log2(sample count)=" + format_double(limit));
    }
}

}  // namespace

MomentProfile sampled_profile(std::span<const double> values, std::span<const double> grid,
                              Execution exec) {
    if (values.empty()) throw InvalidArgument("sampled_profile: no samples");
    check_empirical_grid(grid, static_cast<std::int64_t>(values.size()));
    return profile_from_sums(kernels::abs_power_sums(values, grid, exec), grid);
}

MomentProfile sampled_profile(const SumModel& sum, std::span<const double> grid, std::int64_t count,
                              std::uint64_t seed, Execution exec, std::uint64_t stream) {
    check_empirical_grid(grid, count);
    const auto sampler = kernels::make_sampler(sum.base);
    const auto spec = kernels::draw_spec(sum, sampler, seed, stream);
    return profile_from_sums(kernels::abs_power_sums(spec, count, grid, exec), grid);
}

// ---------------------------------------------------------------------------

double mgf_log(const RandomVariableModel& model, double lambda) {
    if (lambda == 0.0) return 0.0;
    return std::visit(
        overloaded{
            [lambda](const ExampleA&) { return example_a_mgf_log(lambda); },
            [lambda](const Gaussian& g) { return 0.5 * lambda * lambda * g.sigma * g.sigma; },
            [lambda](const Rademacher&) { return rademacher_mgf_log(lambda); },
            [lambda](const WeibullSym& w) {
                if (w.shape < 1.0) return kInf;
                if (w.shape == 1.0) {
                    const double x = lambda * w.scale;
                    return std::abs(x) < 1.0 ? -std::log1p(-x * x) : kInf;
                }
                return weibull_mgf_log(w, lambda);
            },
            [lambda](const FiniteDiscrete& d) { return discrete_mgf_log(d.atoms, lambda); },
            [lambda, &model](const Empirical&) { return discrete_mgf_log(model.atoms(), lambda); }},
        model.kind());
}

double mgf_log(const SumModel& sum, double lambda) {
    // iid terms: the max over the sign commutes with the n-fold sum.
    const double v = mgf_log(sum.base, lambda * sum.scale());
    return std::isinf(v) ? v : sum.n * v;
}

double mgf_radius(const SumModel& sum) { return mgf_radius(sum.base) / sum.scale(); }

PhiFunction::PhiFunction(std::function<double(double)> fn, double lambda0, Form form, std::string name)
    : fn_(std::move(fn)), lambda0_(lambda0), form_(form), name_(std::move(name)) {}

PhiFunction PhiFunction::quadratic(double lambda0) {
    if (!(lambda0 > 0)) throw InvalidArgument("quadratic phi: lambda0 must be > 0");
    return {[](double l) { return 0.5 * l * l; }, lambda0, Form::quadratic,
            std::isinf(lambda0) ? "phi2" : "phi2[lambda0=" + format_double(lambda0) + "]"};
}

PhiFunction PhiFunction::closed_form(const std::string& id, std::vector<double> params) {
    if (id == "quadratic") {
        const double c = params.empty() ? 1.0 : params[0];
        if (!(c > 0)) throw InvalidArgument("quadratic: coefficient must be > 0");
        return {[c](double l) { return 0.5 * c * l * l; }, kInf, Form::closed_form,
                "quadratic[" + format_double(c) + "]"};
    }
    if (id == "log_cosh")
        return {rademacher_mgf_log, kInf, Form::closed_form, "log_cosh"};
    if (id == "laplace") {
        const double s = params.empty() ? 1.0 : params[0];
        if (!(s > 0)) throw InvalidArgument("laplace: scale must be > 0");
        return {[s](double l) {
                    const double x = l * s;
                    return std::abs(x) < 1.0 ? -std::log1p(-x * x) : kInf;
                },
                1.0 / s, Form::closed_form, "laplace[" + format_double(s) + "]"};
    }
    throw InvalidArgument("unknown closed-form phi '" + id + "'");
}

PhiFunction PhiFunction::natural_of(const RandomVariableModel& model) {
    return {[model](double l) { return mgf_log(model, l); }, mgf_radius(model), Form::natural,
            "natural(" + model.label() + ")"};
}

PhiFunction PhiFunction::natural_of(const SumModel& sum) {
    return {[sum](double l) { return mgf_log(sum, l); }, mgf_radius(sum), Form::natural,
            "natural(" + sum.label() + ")"};
}

double PhiFunction::operator()(double lambda) const {
    const double a = std::abs(lambda);
    if (a > lambda0_) return kInf;
    if (a == 0.0) return 0.0;
    return fn_(a);
}

ConvexFunction tabulated_convex(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw InvalidArgument("tabulated_convex: need matching grid and values, >= 2 points");
    if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidArgument("tabulated_convex: grid unsorted");
    const double top = grid.back();
    return {[grid = std::move(grid), values = std::move(values)](double x) {
                if (x < grid.front() || x > grid.back()) return kInf;
                auto it = std::lower_bound(grid.begin(), grid.end(), x);
                auto i = static_cast<std::size_t>(it - grid.begin());
                if (grid[i] == x) return values[i];
                const double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
                return (1 - w) * values[i - 1] + w * values[i];
            },
            top};
}

double young_fenchel(const ConvexFunction& g, double u) {
    if (!(u >= 0)) throw DomainError("young_fenchel: u must be >= 0");
    const double top = std::min(g.lambda0, kLambdaCap);
    auto h = [&](double l) {
        const double v = g.fn(l);
        return std::isinf(v) ? -kInf : l * u - v;
    };
    double a = 0.0, b = top;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double hc = h(c), hd = h(d);
    while (b - a > 1e-10) {
        if (hc < hd) {
            a = c;
            c = d;
            hc = hd;
            d = a + gr * (b - a);
            hd = h(d);
        } else {
            b = d;
            d = c;
            hd = hc;
            c = b - gr * (b - a);
            hc = h(c);
        }
    }
    double best = std::max({h(0.0), h(0.5 * (a + b)), hc, hd});
    best = std::max(best, h(top));
    return std::max(best, 0.0);
}

double young_fenchel(const PhiFunction& phi, double u) {
    return young_fenchel(ConvexFunction{[&phi](double l) { return phi(l); }, phi.lambda0()}, u);
}

std::vector<double> default_lambda_grid(double lambda0, int count) {
    if (!(lambda0 > 0)) throw Infeasible("no finite moment generating function near the origin");
    const double top = std::min(lambda0, kLambdaCap);
    // Stay strictly inside an open finiteness interval.
    const double hi = std::isinf(lambda0) || lambda0 > kLambdaCap ? top : top * (1.0 - 1e-9);
    const double lo = std::min(1e-3, hi * 1e-3);
    return geometric_grid(lo, hi, count);
}

BPhiNorm bphi_norm(const std::function<double(double)>& log_mgf, const PhiFunction& phi,
                   std::span<const double> lambda_grid) {
    std::vector<double> owned;
    if (lambda_grid.empty()) {
        owned = default_lambda_grid(phi.lambda0());
        lambda_grid = owned;
    }
    const std::vector<double> lhs = parallel_map(lambda_grid, log_mgf);
    auto feasible = [&](double tau) {
        for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
            const double rhs = phi(lambda_grid[i] * tau);
            if (std::isinf(rhs)) continue;
            if (lhs[i] > rhs + 1e-12 * std::abs(rhs)) return false;
        }
        return true;
    };
    if (!feasible(kTauCap))
        throw Infeasible("no tau <= 1e3 satisfies the B(phi) condition for " + phi.name());
    double lo = 0.0, hi = kTauCap;
    if (feasible(0.0)) return {0.0, phi, kTauTolerance};
    while (hi - lo > kTauTolerance) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return {hi, phi, kTauTolerance};
}

BPhiNorm bphi_norm(const RandomVariableModel& model, const PhiFunction& phi,
                   std::span<const double> lambda_grid) {
    return bphi_norm([&model](double l) { return mgf_log(model, l); }, phi, lambda_grid);
}

BPhiNorm bphi_norm(const SumModel& sum, const PhiFunction& phi, std::span<const double> lambda_grid) {
    return bphi_norm([&sum](double l) { return mgf_log(sum, l); }, phi, lambda_grid);
}

double subgaussian_sum_norm_upper(std::span<const double> norms) {
    double s = 0.0;
    for (double v : norms) {
        if (!(v >= 0)) throw InvalidArgument("subgaussian_sum_norm_upper: norms must be >= 0");
        s += v * v;
    }
    return std::sqrt(s);
}

}  // namespace gls
