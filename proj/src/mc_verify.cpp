#include "gls/mc_verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <omp.h>

#include "gls/errors.hpp"
#include "gls/format.hpp"
#include "gls/kernels.hpp"

namespace gls {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::holds_within_noise: return "holds-within-noise";
        case Verdict::violated: return "violated";
    }
    return "?";
}

Verdict classify(double margin, double sigma) {
    const double band = std::max(3.0 * sigma, kNoiseFloor);
    if (margin >= band) return Verdict::holds;
    if (margin <= -band) return Verdict::violated;
    return Verdict::holds_within_noise;
}

namespace {

bool finite_law(const RandomVariableModel& m) { return m.is_discrete() && m.is_analytic(); }

/// Law of X + Y for independent finite X, Y.
RandomVariableModel convolve(const RandomVariableModel& x, const RandomVariableModel& y) {
    std::map<double, double> law;
    for (const auto& a : x.atoms())
        for (const auto& b : y.atoms()) law[a.value + b.value] += a.probability * b.probability;
    std::vector<Atom> atoms;
    atoms.reserve(law.size());
    for (const auto& [v, pr] : law) atoms.push_back({v, pr});
    return RandomVariableModel::finite_discrete(std::move(atoms));
}

/// A sum whose |S|_p is available exactly at every p.
bool exact_sum(const SumModel& sum) {
    if (!sum.base.is_analytic()) return false;
    if (sum.n == 1 || std::holds_alternative<Gaussian>(sum.base.kind())) return true;
    return sum.base.is_discrete() && joint_outcome_count(sum) <= kMaxEnumeration;
}

/// Plug-in |Z|_q for a sample, with its standard error.
struct Estimate {
    double value;
    double sigma;
};

Estimate sampled_norm(std::span<const double> values, double q) {
    const std::vector<double> grid{q};
    const auto prof = sampled_profile(values, grid);
    return {prof.values[0], prof.ci_halfwidths[0] / 3.0};
}

Estimate norm_of(const RandomVariableModel& m, double q, const std::vector<double>& draws) {
    if (m.is_analytic()) return {lp_norm(m, q), 0.0};
    return sampled_norm(draws, q);
}

VerificationReport finish(VerificationReport r) {
    r.margin = r.lhs - r.rhs;
    r.verdict = classify(r.margin, r.sigma);
    return r;
}

std::string q_tag(double q) { return " q=" + format_double(q); }

}  // namespace

VerificationReport verify_naor_pair(const RandomVariableModel& x, const RandomVariableModel& y,
                                    double q, std::int64_t count, std::uint64_t seed) {
    if (!(q >= 2.0)) throw DomainError("verify_naor_pair: q must be >= 2");
    VerificationReport r;
    r.inequality = "naor_pair";
    r.instance = x.label() + " + " + y.label() + q_tag(q);
    r.seed = seed;
    if (finite_law(x) && finite_law(y) &&
        x.atoms().size() * y.atoms().size() <= static_cast<std::size_t>(kMaxEnumeration)) {
        const auto s = convolve(x, y);
        r.exact = true;
        r.count = static_cast<std::int64_t>(x.atoms().size() * y.atoms().size());
        r.lhs = lp_norm(s, q);
        const std::vector<double> norms{lp_norm(x, q), lp_norm(y, q)};
        r.rhs = naor_rhs(q, norms);
        r.instance += " exact";
        return finish(r);
    }
    auto xs = sample(x, count, seed, Execution::parallel, 0).values;
    const auto ys = sample(y, count, seed, Execution::parallel, 1).values;
    const auto ex = norm_of(x, q, xs);
    const auto ey = norm_of(y, q, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += ys[i];
    const auto es = sampled_norm(xs, q);
    const std::vector<double> norms{ex.value, ey.value};
    r.count = count;
    r.lhs = es.value;
    r.rhs = naor_rhs(q, norms);
    // d rhs / d |X|_q = (|X|_q / rhs)^{q-1}.
    const double gx = std::pow(ex.value / r.rhs, q - 1.0);
    const double gy = std::pow(ey.value / r.rhs, q - 1.0);
    r.sigma = std::sqrt(es.sigma * es.sigma + gx * gx * ex.sigma * ex.sigma + gy * gy * ey.sigma * ey.sigma);
    r.instance += " mc";
    return finish(r);
}

std::vector<VerificationReport> verify_naor_n(const RandomVariableModel& x, int n, double q,
                                              std::int64_t count, std::uint64_t seed) {
    if (!(q >= 2.0)) throw DomainError("verify_naor_n: q must be >= 2");
    if (n < 2) throw DomainError("verify_naor_n: n must be >= 2");
    const SumModel raw(x, n, Normalization::none);
    double lhs = 0.0, lhs_sigma = 0.0, norm1 = 0.0, norm1_sigma = 0.0;
    bool exact = exact_sum(raw);
    std::int64_t used = count;
    if (exact) {
        lhs = lp_norm(raw, q);
        norm1 = lp_norm(x, q);
        used = raw.base.is_discrete() ? static_cast<std::int64_t>(joint_outcome_count(raw)) : 0;
    } else {
        const std::vector<double> grid{q};
        const auto prof = sampled_profile(raw, grid, count, seed, Execution::parallel, 0);
        lhs = prof.values[0];
        lhs_sigma = prof.ci_halfwidths[0] / 3.0;
        if (x.is_analytic()) {
            norm1 = lp_norm(x, q);
        } else {
            const auto e = sampled_norm(sample(x, count, seed, Execution::parallel, 1).values, q);
            norm1 = e.value;
            norm1_sigma = e.sigma;
        }
    }
    const std::string tag = x.label() + " n=" + std::to_string(n) + q_tag(q) + (exact ? " exact" : " mc");
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    VerificationReport sum_form;
    sum_form.inequality = "naor_n";
    sum_form.instance = tag;
    sum_form.lhs = lhs;
    const std::vector<double> norms(static_cast<std::size_t>(n), norm1);
    sum_form.rhs = naor_rhs(q, norms);
    const double k_sum = std::pow(static_cast<double>(n), 1.0 / q);
    sum_form.sigma = std::hypot(lhs_sigma, k_sum * norm1_sigma);
    sum_form.seed = seed;
    sum_form.count = used;
    sum_form.exact = exact;

    VerificationReport level = sum_form;
    level.inequality = "power_level";
    level.lhs = lhs / sqrt_n;
    level.rhs = power_level_lower(q, n, norm1);
    level.sigma = sum_form.sigma / sqrt_n;
    return {finish(sum_form), finish(level)};
}

VerificationReport verify_sum_anti_norm(const RandomVariableModel& x, const GeneratingFunction& psi,
                                    int n, double p, std::int64_t count, std::uint64_t seed) {
    if (n < 1) throw DomainError("verify_sum_anti_norm: n must be >= 1");
    if (!(p >= 1.0)) throw DomainError("verify_sum_anti_norm: p must be >= 1");
    const SumModel raw(x, n, Normalization::none);
    const auto grid = geometric_grid(kSampledRange.lo, kSampledRange.hi, kPGridPoints);
    VerificationReport r;
    r.inequality = "sum_anti_norm";
    r.seed = seed;
    r.exact = exact_sum(raw);
    MomentProfile prof;
    if (r.exact) {
        prof = natural_function(raw, grid);
        r.count = raw.base.is_discrete() ? static_cast<std::int64_t>(joint_outcome_count(raw)) : 0;
    } else {
        prof = sampled_profile(raw, grid, count, seed);
        r.count = count;
    }
    const auto v_sum = anti_norm(prof, psi, kSampledRange);
    const double v1 = anti_norm(x, psi, kSampledRange).value;
    const std::vector<double> v(static_cast<std::size_t>(n), v1);
    r.lhs = v_sum.value;
    r.rhs = sum_anti_norm_lower(v, psi.b(), p);
    r.sigma = v_sum.ci_halfwidth / 3.0;
    r.instance = x.label() + " psi=" + psi.spec() + " n=" + std::to_string(n) + " p=" + format_double(p) +
                 " range=[2,16]" + (r.exact ? " exact" : " mc");
    return finish(r);
}

VerificationReport verify_anti_triangle(const RandomVariableModel& x, const RandomVariableModel& y,
                                        const GeneratingFunction& psi, std::int64_t count,
                                        std::uint64_t seed) {
    VerificationReport r;
    r.inequality = "anti_triangle";
    r.instance = x.label() + " + " + y.label() + " psi=" + psi.spec();
    r.seed = seed;
    r.exempt = true;
    if (finite_law(x) && finite_law(y) &&
        x.atoms().size() * y.atoms().size() <= static_cast<std::size_t>(kMaxEnumeration)) {
        const auto s = convolve(x, y);
        r.exact = true;
        r.count = static_cast<std::int64_t>(x.atoms().size() * y.atoms().size());
        r.lhs = anti_norm(s, psi).value;
        r.rhs = anti_norm(x, psi).value + anti_norm(y, psi).value;
        r.instance += " exact";
        return finish(r);
    }
    const auto grid = geometric_grid(kSampledRange.lo, kSampledRange.hi, kPGridPoints);
    auto xs = sample(x, count, seed, Execution::parallel, 0).values;
    const auto ys = sample(y, count, seed, Execution::parallel, 1).values;
    auto side = [&](const RandomVariableModel& m, const std::vector<double>& draws) -> Estimate {
        if (m.is_analytic()) return {anti_norm(m, psi, kSampledRange).value, 0.0};
        const auto a = anti_norm(sampled_profile(draws, grid), psi, kSampledRange);
        return {a.value, a.ci_halfwidth / 3.0};
    };
    const auto ex = side(x, xs);
    const auto ey = side(y, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += ys[i];
    const auto es = anti_norm(sampled_profile(xs, grid), psi, kSampledRange);
    r.count = count;
    r.lhs = es.value;
    r.rhs = ex.value + ey.value;
    r.sigma = std::sqrt(std::pow(es.ci_halfwidth / 3.0, 2) + ex.sigma * ex.sigma + ey.sigma * ey.sigma);
    r.instance += " range=[2,16] mc";
    return finish(r);
}

WilsonInterval wilson_interval(std::int64_t k, std::int64_t n, double z) {
    if (n <= 0) throw InvalidArgument("wilson_interval: n must be > 0");
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (ph + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

EnvelopeCheck verify_envelope(const TailEnvelope& envelope, const SumModel& sum, std::int64_t count,
                              std::uint64_t seed) {
    if (count <= 0) throw InvalidArgument("verify_envelope: count must be > 0");
    for (double u : envelope.u_grid)
        if (!(u >= 1.0)) throw DomainError("verify_envelope: u outside the validity range [1, inf)");
    const auto sampler = kernels::make_sampler(sum.base);
    const auto spec = kernels::draw_spec(sum, sampler, seed, 0);
    const auto hits = kernels::count_exceedances(spec, count, envelope.u_grid, false, Execution::parallel);

    EnvelopeCheck out;
    VerificationReport worst;
    double worst_score = kInf;
    for (std::size_t i = 0; i < envelope.u_grid.size(); ++i) {
        EnvelopeRow row;
        row.u = envelope.u_grid[i];
        row.lower = envelope.lower[i];
        row.upper = envelope.upper[i];
        row.empirical = static_cast<double>(hits[i]) / static_cast<double>(count);
        const auto w = wilson_interval(hits[i], count);
        row.ci_lo = w.lo;
        row.ci_hi = w.hi;
        if (w.hi < row.lower || w.lo > row.upper)
            row.verdict = Verdict::violated;
        else if (w.lo >= row.lower && w.hi <= row.upper)
            row.verdict = Verdict::holds;
        else
            row.verdict = Verdict::holds_within_noise;
        out.rows.push_back(row);

        // Row report: the tighter of the two sides, with sigma from the
        // Wilson half-width on that side.
        const double m_low = row.empirical - row.lower;
        const double m_up = row.upper - row.empirical;
        const bool low_side = m_low <= m_up;
        VerificationReport r;
        r.margin = low_side ? m_low : m_up;
        r.lhs = low_side ? row.empirical : row.upper;
        r.rhs = low_side ? row.lower : row.empirical;
        r.sigma = (low_side ? row.empirical - w.lo : w.hi - row.empirical) / 3.0;
        r.verdict = row.verdict;
        const double score = r.sigma > 0 ? r.margin / r.sigma : r.margin * 1e12;
        if (score < worst_score) {
            worst_score = score;
            worst = r;
            worst.instance = "u=" + format_double(row.u);
        }
    }
    worst.inequality = "envelope";
    worst.instance = sum.label() + " " + envelope.family.name() + " worst " + worst.instance;
    worst.seed = seed;
    worst.count = count;
    for (const auto& row : out.rows)
        if (row.verdict == Verdict::violated) worst.verdict = Verdict::violated;
    out.overall = worst;
    if (!out.rows.empty()) {
        const auto& last = out.rows.back();
        out.insufficient_samples = (last.ci_hi - last.ci_lo) / 2.0 > last.upper - last.lower;
    }
    return out;
}

VerificationReport verify_chernoff(const RandomVariableModel& x, double u, std::int64_t count,
                                   std::uint64_t seed) {
    if (!(u >= 0)) throw DomainError("verify_chernoff: u must be >= 0");
    const auto phi = PhiFunction::quadratic();
    const double tau = bphi_norm(x, phi).value;
    const SumModel single(x, 1, Normalization::none);
    const auto sampler = kernels::make_sampler(x);
    const auto spec = kernels::draw_spec(single, sampler, seed, 0);
    const std::vector<double> us{u};
    const auto hits = kernels::count_exceedances(spec, count, us, false, Execution::parallel);
    const auto w = wilson_interval(hits[0], count);
    VerificationReport r;
    r.inequality = "chernoff";
    r.instance = x.label() + " phi2 u=" + format_double(u);
    r.lhs = chernoff_from_norm(phi, tau, u);
    r.rhs = static_cast<double>(hits[0]) / static_cast<double>(count);
    r.sigma = (w.hi - r.rhs) / 3.0;
    r.seed = seed;
    r.count = count;
    return finish(r);
}

VerificationReport verify_subgaussian_stability(const RandomVariableModel& x, int n, double tol) {
    const auto phi = PhiFunction::quadratic();
    VerificationReport r;
    r.inequality = "subgaussian_stability";
    r.instance = x.label() + " n=" + std::to_string(n);
    r.lhs = bphi_norm(SumModel(x, n, Normalization::inv_sqrt_n), phi).value;
    r.rhs = bphi_norm(x, phi).value;
    r.margin = r.lhs - r.rhs;
    r.sigma = tol / 3.0;
    r.exact = true;
    // An equality check: any deviation beyond tol counts as a violation.
    r.verdict = std::abs(r.margin) < tol ? Verdict::holds_within_noise : Verdict::violated;
    return r;
}

std::vector<VerificationReport> run_suite(const SuiteOptions& options) {
    const auto seed = options.seed;
    const auto count = options.count;
    const auto tail_count = 10 * count;
    const auto rad = RandomVariableModel::rademacher();
    const auto exa = RandomVariableModel::example_a();
    const auto gauss = RandomVariableModel::gaussian(1.0);
    const auto zero = RandomVariableModel::finite_discrete({{0.0, 1.0}});
    std::vector<VerificationReport> out;
    auto add = [&out](std::vector<VerificationReport> rs) {
        for (auto& r : rs) out.push_back(std::move(r));
    };

    out.push_back(verify_naor_pair(rad, rad, 2.0, count, seed));
    out.push_back(verify_naor_pair(rad, rad, 4.0, count, seed));
    out.push_back(verify_naor_pair(exa, exa, 3.0, count, seed));
    for (double q : {2.0, 3.0, 4.0}) add(verify_naor_n(rad, 4, q, count, seed));
    add(verify_naor_n(gauss, 8, 4.0, count, seed));
    add(verify_naor_n(exa, 4, 3.0, count, seed));

    const auto natural = GeneratingFunction::natural(exa);
    for (int n : {1, 2, 4, 8}) out.push_back(verify_sum_anti_norm(exa, natural, n, 2.0, count, seed));
    out.push_back(verify_sum_anti_norm(rad, GeneratingFunction::degenerate(2.0), 4, 2.0, count, seed));
    out.push_back(verify_sum_anti_norm(gauss, GeneratingFunction::power(2.0), 4, 2.0, count, seed));

    const auto degenerate = GeneratingFunction::degenerate(2.0);
    out.push_back(verify_anti_triangle(rad, rad, degenerate, count, seed));
    out.push_back(verify_anti_triangle(zero, rad, degenerate, count, seed));
    out.push_back(verify_anti_triangle(exa, exa, natural, count, seed));

    struct EnvelopeCase {
        RandomVariableModel base;
        EnvelopeFamily family;
    };
    const std::vector<EnvelopeCase> cases{
        {exa, {TailFamily::subgaussian, 2.0}},
        {RandomVariableModel::weibull_sym(1.0), {TailFamily::weibull, 1.0}},
        {RandomVariableModel::weibull_sym(4.0), {TailFamily::weibull, 4.0}},
    };
    const auto u_grid = linear_grid(1.0, 2.5, 0.25);
    for (const auto& c : cases) {
        const SumModel sum(c.base, 16);
        const auto env = fit_envelope(sum, c.family, u_grid);
        out.push_back(verify_envelope(env, sum, tail_count, seed).overall);
    }

    for (double u : {1.0, 2.0, 3.0}) out.push_back(verify_chernoff(gauss, u, tail_count, seed));
    for (int n : {1, 4, 16}) out.push_back(verify_subgaussian_stability(gauss, n, options.tolerance));
    return out;
}

bool has_violation(const std::vector<VerificationReport>& reports) {
    return std::any_of(reports.begin(), reports.end(),
                       [](const auto& r) { return !r.exempt && r.verdict == Verdict::violated; });
}

void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
    out << "inequality,instance,lhs,rhs,margin,sigma,verdict,seed,count\n";
    for (const auto& r : reports) {
        out << r.inequality << ',' << r.instance << ',' << format_double(r.lhs) << ','
            << format_double(r.rhs) << ',' << format_double(r.margin) << ',' << format_double(r.sigma)
            << ',' << to_string(r.verdict) << ',' << r.seed << ',' << r.count << '\n';
    }
}

void write_reports_text(std::ostream& out, const std::vector<VerificationReport>& reports) {
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-22s lhs=%.6g rhs=%.6g margin=%+.3e sigma=%.2e ",
                      r.inequality.c_str(), r.lhs, r.rhs, r.margin, r.sigma);
        out << buf << to_string(r.verdict) << (r.exempt ? " (exempt)" : "") << "  " << r.instance << '\n';
    }
}

void set_worker_count(int workers) {
    if (workers >= 1) omp_set_num_threads(workers);
}

}  // namespace gls
