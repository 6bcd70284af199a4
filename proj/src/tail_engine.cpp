#include "gls/tail_engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gls/errors.hpp"
#include "gls/format.hpp"

namespace gls {

double chernoff_from_norm(const PhiFunction& phi, double tau, double u) {
    if (!(u >= 0)) throw DomainError("tail bound: u must be >= 0");
    if (u == 0.0) return 1.0;
    if (tau == 0.0) return 0.0;
    return std::exp(-young_fenchel(phi, u / tau));
}

double tail_upper_chernoff(const RandomVariableModel& model, const PhiFunction& phi, double u) {
    return chernoff_from_norm(phi, bphi_norm(model, phi).value, u);
}

double tail_upper_chernoff(const SumModel& sum, const PhiFunction& phi, double u) {
    return chernoff_from_norm(phi, bphi_norm(sum, phi).value, u);
}

double tail_upper_subgaussian_sum(const SumModel& sum, double u) {
    const auto phi2 = PhiFunction::quadratic();
    const double tau1 = bphi_norm(sum.base, phi2).value;
    const std::vector<double> norms(static_cast<std::size_t>(sum.n), tau1);
    return chernoff_from_norm(phi2, subgaussian_sum_norm_upper(norms) * sum.scale(), u);
}

double paley_zygmund_lower(double u, double p, double norm_p, double norm_2p) {
    if (!(u >= 0) || !(p >= 1)) throw DomainError("paley_zygmund_lower: need u >= 0, p >= 1");
    if (!(norm_p > 0) || !(norm_2p > 0)) return 0.0;
    const double t = u / norm_p;
    if (t >= 1.0) return 0.0;
    const double gap = -std::expm1(p * std::log(t));  // 1 - t^p
    const double log_bound = 2.0 * std::log(gap) + 2.0 * p * (std::log(norm_p) - std::log(norm_2p));
    return std::min(1.0, std::exp(log_bound));
}

double tail_lower_from_moments(const MomentProfile& profile, double u, double p) {
    return paley_zygmund_lower(u, p, profile.at(p), profile.at(2.0 * p));
}

BestLowerBound tail_lower_best(const MomentProfile& profile, double u) {
    BestLowerBound best;
    for (double p : profile.grid) {
        if (2.0 * p > profile.hi()) break;
        if (!std::binary_search(profile.grid.begin(), profile.grid.end(), 2.0 * p)) continue;
        const double v = tail_lower_from_moments(profile, u, p);
        if (v > best.value) best = {v, p};
    }
    return best;
}

MomentProfile even_moment_profile(const SumModel& sum, int max_even) {
    if (max_even < 2) throw InvalidArgument("even_moment_profile: max_even must be >= 2");
    const auto m = moments_of_sum(sum, max_even);
    MomentProfile prof;
    prof.provenance = Provenance::analytic;
    for (int k = 2; k <= max_even; k += 2) {
        prof.grid.push_back(k);
        prof.values.push_back(std::pow(m[static_cast<std::size_t>(k)], 1.0 / k));
        prof.ci_halfwidths.push_back(0.0);
    }
    return prof;
}

double EnvelopeFamily::exponent() const {
    return kind == TailFamily::subgaussian ? 2.0 : std::min(m, 2.0);
}

std::string EnvelopeFamily::name() const {
    return kind == TailFamily::subgaussian ? "subgaussian" : "weibull(m=" + format_double(m) + ")";
}

bool TailEnvelope::satisfies_invariants() const {
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        if (!(lower[i] >= 0.0 && lower[i] <= upper[i] && upper[i] <= 1.0)) return false;
        if (i > 0 && (lower[i] > lower[i - 1] || upper[i] > upper[i - 1])) return false;
    }
    return c_upper() <= c_lower();
}

std::vector<double> default_u_grid() { return linear_grid(1.0, 3.0, 0.25); }

double tail_exponent_estimate(const RandomVariableModel& base) {
    const double lo = 64.0, hi = 256.0;
    const double slope = (std::log(lp_norm(base, hi)) - std::log(lp_norm(base, lo))) / std::log(hi / lo);
    if (slope <= 1e-9) return kInf;
    return 1.0 / slope;
}

TailEnvelope fit_envelope(const SumModel& sum, EnvelopeFamily family, std::span<const double> u_grid) {
    std::vector<double> owned;
    if (u_grid.empty()) {
        owned = default_u_grid();
        u_grid = owned;
    }
    for (double u : u_grid)
        if (!(u >= 1.0) || !std::isfinite(u)) throw DomainError("fit_envelope: u_grid must lie in [1, inf)");
    if (!std::is_sorted(u_grid.begin(), u_grid.end())) throw InvalidArgument("fit_envelope: u_grid unsorted");
    if (!sum.base.is_symmetric())
        throw InvalidArgument("fit_envelope: one-sided lower bound needs a symmetric base law");
    if (family.kind == TailFamily::weibull && !(family.m > 0))
        throw InvalidArgument("fit_envelope: weibull exponent must be > 0");

    const double e = family.exponent();
    const double m_hat = tail_exponent_estimate(sum.base);
    const double e_hat = std::min(m_hat, 2.0);
    if (std::abs(e_hat - e) > kExponentTolerance)
        throw FamilyMismatch("fit_envelope: computed exponent " + format_double(e_hat) +
                             " disagrees with " + family.name() + " exponent " + format_double(e));

    TailEnvelope env;
    env.label = sum.label();
    env.family = family;
    env.u_grid.assign(u_grid.begin(), u_grid.end());
    env.valid_lo = u_grid.front();
    env.valid_hi = u_grid.back();

    // Upper curve.
    if (family.kind == TailFamily::subgaussian) {
        for (double u : u_grid) env.computed_upper.push_back(tail_upper_subgaussian_sum(sum, u));
    } else {
        const auto phi = PhiFunction::natural_of(sum);
        const double tau = bphi_norm(sum, phi).value;
        for (double u : u_grid) env.computed_upper.push_back(chernoff_from_norm(phi, tau, u));
    }

    // Lower curve: Paley-Zygmund on exact even moments, halved for the
    // one-sided tail of a symmetric law.
    const auto profile = even_moment_profile(sum, kLowerMaxMoment);
    for (double u : u_grid) env.computed_lower.push_back(0.5 * tail_lower_best(profile, u).value);

    double c_up = kInf, c_low = 0.0;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double ue = std::pow(u_grid[i], e);
        c_up = std::min(c_up, -std::log(env.computed_upper[i]) / ue);
        const double l = env.computed_lower[i];
        c_low = std::max(c_low, l > 0 ? -std::log(l) / ue : kInf);
    }
    for (double u : u_grid) {
        const double ue = std::pow(u, e);
        env.upper.push_back(std::exp(-c_up * ue));
        env.lower.push_back(std::isinf(c_low) ? 0.0 : std::exp(-c_low * ue));
    }
    env.constants["C_upper"] = c_up;
    env.constants["C_lower"] = c_low;
    env.constants["exponent"] = e;
    env.constants["exponent_computed"] = e_hat;
    if (family.kind == TailFamily::subgaussian) {
        env.constants["C4"] = c_up;
        env.constants["C3"] = c_low;
    } else {
        env.constants["C10"] = c_up;
        env.constants["C9"] = c_low;
    }
    return env;
}

void write_envelope_csv(std::ostream& out, const TailEnvelope& env, std::span<const double> empirical,
                        std::span<const double> ci_halfwidth) {
    out << "# C_upper=" << format_double(env.c_upper()) << ", C_lower=" << format_double(env.c_lower())
        << ", exponent=" << format_double(env.exponent()) << '\n';
    out << "# envelope=" << env.label << " family=" << env.family.name()
        << " exponent_computed=" << format_double(env.constants.at("exponent_computed"))
        << " valid_u=[" << format_double(env.valid_lo) << "," << format_double(env.valid_hi) << "]\n";
    out << "u,lower,upper,empirical,ci_halfwidth\n";
    for (std::size_t i = 0; i < env.u_grid.size(); ++i) {
        const double emp = i < empirical.size() ? empirical[i] : NAN;
        const double ci = i < ci_halfwidth.size() ? ci_halfwidth[i] : NAN;
        out << format_double(env.u_grid[i]) << ',' << format_double(env.lower[i]) << ','
            << format_double(env.upper[i]) << ',' << format_double(emp) << ',' << format_double(ci) << '\n';
    }
}

EnvelopeTable read_envelope_csv(std::istream& in) {
    EnvelopeTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        const auto s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            if (s.find("C_upper=") == std::string_view::npos) continue;
            for (const auto& item : split(s.substr(1), ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) continue;
                t.constants[std::string(trim(std::string_view(item).substr(0, eq)))] =
                    parse_double(std::string_view(item).substr(eq + 1));
            }
            continue;
        }
        if (!header) {
            if (s != "u,lower,upper,empirical,ci_halfwidth") throw ParseError("bad envelope header: " + line);
            header = true;
            continue;
        }
        const auto cols = split(s, ',');
        if (cols.size() != 5) throw ParseError("bad envelope row: " + line);
        t.u.push_back(parse_double(cols[0]));
        t.lower.push_back(parse_double(cols[1]));
        t.upper.push_back(parse_double(cols[2]));
        t.empirical.push_back(parse_double(cols[3]));
        t.ci_halfwidth.push_back(parse_double(cols[4]));
    }
    if (!header) throw ParseError("envelope: missing header");
    return t;
}

}  // namespace gls
