#include "gls/gls_calculus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "gls/errors.hpp"
#include "gls/format.hpp"

namespace gls {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGolden = 0.6180339887498949;

double loglog_interp(const std::vector<double>& grid, const std::vector<double>& values, double p) {
    if (grid.empty() || p < grid.front() || p > grid.back()) return kInf;
    const auto it = std::lower_bound(grid.begin(), grid.end(), p);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == p) return values[i];
    const double w = (std::log(p) - std::log(grid[i - 1])) / (std::log(grid[i]) - std::log(grid[i - 1]));
    return std::exp((1 - w) * std::log(values[i - 1]) + w * std::log(values[i]));
}

// Best finite value of f over pts, then golden-section refinement on the
// bracket around it. f returns NaN where the ratio is undefined (psi = inf).
ExtremumResult extremum(const std::function<double(double)>& f, const std::vector<double>& pts,
                        bool maximize) {
    auto better = [maximize](double a, double b) {
        if (std::isnan(b)) return !std::isnan(a);
        if (std::isnan(a)) return false;
        return maximize ? a > b : a < b;
    };
    std::vector<double> vals(pts.size());
    std::size_t best = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        vals[i] = f(pts[i]);
        if (!std::isnan(vals[i]) && (best == pts.size() || better(vals[i], vals[best]))) best = i;
    }
    if (best == pts.size()) throw EmptyDomain("no p in range with finite psi");
    ExtremumResult res{vals[best], pts[best]};
    if (pts.size() < 2) return res;
    double a = pts[best == 0 ? 0 : best - 1];
    double b = pts[std::min(best + 1, pts.size() - 1)];
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, b); ++it) {
        if (better(fc, fd)) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    for (auto [p, v] : {std::pair{c, fc}, std::pair{d, fd}})
        if (better(v, res.value)) res = {v, p};
    return res;
}

double upper_p(const GeneratingFunction& gf, PRange range) {
    const double b = gf.b();
    const double bcap = std::isinf(b) ? kInf : b - 1e-3 * b;
    if (std::isfinite(range.hi)) return std::min(range.hi, bcap);
    return std::isinf(b) ? kPGridCap : bcap;
}

// Candidate p values for a tabulated profile: its grid points inside the
// range plus the range ends when they fall inside the table.
std::vector<double> profile_points(const MomentProfile& profile, const GeneratingFunction& gf,
                                   PRange range) {
    const double lo = std::max(1.0, range.lo);
    const double hi = upper_p(gf, range);
    std::vector<double> pts;
    if (lo >= profile.lo() && lo <= profile.hi()) pts.push_back(lo);
    for (double p : profile.grid)
        if (p > lo && p < hi) pts.push_back(p);
    if (hi >= profile.lo() && hi <= profile.hi() && hi > lo) pts.push_back(hi);
    if (pts.empty()) throw EmptyDomain("profile does not cover the requested p-range");
    return pts;
}

double ratio_or_nan(double norm, double psi) { return std::isinf(psi) ? NAN : norm / psi; }

const DegeneratePsi* as_degenerate(const GeneratingFunction& gf) {
    return std::get_if<DegeneratePsi>(&gf.family());
}

void check_degenerate_range(const DegeneratePsi& d, PRange range) {
    if (d.r < range.lo || d.r > range.hi)
        throw EmptyDomain("degenerate psi: r=" + format_double(d.r) + " outside p-range");
}

}  // namespace

// ---------------------------------------------------------------------------

GeneratingFunction::GeneratingFunction(PsiFamily family) : family_(std::move(family)) {}

GeneratingFunction GeneratingFunction::power(double m) {
    if (!(m > 0)) throw InvalidArgument("power psi: m must be > 0");
    return GeneratingFunction(PowerPsi{m});
}

GeneratingFunction GeneratingFunction::blowup(double b, double beta) {
    if (!(b > 1) || !std::isfinite(b)) throw InvalidArgument("blowup psi: need finite b > 1");
    if (!(beta >= 0)) throw InvalidArgument("blowup psi: beta must be >= 0");
    return GeneratingFunction(BlowupPsi{b, beta});
}

GeneratingFunction GeneratingFunction::degenerate(double r) {
    if (!(r >= 1) || !std::isfinite(r)) throw InvalidArgument("degenerate psi: r must lie in [1, inf)");
    return GeneratingFunction(DegeneratePsi{r});
}

GeneratingFunction GeneratingFunction::natural(const RandomVariableModel& model) {
    return GeneratingFunction(NaturalPsi{model, {}});
}

GeneratingFunction GeneratingFunction::natural(MomentProfile profile) {
    if (profile.grid.empty()) throw InvalidArgument("natural psi: empty profile");
    for (double v : profile.values)
        if (!(v > 0)) throw InvalidArgument("natural psi: profile values must be > 0");
    return GeneratingFunction(NaturalPsi{std::nullopt, std::move(profile)});
}

GeneratingFunction GeneratingFunction::tabulated(std::vector<double> grid, std::vector<double> values,
                                                 double b, std::string source) {
    if (grid.empty() || grid.size() != values.size())
        throw InvalidArgument("tabulated psi: grid and values must be nonempty and equal length");
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1.0)
        throw InvalidArgument("tabulated psi: grid must be increasing within [1, b)");
    for (double v : values)
        if (!(v > 0)) throw InvalidArgument("tabulated psi: values must be > 0");
    return GeneratingFunction(TabulatedPsi{std::move(grid), std::move(values), b, std::move(source)});
}

double GeneratingFunction::b() const noexcept {
    return std::visit(overloaded{[](const BlowupPsi& f) { return f.b; },
                                 [](const NaturalPsi& f) { return f.model ? kInf : f.profile.b; },
                                 [](const TabulatedPsi& f) { return f.b; },
                                 [](const auto&) { return kInf; }},
                      family_);
}

double GeneratingFunction::operator()(double p) const {
    if (!(p >= 1.0) || !(p < b()))
        throw OutOfDomain("psi: p=" + format_double(p) + " outside [1, " + format_double(b()) + ")");
    return std::visit(
        overloaded{[p](const PowerPsi& f) { return std::pow(p, 1.0 / f.m); },
                   [p](const BlowupPsi& f) { return std::pow(f.b - p, -f.beta); },
                   [p](const DegeneratePsi& f) { return p == f.r ? 1.0 : kInf; },
                   [p](const NaturalPsi& f) {
                       if (f.model) return lp_norm(*f.model, p);
                       return loglog_interp(f.profile.grid, f.profile.values, p);
                   },
                   [p](const TabulatedPsi& f) { return loglog_interp(f.grid, f.values, p); }},
        family_);
}

bool GeneratingFunction::is_bounded() const {
    return std::visit(
        overloaded{[](const PowerPsi&) { return false; },
                   [](const BlowupPsi& f) { return f.beta == 0.0; },
                   [](const DegeneratePsi&) { return false; },
                   [](const NaturalPsi& f) { return f.model ? f.model->is_discrete() : true; },
                   [](const TabulatedPsi& f) { return std::isfinite(f.b) || !f.grid.empty(); }},
        family_);
}

std::string GeneratingFunction::spec() const {
    return std::visit(
        overloaded{[](const PowerPsi& f) { return "power:m=" + format_double(f.m); },
                   [](const BlowupPsi& f) {
                       return "blowup:b=" + format_double(f.b) + ",beta=" + format_double(f.beta);
                   },
                   [](const DegeneratePsi& f) { return "degenerate:r=" + format_double(f.r); },
                   [](const NaturalPsi&) { return std::string("natural"); },
                   [](const TabulatedPsi& f) {
                       std::string s = "tabulated:path=" + f.source;
                       if (std::isfinite(f.b)) s += ",b=" + format_double(f.b);
                       return s;
                   }},
        family_);
}

GeneratingFunction parse_psi(std::string_view text, const RandomVariableModel* natural_model) {
    text = trim(text);
    const auto colon = text.find(':');
    std::string family(text.substr(0, colon));
    std::transform(family.begin(), family.end(), family.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::map<std::string, std::string> params;
    if (colon != std::string_view::npos) {
        for (const auto& item : split(text.substr(colon + 1), ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParseError("psi: expected key=value, got '" + item + "'");
            params[std::string(trim(std::string_view(item).substr(0, eq)))] =
                std::string(trim(std::string_view(item).substr(eq + 1)));
        }
    }
    auto num = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
        const auto it = params.find(key);
        if (it == params.end()) {
            if (!fallback) throw ParseError("psi " + family + ": missing parameter '" + key + "'");
            return *fallback;
        }
        const double v = parse_double(it->second);
        params.erase(it);
        return v;
    };
    auto done = [&] {
        if (!params.empty())
            throw ParseError("psi " + family + ": unknown parameter '" + params.begin()->first + "'");
    };
    if (family == "power") {
        const double m = num("m");
        done();
        return GeneratingFunction::power(m);
    }
    if (family == "blowup") {
        const double b = num("b");
        const double beta = num("beta");
        done();
        return GeneratingFunction::blowup(b, beta);
    }
    if (family == "degenerate") {
        const double r = num("r");
        done();
        return GeneratingFunction::degenerate(r);
    }
    if (family == "natural") {
        done();
        if (!natural_model) throw ParseError("psi natural: no model to take the natural function of");
        return GeneratingFunction::natural(*natural_model);
    }
    if (family == "tabulated") {
        const auto it = params.find("path");
        if (it == params.end()) throw ParseError("psi tabulated: missing parameter 'path'");
        const std::string path = it->second;
        params.erase(it);
        const double b = num("b", kInf);
        done();
        std::ifstream in(path);
        if (!in) throw IoError("cannot read " + path);
        std::vector<double> grid, values;
        std::string line;
        while (std::getline(in, line)) {
            const auto t = trim(line);
            if (t.empty() || t.front() == '#' || t.front() == 'p') continue;
            const auto cols = split(t, ',');
            if (cols.size() < 2) throw ParseError(path + ": bad row '" + line + "'");
            grid.push_back(parse_double(cols[0]));
            values.push_back(parse_double(cols[1]));
        }
        return GeneratingFunction::tabulated(std::move(grid), std::move(values), b, path);
    }
    throw ParseError("unknown psi family '" + family + "'");
}

std::vector<double> p_scan_grid(const GeneratingFunction& gf, PRange range) {
    const double lo = std::max(1.0, range.lo);
    const double hi = upper_p(gf, range);
    if (!(hi >= lo)) throw EmptyDomain("empty p-range");
    return geometric_grid(lo, hi, lo == hi ? 1 : kPGridPoints);
}

ExtremumResult gls_norm_detail(const MomentProfile& profile, const GeneratingFunction& gf,
                               PRange range) {
    if (const auto* d = as_degenerate(gf)) {
        check_degenerate_range(*d, range);
        return {profile.at(d->r), d->r};
    }
    const auto pts = profile_points(profile, gf, range);
    return extremum([&](double p) { return ratio_or_nan(profile.at(p), gf(p)); }, pts, true);
}

ExtremumResult gls_norm_detail(const RandomVariableModel& model, const GeneratingFunction& gf,
                               PRange range) {
    if (const auto* d = as_degenerate(gf)) {
        check_degenerate_range(*d, range);
        return {lp_norm(model, d->r), d->r};
    }
    return extremum([&](double p) { return ratio_or_nan(lp_norm(model, p), gf(p)); },
                    p_scan_grid(gf, range), true);
}

double gls_norm(const MomentProfile& profile, const GeneratingFunction& gf, PRange range) {
    return gls_norm_detail(profile, gf, range).value;
}

double gls_norm(const RandomVariableModel& model, const GeneratingFunction& gf, PRange range) {
    return gls_norm_detail(model, gf, range).value;
}

AntiNormResult anti_norm(const MomentProfile& profile, const GeneratingFunction& gf, PRange range) {
    AntiNormResult res;
    if (const auto* d = as_degenerate(gf)) {
        check_degenerate_range(*d, range);
        res.value = profile.at(d->r);
        res.argmin_p = d->r;
    } else {
        const auto pts = profile_points(profile, gf, range);
        const auto ext = extremum([&](double p) { return ratio_or_nan(profile.at(p), gf(p)); }, pts, false);
        res.value = ext.value;
        res.argmin_p = ext.arg_p;
    }
    res.ci_halfwidth = profile.ci_at(res.argmin_p) / gf(res.argmin_p);
    res.profile_used = profile;
    return res;
}

AntiNormResult anti_norm(const RandomVariableModel& model, const GeneratingFunction& gf, PRange range) {
    AntiNormResult res;
    std::vector<double> grid;
    if (const auto* d = as_degenerate(gf)) {
        check_degenerate_range(*d, range);
        res.value = lp_norm(model, d->r);
        res.argmin_p = d->r;
        grid = {d->r};
    } else {
        grid = p_scan_grid(gf, range);
        const auto ext =
            extremum([&](double p) { return ratio_or_nan(lp_norm(model, p), gf(p)); }, grid, false);
        res.value = ext.value;
        res.argmin_p = ext.arg_p;
    }
    res.profile_used = natural_function(model, grid);
    return res;
}

std::vector<RatioPoint> ratio_curve(const RandomVariableModel& model, const GeneratingFunction& gf,
                                    std::span<const double> grid) {
    std::vector<RatioPoint> out;
    out.reserve(grid.size());
    for (double p : grid) {
        const double norm = lp_norm(model, p);
        const double psi = gf(p);
        out.push_back({p, norm, psi, std::isinf(psi) ? 0.0 : norm / psi});
    }
    return out;
}

// ---------------------------------------------------------------------------

double theta_closed(double p, double q) {
    if (!(p >= 1) || !(q >= 1)) throw DomainError("theta: p, q must be >= 1");
    return std::min(1.0, std::exp2(1.0 / q - 1.0 / p));
}

std::vector<double> default_z_grid() { return geometric_grid(1e-20, 1e20, 401); }

double theta_numeric(double p, double q, std::span<const double> z_grid) {
    if (!(p >= 1) || !(q >= 1)) throw DomainError("theta: p, q must be >= 1");
    std::vector<double> owned;
    if (z_grid.empty()) {
        owned = default_z_grid();
        z_grid = owned;
    }
    auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
    // log of the ratio as a function of t = ln z
    auto f = [&](double t) { return softplus(q * t) / q - softplus(p * t) / p; };
    std::vector<double> ts;
    ts.reserve(z_grid.size());
    for (double z : z_grid) {
        if (!(z > 0)) throw DomainError("theta_numeric: z grid must be positive");
        ts.push_back(std::log(z));
    }
    return std::exp(extremum(f, ts, false).value);
}

double kappa(double b, double p) {
    if (!(b > 1)) throw DomainError("kappa: b must be > 1");
    if (!(p >= 1)) throw DomainError("kappa: p must be >= 1");
    const double inv_b = std::isinf(b) ? 0.0 : 1.0 / b;
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return std::min(1.0, std::exp2(inv_b - inv_p));
}

double sum_anti_norm_lower(std::span<const double> v, double b, double p) {
    if (!(p >= 1)) throw DomainError("sum_anti_norm_lower: p must be >= 1");
    for (double x : v)
        if (!(x >= 0)) throw InvalidArgument("sum_anti_norm_lower: anti-norms must be >= 0");
    if (v.empty()) return 0.0;
    if (std::isinf(p)) return kappa(b, p) * *std::max_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    if (vmax == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(x / vmax, p);
    if (!(b > 1)) throw DomainError("sum_anti_norm_lower: b must be > 1");
    // Combined in log base 2 so that kappa and the power mean cancel exactly
    // when they can (e.g. v = (1, 1), p = 2, b = inf gives 1).
    const double inv_b = std::isinf(b) ? 0.0 : 1.0 / b;
    const double log_kappa = std::min(0.0, inv_b - 1.0 / p);
    return vmax * std::exp2(log_kappa + std::log2(s) / p);
}

double naor_rhs(double q, std::span<const double> norms) {
    if (!(q >= 2)) throw DomainError("naor_rhs: q must be >= 2");
    if (norms.empty()) return 0.0;
    const double vmax = *std::max_element(norms.begin(), norms.end());
    if (std::isinf(q) || vmax == 0.0) return vmax;
    double s = 0.0;
    for (double x : norms) s += std::pow(x / vmax, q);
    return vmax * std::pow(s, 1.0 / q);
}

double power_level_lower(double q, int n, double norm1) {
    if (!(q >= 2)) throw DomainError("power_level_lower: q must be >= 2");
    if (n < 1) throw InvalidArgument("power_level_lower: n must be >= 1");
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    return std::pow(static_cast<double>(n), inv_q - 0.5) * norm1;
}

}  // namespace gls
