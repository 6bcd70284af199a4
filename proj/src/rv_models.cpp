#include "gls/rv_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "gls/errors.hpp"
#include "gls/format.hpp"
#include "gls/kernels.hpp"

namespace gls {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kLawTolerance = 1e-12;

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

RandomVariableModel::RandomVariableModel(ModelKind kind, std::string label)
    : kind_(std::move(kind)), label_(std::move(label)) {
    if (label_.empty()) label_ = spec();
}

RandomVariableModel RandomVariableModel::example_a() { return {ExampleA{}, "examplea"}; }

RandomVariableModel RandomVariableModel::gaussian(double sigma) {
    if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian: sigma must be > 0");
    return {Gaussian{sigma}, {}};
}

RandomVariableModel RandomVariableModel::rademacher() { return {Rademacher{}, "rademacher"}; }

RandomVariableModel RandomVariableModel::weibull_sym(double shape, double scale) {
    if (!(shape > 0) || !(scale > 0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw InvalidArgument("weibull: shape and scale must be > 0");
    return {WeibullSym{shape, scale}, {}};
}

RandomVariableModel RandomVariableModel::finite_discrete(std::vector<Atom> atoms) {
    if (atoms.empty()) throw InvalidArgument("discrete: no atoms");
    double total = 0.0, mean = 0.0;
    for (const auto& a : atoms) {
        if (!(a.probability >= 0) || !std::isfinite(a.value))
            throw InvalidArgument("discrete: probabilities must be >= 0 and values finite");
        total += a.probability;
        mean += a.probability * a.value;
    }
    if (std::abs(total - 1.0) > kLawTolerance)
        throw InvalidArgument("discrete: probabilities sum to " + format_double(total));
    if (std::abs(mean) > kLawTolerance)
        throw InvalidArgument("discrete: law is not centered (mean " + format_double(mean) + ")");
    return {FiniteDiscrete{std::move(atoms)}, {}};
}

RandomVariableModel RandomVariableModel::empirical(std::vector<double> samples, std::string label) {
    if (samples.empty()) throw InvalidArgument("empirical: no samples");
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    for (auto& x : samples) x -= mean;
    if (label.empty()) label = "empirical:n=" + std::to_string(samples.size());
    return {Empirical{std::move(samples)}, std::move(label)};
}

bool RandomVariableModel::has_density() const noexcept {
    return std::holds_alternative<ExampleA>(kind_) || std::holds_alternative<Gaussian>(kind_) ||
           std::holds_alternative<WeibullSym>(kind_);
}

bool RandomVariableModel::is_analytic() const noexcept {
    return !std::holds_alternative<Empirical>(kind_);
}

bool RandomVariableModel::is_discrete() const noexcept {
    return std::holds_alternative<Rademacher>(kind_) ||
           std::holds_alternative<FiniteDiscrete>(kind_) ||
           std::holds_alternative<Empirical>(kind_);
}

bool RandomVariableModel::is_symmetric() const {
    if (!is_discrete() || std::holds_alternative<Rademacher>(kind_)) return true;
    std::map<double, double> mass;
    for (const auto& a : atoms()) mass[a.value] += a.probability;
    for (const auto& [v, p] : mass) {
        const auto it = mass.find(-v);
        if (it == mass.end() || std::abs(it->second - p) > kLawTolerance) return false;
    }
    return true;
}

std::vector<Atom> RandomVariableModel::atoms() const {
    return std::visit(
        overloaded{
            [](const Rademacher&) { return std::vector<Atom>{{-1.0, 0.5}, {1.0, 0.5}}; },
            [](const FiniteDiscrete& d) { return d.atoms; },
            [](const Empirical& e) {
                std::vector<Atom> out;
                out.reserve(e.samples.size());
                const double w = 1.0 / static_cast<double>(e.samples.size());
                for (double x : e.samples) out.push_back({x, w});
                return out;
            },
            [](const auto&) -> std::vector<Atom> {
                throw UnsupportedKind("atoms: law is not discrete");
            }},
        kind_);
}

std::string RandomVariableModel::spec() const {
    return std::visit(
        overloaded{[](const ExampleA&) { return std::string("examplea"); },
                   [](const Gaussian& g) { return "gaussian:sigma=" + format_double(g.sigma); },
                   [](const Rademacher&) { return std::string("rademacher"); },
                   [](const WeibullSym& w) {
                       return "weibull:m=" + format_double(w.shape) +
                              ",scale=" + format_double(w.scale);
                   },
                   [](const FiniteDiscrete& d) {
                       std::string s = "discrete:";
                       for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                           if (i) s += ',';
                           s += format_double(d.atoms[i].value) + '@' +
                                format_double(d.atoms[i].probability);
                       }
                       return s;
                   },
                   [this](const Empirical&) { return label_; }},
        kind_);
}

SumModel::SumModel(RandomVariableModel base_model, int terms, Normalization norm)
    : base(std::move(base_model)), n(terms), normalization(norm) {
    if (n < 1) throw InvalidArgument("sum: n must be >= 1");
}

double SumModel::scale() const noexcept {
    return normalization == Normalization::inv_sqrt_n ? 1.0 / std::sqrt(static_cast<double>(n))
                                                      : 1.0;
}

std::string SumModel::label() const {
    return std::string(normalization == Normalization::inv_sqrt_n ? "normsum" : "sum") + "(" +
           base.label() + ",n=" + std::to_string(n) + ")";
}

double density(const RandomVariableModel& model, double x) {
    return std::visit(
        overloaded{
            [x](const ExampleA&) { return 0.5 * std::abs(x) * std::exp(-0.5 * x * x); },
            [x](const Gaussian& g) {
                const double z = x / g.sigma;
                return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            [x](const WeibullSym& w) {
                const double t = std::abs(x) / w.scale;
                if (t == 0.0) {
                    if (w.shape < 1.0) return std::numeric_limits<double>::infinity();
                    return w.shape == 1.0 ? 0.5 / w.scale : 0.0;
                }
                return 0.5 * w.shape / w.scale * std::pow(t, w.shape - 1.0) *
                       std::exp(-std::pow(t, w.shape));
            },
            [](const auto&) -> double {
                throw UnsupportedKind("density: law has no density");
            }},
        model.kind());
}

double abs_tail(const RandomVariableModel& model, double t) {
    if (t < 0) return 1.0;
    return std::visit(
        overloaded{[t](const ExampleA&) { return std::exp(-0.5 * t * t); },
                   [t](const Gaussian& g) { return std::erfc(t / (g.sigma * std::numbers::sqrt2)); },
                   [t](const WeibullSym& w) { return std::exp(-std::pow(t / w.scale, w.shape)); },
                   [t](const Rademacher&) { return t < 1.0 ? 1.0 : 0.0; },
                   [t](const FiniteDiscrete& d) {
                       double p = 0.0;
                       for (const auto& a : d.atoms)
                           if (std::abs(a.value) > t) p += a.probability;
                       return p;
                   },
                   [](const Empirical&) -> double {
                       throw UnsupportedKind("abs_tail: empirical law");
                   }},
        model.kind());
}

double cdf(const RandomVariableModel& model, double x) {
    if (!model.has_density()) throw UnsupportedKind("cdf: law has no density");
    return 0.5 + 0.5 * sign_of(x) * (1.0 - abs_tail(model, std::abs(x)));
}

double raw_moment(const RandomVariableModel& model, int k) {
    if (k < 0) throw InvalidArgument("raw_moment: k must be >= 0");
    if (k == 0) return 1.0;
    if (model.is_discrete()) {
        double m = 0.0;
        for (const auto& a : model.atoms()) m += a.probability * std::pow(a.value, k);
        return m;
    }
    if (k % 2 == 1) return 0.0;
    const double kd = k;
    return std::visit(
        overloaded{
            [kd](const ExampleA&) { return std::exp(0.5 * kd * std::numbers::ln2 + std::lgamma(0.5 * kd + 1.0)); },
            [kd](const Gaussian& g) {
                return std::pow(g.sigma, kd) *
                       std::exp(0.5 * kd * std::numbers::ln2 + std::lgamma(0.5 * (kd + 1.0)) -
                                0.5 * std::log(std::numbers::pi));
            },
            [kd](const WeibullSym& w) {
                return std::pow(w.scale, kd) * std::exp(std::lgamma(1.0 + kd / w.shape));
            },
            [](const auto&) -> double { throw UnsupportedKind("raw_moment"); }},
        model.kind());
}

double mgf_radius(const RandomVariableModel& model) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (const auto* w = std::get_if<WeibullSym>(&model.kind())) {
        if (w->shape > 1.0) return inf;
        if (w->shape == 1.0) return 1.0 / w->scale;
        return 0.0;
    }
    return inf;
}

SampleSet sample(const RandomVariableModel& model, std::int64_t count, std::uint64_t seed,
                 Execution exec, std::uint64_t stream) {
    return sample_sum(SumModel(model, 1, Normalization::none), count, seed, exec, stream);
}

SampleSet sample_sum(const SumModel& sum, std::int64_t count, std::uint64_t seed, Execution exec,
                     std::uint64_t stream) {
    if (count < 1) throw InvalidArgument("sample: count must be >= 1");
    const auto sampler = kernels::make_sampler(sum.base);
    SampleSet set;
    set.seed = seed;
    set.model_label = sum.n == 1 && sum.normalization == Normalization::none ? sum.base.label()
                                                                              : sum.label();
    set.values.resize(static_cast<std::size_t>(count));
    kernels::fill(kernels::draw_spec(sum, sampler, seed, stream), set.values, exec);
    return set;
}

namespace {

std::map<std::string, double> parse_params(std::string_view body) {
    std::map<std::string, double> out;
    if (trim(body).empty()) return out;
    for (const auto& item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + item + "'");
        out[std::string(trim(std::string_view(item).substr(0, eq)))] =
            parse_double(std::string_view(item).substr(eq + 1));
    }
    return out;
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
}

void require_empty(const std::map<std::string, double>& params, std::string_view family) {
    if (!params.empty())
        throw ParseError("unknown parameter '" + params.begin()->first + "' for " +
                         std::string(family));
}

}  // namespace

RandomVariableModel parse_model(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    std::string family(text.substr(0, colon));
    std::transform(family.begin(), family.end(), family.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    const std::string_view body =
        colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (family == "empirical") {
        const std::string path(trim(body));
        return RandomVariableModel::empirical(read_samples(path), "empirical:" + path);
    }
    if (family == "discrete") {
        std::vector<Atom> atoms;
        for (const auto& item : split(body, ',')) {
            const auto at = item.find('@');
            if (at == std::string::npos) throw ParseError("discrete atom needs value@prob: " + item);
            atoms.push_back({parse_double(std::string_view(item).substr(0, at)),
                             parse_double(std::string_view(item).substr(at + 1))});
        }
        return RandomVariableModel::finite_discrete(std::move(atoms));
    }
    auto params = parse_params(body);
    if (family == "examplea") {
        require_empty(params, family);
        return RandomVariableModel::example_a();
    }
    if (family == "rademacher") {
        require_empty(params, family);
        return RandomVariableModel::rademacher();
    }
    if (family == "gaussian") {
        const double sigma = take(params, "sigma", 1.0);
        require_empty(params, family);
        return RandomVariableModel::gaussian(sigma);
    }
    if (family == "weibull") {
        const double m = take(params, "m", 1.0);
        const double scale = take(params, "scale", 1.0);
        require_empty(params, family);
        return RandomVariableModel::weibull_sym(m, scale);
    }
    throw ParseError("unknown model family '" + family + "'");
}

void write_samples(const std::filesystem::path& path, const SampleSet& set) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "# model=" << set.model_label << " seed=" << set.seed
        << " count=" << set.values.size() << '\n';
    for (double v : set.values) out << format_double(v) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            values.push_back(parse_double(t));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return values;
}

}  // namespace gls
