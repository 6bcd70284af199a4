#include "gls/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gls/errors.hpp"
#include "gls/format.hpp"
#include "gls/moment_engine.hpp"

namespace gls::cli {

namespace {

const std::vector<std::string> kCommands{"moments", "glsnorm", "antinorm", "theta",
                                         "bound",   "tails",   "verify"};

struct Parser {
    CLI::App app{"Grand Lebesgue Space norms, anti-norms and tail bounds", "glsctl"};
    std::map<std::string, CLI::App*> sub;

    explicit Parser(RunConfig& c) {
        app.set_config("--config", "", "read options from a TOML/INI file");
        app.allow_config_extras(CLI::config_extras_mode::error);
        app.require_subcommand(1);
        app.fallthrough();

        app.add_option("--model", c.model, "examplea | gaussian:sigma=S | rademacher | "
                                            "weibull:m=M,scale=S | discrete:v@p,... | empirical:PATH");
        app.add_option("--psi", c.psi, "natural | power:m=M | blowup:b=B,beta=BETA | degenerate:r=R | "
                                      "tabulated:path=FILE[,b=B]");
        app.add_option("--p-grid", c.p_grid, "geom:LO:HI:N, lin:LO:HI:STEP or a comma list");
        app.add_option("--u-grid", c.u_grid, "tail grid, same forms as --p-grid");
        app.add_option("--count", c.count, "Monte Carlo draws (0: exact only)")->check(CLI::NonNegativeNumber);
        app.add_option("--seed", c.seed, "base seed");
        app.add_option("--workers", c.workers, "thread cap (0: OpenMP default)")
            ->envname("GLS_WORKERS")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--out", c.out, "write the primary output here instead of stdout");
        app.add_option("--plot-dir", c.plot_dir, "directory for plot-ready CSV tables");

        for (const auto& name : kCommands) {
            auto* s = app.add_subcommand(name);
            s->configurable();
            s->allow_config_extras(CLI::config_extras_mode::error);
            s->callback([&c, name] { c.command = name; });
            sub[name] = s;
        }
        sub["moments"]->description("absolute-moment profile CSV");
        sub["moments"]->add_option("--n", c.terms, "number of iid summands")->check(CLI::PositiveNumber);
        sub["moments"]->add_option("--normalize", c.normalize, "scale the sum by n^{-1/2}");
        sub["glsnorm"]->description("sup_p |X|_p / psi(p)");
        sub["glsnorm"]->add_option("--range", c.range, "p-range LO,HI");
        sub["antinorm"]->description("inf_p |X|_p / psi(p)");
        sub["antinorm"]->add_option("--range", c.range, "p-range LO,HI");
        sub["theta"]->description("closed form against numeric minimum of the power-mean ratio");
        sub["theta"]->add_option("--p", c.theta_p, "p values");
        sub["theta"]->add_option("--q", c.theta_q, "q values");
        sub["bound"]->description("anti-norm lower bound for a sum of independent terms");
        sub["bound"]->add_option("--v", c.v, "anti-norms V(X_i), comma list");
        sub["bound"]->add_option("--b", c.b, "upper end of the psi domain (inf allowed)");
        sub["bound"]->add_option("--p", c.bound_p, "p values (inf allowed)");
        sub["tails"]->description("tail envelope CSV for a normalized iid sum");
        sub["tails"]->add_option("--n", c.terms, "number of iid summands")->check(CLI::PositiveNumber);
        sub["tails"]->add_option("--family", c.family, "subgaussian | weibull")
            ->check(CLI::IsMember({"subgaussian", "weibull"}));
        sub["tails"]->add_option("--m", c.m, "weibull exponent");
        sub["verify"]->description("full verification suite, CSV report");
        sub["verify"]->add_option("--tolerance", c.tolerance, "equality tolerance for norm-stability checks");
    }
};

std::string quoted(const std::string& s) { return '"' + s + '"'; }

double parse_real(const std::string& text) {
    const auto t = std::string(trim(text));
    if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
    return parse_double(t);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_real(item));
    return out;
}

PRange parse_range(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != 2) throw ParseError("range: expected LO,HI, got '" + text + "'");
    return {v[0], v[1]};
}

struct Output {
    std::ofstream file;
    std::ostream* stream;
    Output(const std::string& path, std::ostream& fallback) : stream(&fallback) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw IoError("cannot write " + path);
        stream = &file;
    }
};

void write_header(std::ostream& out, const RunConfig& cfg) {
    std::istringstream lines(config_text(cfg));
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
}

RandomVariableModel model_of(const RunConfig& cfg) { return parse_model(cfg.model); }

void write_stream_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    body(f);
}

TailEnvelope envelope_of(const RunConfig& cfg, const SumModel& sum) {
    const EnvelopeFamily fam{cfg.family == "weibull" ? TailFamily::weibull : TailFamily::subgaussian, cfg.m};
    const auto u = parse_grid(cfg.u_grid);
    return fit_envelope(sum, fam, u);
}

int run_moments(const RunConfig& cfg, std::ostream& out) {
    const SumModel sum(model_of(cfg), cfg.terms, cfg.normalize ? Normalization::inv_sqrt_n : Normalization::none);
    const auto grid = parse_grid(cfg.p_grid);
    MomentProfile prof;
    if (cfg.count > 0)
        prof = sampled_profile(sum, grid, cfg.count, cfg.seed);
    else if (cfg.terms == 1)
        prof = natural_function(sum.base, grid);
    else
        prof = natural_function(sum, grid);
    write_header(out, cfg);
    write_profile_csv(out, prof);
    return 0;
}

int run_norm(const RunConfig& cfg, std::ostream& out, bool anti) {
    const auto model = model_of(cfg);
    const auto psi = parse_psi(cfg.psi, &model);
    const auto range = parse_range(cfg.range);
    char buf[128];
    write_header(out, cfg);
    if (anti) {
        const auto r = anti_norm(model, psi, range);
        std::snprintf(buf, sizeof buf, "V=%.6f\n", r.value);
        out << buf << "argmin_p=" << format_double(r.argmin_p) << '\n';
        out << "value=" << format_double(r.value) << '\n';
    } else {
        const auto r = gls_norm_detail(model, psi, range);
        std::snprintf(buf, sizeof buf, "G=%.6f\n", r.value);
        out << buf << "argmax_p=" << format_double(r.arg_p) << '\n';
        out << "value=" << format_double(r.value) << '\n';
    }
    return 0;
}

int run_theta(const RunConfig& cfg, std::ostream& out) {
    const auto ps = parse_grid(cfg.theta_p);
    const auto qs = parse_grid(cfg.theta_q);
    write_header(out, cfg);
    out << "p,q,theta_closed,theta_numeric\n";
    for (double p : ps)
        for (double q : qs)
            out << format_double(p) << ',' << format_double(q) << ',' << format_double(theta_closed(p, q))
                << ',' << format_double(theta_numeric(p, q)) << '\n';
    return 0;
}

int run_bound(const RunConfig& cfg, std::ostream& out) {
    const auto v = parse_list(cfg.v);
    const double b = parse_real(cfg.b);
    write_header(out, cfg);
    out << "p,kappa,bound\n";
    for (double p : parse_list(cfg.bound_p))
        out << format_double(p) << ',' << format_double(std::isinf(p) ? 1.0 : kappa(b, p)) << ','
            << format_double(sum_anti_norm_lower(v, b, p)) << '\n';
    return 0;
}

int run_tails(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const SumModel sum(model_of(cfg), cfg.terms);
    const auto env = envelope_of(cfg, sum);
    std::vector<double> emp, ci;
    int status = 0;
    if (cfg.count > 0) {
        const auto check = verify_envelope(env, sum, cfg.count, cfg.seed);
        for (const auto& row : check.rows) {
            emp.push_back(row.empirical);
            ci.push_back(0.5 * (row.ci_hi - row.ci_lo));
        }
        if (check.insufficient_samples) err << "warning: InsufficientSamples at u=" << format_double(env.u_grid.back()) << '\n';
        if (check.overall.verdict == Verdict::violated) status = 2;
    }
    write_header(out, cfg);
    write_envelope_csv(out, env, emp, ci);
    return status;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SuiteOptions opt;
    opt.seed = cfg.seed;
    opt.count = cfg.count;
    opt.tolerance = cfg.tolerance;
    const auto reports = run_suite(opt);
    write_header(out, cfg);
    write_reports_csv(out, reports);
    write_reports_text(err, reports);
    return has_violation(reports) ? 2 : 0;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    const auto t = std::string(trim(text));
    if (t.rfind("geom:", 0) == 0 || t.rfind("lin:", 0) == 0) {
        const auto parts = split(t, ':');
        if (parts.size() != 4) throw ParseError("grid: expected KIND:LO:HI:X, got '" + t + "'");
        const double lo = parse_real(parts[1]);
        const double hi = parse_real(parts[2]);
        if (parts[0] == "geom") {
            const double n = parse_double(parts[3]);
            if (n != std::floor(n) || n < 1) throw ParseError("grid: point count must be a positive integer");
            return geometric_grid(lo, hi, static_cast<int>(n));
        }
        return linear_grid(lo, hi, parse_real(parts[3]));
    }
    auto v = parse_list(t);
    if (v.empty()) throw ParseError("grid: empty");
    return v;
}

RunConfig parse_args(const std::vector<std::string>& args, std::string* help_text) {
    RunConfig c;
    Parser parser(c);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        parser.app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        c.command.clear();
        if (help_text) *help_text = parser.app.help();
        return c;
    } catch (const CLI::ParseError& e) {
        throw ParseError(std::string(e.get_name()) + ": " + e.what());
    }
    for (const auto& [name, s] : parser.sub)
        if (s->parsed()) c.command = name;
    if (c.command.empty()) throw ParseError("no subcommand given");

    // Resolve command-dependent defaults so the echo is explicit.
    if (c.p_grid.empty()) c.p_grid = c.count > 0 ? "lin:1:16:0.5" : "lin:1:64:1";
    if (c.u_grid.empty()) c.u_grid = "lin:1:3:0.25";
    if (c.range.empty()) c.range = c.command == "antinorm" ? "2,inf" : "1,inf";
    if (c.command == "tails" && parser.sub["tails"]->count("--n") == 0) c.terms = 16;
    if (c.command == "verify" && c.count == 0) c.count = kDefaultCount;
    if (c.command == "tails" && c.family == "subgaussian") c.m = 2.0;
    return c;
}

std::string config_text(const RunConfig& c) {
    std::ostringstream o;
    o << "model=" << quoted(c.model) << '\n';
    o << "psi=" << quoted(c.psi) << '\n';
    o << "p-grid=" << quoted(c.p_grid) << '\n';
    o << "u-grid=" << quoted(c.u_grid) << '\n';
    o << "count=" << c.count << '\n';
    o << "seed=" << c.seed << '\n';
    o << '[' << c.command << "]\n";
    if (c.command == "moments") {
        o << "n=" << c.terms << '\n';
        o << "normalize=" << (c.normalize ? "true" : "false") << '\n';
    } else if (c.command == "glsnorm" || c.command == "antinorm") {
        o << "range=" << quoted(c.range) << '\n';
    } else if (c.command == "theta") {
        o << "p=" << quoted(c.theta_p) << '\n';
        o << "q=" << quoted(c.theta_q) << '\n';
    } else if (c.command == "bound") {
        o << "v=" << quoted(c.v) << '\n';
        o << "b=" << quoted(c.b) << '\n';
        o << "p=" << quoted(c.bound_p) << '\n';
    } else if (c.command == "tails") {
        o << "n=" << c.terms << '\n';
        o << "family=" << quoted(c.family) << '\n';
        o << "m=" << format_double(c.m) << '\n';
    } else if (c.command == "verify") {
        o << "tolerance=" << format_double(c.tolerance) << '\n';
    }
    return o.str();
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioPoint>& curve, const std::string& description) {
    out << "# " << description << '\n';
    out << "# p: moment order; abs_norm: |X|_p; psi: psi(p); ratio: abs_norm / psi\n";
    out << "p,abs_norm,psi,ratio\n";
    for (const auto& pt : curve)
        out << format_double(pt.p) << ',' << format_double(pt.abs_norm) << ',' << format_double(pt.psi) << ','
            << format_double(pt.ratio) << '\n';
}

void emit_plot_data(const RunConfig& cfg, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
    if (cfg.command == "glsnorm" || cfg.command == "antinorm" || cfg.command == "moments") {
        const auto model = model_of(cfg);
        const auto psi = parse_psi(cfg.psi, &model);
        const auto grid = parse_grid(cfg.p_grid);
        const auto curve = ratio_curve(model, psi, grid);
        write_stream_file(fs::path(dir) / ("ratio_" + cfg.command + ".csv"), [&](std::ostream& f) {
            write_ratio_csv(f, curve, "ratio curve model=" + model.spec() + " psi=" + psi.spec());
        });
    } else if (cfg.command == "tails") {
        const SumModel sum(model_of(cfg), cfg.terms);
        const auto env = envelope_of(cfg, sum);
        write_stream_file(fs::path(dir) / "envelope.csv", [&](std::ostream& f) { write_envelope_csv(f, env); });
    }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        set_worker_count(cfg.workers);
        Output o(cfg.out, out);
        int status = 0;
        if (cfg.command == "moments")
            status = run_moments(cfg, *o.stream);
        else if (cfg.command == "glsnorm")
            status = run_norm(cfg, *o.stream, false);
        else if (cfg.command == "antinorm")
            status = run_norm(cfg, *o.stream, true);
        else if (cfg.command == "theta")
            status = run_theta(cfg, *o.stream);
        else if (cfg.command == "bound")
            status = run_bound(cfg, *o.stream);
        else if (cfg.command == "tails")
            status = run_tails(cfg, *o.stream, err);
        else if (cfg.command == "verify")
            status = run_verify(cfg, *o.stream, err);
        else
            throw ParseError("unknown command '" + cfg.command + "'");
        if (!cfg.plot_dir.empty()) emit_plot_data(cfg, cfg.plot_dir);
        return status;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        std::string help;
        const auto cfg = parse_args(args, &help);
        if (cfg.command.empty()) {
            std::cout << help;
            return 0;
        }
        return run(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace gls::cli
