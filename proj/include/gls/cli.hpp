#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gls/gls_calculus.hpp"
#include "gls/mc_verify.hpp"
#include "gls/tail_engine.hpp"

namespace gls::cli {

/// Everything a run depends on. Models, psi and grids stay in text form so
/// the config echo re-parses to the same values.
struct RunConfig {
    std::string command;

    std::string model = "examplea";
    std::string psi = "natural";
    /// "geom:LO:HI:N", "lin:LO:HI:STEP" or a comma list; empty means the
    /// command's default.
    std::string p_grid;
    std::string u_grid;
    std::int64_t count = 0;
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;
    std::string out;
    std::string plot_dir;

    // moments, tails
    int terms = 1;
    bool normalize = true;
    // glsnorm, antinorm: "LO,HI"; empty means the operation's default range
    std::string range;
    // theta
    std::string theta_p = "lin:1:10:0.5";
    std::string theta_q = "lin:1:10:0.5";
    // bound
    std::string v = "1,1";
    std::string b = "inf";
    std::string bound_p = "2";
    // tails
    std::string family = "subgaussian";
    double m = 2.0;
    // verify
    double tolerance = 1e-6;

    bool operator==(const RunConfig&) const = default;
};

/// Parses argv (without the program name). Throws ParseError on unknown
/// keys or bad values; `--help` leaves command empty.
RunConfig parse_args(const std::vector<std::string>& args, std::string* help_text = nullptr);

/// Config-file text for cfg (defaults included). Run-environment keys
/// (workers, out, plot-dir) are omitted since they never change results.
std::string config_text(const RunConfig& cfg);

std::vector<double> parse_grid(const std::string& text);

/// Executes cfg, writing the primary output to out (or to cfg.out).
/// Returns the process exit status: 0, 1 on errors, 2 on a non-exempt
/// violated verdict.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run with error reporting; the program entry point.
int main(int argc, char** argv);

/// Ratio curve CSV `p,abs_norm,psi,ratio` with a column legend header.
void write_ratio_csv(std::ostream& out, const std::vector<RatioPoint>& curve,
                     const std::string& description);

/// Writes the figure-like tables of a completed run into dir.
void emit_plot_data(const RunConfig& cfg, const std::string& dir);

}  // namespace gls::cli
