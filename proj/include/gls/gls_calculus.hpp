#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gls/moment_engine.hpp"
#include "gls/rv_models.hpp"

namespace gls {

/// psi(p) = p^{1/m}, b = inf.
struct PowerPsi {
    double m = 2.0;
};

/// psi(p) = (b - p)^{-beta} on [1, b).
struct BlowupPsi {
    double b = 2.0;
    double beta = 1.0;
};

/// psi(r) = 1 and psi(p) = +inf for p != r.
struct DegeneratePsi {
    double r = 2.0;
};

/// psi(p) = |X|_p: exact through the model when one is held, otherwise
/// interpolated from the profile.
struct NaturalPsi {
    std::optional<RandomVariableModel> model;
    MomentProfile profile;
};

/// Log-log interpolated table; +inf inside [1, b) but off the table.
struct TabulatedPsi {
    std::vector<double> grid;
    std::vector<double> values;
    double b = kInf;
    std::string source;
};

using PsiFamily = std::variant<PowerPsi, BlowupPsi, DegeneratePsi, NaturalPsi, TabulatedPsi>;

class GeneratingFunction {
  public:
    static GeneratingFunction power(double m);
    static GeneratingFunction blowup(double b, double beta);
    static GeneratingFunction degenerate(double r);
    static GeneratingFunction natural(const RandomVariableModel& model);
    static GeneratingFunction natural(MomentProfile profile);
    static GeneratingFunction tabulated(std::vector<double> grid, std::vector<double> values,
                                        double b = kInf, std::string source = {});

    /// psi(p), possibly +inf. OutOfDomain for p outside [1, b).
    double operator()(double p) const;
    double b() const noexcept;
    /// sup_p psi(p) < inf.
    bool is_bounded() const;
    const PsiFamily& family() const noexcept { return family_; }

    /// Text form: "power:m=M", "blowup:b=B,beta=BETA", "degenerate:r=R",
    /// "natural", "tabulated:path=FILE[,b=B]".
    std::string spec() const;

  private:
    explicit GeneratingFunction(PsiFamily family);
    PsiFamily family_;
};

inline double psi_eval(const GeneratingFunction& gf, double p) { return gf(p); }

/// "natural" binds to natural_model (required then); tabulated tables are
/// read as CSV `p,value` rows.
GeneratingFunction parse_psi(std::string_view text, const RandomVariableModel* natural_model = nullptr);

/// Closed p-interval; hi = inf means "up to b".
struct PRange {
    double lo = 2.0;
    double hi = kInf;
};

/// [2, b): keeps the anti-norm inside the range where the Naor-Oleszkiewicz
/// inequality is stated.
inline constexpr PRange kNaorRange{2.0, kInf};
/// [1, b), the literal definition range.
inline constexpr PRange kFullRange{1.0, kInf};

inline constexpr int kPGridPoints = 128;
inline constexpr double kPGridCap = 64.0;

/// Scan grid: 128 geometric points on [lo, min(b - 1e-3 b, 64, hi)].
std::vector<double> p_scan_grid(const GeneratingFunction& gf, PRange range);

struct ExtremumResult {
    double value = 0.0;
    double arg_p = 0.0;
};

struct AntiNormResult {
    double value = 0.0;
    double argmin_p = 0.0;
    MomentProfile profile_used;
    /// CI half-width of value (empirical profiles), else 0.
    double ci_halfwidth = 0.0;
};

/// sup_p |X|_p / psi(p); points with psi = +inf are skipped.
ExtremumResult gls_norm_detail(const MomentProfile& profile, const GeneratingFunction& gf,
                               PRange range = kFullRange);
ExtremumResult gls_norm_detail(const RandomVariableModel& model, const GeneratingFunction& gf,
                               PRange range = kFullRange);
double gls_norm(const MomentProfile& profile, const GeneratingFunction& gf, PRange range = kFullRange);
double gls_norm(const RandomVariableModel& model, const GeneratingFunction& gf,
                PRange range = kFullRange);

/// inf_p |X|_p / psi(p) over the finiteness domain of psi.
AntiNormResult anti_norm(const MomentProfile& profile, const GeneratingFunction& gf,
                         PRange range = kNaorRange);
AntiNormResult anti_norm(const RandomVariableModel& model, const GeneratingFunction& gf,
                         PRange range = kNaorRange);

struct RatioPoint {
    double p;
    double abs_norm;
    double psi;
    double ratio;
};

std::vector<RatioPoint> ratio_curve(const RandomVariableModel& model, const GeneratingFunction& gf,
                                    std::span<const double> grid);

// ---- combinators ---------------------------------------------------------

/// min(1, 2^{1/q - 1/p}).
double theta_closed(double p, double q);
/// 401 points, z = 1e-20 .. 1e20, geometric (contains z = 1).
std::vector<double> default_z_grid();
/// inf_{z>0} (z^q + 1)^{1/q} / (z^p + 1)^{1/p} on z_grid with golden refinement.
double theta_numeric(double p, double q, std::span<const double> z_grid = {});

/// min(1, 2^{1/b - 1/p}); b = inf allowed.
double kappa(double b, double p);

/// kappa_b(p) (sum v_i^p)^{1/p}; p = inf gives max v_i.
double sum_anti_norm_lower(std::span<const double> v, double b, double p);

/// (sum |X_i|_q^q)^{1/q}; DomainError for q < 2.
double naor_rhs(double q, std::span<const double> norms);

/// n^{1/q - 1/2} |X_1|_q; DomainError for q < 2.
double power_level_lower(double q, int n, double norm1);

}  // namespace gls
