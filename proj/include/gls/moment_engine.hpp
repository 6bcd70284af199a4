#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gls/rv_models.hpp"

namespace gls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Provenance { analytic, quadrature, empirical };

std::string to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// Tabulation p -> |X|_p. ci_halfwidths are three standard errors for
/// empirical profiles and zero otherwise.
struct MomentProfile {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> ci_halfwidths;
    Provenance provenance = Provenance::analytic;
    /// Upper end b of the p-domain [1, b) the profile describes.
    double b = kInf;

    std::size_t size() const noexcept { return grid.size(); }
    double lo() const { return grid.front(); }
    double hi() const { return grid.back(); }

    /// Log-log linear interpolation (exact at grid points). Throws
    /// OutOfDomain outside [lo, hi].
    double at(double p) const;
    double ci_at(double p) const;

    /// p -> |X|_p nondecreasing: within tol for exact provenance, within
    /// the combined CI for empirical ones.
    bool is_monotone(double tol = 1e-9) const;
};

/// CSV with header `p,value,ci_halfwidth,provenance`.
void write_profile_csv(std::ostream& out, const MomentProfile& profile);
MomentProfile read_profile_csv(std::istream& in);

std::vector<double> geometric_grid(double lo, double hi, int count);
std::vector<double> linear_grid(double lo, double hi, double step);

// ---- absolute moments -----------------------------------------------------

/// (E|X|^p)^{1/p}. Closed forms for every analytic kind; plug-in estimate for
/// Empirical (refused with DomainError when p > log2(sample count)).
double lp_norm(const RandomVariableModel& model, double p);

/// Same quantity by adaptive quadrature of |x|^p f(x); density kinds only.
double lp_norm_quadrature(const RandomVariableModel& model, double p);

/// Exact routes only: Gaussian base, finite laws with <= 2^20 joint outcomes,
/// or even integer p (moment recursion). Otherwise UnsupportedKind; use
/// sampled_profile for those.
double lp_norm(const SumModel& sum, double p);

/// Number of joint outcomes of a discrete sum, saturating at UINT64_MAX.
std::uint64_t joint_outcome_count(const SumModel& sum);
inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 20;

/// Exact law of a sum of discrete iid terms by enumeration of all joint
/// outcomes (merged by value). DomainError above kMaxEnumeration.
std::vector<Atom> enumerate_sum(const SumModel& sum);

/// E S^k for k = 0..max_order by binomial convolution of raw moments.
std::vector<double> moments_of_sum(const SumModel& sum, int max_order);

MomentProfile natural_function(const RandomVariableModel& model, std::span<const double> grid);
MomentProfile natural_function(const SumModel& sum, std::span<const double> grid);

/// Plug-in profile of a sample with delta-method CIs.
MomentProfile sampled_profile(std::span<const double> values, std::span<const double> grid,
                              Execution exec = Execution::parallel);
MomentProfile sampled_profile(const SumModel& sum, std::span<const double> grid,
                              std::int64_t count, std::uint64_t seed,
                              Execution exec = Execution::parallel, std::uint64_t stream = 0);

// ---- moment generating function --------------------------------------------

/// max over alpha = +-1 of ln E exp(alpha lambda X); +inf outside the
/// finiteness domain.
double mgf_log(const RandomVariableModel& model, double lambda);
double mgf_log(const SumModel& sum, double lambda);
double mgf_radius(const SumModel& sum);

// ---- Young-Orlicz functions and their conjugates --------------------------

/// Even convex function with phi(0) = 0, finite on |lambda| < lambda0
/// (quadratic also at |lambda| = lambda0).
class PhiFunction {
  public:
    enum class Form { quadratic, closed_form, natural };

    /// 0.5 lambda^2, restricted to |lambda| <= lambda0.
    static PhiFunction quadratic(double lambda0 = kInf);
    /// id in {"quadratic" [c] -> c lambda^2 / 2, "log_cosh", "laplace" [s] ->
    /// -ln(1 - s^2 lambda^2)}.
    static PhiFunction closed_form(const std::string& id, std::vector<double> params = {});
    static PhiFunction natural_of(const RandomVariableModel& model);
    static PhiFunction natural_of(const SumModel& sum);

    double operator()(double lambda) const;
    double lambda0() const noexcept { return lambda0_; }
    Form form() const noexcept { return form_; }
    const std::string& name() const noexcept { return name_; }

  private:
    PhiFunction(std::function<double(double)> fn, double lambda0, Form form, std::string name);

    std::function<double(double)> fn_;
    double lambda0_;
    Form form_;
    std::string name_;
};

/// Convex function on [0, lambda0] given as a callable or a table.
struct ConvexFunction {
    std::function<double(double)> fn;
    double lambda0 = kInf;
};

/// Piecewise linear interpolation of (grid, values); +inf beyond the grid.
ConvexFunction tabulated_convex(std::vector<double> grid, std::vector<double> values);

inline constexpr double kLambdaCap = 100.0;

/// sup over lambda in [0, min(lambda0, 100)] of lambda u - g(lambda), u >= 0.
double young_fenchel(const ConvexFunction& g, double u);
double young_fenchel(const PhiFunction& phi, double u);

struct BPhiNorm {
    double value = 0.0;
    PhiFunction phi;
    double tolerance = 0.0;
};

inline constexpr double kTauCap = 1e3;
inline constexpr double kTauTolerance = 1e-8;

/// 200-point geometric grid inside (0, min(lambda0, 100)].
std::vector<double> default_lambda_grid(double lambda0, int count = 200);

/// Least tau with log_mgf(lambda) <= phi(lambda tau) on the grid, by
/// bisection on [0, 1e3]. Infeasible when tau = 1e3 fails.
BPhiNorm bphi_norm(const std::function<double(double)>& log_mgf, const PhiFunction& phi,
                   std::span<const double> lambda_grid = {});
BPhiNorm bphi_norm(const RandomVariableModel& model, const PhiFunction& phi,
                   std::span<const double> lambda_grid = {});
BPhiNorm bphi_norm(const SumModel& sum, const PhiFunction& phi,
                   std::span<const double> lambda_grid = {});

/// sqrt(sum v_i^2): upper bound for the subgaussian norm of a sum of
/// independent terms with subgaussian norms v_i.
double subgaussian_sum_norm_upper(std::span<const double> norms);

}  // namespace gls
