#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gls/errors.hpp"
#include "gls/tail_engine.hpp"
#include "oracles.hpp"

using namespace gls;

TEST_CASE("chernoff upper bound for the standard Gaussian") {
    const auto g = RandomVariableModel::gaussian(1.0);
    const auto phi2 = PhiFunction::quadratic();
    CHECK(tail_upper_chernoff(g, phi2, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-7));
    CHECK(tail_upper_chernoff(g, phi2, 0.0) == 1.0);
    for (double u : {0.5, 1.0, 2.0, 3.0, 4.0}) CHECK(tail_upper_chernoff(g, phi2, u) >= oracle::normal_upper_tail(u));
    for (int n : {1, 4, 16}) {
        const SumModel s(g, n);
        CHECK(tail_upper_subgaussian_sum(s, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
        CHECK(tail_upper_chernoff(s, phi2, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(tail_upper_chernoff(RandomVariableModel::weibull_sym(1.0), phi2, 1.0), Infeasible);
}

TEST_CASE("Paley-Zygmund formula") {
    CHECK(paley_zygmund_lower(1.0, 2.0, 2.0, 3.0) ==
          doctest::Approx(std::pow(1 - 0.25, 2) * std::pow(2.0 / 3.0, 4)).epsilon(1e-14));
    CHECK(paley_zygmund_lower(2.0, 2.0, 2.0, 3.0) == 0.0);
    CHECK(paley_zygmund_lower(5.0, 4.0, 2.0, 3.0) == 0.0);
}

TEST_CASE("moment lower bound for a Rademacher pair") {
    const SumModel s(RandomVariableModel::rademacher(), 2, Normalization::none);
    const auto prof = even_moment_profile(s, 64);
    // Oracle: exact |S|_p from the 4-outcome law {-2, 0, 0, 2}.
    for (std::size_t i = 0; i < prof.size(); ++i)
        CHECK(prof.values[i] == doctest::Approx(std::pow(0.5 * std::pow(2.0, prof.grid[i]), 1.0 / prof.grid[i])));
    // At p = 2 the tail point lies beyond |S|_2, so that bound is vacuous.
    CHECK(tail_lower_from_moments(prof, 1.9, 2.0) == 0.0);
    const auto best = tail_lower_best(prof, 1.9);
    CHECK(best.value > 0.0);
    CHECK(best.value <= 0.5);
    CHECK(tail_lower_from_moments(prof, 1.9, 16.0) > 0.0);
}

TEST_CASE("moment lower bound for the Gaussian at u = 1") {
    MomentProfile prof;
    for (int k = 2; k <= 64; k += 2) {
        prof.grid.push_back(k);
        prof.values.push_back(lp_norm(RandomVariableModel::gaussian(1.0), k));
        prof.ci_halfwidths.push_back(0);
    }
    const auto best = tail_lower_best(prof, 1.0);
    CHECK(best.value > 0.0);
    CHECK(best.value <= 2.0 * oracle::normal_upper_tail(1.0));
}

TEST_CASE("exponent estimates from natural-function growth") {
    CHECK(tail_exponent_estimate(RandomVariableModel::example_a()) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(tail_exponent_estimate(RandomVariableModel::gaussian(1.0)) == doctest::Approx(2.0).epsilon(0.05));
    for (double m : {1.0, 2.0, 4.0}) {
        // ln |X|_p = lgamma(1 + p/m) / p up to a constant; finite-p bias grows with m.
        const auto ln_norm = [m](double p) { return std::lgamma(1.0 + p / m) / p; };
        const double exact = std::log(4.0) / (ln_norm(256.0) - ln_norm(64.0));
        const double est = tail_exponent_estimate(RandomVariableModel::weibull_sym(m));
        CHECK(est == doctest::Approx(exact).epsilon(1e-8));
        if (m <= 2.0) CHECK(est == doctest::Approx(m).epsilon(0.05));
    }
    CHECK(std::isinf(tail_exponent_estimate(RandomVariableModel::rademacher())));
}

TEST_CASE("fitted envelopes: exponents and invariants") {
    struct Case {
        RandomVariableModel base;
        EnvelopeFamily family;
        double exponent;
    };
    const std::vector<Case> cases{{RandomVariableModel::example_a(), {TailFamily::subgaussian, 2.0}, 2.0},
                                  {RandomVariableModel::weibull_sym(1.0), {TailFamily::weibull, 1.0}, 1.0},
                                  {RandomVariableModel::weibull_sym(2.0), {TailFamily::weibull, 2.0}, 2.0},
                                  {RandomVariableModel::weibull_sym(4.0), {TailFamily::weibull, 4.0}, 2.0}};
    for (const auto& c : cases) {
        CAPTURE(c.base.label());
        const SumModel s(c.base, 16);
        const auto env = fit_envelope(s, c.family);
        CHECK(env.exponent() == c.exponent);
        CHECK(env.c_upper() > 0.0);
        CHECK(env.c_upper() <= env.c_lower());
        CHECK(std::isfinite(env.c_lower()));
        CHECK(env.satisfies_invariants());
        for (std::size_t i = 0; i < env.u_grid.size(); ++i) {
            CHECK(env.upper[i] >= env.computed_upper[i] * (1 - 1e-12));
            CHECK(env.lower[i] <= env.computed_lower[i] * (1 + 1e-12));
            CHECK(env.computed_lower[i] <= env.computed_upper[i]);
        }
    }
}

TEST_CASE("upper curve of normalized subgaussian sums does not depend on n") {
    const auto g = RandomVariableModel::gaussian(1.0);
    const auto a = fit_envelope(SumModel(g, 4), {TailFamily::subgaussian, 2.0});
    const auto b = fit_envelope(SumModel(g, 16), {TailFamily::subgaussian, 2.0});
    for (std::size_t i = 0; i < a.u_grid.size(); ++i)
        CHECK(a.computed_upper[i] == doctest::Approx(b.computed_upper[i]).epsilon(1e-6));
}

TEST_CASE("envelope errors") {
    const SumModel s(RandomVariableModel::example_a(), 16);
    CHECK_THROWS_AS(fit_envelope(s, {TailFamily::weibull, 1.0}), FamilyMismatch);
    CHECK_THROWS_AS(fit_envelope(SumModel(RandomVariableModel::weibull_sym(1.0), 16), {TailFamily::subgaussian, 2.0}),
                    FamilyMismatch);
    const std::vector<double> bad{0.0, 1.0};
    CHECK_THROWS_AS(fit_envelope(s, {TailFamily::subgaussian, 2.0}, bad), DomainError);
    const auto skew = RandomVariableModel::finite_discrete({{-1.0, 0.75}, {3.0, 0.25}});
    CHECK_THROWS_AS(fit_envelope(SumModel(skew, 4), {TailFamily::subgaussian, 2.0}), InvalidArgument);
}

TEST_CASE("envelope CSV round-trips") {
    const auto env = fit_envelope(SumModel(RandomVariableModel::example_a(), 16), {TailFamily::subgaussian, 2.0});
    std::vector<double> emp(env.u_grid.size(), 0.01), ci(env.u_grid.size(), 1e-4);
    std::ostringstream out;
    write_envelope_csv(out, env, emp, ci);
    CHECK(out.str().rfind("# C_upper=", 0) == 0);
    std::istringstream in(out.str());
    const auto t = read_envelope_csv(in);
    CHECK(t.u == env.u_grid);
    CHECK(t.lower == env.lower);
    CHECK(t.upper == env.upper);
    CHECK(t.empirical == emp);
    CHECK(t.constants.at("C_upper") == env.c_upper());
    CHECK(t.constants.at("C_lower") == env.c_lower());
    CHECK(t.constants.at("exponent") == 2.0);
    std::ostringstream bare;
    write_envelope_csv(bare, env);
    std::istringstream in2(bare.str());
    CHECK(std::isnan(read_envelope_csv(in2).empirical[0]));
}
