#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gls/errors.hpp"
#include "gls/moment_engine.hpp"
#include "oracles.hpp"

using namespace gls;

TEST_CASE("lp_norm closed values") {
    const auto x = RandomVariableModel::example_a();
    CHECK(lp_norm(x, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    for (double p : {1.0, 4.0, 8.0})
        CHECK(lp_norm(x, p) == doctest::Approx(std::sqrt(2.0) * std::pow(std::tgamma(p / 2 + 1), 1 / p)).epsilon(1e-13));
    for (double p : {1.0, 2.5, 7.0, 30.0}) CHECK(lp_norm(RandomVariableModel::rademacher(), p) == 1.0);
    const auto g = RandomVariableModel::gaussian(2.0);
    CHECK(lp_norm(g, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lp_norm(g, 4.0) == doctest::Approx(2.0 * std::pow(3.0, 0.25)).epsilon(1e-14));
    CHECK_THROWS_AS(lp_norm(x, 0.5), DomainError);
}

TEST_CASE("quadrature of the densities matches the closed forms") {
    const std::vector<RandomVariableModel> models{RandomVariableModel::example_a(), RandomVariableModel::gaussian(1.3),
                                                  RandomVariableModel::weibull_sym(1.0, 2.0),
                                                  RandomVariableModel::weibull_sym(3.0, 0.7)};
    for (const auto& m : models)
        for (double p = 1.0; p <= 20.0; p += 1.5) {
            CAPTURE(m.label());
            CAPTURE(p);
            CHECK(lp_norm_quadrature(m, p) == doctest::Approx(lp_norm(m, p)).epsilon(1e-6));
        }
}

TEST_CASE("simpson oracle agrees with the weibull moment closed form") {
    const auto w = RandomVariableModel::weibull_sym(1.7, 1.2);
    for (double p : {1.0, 3.0, 6.0}) {
        const double m = oracle::simpson([&](double t) { return 2.0 * std::pow(t, p) * density(w, t); }, 0.0, 60.0, 400000);
        CHECK(lp_norm(w, p) == doctest::Approx(std::pow(m, 1.0 / p)).epsilon(1e-8));
    }
}

TEST_CASE("natural function of example A grows like sqrt(p/e)") {
    const auto x = RandomVariableModel::example_a();
    const std::vector<double> grid{2.0, 50.0, 200.0, 1000.0};
    const auto prof = natural_function(x, grid);
    CHECK(prof.values[0] == doctest::Approx(std::sqrt(2.0)));
    const double r50 = prof.values[1] / std::sqrt(50.0 / M_E);
    CHECK(r50 > 0.9);
    CHECK(r50 < 1.1);
    // sqrt(2) Gamma(p/2 + 1)^{1/p} ~ sqrt(p/e), so values / sqrt(p) -> e^{-1/2}.
    CHECK(prof.values[3] / std::sqrt(1000.0) == doctest::Approx(std::exp(-0.5)).epsilon(5e-3));
    CHECK(natural_function(RandomVariableModel::gaussian(1.0), std::vector<double>{2.0}).values[0] ==
          doctest::Approx(1.0));
}

TEST_CASE("property: Lyapunov monotonicity on random models") {
    oracle::Lcg rng{12345};
    const auto grid = geometric_grid(1.0, 40.0, 60);
    for (int trial = 0; trial < 40; ++trial) {
        const int kind = trial % 4;
        RandomVariableModel m = RandomVariableModel::example_a();
        if (kind == 1) m = RandomVariableModel::gaussian(rng.in(0.1, 5.0));
        if (kind == 2) m = RandomVariableModel::weibull_sym(rng.in(0.5, 4.0), rng.in(0.2, 3.0));
        if (kind == 3) {
            const double a = rng.in(0.1, 3.0), pa = rng.in(0.05, 0.95);
            m = RandomVariableModel::finite_discrete({{-a, pa}, {a * pa / (1 - pa), 1 - pa}});
        }
        CAPTURE(m.label());
        const auto prof = natural_function(m, grid);
        CHECK(prof.is_monotone(1e-9));
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(prof.values[i - 1] <= prof.values[i] + 1e-9);
    }
}

TEST_CASE("property: homogeneity of |cX|_p") {
    for (double c : {-2.0, 0.5, 3.0}) {
        const auto d = RandomVariableModel::finite_discrete({{-1.0, 0.75}, {3.0, 0.25}});
        const auto dc = RandomVariableModel::finite_discrete({{-c, 0.75}, {3.0 * c, 0.25}});
        for (double p : {1.0, 2.0, 5.5}) CHECK(lp_norm(dc, p) == doctest::Approx(std::abs(c) * lp_norm(d, p)).epsilon(1e-12));
    }
}

TEST_CASE("sums: enumeration and moment convolution against the binomial oracle") {
    for (int n : {2, 3, 4, 7}) {
        const SumModel s(RandomVariableModel::rademacher(), n, Normalization::none);
        CHECK(joint_outcome_count(s) == (1ULL << n));
        for (double p : {1.0, 2.0, 3.0, 4.0, 9.5})
            CHECK(lp_norm(s, p) ==
                  doctest::Approx(std::pow(oracle::rademacher_sum_abs_moment(n, p), 1.0 / p)).epsilon(1e-12));
    }
    // Moments of an example A sum: E S^2 = n E X^2, E S^4 = n E X^4 + 3n(n-1)(E X^2)^2.
    const SumModel a(RandomVariableModel::example_a(), 5, Normalization::none);
    const auto m = moments_of_sum(a, 4);
    CHECK(m[2] == doctest::Approx(10.0));
    CHECK(m[4] == doctest::Approx(5 * 8.0 + 3 * 5 * 4 * 4.0));
    CHECK(m[1] == doctest::Approx(0.0));
    CHECK(lp_norm(a, 4.0) == doctest::Approx(std::pow(m[4], 0.25)));
    CHECK_THROWS_AS(lp_norm(a, 3.0), UnsupportedKind);
    // Gaussian sums stay Gaussian.
    const SumModel g(RandomVariableModel::gaussian(1.0), 8, Normalization::none);
    CHECK(lp_norm(g, 4.0) == doctest::Approx(std::pow(3.0 * 64.0, 0.25)));
}

TEST_CASE("sampled profiles: consistency, CI coverage and the log2 N guard") {
    const auto grid = std::vector<double>{2.0, 4.0, 8.0};
    const SumModel s(RandomVariableModel::example_a(), 1, Normalization::none);
    const auto prof = sampled_profile(s, grid, 1 << 20, 17);
    CHECK(prof.provenance == Provenance::empirical);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(prof.ci_halfwidths[i] > 0.0);
        CHECK(std::abs(prof.values[i] - lp_norm(s.base, grid[i])) < prof.ci_halfwidths[i]);
    }
    CHECK_THROWS_AS(sampled_profile(s, std::vector<double>{21.0}, 1 << 20, 1), DomainError);
    CHECK_THROWS_AS(lp_norm(RandomVariableModel::empirical(std::vector<double>(1000, 0.0)), 12.0), DomainError);
    const auto serial = sampled_profile(s, grid, 100000, 3, Execution::serial);
    const auto parallel = sampled_profile(s, grid, 100000, 3, Execution::parallel);
    CHECK(serial.values == parallel.values);
}

TEST_CASE("profile CSV round-trips") {
    MomentProfile p = natural_function(RandomVariableModel::example_a(), geometric_grid(1.0, 30.0, 11));
    std::ostringstream out;
    write_profile_csv(out, p);
    CHECK(out.str().rfind("p,value,ci_halfwidth,provenance\n", 0) == 0);
    std::istringstream in(out.str());
    const auto q = read_profile_csv(in);
    CHECK(q.grid == p.grid);
    CHECK(q.values == p.values);
    CHECK(q.provenance == p.provenance);
    CHECK(p.at(p.grid[3]) == p.values[3]);
    CHECK_THROWS_AS(p.at(40.0), OutOfDomain);
}

TEST_CASE("mgf_log closed forms") {
    for (double l : {0.0, 0.3, 1.0, 4.0}) {
        CHECK(mgf_log(RandomVariableModel::gaussian(1.0), l) == doctest::Approx(0.5 * l * l));
        CHECK(mgf_log(RandomVariableModel::rademacher(), l) == doctest::Approx(std::log(std::cosh(l))).epsilon(1e-14));
    }
    CHECK(mgf_log(RandomVariableModel::example_a(), 0.0) == 0.0);
    CHECK(mgf_log(RandomVariableModel::weibull_sym(1.0, 1.0), 0.5) == doctest::Approx(-std::log(0.75)));
    CHECK(std::isinf(mgf_log(RandomVariableModel::weibull_sym(1.0, 1.0), 1.5)));
    CHECK(std::isinf(mgf_log(RandomVariableModel::weibull_sym(0.5, 1.0), 0.01)));
    CHECK(mgf_log(RandomVariableModel::example_a(), -0.7) == mgf_log(RandomVariableModel::example_a(), 0.7));
}

TEST_CASE("mgf_log of densities against direct integration of E cosh") {
    const std::vector<RandomVariableModel> models{RandomVariableModel::example_a(),
                                                  RandomVariableModel::weibull_sym(2.0, 1.0),
                                                  RandomVariableModel::weibull_sym(3.0, 0.8)};
    for (const auto& m : models)
        for (double l : {0.2, 1.0, 3.0}) {
            CAPTURE(m.label());
            CAPTURE(l);
            const double e = oracle::simpson([&](double t) { return 2.0 * std::cosh(l * t) * density(m, t); }, 0.0, 40.0, 400000);
            CHECK(mgf_log(m, l) == doctest::Approx(std::log(e)).epsilon(1e-8));
        }
}

TEST_CASE("property: mgf_log midpoint convexity on grids") {
    const std::vector<RandomVariableModel> models{RandomVariableModel::example_a(), RandomVariableModel::rademacher(),
                                                  RandomVariableModel::weibull_sym(1.0, 1.0),
                                                  RandomVariableModel::weibull_sym(2.5, 1.0),
                                                  RandomVariableModel::finite_discrete({{-1.0, 0.8}, {4.0, 0.2}})};
    for (const auto& m : models) {
        const double hi = std::min(5.0, 0.95 * mgf_radius(m));
        const auto grid = linear_grid(0.0, hi, hi / 40);
        std::vector<double> f;
        for (double l : grid) f.push_back(mgf_log(m, l));
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            CAPTURE(m.label());
            CHECK(f[i] <= 0.5 * (f[i - 1] + f[i + 1]) + 1e-9);
        }
    }
}

TEST_CASE("young_fenchel of phi2 and its clamped form") {
    const auto phi = PhiFunction::quadratic();
    for (double u : {0.0, 0.5, 1.0, 2.0, 5.0}) CHECK(std::abs(young_fenchel(phi, u) - 0.5 * u * u) < 1e-8);
    const auto clamped = PhiFunction::quadratic(1.0);
    const double grid = oracle::conjugate_grid([](double l) { return 0.5 * l * l; }, 2.0, 1.0);
    CHECK(std::abs(young_fenchel(clamped, 2.0) - 1.5) < 1e-8);
    CHECK(std::abs(young_fenchel(clamped, 2.0) - grid) < 1e-8);
    CHECK(young_fenchel(PhiFunction::closed_form("log_cosh"), 0.0) == doctest::Approx(0.0));
}

TEST_CASE("young_fenchel against grid search for other convex functions") {
    const auto lc = PhiFunction::closed_form("log_cosh");
    const auto lap = PhiFunction::closed_form("laplace", {1.0});
    for (double u : {0.1, 0.5, 0.9}) {
        CHECK(young_fenchel(lc, u) ==
              doctest::Approx(oracle::conjugate_grid([](double l) { return std::log(std::cosh(l)); }, u, 20.0)).epsilon(1e-7));
        // -ln(1 - l^2) is finite on (-1, 1) only.
        CHECK(young_fenchel(lap, u) ==
              doctest::Approx(oracle::conjugate_grid([](double l) { return l < 1 ? -std::log1p(-l * l) : INFINITY; }, u, 1.0))
                  .epsilon(1e-7));
    }
    const auto tab = tabulated_convex({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 2.0, 4.5});
    CHECK(young_fenchel(tab, 1.0) == doctest::Approx(oracle::conjugate_grid(tab.fn, 1.0, 2.0)).epsilon(1e-7));
}

TEST_CASE("property: phi2 conjugate applied twice returns phi2") {
    const auto nu_grid = linear_grid(0.0, 30.0, 0.01);
    std::vector<double> nu;
    for (double u : nu_grid) nu.push_back(young_fenchel(PhiFunction::quadratic(), u));
    const auto nu_fn = tabulated_convex(nu_grid, nu);
    for (double l : {0.0, 0.5, 1.0, 2.0, 4.0}) CHECK(std::abs(young_fenchel(nu_fn, l) - 0.5 * l * l) < 1e-6);
}

TEST_CASE("property: Fenchel-Young inequality") {
    oracle::Lcg rng{7};
    const auto phi = PhiFunction::closed_form("log_cosh");
    for (int i = 0; i < 200; ++i) {
        const double l = rng.in(0.0, 10.0), u = rng.in(0.0, 0.99);
        CHECK(l * u <= phi(l) + young_fenchel(phi, u) + 1e-9);
    }
}

TEST_CASE("B(phi) norms") {
    const auto phi2 = PhiFunction::quadratic();
    CHECK(bphi_norm(RandomVariableModel::gaussian(1.0), phi2).value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(bphi_norm(RandomVariableModel::gaussian(2.5), phi2).value == doctest::Approx(2.5).epsilon(1e-7));
    CHECK(bphi_norm(RandomVariableModel::rademacher(), phi2).value <= 1.0 + 1e-8);
    for (const auto& m : {RandomVariableModel::example_a(), RandomVariableModel::weibull_sym(1.0, 1.0),
                          RandomVariableModel::rademacher()}) {
        CAPTURE(m.label());
        CHECK(bphi_norm(m, PhiFunction::natural_of(m)).value == doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK_THROWS_AS(bphi_norm(RandomVariableModel::weibull_sym(1.0, 1.0), phi2), Infeasible);
    // The norm is the least feasible tau on the grid.
    const auto x = RandomVariableModel::example_a();
    const double tau = bphi_norm(x, phi2).value;
    bool tight = false;
    for (double l : default_lambda_grid(kInf)) {
        CHECK(mgf_log(x, l) <= 0.5 * l * l * tau * tau * (1 + 1e-9) + 1e-12);
        tight = tight || mgf_log(x, l) > 0.5 * l * l * (tau - 1e-6) * (tau - 1e-6);
    }
    CHECK(tight);
}

TEST_CASE("subgaussian sums") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(subgaussian_sum_norm_upper(ones) == doctest::Approx(std::sqrt(2.0)));
    const std::vector<double> zeros(5, 0.0);
    CHECK(subgaussian_sum_norm_upper(zeros) == 0.0);
    const auto phi2 = PhiFunction::quadratic();
    const double one = bphi_norm(RandomVariableModel::gaussian(1.0), phi2).value;
    for (int n : {1, 4, 16})
        CHECK(std::abs(bphi_norm(SumModel(RandomVariableModel::gaussian(1.0), n), phi2).value - one) < 1e-6);
}
