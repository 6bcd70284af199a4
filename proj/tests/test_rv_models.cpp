#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "gls/errors.hpp"
#include "gls/rv_models.hpp"
#include "oracles.hpp"

using namespace gls;

TEST_CASE("example A density values") {
    const auto x = RandomVariableModel::example_a();
    CHECK(density(x, 0.0) == 0.0);
    CHECK(density(x, 1.0) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(density(x, -1.0) == density(x, 1.0));
    CHECK(density(RandomVariableModel::gaussian(1.0), 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("densities integrate to one and are centered") {
    const std::vector<RandomVariableModel> models{
        RandomVariableModel::example_a(), RandomVariableModel::gaussian(1.7),
        RandomVariableModel::weibull_sym(1.0, 0.5), RandomVariableModel::weibull_sym(2.5, 1.3)};
    for (const auto& m : models) {
        CAPTURE(m.label());
        auto f = [&](double x) { return density(m, x); };
        CHECK(oracle::simpson(f, -40.0, 40.0, 400000) == doctest::Approx(1.0).epsilon(1e-8));
        auto xf = [&](double x) { return x * density(m, x); };
        CHECK(std::abs(oracle::simpson(xf, -40.0, 40.0, 400000)) < 1e-10);
    }
}

TEST_CASE("cdf and abs_tail agree with integrated density") {
    const auto x = RandomVariableModel::example_a();
    for (double t : {0.3, 1.0, 2.2}) {
        const double tail = 2.0 * oracle::simpson([&](double s) { return density(x, s); }, t, 30.0);
        CHECK(abs_tail(x, t) == doctest::Approx(tail).epsilon(1e-9));
        CHECK(cdf(x, -t) == doctest::Approx(0.5 * tail).epsilon(1e-9));
    }
    const auto w = RandomVariableModel::weibull_sym(1.5, 2.0);
    const double tail = 2.0 * oracle::simpson([&](double s) { return density(w, s); }, 1.0, 80.0, 400000);
    CHECK(abs_tail(w, 1.0) == doctest::Approx(tail).epsilon(1e-8));
    CHECK(abs_tail(w, 1.0) == doctest::Approx(std::exp(-std::pow(0.5, 1.5))).epsilon(1e-14));
}

TEST_CASE("density is refused for laws without one") {
    CHECK_THROWS_AS(density(RandomVariableModel::rademacher(), 0.0), UnsupportedKind);
    const auto d = RandomVariableModel::finite_discrete({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK_THROWS_AS(density(d, 0.0), UnsupportedKind);
    CHECK_THROWS_AS(density(RandomVariableModel::empirical({1.0, 2.0, 3.0}), 0.0), UnsupportedKind);
}

TEST_CASE("finite discrete validation") {
    CHECK_THROWS_AS(RandomVariableModel::finite_discrete({{-1.0, 0.5}, {1.0, 0.4}}), InvalidArgument);
    CHECK_THROWS_AS(RandomVariableModel::finite_discrete({{-1.0, 0.5}, {2.0, 0.5}}), InvalidArgument);
    CHECK_THROWS_AS(RandomVariableModel::finite_discrete({{-1.0, -0.5}, {1.0, 1.5}}), InvalidArgument);
    CHECK_NOTHROW(RandomVariableModel::finite_discrete({{-2.0, 0.25}, {0.0, 0.25}, {1.0, 0.5}}));
    CHECK_THROWS_AS(RandomVariableModel::weibull_sym(0.0), InvalidArgument);
    CHECK_THROWS_AS(RandomVariableModel::gaussian(-1.0), InvalidArgument);
}

TEST_CASE("empirical models are centered") {
    const auto e = RandomVariableModel::empirical({1.0, 2.0, 6.0});
    double mean = 0.0;
    for (const auto& a : e.atoms()) mean += a.value * a.probability;
    CHECK(std::abs(mean) < 1e-15);
}

TEST_CASE("sampling: supports and determinism") {
    const auto r = sample(RandomVariableModel::rademacher(), 4, 7);
    REQUIRE(r.values.size() == 4);
    for (double v : r.values) CHECK((v == 1.0 || v == -1.0));
    const auto a = sample(RandomVariableModel::example_a(), 100000, 3, Execution::parallel);
    const auto b = sample(RandomVariableModel::example_a(), 100000, 3, Execution::serial);
    CHECK(a.values == b.values);
    const auto c = sample(RandomVariableModel::example_a(), 100000, 4);
    CHECK(a.values != c.values);
    CHECK_THROWS_AS(sample(RandomVariableModel::example_a(), 0, 1), InvalidArgument);
}

TEST_CASE("example A second moment from a million draws") {
    const auto s = sample(RandomVariableModel::example_a(), 1000000, 1);
    double m2 = 0.0, m4 = 0.0;
    for (double v : s.values) {
        m2 += v * v;
        m4 += v * v * v * v;
    }
    const double n = static_cast<double>(s.values.size());
    m2 /= n;
    m4 /= n;
    const double se = std::sqrt((m4 - m2 * m2) / n);
    CHECK(std::abs(m2 - 2.0) < 3.0 * se);
}

TEST_CASE("discrete sample mean is near zero") {
    const auto d = RandomVariableModel::finite_discrete({{-1.0, 0.5}, {1.0, 0.5}});
    const auto s = sample(d, 100000, 2);
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(s.values.size());
    CHECK(std::abs(mean) < 3.0 * std::pow(10.0, -2.5));
}

TEST_CASE("example A sampler passes Kolmogorov-Smirnov at the 1% level") {
    const auto x = RandomVariableModel::example_a();
    auto v = sample(x, 100000, 11).values;
    std::sort(v.begin(), v.end());
    // Oracle CDF: F(t) = 1 - 0.5 exp(-t^2/2) for t >= 0, symmetric.
    auto F = [](double t) { return t >= 0 ? 1.0 - 0.5 * std::exp(-0.5 * t * t) : 0.5 * std::exp(-0.5 * t * t); };
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = F(v[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    CHECK(d < 1.628 / std::sqrt(n));
}

TEST_CASE("weibull sampler tail matches exp(-(u/s)^m)") {
    const auto w = RandomVariableModel::weibull_sym(1.0, 1.0);
    const auto s = sample(w, 200000, 5).values;
    const double u = 1.5;
    const double hits = static_cast<double>(std::count_if(s.begin(), s.end(), [u](double v) { return std::abs(v) > u; }));
    const double p = std::exp(-u);
    const double n = static_cast<double>(s.size());
    CHECK(std::abs(hits / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("rademacher pair sums have binomial frequencies") {
    const SumModel sum(RandomVariableModel::rademacher(), 2, Normalization::none);
    const auto s = sample_sum(sum, 200000, 9).values;
    std::map<double, double> freq;
    for (double v : s) freq[v] += 1.0 / static_cast<double>(s.size());
    REQUIRE(freq.size() == 3);
    const double se = 3.0 * std::sqrt(0.25 / s.size());
    CHECK(std::abs(freq[-2.0] - 0.25) < se);
    CHECK(std::abs(freq[0.0] - 0.5) < se);
    CHECK(std::abs(freq[2.0] - 0.25) < se);
}

TEST_CASE("normalized sums keep the base variance") {
    const SumModel g(RandomVariableModel::gaussian(1.0), 4);
    const auto gs = sample_sum(g, 200000, 3).values;
    double v = 0;
    for (double x : gs) v += x * x;
    CHECK(v / gs.size() == doctest::Approx(1.0).epsilon(0.02));

    const SumModel a(RandomVariableModel::example_a(), 8);
    const auto as = sample_sum(a, 1000000, 3).values;
    double m2 = 0, m4 = 0;
    for (double x : as) {
        m2 += x * x;
        m4 += x * x * x * x;
    }
    const double n = static_cast<double>(as.size());
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m2 - 2.0) < 3.0 * std::sqrt((m4 - m2 * m2) / n));
}

TEST_CASE("model text forms round-trip") {
    for (const char* text : {"examplea", "gaussian:sigma=2.5", "rademacher", "weibull:m=1.5,scale=0.75",
                             "discrete:-1@0.25,0@0.5,1@0.25"}) {
        const auto m = parse_model(text);
        CAPTURE(text);
        CHECK(parse_model(m.spec()).spec() == m.spec());
    }
    CHECK_THROWS_AS(parse_model("cauchy"), ParseError);
    CHECK_THROWS_AS(parse_model("gaussian:mu=1"), ParseError);
}

TEST_CASE("sample files round-trip bit for bit") {
    const auto path = std::filesystem::temp_directory_path() / "gls_samples_roundtrip.txt";
    const auto s = sample(RandomVariableModel::example_a(), 1000, 21);
    write_samples(path, s);
    CHECK(read_samples(path) == s.values);
    const auto e = parse_model("empirical:" + path.string());
    CHECK(e.atoms().size() == 1000);
    std::filesystem::remove(path);
}
