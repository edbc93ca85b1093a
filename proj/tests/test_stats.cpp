#include <doctest.h>

#include <cmath>
#include <random>

#include "fsochan/errors.hpp"
#include "fsochan/stats.hpp"

using namespace fsochan;

TEST_CASE("Weibull fit recovers shape and scale") {
    std::mt19937_64 g(1);
    std::weibull_distribution<double> w(2.0, 3.0);
    std::vector<double> x(10000);
    for (auto& v : x) v = w(g);
    const auto f = fit_distribution(x, Family::weibull);
    CHECK_FALSE(f.degenerate);
    CHECK(f.p1 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(f.p2 == doctest::Approx(3.0).epsilon(0.05));
    CHECK(f.p_value > 0.01);
    CHECK(f.n == x.size());
}

TEST_CASE("lognormal fit and rejection of the wrong family") {
    std::mt19937_64 g(2);
    std::lognormal_distribution<double> ln(0.3, 0.4);
    std::vector<double> x(10000);
    for (auto& v : x) v = ln(g);
    const auto f = fit_distribution(x, Family::lognormal);
    CHECK(f.p1 == doctest::Approx(0.3).epsilon(0.05));
    CHECK(f.p2 == doctest::Approx(0.4).epsilon(0.05));
    CHECK(f.p_value > 0.05);

    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (auto& v : x) v = u(g);
    CHECK(fit_distribution(x, Family::lognormal).p_value < 1e-6);
}

TEST_CASE("degenerate and undersized inputs") {
    const auto f = fit_distribution(std::vector<double>(200, 1.5), Family::weibull);
    CHECK(f.degenerate);
    CHECK_THROWS_AS(fit_distribution(std::vector<double>(99, 1.0), Family::lognormal), DomainError);
    std::vector<double> neg(200, 1.0);
    neg[3] = -1;
    CHECK_THROWS_AS(fit_distribution(neg, Family::weibull), DomainError);
}

TEST_CASE("K-S p-value") {
    CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0));
    CHECK(ks_p_value(1.0, 100) < 1e-12);
    // tabulated 5% critical value 1.358 / (sqrt n + 0.12 + 0.11/sqrt n)
    const std::size_t n = 400;
    const double D = 1.358 / (std::sqrt(400.0) + 0.12 + 0.11 / 20.0);
    CHECK(ks_p_value(D, n) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(ks_p_value(0.05, 100) > ks_p_value(0.06, 100));
}

TEST_CASE("moments") {
    const std::vector<double> x = {1, 2, 3, 4};
    CHECK(sample_mean(x) == 2.5);
    CHECK(sample_stddev(x) == doctest::Approx(std::sqrt(5.0 / 3.0)));
}
