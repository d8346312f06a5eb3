#include <cmath>
#include <sstream>

#include "corround/experiment.hpp"
#include "corround/monte_carlo.hpp"
#include "doctest.h"

using namespace corround;

TEST_CASE("deterministic instance has zero error under every scheme") {
    const auto m = MarginalMatrix::validate({{0, 1, 0}, {1, 0, 0}});
    for (Scheme s : {Scheme::Independent, Scheme::Dilate, Scheme::ForceOpen}) {
        RandomStream rng(1);
        const auto r = mc_estimate(m, s, 2000, rng);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < 3; ++k) CHECK(r.marginal(i, k) == m(i, k));
        CHECK(r.usage == std::vector<double>{1.0, 1.0, 0.0});
        CHECK(check_report(m, r).passed());
    }
}

TEST_CASE("dilate estimate at a million samples") {
    const auto m = MarginalMatrix::validate({{0.3, 0.7}});
    RandomStream rng(2);
    const auto r = mc_estimate(m, Scheme::Dilate, 1'000'000, rng);
    CHECK(std::abs(r.marginal(0, 0) - 0.3) <= 0.002);
    CHECK(check_report(m, r).passed());
}

TEST_CASE("dilate tail stays under q e^{-t}") {
    const double t = 0.25;
    const auto m = MarginalMatrix::validate(
        {{t, t, t, t}, {t, t, t, t}, {t, t, t, t}, {t, t, t, t}});
    RandomStream rng(3);
    const auto r = mc_estimate(m, Scheme::Dilate, 200000, rng);
    const auto grid = tail_grid();
    REQUIRE(grid.size() == 21);
    REQUIRE(r.tail.size() == 21);
    CHECK(grid[4] == 2.0);
    CHECK(r.tail[4] <= 4 * std::exp(-2.0) + binomial_slack(0.5, r.samples));
    CHECK(r.tail[0] == 1.0);
    for (std::size_t g = 1; g < grid.size(); ++g) CHECK(r.tail[g] <= r.tail[g - 1]);
}

TEST_CASE("random battery passes all checks for each scheme") {
    RandomStream gen(4);
    for (int rep = 0; rep < 5; ++rep) {
        const auto m = random_marginals(1 + gen.below(10), 1 + gen.below(8), 4, gen);
        for (Scheme s : {Scheme::Independent, Scheme::Dilate, Scheme::ForceOpen}) {
            RandomStream rng(derive_seed(4, seed_tag::kBattery, rep));
            const auto r = mc_estimate(m, s, 50000, rng);
            const auto c = check_report(m, r);
            CHECK(c.passed());
        }
    }
}

TEST_CASE("check_report flags a wrong estimate") {
    const auto m = MarginalMatrix::validate({{0.5, 0.5}});
    McReport r{Scheme::Dilate, 10000, 1, 2, {0.6, 0.4}, {0.6, 0.4}, {}};
    CHECK(check_report(m, r).marginal_violations == 2);
    CHECK(binomial_slack(0.25, 10000) == doctest::Approx(4 * std::sqrt(0.25 * 0.75 / 10000)));
}

TEST_CASE("csv headers and rows") {
    const auto m = MarginalMatrix::validate({{0.5, 0.5}});
    RandomStream rng(5);
    const auto r = mc_estimate(m, Scheme::ForceOpen, 100, rng);
    std::ostringstream a, b;
    write_marginals_csv(m, r, a);
    write_usage_csv(m, r, b);
    CHECK(a.str().rfind("item,fc,u,empirical,abs_err\n", 0) == 0);
    CHECK(b.str().rfind("fc,y,usage_empirical,bound,scheme\n", 0) == 0);
    CHECK(b.str().find("force_open") != std::string::npos);
}
