#include <cmath>
#include <numbers>
#include <vector>

#include "corround/error.hpp"
#include "corround/experiment.hpp"
#include "corround/rounding.hpp"
#include "doctest.h"

using namespace corround;

namespace {

constexpr std::size_t kBig = 1'000'000;

std::vector<double> frequencies(Scheme s, const MarginalMatrix& m, std::size_t item,
                                std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> f(m.fcs(), 0.0);
    for (std::size_t t = 0; t < n; ++t) f[round(s, m, rng).fc[item]] += 1.0;
    for (auto& x : f) x /= static_cast<double>(n);
    return f;
}

// Algorithm text, evaluated literally.
double eta_direct(double u) {
    return (1 - u) / (1 - u + u * std::exp(1 / u) - std::numbers::e);
}

}  // namespace

TEST_CASE("independent rounding marginals and product law") {
    const auto m = MarginalMatrix::validate({{0.3, 0.7}});
    CHECK(std::abs(frequencies(Scheme::Independent, m, 0, kBig, 1)[1] - 0.7) <= 0.002);

    const auto det = MarginalMatrix::validate({{1.0, 0.0, 0.0}});
    RandomStream rng(2);
    for (int t = 0; t < 1000; ++t) CHECK(independent_round(det, rng).fc[0] == 0);

    const auto twin = MarginalMatrix::validate({{0.5, 0.5}, {0.5, 0.5}});
    const std::size_t n = 200000;
    std::size_t same = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto o = independent_round(twin, rng);
        same += o.fc[0] == o.fc[1];
    }
    CHECK(std::abs(same / double(n) - 0.5) <= 4 * std::sqrt(0.25 / n));
}

TEST_CASE("dilate marginals") {
    const double t = 1.0 / 3;
    const auto third = MarginalMatrix::validate({{t, t, t}});
    for (double f : frequencies(Scheme::Dilate, third, 0, 300000, 3))
        CHECK(std::abs(f - t) <= 4 * std::sqrt(t * (1 - t) / 300000));
    const auto m = MarginalMatrix::validate({{0.3, 0.7}});
    CHECK(std::abs(frequencies(Scheme::Dilate, m, 0, kBig, 4)[0] - 0.3) <= 0.002);
}

TEST_CASE("dilate sends identical rows to the same FC") {
    RandomStream gen(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto base = random_marginals(1, 6, 6, gen);
        std::vector<double> values;
        for (int i = 0; i < 5; ++i)
            for (double v : base.row(0)) values.push_back(v);
        const auto m = MarginalMatrix::validate(5, 6, values);
        RandomStream rng(rep);
        for (int t = 0; t < 500; ++t) {
            const auto o = dilate_round(m, rng);
            for (std::size_t i = 1; i < 5; ++i) CHECK(o.fc[i] == o.fc[0]);
        }
    }
}

TEST_CASE("force-open marginals and forced structure") {
    const auto m = MarginalMatrix::validate({{0.3, 0.7}});
    CHECK(std::abs(frequencies(Scheme::ForceOpen, m, 0, kBig, 6)[1] - 0.7) <= 0.002);

    const auto det = MarginalMatrix::validate({{0, 1, 0}, {1, 0, 0}, {0, 1, 0}});
    RandomStream rng(7);
    for (int t = 0; t < 1000; ++t) {
        const auto o = force_open_round(det, rng);
        CHECK(o.fc == std::vector<std::size_t>{1, 0, 1});
    }
}

TEST_CASE("force-open on the pairs instance stays within 2 y_k") {
    const auto m = MarginalMatrix::validate({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}});
    RandomStream rng(8);
    const std::size_t n = 200000;
    std::vector<double> used(3, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto o = force_open_round(m, rng);
        std::vector<int> hit(3, 0);
        for (auto k : o.fc) hit[k] = 1;
        for (int k = 0; k < 3; ++k) used[k] += hit[k];
    }
    for (double u : used) CHECK(u / n <= 2 * 0.5 + 4 * std::sqrt(0.25 / n));
}

TEST_CASE("hiding probability") {
    CHECK(hiding_probability(0.5) == doctest::Approx(0.33870).epsilon(3e-5));
    CHECK(hiding_probability(0.5) == doctest::Approx(eta_direct(0.5)).epsilon(1e-12));
    CHECK(hiding_probability(1.0) == 1.0);
    for (double u : {0.05, 0.2, 0.37, 0.8, 0.95})
        CHECK(hiding_probability(u) == doctest::Approx(eta_direct(u)).epsilon(1e-9));

    double prev = -1.0;
    for (int g = 1; g <= 10000; ++g) {
        const double h = hiding_probability(g / 10000.0);
        CHECK_UNARY(h >= 0.0);
        CHECK_UNARY(h <= 1.0);
        CHECK_UNARY(h >= prev);
        prev = h;
    }
    for (double bad : {0.0, -0.1, 1.0000001, std::nan("")})
        CHECK_THROWS_AS(hiding_probability(bad), Error);
}

TEST_CASE("guarantee formulas") {
    CHECK(guarantee_dilate(1) == 1.0);
    CHECK(guarantee_dilate(10) == doctest::Approx(3.302585).epsilon(1e-6));
    CHECK(guarantee_dilate(3) == doctest::Approx(2.0986).epsilon(1e-4));

    CHECK(guarantee_force_open(MarginalMatrix::validate({{1, 0}, {0, 1}})) == 1.0);
    CHECK(guarantee_force_open(MarginalMatrix::validate(
              {{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}})) == doctest::Approx(2.0));
    CHECK(guarantee_force_open(MarginalMatrix::validate({{0.6, 0.4}})) ==
          doctest::Approx(1.6667).epsilon(1e-4));

    CHECK(guarantee_js(1) == 1.0);
    CHECK(guarantee_js(2) == 1.0);
    CHECK(guarantee_js(3) == doctest::Approx(4.0 / 3));
    CHECK(guarantee_js(4) == doctest::Approx(1.5));
    CHECK(guarantee_js(5) == doctest::Approx(36.0 / 20));
}

TEST_CASE("scheme selection") {
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> row(10, 0.0);
        row[i % 10] = 0.5;
        row[(i + 1) % 10] = 0.5;
        values.insert(values.end(), row.begin(), row.end());
    }
    const auto sparse = MarginalMatrix::validate(100, 10, values);
    auto c = select_scheme(sparse);
    CHECK(c.scheme == Scheme::ForceOpen);
    CHECK(c.predicted_ratio == doctest::Approx(2.0));

    const auto two = MarginalMatrix::validate({{0.5, 0.5}, {0.5, 0.5}});
    CHECK(two.alpha_force() >= 1.7);
    c = select_scheme(two);
    CHECK(c.scheme == Scheme::Dilate);
    CHECK(c.predicted_ratio == doctest::Approx(1.0));  // B(2)

    c = select_scheme(MarginalMatrix::validate({{0.3, 0.7}}));
    CHECK(c.scheme == Scheme::Dilate);
    CHECK(c.predicted_ratio == 1.0);
}

TEST_CASE("trace invariants") {
    RandomStream gen(10);
    for (int rep = 0; rep < 50; ++rep) {
        const auto m = random_marginals(1 + gen.below(8), 1 + gen.below(6), 4, gen);
        RandomStream rng(1000 + rep);
        for (int t = 0; t < 200; ++t) {
            const auto d = dilate_round_traced(m, rng);
            for (std::size_t i = 0; i < m.items(); ++i) {
                CHECK(m(i, d.outcome.fc[i]) > 0.0);
                for (std::size_t k = 0; k < m.fcs(); ++k) {
                    const double x = d.trace.observed_at(i, k);
                    if (m(i, k) > 0.0) CHECK_UNARY(x >= d.trace.opening[k]);
                    CHECK((x == kNever) == (m(i, k) == 0.0));
                }
            }
            const auto f = force_open_round_traced(m, rng);
            for (std::size_t i = 0; i < m.items(); ++i) {
                CHECK(m(i, f.outcome.fc[i]) > 0.0);
                double first = kNever, top = 0.0;
                for (std::size_t k = 0; k < m.fcs(); ++k) {
                    first = std::min(first, f.trace.observed_at(i, k));
                    top = std::max(top, m(i, k));
                    if (k != f.trace.target[i] && m(i, k) > 0.0)
                        CHECK_UNARY(f.trace.observed_at(i, k) >= f.trace.opening[k]);
                }
                CHECK(m(i, f.trace.target[i]) == top);
                CHECK_UNARY(first <= (1.0 / top) * (1 + 1e-12));
                CHECK_UNARY(1.0 / top <= m.alpha_force() * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("force-open target is the lowest-index maximum") {
    const auto m = MarginalMatrix::validate({{0.2, 0.4, 0.4}});
    RandomStream rng(11);
    CHECK(force_open_round_traced(m, rng).trace.target[0] == 1);
}

TEST_CASE("same seed gives identical outcomes and traces") {
    RandomStream gen(12);
    const auto m = random_marginals(6, 5, 3, gen);
    for (Scheme s : {Scheme::Independent, Scheme::Dilate, Scheme::ForceOpen}) {
        RandomStream a(77), b(77);
        for (int t = 0; t < 100; ++t) CHECK(round(s, m, a) == round(s, m, b));
    }
    RandomStream a(78), b(78);
    const auto x = dilate_round_traced(m, a), y = dilate_round_traced(m, b);
    CHECK(x.outcome == y.outcome);
    CHECK(x.trace == y.trace);
    const auto p = force_open_round_traced(m, a), q = force_open_round_traced(m, b);
    CHECK(p.trace == q.trace);
}

TEST_CASE("scheme names") {
    CHECK(parse_scheme("dilate") == Scheme::Dilate);
    CHECK(parse_scheme("force-open") == Scheme::ForceOpen);
    CHECK(parse_scheme("independent") == Scheme::Independent);
    CHECK_FALSE(parse_scheme("js").has_value());
    CHECK(to_string(Scheme::ForceOpen) == "force_open");
}
