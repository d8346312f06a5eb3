#include <cmath>
#include <sstream>

#include "corround/error.hpp"
#include "corround/lp.hpp"
#include "corround/random_stream.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace corround;
using lp::Relation;

TEST_CASE("bounded single variable") {
    lp::Problem p;
    const auto x = p.add_variable(1.0);
    p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 3.0);
    p.add_constraint({{x, 1.0}}, Relation::LessEqual, 10.0);
    const auto s = lp::solve(p);
    CHECK(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("unbounded and infeasible") {
    lp::Problem u;
    u.add_variable(-1.0);
    CHECK(lp::solve(u).status == lp::Status::Unbounded);

    lp::Problem inf;
    const auto x = inf.add_variable(0.0);
    inf.add_constraint({{x, 1.0}}, Relation::LessEqual, 1.0);
    inf.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 2.0);
    CHECK(lp::solve(inf).status == lp::Status::Infeasible);
}

TEST_CASE("free and bounded variables") {
    // min x + y, x free, y in [2, 5], x + y >= 5, x - y <= 1  ->  x = 3, y = 2
    lp::Problem p;
    const auto x = p.add_variable(1.0, -lp::kInf, lp::kInf);
    const auto y = p.add_variable(1.0, 2.0, 5.0);
    p.add_constraint({{x, 1}, {y, 1}}, Relation::GreaterEqual, 5);
    p.add_constraint({{x, 1}, {y, -1}}, Relation::LessEqual, 1);
    const auto s = lp::solve(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(5.0));
    CHECK(s.x[y] >= 2.0 - 1e-9);

    lp::Problem q;
    const auto v = q.add_variable(1.0, -lp::kInf, -4.0);
    q.add_constraint({{v, 1.0}}, Relation::GreaterEqual, -7.0);
    const auto t = lp::solve(q);
    REQUIRE(t.optimal());
    CHECK(t.x[v] == doctest::Approx(-7.0));
}

TEST_CASE("redundant equalities and degenerate vertices") {
    lp::Problem p;
    const auto a = p.add_variable(1.0), b = p.add_variable(2.0), c = p.add_variable(0.0);
    p.add_constraint({{a, 1}, {b, 1}, {c, 1}}, Relation::Equal, 1);
    p.add_constraint({{a, 2}, {b, 2}, {c, 2}}, Relation::Equal, 2);
    p.add_constraint({{a, 1}, {b, 1}}, Relation::GreaterEqual, 0);
    p.add_constraint({{c, 1}}, Relation::LessEqual, 0.5);
    const auto s = lp::solve(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(0.5));
    CHECK(s.max_residual <= 1e-9);
}

TEST_CASE("bad problems") {
    lp::Problem p;
    p.add_variable(1.0);
    CHECK_THROWS_AS(p.add_dense_constraint({1.0, 2.0}, Relation::LessEqual, 1.0), Error);
    p.add_constraint({{3, 1.0}}, Relation::LessEqual, 1.0);
    try {
        lp::solve(p);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    lp::Problem crossed;
    crossed.add_variable(0.0, 2.0, 1.0);
    CHECK_THROWS_AS(lp::solve(crossed), Error);
}

TEST_CASE("pivot limit and size cap are reported") {
    lp::Problem p;
    std::vector<std::size_t> v;
    for (int j = 0; j < 5; ++j) v.push_back(p.add_variable(-1.0 - j));
    for (int j = 0; j < 5; ++j) p.add_constraint({{v[j], 1.0}}, Relation::LessEqual, 1.0);
    lp::SolverOptions opt;
    opt.max_pivots = 1;
    CHECK(lp::solve(p, opt).status == lp::Status::IterationLimit);
    opt = {};
    opt.max_cells = 10;
    try {
        lp::solve(p, opt);
        FAIL("expected CapExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapExceeded);
    }
}

TEST_CASE("matches vertex enumeration on random small LPs") {
    RandomStream rng(2024);
    int optimal = 0, infeasible = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + rng.below(5), m = 1 + rng.below(5);
        oracle::SmallLp o;
        lp::Problem p;
        for (std::size_t j = 0; j < n; ++j) {
            o.c.push_back(std::round((rng.uniform() * 10 - 5) * 4) / 4);
            p.add_variable(o.c.back());
        }
        auto add = [&](std::vector<double> row, oracle::Rel r, double b) {
            o.a.push_back(row);
            o.rel.push_back(r);
            o.b.push_back(b);
            const auto rel = r == oracle::Rel::Le   ? Relation::LessEqual
                             : r == oracle::Rel::Ge ? Relation::GreaterEqual
                                                    : Relation::Equal;
            p.add_dense_constraint(row, rel, b);
        };
        std::size_t equalities = 0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> row(n);
            for (auto& a : row) a = std::round((rng.uniform() * 6 - 2) * 2) / 2;
            const auto pick = rng.below(5);
            auto r = pick < 3 ? oracle::Rel::Le : pick < 4 ? oracle::Rel::Ge : oracle::Rel::Eq;
            if (r == oracle::Rel::Eq && ++equalities >= n) r = oracle::Rel::Ge;
            add(row, r, std::round(rng.uniform() * 8 - 1));
        }
        // Box keeps every instance bounded so the optimum sits at a vertex.
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            add(row, oracle::Rel::Le, 10.0);
        }
        const auto want = oracle::vertex_enumeration(o);
        const auto got = lp::solve(p);
        if (!want) {
            CHECK(got.status == lp::Status::Infeasible);
            ++infeasible;
        } else {
            REQUIRE(got.status == lp::Status::Optimal);
            CHECK(got.objective == doctest::Approx(want->value).epsilon(1e-6));
            CHECK(got.max_residual <= 1e-7);
            ++optimal;
        }
    }
    CHECK(optimal > 100);
    CHECK(infeasible > 5);
}

TEST_CASE("solves are deterministic") {
    lp::Problem p;
    const auto a = p.add_variable(1), b = p.add_variable(1), c = p.add_variable(1);
    p.add_constraint({{a, 1}, {b, 1}}, Relation::GreaterEqual, 1);
    p.add_constraint({{b, 1}, {c, 1}}, Relation::GreaterEqual, 1);
    p.add_constraint({{a, 1}, {c, 1}}, Relation::GreaterEqual, 1);
    const auto s = lp::solve(p), t = lp::solve(p);
    CHECK(s.x == t.x);
    CHECK(s.pivots == t.pivots);
    CHECK(s.objective == doctest::Approx(1.5));
}

TEST_CASE("mps dump names every row and column") {
    lp::Problem p;
    const auto x = p.add_variable(1.0, 0.0, 4.0, "x");
    p.add_constraint({{x, 2.0}}, Relation::GreaterEqual, 1.0, "r");
    std::ostringstream out;
    lp::write_mps(p, out);
    const auto s = out.str();
    for (const char* token : {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA", " G r", "UP"})
        CHECK_MESSAGE(s.find(token) != std::string::npos, token);
}
