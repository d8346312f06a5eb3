#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "corround/error.hpp"
#include "corround/instance_gen.hpp"
#include "doctest.h"

using namespace corround;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvariantViolation;
}

Geography toy_geography() {
    return Geography::make({{"big", {40.0, -100.0}, 2.0}, {"small", {35.0, -90.0}, 1.0}},
                           {{"west", {40.0, -101.0}}, {"east", {35.0, -89.0}}});
}

}  // namespace

TEST_CASE("distances and cost rates") {
    CHECK(haversine({10.0, 20.0}, {10.0, 20.0}) == 0.0);
    CHECK(haversine({0.0, 0.0}, {0.0, 90.0}) == doctest::Approx(6218.4).epsilon(1e-4));
    CHECK(haversine({0.0, 0.0}, {0.0, 180.0}) == doctest::Approx(12436.7).epsilon(1e-4));
    CHECK(haversine({90.0, 0.0}, {-90.0, 0.0}) == doctest::Approx(kEarthRadiusMiles * M_PI));
    CHECK(unit_cost(0.0) == doctest::Approx(0.423));
    CHECK(unit_cost(1000.0) == doctest::Approx(0.964));
    CHECK(fixed_cost() == 8.759);
    CHECK(code_of([] { unit_cost(-1.0); }) == ErrorCode::DomainError);
    CHECK(shortage_cost(100.0, ShortagePricing::UnitOnly) == doctest::Approx(unit_cost(200.0)));
    CHECK(shortage_cost(100.0, ShortagePricing::Box) ==
          doctest::Approx(fixed_cost() + unit_cost(200.0)));
}

TEST_CASE("order types") {
    GeneratorConfig cfg;
    cfg.n = 3;
    cfg.n_max = 1;
    cfg.n_per = 1;
    RandomStream rng(1);
    const auto few = gen_order_types(cfg, rng);
    CHECK(few.size() == 2);
    CHECK(few[0].empty());

    GeneratorConfig big;
    const auto types = gen_order_types(big, rng);
    CHECK(types.size() == 26);
    for (std::size_t a = 1; a < types.size(); ++a) {
        CHECK(types[a].size() == 1 + (a - 1) / 5);
        CHECK(std::set<std::size_t>(types[a].begin(), types[a].end()).size() == types[a].size());
        CHECK(types[a].back() < big.n);
    }

    GeneratorConfig bad;
    bad.n = 3;
    bad.n_max = 4;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::SizeImpossible);
    bad.n_max = 2;
    bad.p_carry = 0.0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::DomainError);
}

TEST_CASE("demand rates split by size, type and population") {
    const auto geo = toy_geography();
    GeneratorConfig cfg;
    cfg.n = 4;
    cfg.n_max = 2;
    cfg.n_per = 3;
    RandomStream rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const auto types = gen_order_types(cfg, rng);
        const auto rates = gen_demand_rates(types, geo, rng);
        double total = 0.0;
        for (const auto& r : rates) {
            total += r[0] + r[1];
            CHECK(r[0] == doctest::Approx(2.0 * r[1]));
            CHECK(r[0] > 0.0);
        }
        CHECK(total == doctest::Approx(1.0));
    }
}

TEST_CASE("newsvendor stocking") {
    CHECK(newsvendor(0.0, 10000, 0.5) == 0);
    CHECK(newsvendor(0.01, 10000, 0.5) == 105);
    CHECK(newsvendor(0.01, 10000, 0.0) == 100);
    CHECK(newsvendor(1.0, 10000, 0.5) == 10000);
}

TEST_CASE("demand attribution is conserved") {
    const auto geo = toy_geography();
    GeneratorConfig cfg;
    cfg.n = 5;
    cfg.n_max = 3;
    cfg.n_per = 2;
    cfg.regions = 2;
    cfg.fcs = 2;
    RandomStream rng(3);
    const auto types = gen_order_types(cfg, rng);
    const auto rates = gen_demand_rates(types, geo, rng);

    cfg.p_carry = 1.0;
    const auto all = demand_profile(cfg, geo, types, rates, gen_carrying(cfg, rng));
    CHECK(all.orphans.empty());
    for (auto c : all.carries) CHECK(c == 1);
    // Everyone carries everything: each region is served from its nearest FC.
    for (std::size_t i = 0; i < cfg.n; ++i) {
        CHECK(all.closest[i * 2 + 0] == 0);
        CHECK(all.closest[i * 2 + 1] == 1);
    }

    cfg.p_carry = 0.5;
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = demand_profile(cfg, geo, types, rates, gen_carrying(cfg, rng));
        for (std::size_t i = 0; i < cfg.n; ++i) {
            double want = 0.0;
            for (std::size_t a = 0; a < types.size(); ++a)
                if (std::find(types[a].begin(), types[a].end(), i) != types[a].end())
                    want += rates[a][0] + rates[a][1];
            double got = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                got += p.dem[k * cfg.n + i];
                if (p.dem[k * cfg.n + i] > 0.0) CHECK(p.carries[k * cfg.n + i] == 1);
            }
            const bool orphan = std::find(p.orphans.begin(), p.orphans.end(), i) != p.orphans.end();
            CHECK(got == doctest::Approx(orphan ? 0.0 : want));
        }
        const auto b = gen_inventory(cfg, p);
        for (std::size_t c = 0; c < b.size(); ++c)
            if (b[c] > 0) CHECK(p.carries[c] == 1);
    }
}

TEST_CASE("generated instances") {
    const auto geo = bundled_geography();
    CHECK(geo.regions.size() == 99);
    CHECK(geo.fcs.size() == 10);
    const auto top = geo.take(3, 2);
    CHECK(top.regions[0].population >= top.regions[1].population);
    CHECK(top.regions[1].population >= top.regions[2].population);

    GeneratorConfig cfg;
    cfg.seed = 42;
    const auto a = build_instance(cfg, geo);
    const auto b = build_instance(cfg, geo);
    std::ostringstream ja, jb;
    write_instance(a.instance, ja);
    write_instance(b.instance, jb);
    CHECK(ja.str() == jb.str());
    CHECK(a.instance.orders.size() == 26 * 10);
    CHECK(a.instance.fixed(kNullFc, 0) == 0.0);
    CHECK(a.instance.fixed(1, 0) == fixed_cost());

    cfg.seed = 43;
    const auto c = build_instance(cfg, geo);
    std::ostringstream jc;
    write_instance(c.instance, jc);
    CHECK(jc.str() != ja.str());

    GeneratorConfig large;
    large.n = 100;
    large.n_max = 10;
    large.n_per = 10;
    large.regions = 99;
    large.fcs = 10;
    const auto l = build_instance(large, geo);
    CHECK(l.instance.orders.size() == 101 * 99);

    GeneratorConfig sparse;
    sparse.n = 30;
    sparse.fcs = 2;
    sparse.p_carry = 0.05;
    const auto s = build_instance(sparse, geo);
    CHECK(s.warnings.size() == s.profile.orphans.size());
    CHECK(!s.warnings.empty());
}

TEST_CASE("config round trip") {
    GeneratorConfig cfg;
    cfg.n = 7;
    cfg.p_carry = 0.3;
    cfg.shortage = ShortagePricing::UnitOnly;
    std::stringstream ss;
    write_config(cfg, ss);
    const auto back = read_config(ss);
    CHECK(back.n == 7);
    CHECK(back.p_carry == 0.3);
    CHECK(back.shortage == ShortagePricing::UnitOnly);
    std::istringstream bad(R"({"shortage": "free"})");
    CHECK(code_of([&] { read_config(bad); }) == ErrorCode::ParseError);
}

TEST_CASE("CSV readers") {
    std::istringstream ok("name,lat,lon,population\n\"Boise, ID\",43.6,-116.2,700000\n");
    const auto r = read_regions(ok);
    REQUIRE(r.size() == 1);
    CHECK(r[0].name == "Boise, ID");
    CHECK(r[0].population == 700000.0);

    std::istringstream short_row("name,lat,lon\nX,1.0\n");
    CHECK(code_of([&] { read_sites(short_row); }) == ErrorCode::ParseError);
    std::istringstream bad_number("name,lat,lon\nX,north,2\n");
    CHECK(code_of([&] { read_sites(bad_number); }) == ErrorCode::ParseError);
}
