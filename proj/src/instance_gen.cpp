#include "corround/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "corround/error.hpp"
#include "json.hpp"

namespace corround {

double haversine(LatLon a, LatLon b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad, dlon = (b.lon - a.lon) * rad;
    const double s = std::sin(dlat / 2), t = std::sin(dlon / 2);
    const double h = s * s + std::cos(a.lat * rad) * std::cos(b.lat * rad) * t * t;
    return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

double unit_cost(double miles) {
    CORROUND_REQUIRE(miles >= 0.0, ErrorCode::DomainError, "negative distance");
    return kUnitIntercept + kUnitPerMile * miles;
}

double fixed_cost() { return kFixedCost; }

double shortage_cost(double max_distance, ShortagePricing pricing) {
    const double unit = unit_cost(2.0 * max_distance);
    return pricing == ShortagePricing::Box ? fixed_cost() + unit : unit;
}

Geography Geography::make(std::vector<Region> regions, std::vector<Site> fcs) {
    Geography g;
    g.regions = std::move(regions);
    g.fcs = std::move(fcs);
    const std::size_t J = g.regions.size();
    g.dist.resize(g.fcs.size() * J);
    for (std::size_t k = 0; k < g.fcs.size(); ++k)
        for (std::size_t j = 0; j < J; ++j) g.dist[k * J + j] = haversine(g.fcs[k].at, g.regions[j].at);
    return g;
}

Geography Geography::take(std::size_t j, std::size_t k) const {
    CORROUND_REQUIRE(j >= 1 && j <= regions.size() && k >= 1 && k <= fcs.size(),
                     ErrorCode::DomainError,
                     "asked for " + std::to_string(j) + " regions and " + std::to_string(k) +
                         " FCs; data has " + std::to_string(regions.size()) + " and " +
                         std::to_string(fcs.size()));
    auto r = regions;
    std::stable_sort(r.begin(), r.end(),
                     [](const Region& a, const Region& b) { return a.population > b.population; });
    r.resize(j);
    return make(std::move(r), std::vector<Site>(fcs.begin(), fcs.begin() + static_cast<long>(k)));
}

namespace {

std::vector<std::vector<std::string>> read_csv(std::istream& in, std::size_t columns,
                                               const std::string& what) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            else if (c == ',' && !quoted) fields.push_back(std::exchange(cur, {}));
            else cur += c;
        }
        fields.push_back(cur);
        if (fields.size() != columns)
            fail(ErrorCode::ParseError, what + " line " + std::to_string(no) + ": expected " +
                                            std::to_string(columns) + " fields, got " +
                                            std::to_string(fields.size()));
        rows.push_back(std::move(fields));
        rows.back().push_back(std::to_string(no));
    }
    return rows;
}

double number(const std::vector<std::string>& row, std::size_t col, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(row[col], &used);
        if (used == row[col].size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    fail(ErrorCode::ParseError,
         what + " line " + row.back() + ": bad number `" + row[col] + "`");
}

LatLon coordinates(const std::vector<std::string>& row, const std::string& what) {
    const LatLon p{number(row, 1, what), number(row, 2, what)};
    if (std::abs(p.lat) > 90.0 || std::abs(p.lon) > 180.0)
        fail(ErrorCode::ParseError, what + " line " + row.back() + ": coordinates out of range");
    return p;
}

}  // namespace

std::vector<Region> read_regions(std::istream& in) {
    std::vector<Region> out;
    for (const auto& row : read_csv(in, 4, "regions")) {
        const double pop = number(row, 3, "regions");
        if (pop < 0.0) fail(ErrorCode::ParseError, "regions line " + row.back() + ": negative population");
        out.push_back({row[0], coordinates(row, "regions"), pop});
    }
    return out;
}

std::vector<Site> read_sites(std::istream& in) {
    std::vector<Site> out;
    for (const auto& row : read_csv(in, 3, "fcs")) out.push_back({row[0], coordinates(row, "fcs")});
    return out;
}

Geography bundled_geography(const std::string& data_dir) {
    std::ifstream metros(data_dir + "/metros.csv"), fcs(data_dir + "/fcs.csv");
    CORROUND_REQUIRE(metros && fcs, ErrorCode::ParseError,
                     "cannot open metros.csv / fcs.csv under " + data_dir);
    return Geography::make(read_regions(metros), read_sites(fcs));
}

void GeneratorConfig::validate() const {
    CORROUND_REQUIRE(n >= 1 && n_max >= 1 && n_per >= 1, ErrorCode::DomainError,
                     "n, n_max and n_per must be at least 1");
    CORROUND_REQUIRE(n_max <= n, ErrorCode::SizeImpossible,
                     "order size " + std::to_string(n_max) + " exceeds the " + std::to_string(n) +
                         " items available");
    CORROUND_REQUIRE(p_carry > 0.0 && p_carry <= 1.0, ErrorCode::DomainError,
                     "p_carry must lie in (0, 1]");
    CORROUND_REQUIRE(z_safety >= 0.0 && std::isfinite(z_safety), ErrorCode::DomainError,
                     "z_safety must be nonnegative");
    CORROUND_REQUIRE(horizon >= 1 && regions >= 1 && fcs >= 1, ErrorCode::DomainError,
                     "horizon, regions and fcs must be at least 1");
}

void write_config(const GeneratorConfig& cfg, std::ostream& out) {
    const nlohmann::json j{{"n", cfg.n},           {"n_max", cfg.n_max},
                           {"n_per", cfg.n_per},   {"p_carry", cfg.p_carry},
                           {"z_safety", cfg.z_safety}, {"horizon", cfg.horizon},
                           {"regions", cfg.regions}, {"fcs", cfg.fcs},
                           {"seed", cfg.seed},
                           {"shortage", cfg.shortage == ShortagePricing::Box ? "box" : "unit"}};
    out << j.dump(1) << '\n';
}

GeneratorConfig read_config(std::istream& in) {
    GeneratorConfig c;
    try {
        const auto j = nlohmann::json::parse(in);
        c.n = j.value("n", c.n);
        c.n_max = j.value("n_max", c.n_max);
        c.n_per = j.value("n_per", c.n_per);
        c.p_carry = j.value("p_carry", c.p_carry);
        c.z_safety = j.value("z_safety", c.z_safety);
        c.horizon = j.value("horizon", c.horizon);
        c.regions = j.value("regions", c.regions);
        c.fcs = j.value("fcs", c.fcs);
        c.seed = j.value("seed", c.seed);
        const auto shortage = j.value("shortage", std::string("box"));
        if (shortage == "box") c.shortage = ShortagePricing::Box;
        else if (shortage == "unit") c.shortage = ShortagePricing::UnitOnly;
        else fail(ErrorCode::ParseError, "generator config: shortage must be `box` or `unit`");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("generator config: ") + e.what());
    }
    c.validate();
    return c;
}

std::vector<std::vector<std::size_t>> gen_order_types(const GeneratorConfig& cfg,
                                                      RandomStream& rng) {
    cfg.validate();
    std::vector<std::vector<std::size_t>> types{{}};
    std::vector<std::size_t> pool(cfg.n);
    for (std::size_t size = 1; size <= cfg.n_max; ++size) {
        for (std::size_t t = 0; t < cfg.n_per; ++t) {
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t s = 0; s < size; ++s)
                std::swap(pool[s], pool[s + rng.below(cfg.n - s)]);
            std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<long>(size));
            std::sort(subset.begin(), subset.end());
            types.push_back(std::move(subset));
        }
    }
    return types;
}

namespace {

std::vector<double> dirichlet(std::size_t n, RandomStream& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += x = rng.exponential(1.0);
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace

std::vector<std::vector<double>> gen_demand_rates(
    const std::vector<std::vector<std::size_t>>& types, const Geography& geo, RandomStream& rng) {
    CORROUND_REQUIRE(!types.empty() && !geo.regions.empty(), ErrorCode::EmptyInstance,
                     "no order types or no regions");
    std::size_t largest = 0;
    for (const auto& t : types) largest = std::max(largest, t.size());
    std::vector<std::vector<std::size_t>> by_size(largest + 1);
    for (std::size_t a = 0; a < types.size(); ++a) by_size[types[a].size()].push_back(a);

    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s <= largest; ++s)
        if (!by_size[s].empty()) sizes.push_back(s);
    const auto size_share = dirichlet(sizes.size(), rng);

    std::vector<double> type_rate(types.size(), 0.0);
    for (std::size_t z = 0; z < sizes.size(); ++z) {
        const auto& members = by_size[sizes[z]];
        const auto share = dirichlet(members.size(), rng);
        for (std::size_t t = 0; t < members.size(); ++t)
            type_rate[members[t]] = size_share[z] * share[t];
    }

    double pop = 0.0;
    for (const auto& r : geo.regions) pop += r.population;
    CORROUND_REQUIRE(pop > 0.0, ErrorCode::DomainError, "total population is zero");
    std::vector<std::vector<double>> rates(types.size(), std::vector<double>(geo.regions.size()));
    for (std::size_t a = 0; a < types.size(); ++a)
        for (std::size_t j = 0; j < geo.regions.size(); ++j)
            rates[a][j] = type_rate[a] * geo.regions[j].population / pop;
    return rates;
}

std::vector<unsigned char> gen_carrying(const GeneratorConfig& cfg, RandomStream& rng) {
    std::vector<unsigned char> c(cfg.fcs * cfg.n);
    for (auto& x : c) x = rng.bernoulli(cfg.p_carry) ? 1 : 0;
    return c;
}

DemandProfile demand_profile(const GeneratorConfig& cfg, const Geography& geo,
                             const std::vector<std::vector<std::size_t>>& types,
                             const std::vector<std::vector<double>>& rates,
                             std::vector<unsigned char> carries) {
    const std::size_t n = cfg.n, K = geo.fcs.size(), J = geo.regions.size();
    CORROUND_REQUIRE(carries.size() == K * n && rates.size() == types.size(),
                     ErrorCode::DimensionMismatch, "carrying or rate table has the wrong size");
    DemandProfile p;
    p.items = n;
    p.fcs = K;
    p.carries = std::move(carries);
    p.closest.assign(n * J, kNoFc);
    p.dem.assign(K * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < J; ++j) {
            std::size_t best = kNoFc;
            for (std::size_t k = 0; k < K; ++k)
                if (p.carries[k * n + i] && (best == kNoFc || geo.distance(k, j) < geo.distance(best, j)))
                    best = k;
            p.closest[i * J + j] = best;
            any = any || best != kNoFc;
        }
        if (!any) p.orphans.push_back(i);
    }
    for (std::size_t a = 0; a < types.size(); ++a)
        for (std::size_t i : types[a])
            for (std::size_t j = 0; j < J; ++j) {
                const std::size_t k = p.closest[i * J + j];
                if (k != kNoFc) p.dem[k * n + i] += rates[a][j];
            }
    return p;
}

std::int64_t newsvendor(double dem, std::int64_t horizon, double z_safety) {
    if (dem <= 0.0) return 0;
    const double T = static_cast<double>(horizon);
    const double target = T * dem + z_safety * std::sqrt(T * dem * std::max(0.0, 1.0 - dem));
    // Guard against targets like 100.00000000001 that are integers up to rounding.
    return static_cast<std::int64_t>(std::ceil(target - 1e-9));
}

std::vector<std::int64_t> gen_inventory(const GeneratorConfig& cfg, const DemandProfile& profile) {
    std::vector<std::int64_t> b(profile.dem.size(), 0);
    for (std::size_t c = 0; c < b.size(); ++c)
        if (profile.carries[c]) b[c] = newsvendor(profile.dem[c], cfg.horizon, cfg.z_safety);
    return b;
}

GeneratedInstance build_instance(const GeneratorConfig& cfg, const Geography& full) {
    cfg.validate();
    const Geography geo = full.take(cfg.regions, cfg.fcs);
    RandomStream rng(cfg.seed);
    const auto types = gen_order_types(cfg, rng);
    const auto rates = gen_demand_rates(types, geo, rng);
    auto carries = gen_carrying(cfg, rng);

    GeneratedInstance g;
    g.profile = demand_profile(cfg, geo, types, rates, std::move(carries));
    const std::size_t n = cfg.n, K = cfg.fcs, J = cfg.regions;
    auto& inst = g.instance;
    inst = FulfillmentInstance::shaped(n, K, J, cfg.horizon);
    inst.seed = cfg.seed;
    inst.id = "n" + std::to_string(n) + "-K" + std::to_string(K) + "-J" + std::to_string(J) + "-s" +
              std::to_string(cfg.seed);

    for (std::size_t a = 0; a < types.size(); ++a)
        for (std::size_t j = 0; j < J; ++j) inst.orders.push_back({types[a], j, rates[a][j], a});

    const double far = *std::max_element(geo.dist.begin(), geo.dist.end());
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            inst.unit_cost[(kNullFc * n + i) * J + j] = shortage_cost(far, cfg.shortage);
            for (std::size_t k = 0; k < K; ++k)
                inst.unit_cost[((k + 1) * n + i) * J + j] = unit_cost(geo.distance(k, j));
        }
        inst.fixed_cost[kNullFc * J + j] = 0.0;
        for (std::size_t k = 0; k < K; ++k) inst.fixed_cost[(k + 1) * J + j] = fixed_cost();
    }
    const auto b = gen_inventory(cfg, g.profile);
    std::copy(b.begin(), b.end(), inst.inventory.begin() + static_cast<long>(n));

    for (std::size_t i : g.profile.orphans)
        g.warnings.push_back("OrphanItem: item " + std::to_string(i) +
                             " is carried by no FC; its demand goes unfilled");
    inst.validate();
    return g;
}

}  // namespace corround
