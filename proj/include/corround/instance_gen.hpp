#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "corround/fulfillment.hpp"
#include "corround/random_stream.hpp"

namespace corround {

inline constexpr double kEarthRadiusMiles = 3958.8;
inline constexpr double kFixedCost = 8.759;
inline constexpr double kUnitIntercept = 0.423;
inline constexpr double kUnitPerMile = 0.000541;

struct LatLon {
    double lat = 0.0;  // degrees
    double lon = 0.0;
};

/// Great-circle distance in miles.
double haversine(LatLon a, LatLon b);

double unit_cost(double miles);
double fixed_cost();

struct Region {
    std::string name;
    LatLon at;
    double population = 0.0;
};

struct Site {
    std::string name;
    LatLon at;
};

struct Geography {
    std::vector<Region> regions;
    std::vector<Site> fcs;
    std::vector<double> dist;  // [k * J + j], FCs 0-based here

    double distance(std::size_t fc, std::size_t region) const {
        return dist[fc * regions.size() + region];
    }
    /// Fills in dist for the given rows.
    static Geography make(std::vector<Region> regions, std::vector<Site> fcs);
    /// Largest `j` regions by population (stable), first `k` FCs.
    Geography take(std::size_t j, std::size_t k) const;
};

/// `name,lat,lon,population` with a header row.
std::vector<Region> read_regions(std::istream& in);
/// `name,lat,lon` with a header row.
std::vector<Site> read_sites(std::istream& in);

/// Bundled data/metros.csv and data/fcs.csv.
Geography bundled_geography(const std::string& data_dir = CORROUND_DATA_DIR);

/// Price of leaving one item unfilled. Box: the cost of shipping it alone
/// over twice the largest FC-region distance (fixed + unit). UnitOnly: the
/// unit cost at that distance, with no box; this makes shortage cheaper than
/// any real shipment, so the LP fulfils almost nothing.
enum class ShortagePricing { Box, UnitOnly };

struct GeneratorConfig {
    std::size_t n = 20;
    std::size_t n_max = 5;
    std::size_t n_per = 5;
    double p_carry = 0.75;
    double z_safety = 0.5;
    std::int64_t horizon = 10'000;
    std::size_t regions = 10;
    std::size_t fcs = 5;
    std::uint64_t seed = 1;
    ShortagePricing shortage = ShortagePricing::Box;

    /// Throws DomainError or SizeImpossible.
    void validate() const;
};

void write_config(const GeneratorConfig& cfg, std::ostream& out);
GeneratorConfig read_config(std::istream& in);

/// Entry 0 is the empty type, then n_per subsets of each size 1..n_max.
std::vector<std::vector<std::size_t>> gen_order_types(const GeneratorConfig& cfg,
                                                      RandomStream& rng);

/// rates[a][j]: a random split over sizes, then over the types of each size
/// (both uniform Dirichlet), then over regions in proportion to population.
std::vector<std::vector<double>> gen_demand_rates(
    const std::vector<std::vector<std::size_t>>& types, const Geography& geo, RandomStream& rng);

inline constexpr std::size_t kNoFc = static_cast<std::size_t>(-1);

struct DemandProfile {
    std::size_t items = 0;
    std::size_t fcs = 0;
    std::vector<unsigned char> carries;  // [k * n + i], 0-based FCs
    std::vector<std::size_t> closest;    // [i * J + j], kNoFc if nobody carries i
    std::vector<double> dem;             // [k * n + i]
    std::vector<std::size_t> orphans;    // items no FC carries
};

std::vector<unsigned char> gen_carrying(const GeneratorConfig& cfg, RandomStream& rng);

DemandProfile demand_profile(const GeneratorConfig& cfg, const Geography& geo,
                             const std::vector<std::vector<std::size_t>>& types,
                             const std::vector<std::vector<double>>& rates,
                             std::vector<unsigned char> carries);

/// ceil(T dem + z sqrt(T dem (1 - dem))), 0 where dem is 0.
std::int64_t newsvendor(double dem, std::int64_t horizon, double z_safety);

/// [k * n + i] for 0-based FCs.
std::vector<std::int64_t> gen_inventory(const GeneratorConfig& cfg, const DemandProfile& profile);

struct GeneratedInstance {
    FulfillmentInstance instance;
    DemandProfile profile;
    std::vector<std::string> warnings;
};

double shortage_cost(double max_distance, ShortagePricing pricing);

/// Draws types, rates and carrying from one stream seeded by cfg.seed, then
/// fills in costs and inventories. The null FC has fixed cost 0.
GeneratedInstance build_instance(const GeneratorConfig& cfg, const Geography& geo);

}  // namespace corround
