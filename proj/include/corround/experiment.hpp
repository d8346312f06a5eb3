#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corround/error.hpp"
#include "corround/fulfillment.hpp"
#include "corround/instance_gen.hpp"
#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"
#include "corround/rounding.hpp"

namespace corround {

/// Random q x K marginals: each row gets between 1 and `max_support` FCs
/// (chosen uniformly) with uniform Dirichlet weights.
MarginalMatrix random_marginals(std::size_t items, std::size_t fcs, std::size_t max_support,
                                RandomStream& rng);

namespace cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kParse = 3,
    kCap = 4,
    kSolver = 5,
    kInvariant = 6,
};

int exit_code_for(ErrorCode code);

struct RoundArgs {
    std::string instance;  // marginal matrix file
    Scheme scheme = Scheme::Dilate;
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    std::string out;       // marginals CSV; usage CSV goes to <out>.usage.csv
};

/// Writes marginal and usage CSVs, logs the check summary. Returns
/// kInvariant when an empirical check fails.
int cmd_round(const RoundArgs& args, std::ostream& out, std::ostream& log);

struct LpOptimalArgs {
    std::string instance;
    std::string out;
    std::size_t max_fcs = 12;
};

int cmd_lp_optimal(const LpOptimalArgs& args, std::ostream& out, std::ostream& log);

struct CoverArgs {
    std::string instance;  // set cover file; ignored when hard_d is set
    std::string cover;     // file with K fractional values
    std::size_t hard_d = 0;
    std::size_t hard_k = 0;
    Scheme scheme = Scheme::Dilate;
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    std::string out;
};

/// CSV `set,y,usage_empirical,bound` plus a feasibility count in the log.
int cmd_cover(const CoverArgs& args, std::ostream& out, std::ostream& log);

struct GenArgs {
    std::string config;  // generator config; defaults when empty
    std::optional<std::uint64_t> seed;
    std::string data_dir = CORROUND_DATA_DIR;
    std::string out;
};

int cmd_gen_instance(const GenArgs& args, std::ostream& out, std::ostream& log);

struct CampaignConfig {
    GeneratorConfig generator;
    std::size_t instances = 1;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    std::vector<Policy> policies = all_policies();
    double scale = 1.0;
    std::size_t threads = 0;  // 0 = hardware concurrency
    bool record_timing = true;
    std::string data_dir = CORROUND_DATA_DIR;

    void validate() const;
};

CampaignConfig read_campaign(std::istream& in);
void write_campaign(const CampaignConfig& c, std::ostream& out);

struct InstanceRun {
    std::string id;
    std::uint64_t seed = 0;
    double dlp = 0.0;
    double dlp_ms = 0.0;
    BetaReport beta;
    std::vector<std::string> warnings;
    std::vector<std::uint64_t> replication_seeds;
    std::vector<SimulationReport> reports;  // [replication * policies + p]
};

struct PolicySummary {
    Policy policy;
    double mean_loss = 0.0;  // mean over instances of the per-instance mean
    double se_loss = 0.0;    // standard error across instances
    double mean_fcs_per_order = 0.0;
    double se_fcs_per_order = 0.0;
    double mean_wall_ms = 0.0;
};

struct CampaignResult {
    CampaignConfig config;
    std::vector<InstanceRun> runs;
    std::vector<PolicySummary> summary;

    const SimulationReport& report(std::size_t instance, std::size_t replication,
                                   std::size_t policy) const {
        return runs[instance].reports[replication * config.policies.size() + policy];
    }
};

/// Instance i is generated from derive_seed(seed, kInstance, i); replication
/// r uses arrivals seeded by derive_seed(instance seed, kArrivals, r), shared
/// by every policy, and decisions from a stream derived from that seed.
CampaignResult run_campaign(const CampaignConfig& config, std::ostream* log = nullptr);

/// Per-replication rows under kReportHeader.
void write_campaign_rows(const CampaignResult& r, std::ostream& out);
/// One row per policy: means and standard errors across instances.
void write_campaign_summary(const CampaignResult& r, std::ostream& out);

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> policies;
    std::optional<double> scale;
    std::string out;  // rows; summary goes to <out>.summary.csv
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& log);

struct BenchPoint {
    Scheme scheme;
    std::size_t items;
    std::size_t fcs;
    std::size_t calls;
    double ns_per_call;
};

/// Mean wall time per rounding call on dense random marginals, repeating
/// each point until `min_ms` have elapsed.
std::vector<BenchPoint> bench_rounding(const std::vector<Scheme>& schemes,
                                       const std::vector<std::size_t>& item_counts,
                                       std::size_t fcs, double min_ms, std::uint64_t seed);

struct BenchArgs {
    std::size_t fcs = 100;
    std::size_t min_items = 10;
    std::size_t max_items = 1280;
    double min_ms = 50.0;
    std::uint64_t seed = 1;
    std::string out;
};

/// CSV `scheme,q,K,calls,ns_per_call,ns_per_cell`.
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& log);

/// Seed precedence: explicit flag, then $CORROUND_SEED, then `fallback`.
/// Throws ParseError on a malformed environment value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback);

}  // namespace cli
}  // namespace corround
