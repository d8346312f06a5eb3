#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corround/lp.hpp"
#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"
#include "corround/rounding.hpp"

namespace corround {

/// FC 0 is the null FC: unlimited stock, and an item sent there is simply
/// not fulfilled. Real FCs are 1..K.
inline constexpr std::size_t kNullFc = 0;

struct OrderType {
    std::vector<std::size_t> items;  // ascending, no repeats; may be empty
    std::size_t region = 0;
    double rate = 0.0;               // arrival probability per step
    std::size_t type = 0;            // generator's subset id, for reporting
};

struct FulfillmentInstance {
    std::string id;
    std::uint64_t seed = 0;
    std::size_t items = 0;    // n
    std::size_t fcs = 0;      // K, not counting the null FC
    std::size_t regions = 0;  // J
    std::int64_t horizon = 0;
    std::vector<OrderType> orders;
    std::vector<double> unit_cost;        // [(k * n + i) * J + j], k = 0..K
    std::vector<double> fixed_cost;       // [k * J + j], k = 0..K
    std::vector<std::int64_t> inventory;  // [k * n + i], k = 0..K; row 0 ignored

    double unit(std::size_t k, std::size_t i, std::size_t j) const {
        return unit_cost[(k * items + i) * regions + j];
    }
    double fixed(std::size_t k, std::size_t j) const { return fixed_cost[k * regions + j]; }
    std::int64_t stock(std::size_t k, std::size_t i) const { return inventory[k * items + i]; }

    /// Empty instance with cost and inventory arrays sized and zeroed.
    static FulfillmentInstance shaped(std::size_t items, std::size_t fcs, std::size_t regions,
                                      std::int64_t horizon);

    /// Throws DimensionMismatch or DomainError.
    void validate() const;
};

struct DlpOptions {
    /// Leave out u for (k, i) with b_{ki} = 0 (forced to 0 anyway), y for
    /// the null FC when its fixed cost is 0, and fold y into u when only
    /// one item of the order can use FC k. Same optimum, smaller LP.
    bool prune = true;
    lp::SolverOptions solver{};
};

inline constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();

struct DlpModel {
    lp::Problem problem;
    /// Per order: |a| x (K+1) variable ids, kNoVar where pruned.
    std::vector<std::vector<std::size_t>> u_var;
    /// Per order: K+1 variable ids, kNoVar where absent.
    std::vector<std::vector<std::size_t>> y_var;
    std::size_t rows_inventory = 0;
    std::size_t rows_assignment = 0;
    std::size_t rows_linking = 0;
};

DlpModel build_dlp(const FulfillmentInstance& inst, const DlpOptions& options = {});

struct PlanEntry {
    std::vector<double> u;  // |a| x (K+1), row-major by position in the order
    std::vector<double> y;  // K+1; y_k = max over items of u
};

struct DLPlan {
    double objective = 0.0;
    std::size_t fcs = 0;
    std::vector<PlanEntry> entries;  // parallel to instance orders

    double u(std::size_t order, std::size_t slot, std::size_t k) const {
        return entries[order].u[slot * (fcs + 1) + k];
    }
};

/// Solves the LP and tidies the result: clamps solver noise, renormalises
/// each item's row, and resets y to the row-wise max. Zero-rate orders go
/// to the null FC. Throws SolverFailure.
DLPlan solve_dlp(const FulfillmentInstance& inst, const DlpOptions& options = {});

struct PlanAudit {
    double assignment = 0.0;  // worst |sum_k u - 1|
    double linking = 0.0;     // worst u - y
    double inventory = 0.0;   // worst sum T lambda u - b
    double negative = 0.0;    // most negative entry, as a positive number
};

PlanAudit audit_plan(const FulfillmentInstance& inst, const DLPlan& plan);

/// Plan objective recomputed from u and y.
double plan_cost(const FulfillmentInstance& inst, const DLPlan& plan);

enum class Policy { Myopic, Independent, Dilate, ForceOpen, Best };

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view name);
std::vector<Policy> all_policies();

/// Order index per step, or -1 for no arrival.
using Arrivals = std::vector<std::int32_t>;

/// One categorical draw per step over the orders in list order, with the
/// leftover probability meaning no arrival.
Arrivals sample_arrivals(const FulfillmentInstance& inst, RandomStream& rng);

/// Plan rows turned into per-order rounding instances over the FCs the
/// plan actually uses, with each order's select_scheme choice.
class CompiledPlan {
public:
    CompiledPlan(const FulfillmentInstance& inst, const DLPlan& plan);

    struct Order {
        std::optional<MarginalMatrix> matrix;  // empty for orders with no items
        std::vector<std::size_t> columns;      // matrix column -> FC index
        Scheme best = Scheme::Dilate;
    };
    const Order& order(std::size_t o) const { return orders_[o]; }
    double objective() const noexcept { return objective_; }

private:
    std::vector<Order> orders_;
    double objective_;
};

struct SimulationReport {
    Policy policy = Policy::Myopic;
    double fixed = 0.0;
    double unit = 0.0;
    double shortage = 0.0;
    double dlp = 0.0;
    std::size_t orders = 0;       // arrivals of nonempty orders
    std::size_t fcs_used = 0;     // non-null FCs summed over orders
    std::size_t split_orders = 0; // orders using two or more non-null FCs
    std::size_t short_orders = 0; // orders with at least one unfilled item
    std::size_t dilate_orders = 0;
    std::size_t force_open_orders = 0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;

    double total() const noexcept { return fixed + unit + shortage; }
    double loss_pct() const noexcept { return dlp > 0.0 ? 100.0 * (total() - dlp) / dlp : 0.0; }
    double fcs_per_order() const noexcept {
        return orders == 0 ? 0.0 : static_cast<double>(fcs_used) / static_cast<double>(orders);
    }
    /// Scheme label for reports: none, independent, dilate, force_open or best.
    std::string scheme_label() const;
};

/// Runs one horizon. Inventory only decreases; an item whose FC is out of
/// stock goes to the null FC. `plan` may be null for the myopic policy.
/// `seed` is recorded in the report only.
SimulationReport simulate(const FulfillmentInstance& inst, const CompiledPlan* plan, Policy policy,
                          const Arrivals& arrivals, RandomStream& decisions);

/// Convenience form: compiles the plan and draws arrivals then decisions
/// from `rng`.
SimulationReport simulate(const FulfillmentInstance& inst, const DLPlan& plan, Policy policy,
                          RandomStream& rng);

struct BetaReport {
    double beta = 1.0;     // fixed-cost weighted mean of the per-order ratio
    double relaxed = 1.0;  // 1 + ln(max order size)
};

BetaReport theoretical_beta(const FulfillmentInstance& inst, const DLPlan& plan);

/// Horizon theta T and inventories theta b, each rounded to the nearest
/// integer. Throws DomainError unless theta > 0.
FulfillmentInstance scale(const FulfillmentInstance& inst, double theta);

void write_instance(const FulfillmentInstance& inst, std::ostream& out);
FulfillmentInstance read_instance(std::istream& in);
void write_plan(const DLPlan& plan, std::ostream& out);
DLPlan read_plan(std::istream& in);

inline constexpr std::string_view kReportHeader =
    "instance_id,replication,policy,scheme,total_cost,fixed,unit,shortage,dlp,loss_pct,"
    "fcs_per_order,wall_ms,seed";

void write_report_row(std::ostream& out, std::string_view instance_id, std::size_t replication,
                      const SimulationReport& r);

}  // namespace corround
