#include "corround/fulfillment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "corround/error.hpp"
#include "json.hpp"

namespace corround {

using nlohmann::json;

FulfillmentInstance FulfillmentInstance::shaped(std::size_t items, std::size_t fcs,
                                                std::size_t regions, std::int64_t horizon) {
    FulfillmentInstance inst;
    inst.items = items;
    inst.fcs = fcs;
    inst.regions = regions;
    inst.horizon = horizon;
    inst.unit_cost.assign((fcs + 1) * items * regions, 0.0);
    inst.fixed_cost.assign((fcs + 1) * regions, 0.0);
    inst.inventory.assign((fcs + 1) * items, 0);
    return inst;
}

void FulfillmentInstance::validate() const {
    const std::size_t K1 = fcs + 1;
    CORROUND_REQUIRE(items > 0 && regions > 0, ErrorCode::EmptyInstance,
                     "instance needs at least one item and one region");
    CORROUND_REQUIRE(unit_cost.size() == K1 * items * regions &&
                         fixed_cost.size() == K1 * regions && inventory.size() == K1 * items,
                     ErrorCode::DimensionMismatch, "cost or inventory array has the wrong size");
    CORROUND_REQUIRE(horizon >= 0, ErrorCode::DomainError, "negative horizon");
    for (double c : unit_cost)
        CORROUND_REQUIRE(std::isfinite(c) && c >= 0.0, ErrorCode::DomainError, "bad unit cost");
    for (double c : fixed_cost)
        CORROUND_REQUIRE(std::isfinite(c) && c >= 0.0, ErrorCode::DomainError, "bad fixed cost");
    // Row 0 belongs to the null FC and is never read.
    for (std::size_t c = items; c < inventory.size(); ++c)
        CORROUND_REQUIRE(inventory[c] >= 0, ErrorCode::DomainError, "negative inventory");
    double total = 0.0;
    for (std::size_t o = 0; o < orders.size(); ++o) {
        const auto& ord = orders[o];
        CORROUND_REQUIRE(std::isfinite(ord.rate) && ord.rate >= 0.0, ErrorCode::DomainError,
                         "order " + std::to_string(o) + " has a bad rate");
        CORROUND_REQUIRE(ord.region < regions, ErrorCode::DimensionMismatch,
                         "order " + std::to_string(o) + " names region " +
                             std::to_string(ord.region));
        for (std::size_t s = 0; s < ord.items.size(); ++s) {
            CORROUND_REQUIRE(ord.items[s] < items, ErrorCode::DimensionMismatch,
                             "order " + std::to_string(o) + " names item " +
                                 std::to_string(ord.items[s]));
            CORROUND_REQUIRE(s == 0 || ord.items[s - 1] < ord.items[s], ErrorCode::DomainError,
                             "order " + std::to_string(o) +
                                 " items must be strictly ascending (no repeats)");
        }
        total += ord.rate;
    }
    CORROUND_REQUIRE(total <= 1.0 + 1e-12, ErrorCode::DomainError,
                     "arrival rates sum to " + std::to_string(total) + " > 1");
}

namespace {

bool active(const OrderType& o) { return o.rate > 0.0 && !o.items.empty(); }

}  // namespace

DlpModel build_dlp(const FulfillmentInstance& inst, const DlpOptions& options) {
    inst.validate();
    const std::size_t K1 = inst.fcs + 1, n = inst.items;
    const double T = static_cast<double>(inst.horizon);
    DlpModel model;
    auto& lp = model.problem;
    model.u_var.resize(inst.orders.size());
    model.y_var.resize(inst.orders.size());
    std::vector<std::vector<lp::Term>> stock_rows(K1 * n);

    std::vector<unsigned char> allowed;
    std::vector<std::size_t> per_fc;
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const auto& ord = inst.orders[o];
        if (!active(ord)) continue;
        const std::size_t q = ord.items.size(), j = ord.region;
        const double w = T * ord.rate;
        auto& uv = model.u_var[o];
        auto& yv = model.y_var[o];
        uv.assign(q * K1, kNoVar);
        yv.assign(K1, kNoVar);

        allowed.assign(q * K1, 0);
        per_fc.assign(K1, 0);
        for (std::size_t s = 0; s < q; ++s)
            for (std::size_t k = 0; k < K1; ++k)
                if (!options.prune || k == kNullFc || inst.stock(k, ord.items[s]) > 0) {
                    allowed[s * K1 + k] = 1;
                    ++per_fc[k];
                }

        std::vector<unsigned char> fold(K1, 0), with_y(K1, 0);
        for (std::size_t k = 0; k < K1; ++k) {
            if (per_fc[k] == 0) continue;
            if (!options.prune) with_y[k] = 1;
            else if (inst.fixed(k, j) == 0.0) continue;
            else if (per_fc[k] == 1) fold[k] = 1;
            else with_y[k] = 1;
        }

        for (std::size_t s = 0; s < q; ++s) {
            const std::size_t i = ord.items[s];
            std::vector<lp::Term> assign;
            for (std::size_t k = 0; k < K1; ++k) {
                if (!allowed[s * K1 + k]) continue;
                double cost = w * inst.unit(k, i, j);
                if (fold[k]) cost += w * inst.fixed(k, j);
                const std::size_t v = lp.add_variable(cost);
                uv[s * K1 + k] = v;
                assign.push_back({v, 1.0});
                if (k != kNullFc) stock_rows[k * n + i].push_back({v, w});
            }
            lp.add_constraint(std::move(assign), lp::Relation::Equal, 1.0);
            ++model.rows_assignment;
        }
        for (std::size_t k = 0; k < K1; ++k) {
            if (!with_y[k]) continue;
            yv[k] = lp.add_variable(w * inst.fixed(k, j));
            for (std::size_t s = 0; s < q; ++s) {
                if (uv[s * K1 + k] == kNoVar) continue;
                lp.add_constraint({{uv[s * K1 + k], 1.0}, {yv[k], -1.0}}, lp::Relation::LessEqual,
                                  0.0);
                ++model.rows_linking;
            }
        }
    }
    for (std::size_t k = 1; k < K1; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = stock_rows[k * n + i];
            if (row.empty()) continue;
            lp.add_constraint(std::move(row), lp::Relation::LessEqual,
                              static_cast<double>(inst.stock(k, i)));
            ++model.rows_inventory;
        }
    return model;
}

namespace {

constexpr double kDust = 1e-12;

void finish_entry(PlanEntry& e, std::size_t q, std::size_t K1) {
    e.y.assign(K1, 0.0);
    for (std::size_t s = 0; s < q; ++s) {
        double* row = e.u.data() + s * K1;
        double sum = 0.0;
        for (std::size_t k = 0; k < K1; ++k) {
            if (row[k] < kDust) row[k] = 0.0;
            sum += row[k];
        }
        if (sum <= 0.0) {
            row[kNullFc] = 1.0;
            sum = 1.0;
        }
        for (std::size_t k = 0; k < K1; ++k) {
            row[k] /= sum;
            e.y[k] = std::max(e.y[k], row[k]);
        }
    }
}

}  // namespace

DLPlan solve_dlp(const FulfillmentInstance& inst, const DlpOptions& options) {
    const auto model = build_dlp(inst, options);
    const auto sol = lp::solve(model.problem, options.solver);
    CORROUND_REQUIRE(sol.optimal(), ErrorCode::SolverFailure,
                     "fulfillment LP ended with status " + std::string(lp::to_string(sol.status)));
    const std::size_t K1 = inst.fcs + 1;
    DLPlan plan;
    plan.objective = sol.objective;
    plan.fcs = inst.fcs;
    plan.entries.resize(inst.orders.size());
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const auto& ord = inst.orders[o];
        auto& e = plan.entries[o];
        const std::size_t q = ord.items.size();
        e.u.assign(q * K1, 0.0);
        if (active(ord)) {
            for (std::size_t c = 0; c < q * K1; ++c) {
                const std::size_t v = model.u_var[o][c];
                if (v != kNoVar) e.u[c] = std::max(sol.x[v], 0.0);
            }
        }
        finish_entry(e, q, K1);
    }
    return plan;
}

PlanAudit audit_plan(const FulfillmentInstance& inst, const DLPlan& plan) {
    const std::size_t K1 = inst.fcs + 1, n = inst.items;
    CORROUND_REQUIRE(plan.entries.size() == inst.orders.size() && plan.fcs == inst.fcs,
                     ErrorCode::DimensionMismatch, "plan does not match instance");
    PlanAudit a;
    std::vector<double> load(K1 * n, 0.0);
    const double T = static_cast<double>(inst.horizon);
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const auto& ord = inst.orders[o];
        const auto& e = plan.entries[o];
        CORROUND_REQUIRE(e.u.size() == ord.items.size() * K1 && e.y.size() == K1,
                         ErrorCode::DimensionMismatch,
                         "plan entry " + std::to_string(o) + " has the wrong shape");
        for (std::size_t s = 0; s < ord.items.size(); ++s) {
            double sum = 0.0;
            for (std::size_t k = 0; k < K1; ++k) {
                const double u = e.u[s * K1 + k];
                sum += u;
                a.negative = std::max(a.negative, -u);
                a.linking = std::max(a.linking, u - e.y[k]);
                load[k * n + ord.items[s]] += T * ord.rate * u;
            }
            a.assignment = std::max(a.assignment, std::abs(sum - 1.0));
        }
    }
    for (std::size_t k = 1; k < K1; ++k)
        for (std::size_t i = 0; i < n; ++i)
            a.inventory = std::max(a.inventory,
                                   load[k * n + i] - static_cast<double>(inst.stock(k, i)));
    return a;
}

double plan_cost(const FulfillmentInstance& inst, const DLPlan& plan) {
    const std::size_t K1 = inst.fcs + 1;
    const double T = static_cast<double>(inst.horizon);
    double total = 0.0;
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const auto& ord = inst.orders[o];
        const auto& e = plan.entries[o];
        double c = 0.0;
        for (std::size_t k = 0; k < K1; ++k) {
            for (std::size_t s = 0; s < ord.items.size(); ++s)
                c += inst.unit(k, ord.items[s], ord.region) * e.u[s * K1 + k];
            c += inst.fixed(k, ord.region) * e.y[k];
        }
        total += T * ord.rate * c;
    }
    return total;
}

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::Myopic: return "myopic";
        case Policy::Independent: return "independent";
        case Policy::Dilate: return "dilate";
        case Policy::ForceOpen: return "force_open";
        case Policy::Best: return "best";
    }
    return "?";
}

std::optional<Policy> parse_policy(std::string_view name) {
    if (name == "myopic") return Policy::Myopic;
    if (name == "best") return Policy::Best;
    if (auto s = parse_scheme(name)) {
        switch (*s) {
            case Scheme::Independent: return Policy::Independent;
            case Scheme::Dilate: return Policy::Dilate;
            case Scheme::ForceOpen: return Policy::ForceOpen;
        }
    }
    return std::nullopt;
}

std::vector<Policy> all_policies() {
    return {Policy::Myopic, Policy::Independent, Policy::Dilate, Policy::ForceOpen, Policy::Best};
}

std::string SimulationReport::scheme_label() const {
    return policy == Policy::Myopic ? "none" : std::string(to_string(policy));
}

Arrivals sample_arrivals(const FulfillmentInstance& inst, RandomStream& rng) {
    std::vector<double> cumulative;
    cumulative.reserve(inst.orders.size());
    double acc = 0.0;
    for (const auto& o : inst.orders) cumulative.push_back(acc += o.rate);
    Arrivals out(static_cast<std::size_t>(inst.horizon), -1);
    for (auto& a : out) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it != cumulative.end()) a = static_cast<std::int32_t>(it - cumulative.begin());
    }
    return out;
}

CompiledPlan::CompiledPlan(const FulfillmentInstance& inst, const DLPlan& plan)
    : objective_(plan.objective) {
    CORROUND_REQUIRE(plan.entries.size() == inst.orders.size() && plan.fcs == inst.fcs,
                     ErrorCode::DimensionMismatch, "plan does not match instance");
    const std::size_t K1 = inst.fcs + 1;
    orders_.resize(inst.orders.size());
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const std::size_t q = inst.orders[o].items.size();
        if (q == 0) continue;
        const auto& e = plan.entries[o];
        auto& c = orders_[o];
        for (std::size_t k = 0; k < K1; ++k)
            if (e.y[k] > 0.0) c.columns.push_back(k);
        std::vector<double> values;
        values.reserve(q * c.columns.size());
        for (std::size_t s = 0; s < q; ++s)
            for (std::size_t k : c.columns) values.push_back(e.u[s * K1 + k]);
        c.matrix = MarginalMatrix::validate(q, c.columns.size(), std::move(values));
        c.best = select_scheme(*c.matrix).scheme;
    }
}

namespace {

Scheme scheme_for(Policy p, Scheme best) {
    switch (p) {
        case Policy::Independent: return Scheme::Independent;
        case Policy::Dilate: return Scheme::Dilate;
        case Policy::ForceOpen: return Scheme::ForceOpen;
        default: return best;
    }
}

}  // namespace

SimulationReport simulate(const FulfillmentInstance& inst, const CompiledPlan* plan, Policy policy,
                          const Arrivals& arrivals, RandomStream& decisions) {
    const auto start = std::chrono::steady_clock::now();
    CORROUND_REQUIRE(policy == Policy::Myopic || plan != nullptr, ErrorCode::DomainError,
                     "randomized policies need a plan");
    const std::size_t K1 = inst.fcs + 1, n = inst.items;
    SimulationReport r;
    r.policy = policy;
    r.dlp = plan ? plan->objective() : 0.0;
    r.seed = decisions.seed();

    std::vector<std::int64_t> stock = inst.inventory;
    std::vector<unsigned char> used(K1);
    std::vector<std::size_t> fc;
    for (std::int32_t a : arrivals) {
        if (a < 0) continue;
        const auto& ord = inst.orders[static_cast<std::size_t>(a)];
        const std::size_t q = ord.items.size(), j = ord.region;
        if (q == 0) continue;
        fc.assign(q, kNullFc);

        if (policy == Policy::Myopic) {
            for (std::size_t s = 0; s < q; ++s) {
                const std::size_t i = ord.items[s];
                double best = 0.0;
                for (std::size_t k = 1; k < K1; ++k) {
                    if (stock[k * n + i] <= 0) continue;
                    const double c = inst.unit(k, i, j);
                    if (fc[s] == kNullFc || c < best) {
                        fc[s] = k;
                        best = c;
                    }
                }
            }
        } else {
            const auto& c = plan->order(static_cast<std::size_t>(a));
            const Scheme scheme = scheme_for(policy, c.best);
            if (scheme == Scheme::Dilate) ++r.dilate_orders;
            if (scheme == Scheme::ForceOpen) ++r.force_open_orders;
            const auto out = round(scheme, *c.matrix, decisions);
            for (std::size_t s = 0; s < q; ++s) fc[s] = c.columns[out.fc[s]];
        }

        std::fill(used.begin(), used.end(), 0);
        bool short_order = false;
        for (std::size_t s = 0; s < q; ++s) {
            const std::size_t i = ord.items[s];
            std::size_t k = fc[s];
            if (k != kNullFc && stock[k * n + i] > 0) {
                --stock[k * n + i];
                r.unit += inst.unit(k, i, j);
            } else {
                k = kNullFc;
                r.shortage += inst.unit(kNullFc, i, j);
                short_order = true;
            }
            used[k] = 1;
        }
        std::size_t real = 0;
        for (std::size_t k = 0; k < K1; ++k) {
            if (!used[k]) continue;
            r.fixed += inst.fixed(k, j);
            if (k != kNullFc) ++real;
        }
        ++r.orders;
        r.fcs_used += real;
        if (real >= 2) ++r.split_orders;
        if (short_order) ++r.short_orders;
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
    return r;
}

SimulationReport simulate(const FulfillmentInstance& inst, const DLPlan& plan, Policy policy,
                          RandomStream& rng) {
    const CompiledPlan compiled(inst, plan);
    const auto arrivals = sample_arrivals(inst, rng);
    return simulate(inst, &compiled, policy, arrivals, rng);
}

BetaReport theoretical_beta(const FulfillmentInstance& inst, const DLPlan& plan) {
    const std::size_t K1 = inst.fcs + 1;
    BetaReport b;
    double num = 0.0, den = 0.0;
    std::size_t largest = 0;
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        const auto& ord = inst.orders[o];
        if (!active(ord)) continue;
        const std::size_t q = ord.items.size();
        largest = std::max(largest, q);
        const auto& e = plan.entries[o];
        double min_max = 1.0;
        for (std::size_t s = 0; s < q; ++s) {
            double mx = 0.0;
            for (std::size_t k = 0; k < K1; ++k) mx = std::max(mx, e.u[s * K1 + k]);
            min_max = std::min(min_max, mx);
        }
        const double ratio =
            std::min({guarantee_dilate(q), 1.0 / min_max, guarantee_js(q)});
        for (std::size_t k = 1; k < K1; ++k) {
            const double w = ord.rate * inst.fixed(k, ord.region) * e.y[k];
            num += w * ratio;
            den += w;
        }
    }
    if (den > 0.0) b.beta = num / den;
    if (largest > 0) b.relaxed = guarantee_dilate(largest);
    return b;
}

FulfillmentInstance scale(const FulfillmentInstance& inst, double theta) {
    CORROUND_REQUIRE(std::isfinite(theta) && theta > 0.0, ErrorCode::DomainError,
                     "scale factor must be positive");
    FulfillmentInstance out = inst;
    out.horizon = std::llround(theta * static_cast<double>(inst.horizon));
    for (auto& b : out.inventory) b = std::llround(theta * static_cast<double>(b));
    return out;
}

void write_instance(const FulfillmentInstance& inst, std::ostream& out) {
    json j;
    j["id"] = inst.id;
    j["seed"] = inst.seed;
    j["items"] = inst.items;
    j["fcs"] = inst.fcs;
    j["regions"] = inst.regions;
    j["horizon"] = inst.horizon;
    json orders = json::array();
    for (const auto& o : inst.orders)
        orders.push_back({{"items", o.items}, {"region", o.region}, {"rate", o.rate},
                          {"type", o.type}});
    j["orders"] = std::move(orders);
    j["unit_cost"] = inst.unit_cost;
    j["fixed_cost"] = inst.fixed_cost;
    j["inventory"] = inst.inventory;
    out << j.dump(1) << '\n';
}

FulfillmentInstance read_instance(std::istream& in) {
    FulfillmentInstance inst;
    try {
        const json j = json::parse(in);
        inst.id = j.value("id", std::string{});
        inst.seed = j.value("seed", std::uint64_t{0});
        j.at("items").get_to(inst.items);
        j.at("fcs").get_to(inst.fcs);
        j.at("regions").get_to(inst.regions);
        j.at("horizon").get_to(inst.horizon);
        for (const auto& o : j.at("orders")) {
            OrderType t;
            o.at("items").get_to(t.items);
            o.at("region").get_to(t.region);
            o.at("rate").get_to(t.rate);
            t.type = o.value("type", std::size_t{0});
            inst.orders.push_back(std::move(t));
        }
        j.at("unit_cost").get_to(inst.unit_cost);
        j.at("fixed_cost").get_to(inst.fixed_cost);
        j.at("inventory").get_to(inst.inventory);
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("instance: ") + e.what());
    }
    inst.validate();
    return inst;
}

void write_plan(const DLPlan& plan, std::ostream& out) {
    json j;
    j["objective"] = plan.objective;
    j["fcs"] = plan.fcs;
    json entries = json::array();
    for (const auto& e : plan.entries) entries.push_back({{"u", e.u}, {"y", e.y}});
    j["entries"] = std::move(entries);
    out << j.dump(1) << '\n';
}

DLPlan read_plan(std::istream& in) {
    DLPlan plan;
    try {
        const json j = json::parse(in);
        j.at("objective").get_to(plan.objective);
        j.at("fcs").get_to(plan.fcs);
        for (const auto& e : j.at("entries")) {
            PlanEntry p;
            e.at("u").get_to(p.u);
            e.at("y").get_to(p.y);
            plan.entries.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("plan: ") + e.what());
    }
    return plan;
}

void write_report_row(std::ostream& out, std::string_view instance_id, std::size_t replication,
                      const SimulationReport& r) {
    out << std::setprecision(10) << instance_id << ',' << replication << ',' << to_string(r.policy)
        << ',' << r.scheme_label() << ',' << r.total() << ',' << r.fixed << ',' << r.unit << ','
        << r.shortage << ',' << r.dlp << ',' << r.loss_pct() << ',' << r.fcs_per_order() << ','
        << r.wall_ms << ',' << r.seed << '\n';
}

}  // namespace corround
