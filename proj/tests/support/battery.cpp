#include "battery.hpp"

#include <algorithm>

namespace battery {

using namespace corround;

CoverCase random_cover(std::size_t elements, std::size_t sets, double density, RandomStream& rng) {
    CoverCase c;
    c.instance.elements = elements;
    c.instance.members.assign(sets, {});
    c.instance.costs.assign(sets, 1.0);
    std::vector<std::size_t> covering(elements, 0);
    for (std::size_t i = 0; i < elements; ++i) {
        bool any = false;
        for (std::size_t k = 0; k < sets; ++k)
            if (rng.bernoulli(density)) {
                c.instance.members[k].push_back(i);
                any = true;
            }
        if (!any) {
            const auto k = rng.below(sets);
            c.instance.members[k].push_back(i);
        }
    }
    for (auto& m : c.instance.members) std::sort(m.begin(), m.end());
    for (const auto& m : c.instance.members)
        for (auto e : m) ++covering[e];
    c.cover.y.assign(sets, 0.0);
    for (std::size_t k = 0; k < sets; ++k) {
        double need = 0.0;
        for (auto e : c.instance.members[k]) need = std::max(need, 1.0 / covering[e]);
        c.cover.y[k] = std::min(1.0, need * (1.0 + 0.5 * rng.uniform()));
    }
    return c;
}

FulfillmentInstance single_fc(std::int64_t horizon, double rate, std::int64_t stock, double unit,
                              double fixed, double shortage) {
    auto inst = FulfillmentInstance::shaped(1, 1, 1, horizon);
    inst.id = "single";
    inst.orders.push_back({{0}, 0, rate, 1});
    inst.unit_cost[0] = shortage;  // null FC
    inst.unit_cost[1] = unit;
    inst.fixed_cost[1] = fixed;
    inst.inventory[1] = stock;
    return inst;
}

}  // namespace battery
