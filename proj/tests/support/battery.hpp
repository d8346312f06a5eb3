#pragma once

// Random inputs shared by the unit and acceptance tests.

#include <cstddef>

#include "corround/fulfillment.hpp"
#include "corround/random_stream.hpp"
#include "corround/set_cover.hpp"

namespace battery {

struct CoverCase {
    corround::SetCoverInstance instance;
    corround::FractionalCover cover;
};

/// Each element joins each set w.p. `density` (and at least one set). y
/// starts from the even split 1/(number of covering sets) per element,
/// raised by a random amount and capped at 1, so it is always feasible.
CoverCase random_cover(std::size_t elements, std::size_t sets, double density,
                       corround::RandomStream& rng);

/// One item, one region, one real FC with `stock` units; every step an
/// order for the item arrives w.p. `rate`.
corround::FulfillmentInstance single_fc(std::int64_t horizon, double rate, std::int64_t stock,
                                        double unit, double fixed, double shortage);

}  // namespace battery
