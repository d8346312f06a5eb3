#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"
#include "corround/rounding.hpp"

namespace corround {

/// Sets k = 0..K-1 over elements 0..q-1. Every element lies in some set.
struct SetCoverInstance {
    std::size_t elements = 0;
    std::vector<std::vector<std::size_t>> members;  // members[k], ascending
    std::vector<double> costs;                      // one per set; 1 if unspecified

    std::size_t sets() const noexcept { return members.size(); }

    /// Throws DimensionMismatch, DomainError or EmptyInstance.
    void validate() const;
};

/// y_k in [0, 1] with sum over sets containing i of y_k >= 1 for each i.
struct FractionalCover {
    std::vector<double> y;
};

/// Y_k = 1 iff set k is picked.
struct CoverOutcome {
    std::vector<unsigned char> picked;
};

inline constexpr std::size_t kHardInstanceCap = 100'000;
inline constexpr double kCoverTolerance = 1e-9;

/// Spreads each element's unit of demand over its sets in ascending index
/// order, taking min(y_k, remaining) from each. Throws InfeasibleFractional
/// when an element's covering mass falls short of 1.
MarginalMatrix marginals_from_fractional_cover(const SetCoverInstance& sc,
                                               const FractionalCover& y);

/// Runs `scheme` on the reduced marginals and picks every set that received
/// an element. Feasible in every realization.
CoverOutcome round_cover(const SetCoverInstance& sc, const FractionalCover& y, Scheme scheme,
                         RandomStream& rng);

/// Same as round_cover, reusing marginals built once by the caller.
CoverOutcome round_cover(const MarginalMatrix& reduced, Scheme scheme, RandomStream& rng);

bool covers_all(const SetCoverInstance& sc, const CoverOutcome& out);

struct HardInstance {
    SetCoverInstance instance;
    FractionalCover cover;
};

/// One element per d-subset of K sets, y_k = 1/d. Any covering scheme needs
/// ratio at least d(1 - d/K) here. Throws CapExceeded above kHardInstanceCap
/// elements, DomainError unless 1 <= d <= K.
HardInstance hard_instance(std::size_t d, std::size_t sets,
                           std::size_t cap = kHardInstanceCap);

/// Text format: `q K`, then one line per set: `cost count e_1 ... e_count`
/// with 1-based element ids.
SetCoverInstance read_set_cover(std::istream& in);
void write_set_cover(const SetCoverInstance& sc, std::ostream& out);

}  // namespace corround
