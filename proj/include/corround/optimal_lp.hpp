#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "corround/lp.hpp"
#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"
#include "corround/rounding.hpp"

namespace corround {

/// Bit k set means FC k is in the subset.
using FcMask = std::uint32_t;

struct OptimalLpOptions {
    std::size_t max_fcs = 12;
    lp::SolverOptions solver{};
};

/// The instance-optimal rounding LP over subsets of FCs.
///
/// Variables: alpha, z(S) for every admissible subset S, and u_{ki}(S) for
/// k in S with u_{ki} > 0. A subset is admissible when it is nonempty,
/// every FC in it has y_k > 0, and it meets the support of every item;
/// other subsets are forced to z(S) = 0 by the constraints and are left out.
struct OptimalLpModel {
    lp::Problem problem;
    std::size_t alpha_var = 0;
    std::vector<FcMask> subsets;
    std::vector<std::size_t> z_var;  // parallel to subsets

    struct Conditional {
        std::size_t fc;
        std::size_t item;
        std::size_t subset;  // index into subsets
        std::size_t var;
    };
    std::vector<Conditional> conditionals;

    // Row counts per constraint family, for auditing.
    std::size_t rows_fulfil_once = 0;   // sum_{k in S} u_{ki}(S) = z(S)
    std::size_t rows_marginal = 0;      // sum_S u_{ki}(S) = u_{ki}
    std::size_t rows_competitive = 0;   // sum_{S ni k} z(S) <= alpha y_k
    std::size_t rows_distribution = 0;  // sum_S z(S) = 1
};

OptimalLpModel build_lp(const MarginalMatrix& m, const OptimalLpOptions& options = {});

struct OptimalSchemeSolution {
    std::size_t items = 0;
    std::size_t fcs = 0;
    double alpha = 0.0;

    struct Subset {
        FcMask mask;
        double z;
    };
    struct Conditional {
        std::size_t fc;
        std::size_t item;
        FcMask mask;
        double value;
    };
    std::vector<Subset> subsets;            // sorted by mask, z > 0 only
    std::vector<Conditional> conditionals;  // sorted by (fc, item, mask), value > 0 only
};

/// Minimum alpha over all alpha-competitive schemes for this instance,
/// together with one scheme attaining it. Throws CapExceeded or
/// SolverFailure; verifies the result before returning.
OptimalSchemeSolution solve_optimal_alpha(const MarginalMatrix& m,
                                          const OptimalLpOptions& options = {});

/// Throws InvariantViolation unless the solution is a valid scheme for m
/// within `tol`.
void verify_solution(const OptimalSchemeSolution& s, const MarginalMatrix& m, double tol = 1e-7);

/// Draws S with probability z(S), then each item's FC within S with
/// probability u_{ki}(S) / z(S).
class OptimalSampler {
public:
    explicit OptimalSampler(const OptimalSchemeSolution& s);

    RoundingOutcome sample(RandomStream& rng) const;
    /// Subset drawn in the last call to sample().
    FcMask last_subset() const noexcept { return last_; }

private:
    struct Choice {
        std::vector<std::size_t> fcs;
        std::vector<double> weights;
    };
    std::size_t items_;
    std::vector<FcMask> masks_;
    std::vector<double> z_;
    std::vector<std::vector<Choice>> choices_;  // [subset][item]
    mutable FcMask last_ = 0;
};

RoundingOutcome sample_optimal(const OptimalSchemeSolution& s, RandomStream& rng);

/// `alpha <value>`, then `<mask> <z>` per subset, then
/// `<fc> <item> <mask> <value>` per conditional entry, in sorted order.
void write_solution(const OptimalSchemeSolution& s, std::ostream& out);
OptimalSchemeSolution read_solution(std::istream& in);

}  // namespace corround
