#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"

namespace corround {

enum class Scheme { Independent, Dilate, ForceOpen };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// FC index (0-based) chosen for each item.
struct RoundingOutcome {
    std::vector<std::size_t> fc;

    friend bool operator==(const RoundingOutcome&, const RoundingOutcome&) = default;
};

/// Internal clocks of one dilate or force-open run, kept for auditing.
struct RoundingTrace {
    std::vector<double> opening;         // E_k, one per FC
    std::vector<double> observed;        // X_{ki}, row-major by item; kNever where u_{ki} = 0
    std::vector<unsigned char> hidden;   // H_i (force-open only)
    std::vector<std::size_t> target;     // m(i) (force-open only)
    std::size_t fcs = 0;

    double observed_at(std::size_t item, std::size_t fc) const { return observed[item * fcs + fc]; }

    friend bool operator==(const RoundingTrace&, const RoundingTrace&) = default;
};

struct TracedOutcome {
    RoundingOutcome outcome;
    RoundingTrace trace;
};

/// Each item drawn from its own row, independently of the others.
RoundingOutcome independent_round(const MarginalMatrix& m, RandomStream& rng);

/// Dilated exponential clocks. FC k opens at E_k ~ Exp(y_k); item i sees it
/// at (y_k / u_{ki}) E_k and takes the first FC it sees. Ties go to the
/// lowest index. Competitive ratio 1 + ln q.
RoundingOutcome dilate_round(const MarginalMatrix& m, RandomStream& rng);
TracedOutcome dilate_round_traced(const MarginalMatrix& m, RandomStream& rng);

/// Dilated clocks plus a forced opening of each item's favourite FC m(i)
/// at time 1 / u_{m(i),i}, with the favourite's natural opening hidden
/// with probability hiding_probability(u_{m(i),i}) so marginals stay exact.
/// Competitive ratio 1 / min_i max_k u_{ki} (at most the sparsity d).
RoundingOutcome force_open_round(const MarginalMatrix& m, RandomStream& rng);
TracedOutcome force_open_round_traced(const MarginalMatrix& m, RandomStream& rng);

RoundingOutcome round(Scheme scheme, const MarginalMatrix& m, RandomStream& rng);

/// (1 - u) / (1 - u + u e^{1/u} - e) for u in (0, 1], with the u = 1
/// value taken as 1 (its continuous limit). Throws DomainError otherwise.
double hiding_probability(double u_max);

double guarantee_dilate(std::size_t items);
double guarantee_force_open(const MarginalMatrix& m);
/// Guarantee of the partition-based scheme of Jasin and Sinha; reported,
/// never dispatched.
double guarantee_js(std::size_t items);

struct SchemeChoice {
    Scheme scheme;
    /// min of all three guarantees, including guarantee_js.
    double predicted_ratio;
};

/// Dilate when 1 + ln q <= 1 / min_i max_k u_{ki}, else force-open.
SchemeChoice select_scheme(const MarginalMatrix& m);

}  // namespace corround
