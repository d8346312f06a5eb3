#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "corround/marginal_matrix.hpp"
#include "corround/random_stream.hpp"
#include "corround/rounding.hpp"

namespace corround {

/// Frequencies from repeated independent runs of one scheme.
struct McReport {
    Scheme scheme;
    std::size_t samples = 0;
    std::size_t items = 0;
    std::size_t fcs = 0;
    std::vector<double> marginals;  // empirical P[Z_i = k], row-major by item
    std::vector<double> usage;      // empirical P[FC k used]
    /// Dilate only: empirical P[some item still unassigned at t] for t on
    /// tail_grid(). Empty for other schemes.
    std::vector<double> tail;

    double marginal(std::size_t item, std::size_t fc) const { return marginals[item * fcs + fc]; }
};

/// t = 0, 0.5, ..., 10.
std::vector<double> tail_grid();

McReport mc_estimate(const MarginalMatrix& m, Scheme scheme, std::size_t samples,
                     RandomStream& rng);

/// Worst-case guarantee of `scheme` on `m`: 1 + ln q, 1 / min_i max_k u,
/// or q for independent rounding.
double scheme_guarantee(Scheme scheme, const MarginalMatrix& m);

/// Half-width of the 4-sigma binomial band for a proportion p at n samples.
double binomial_slack(double p, std::size_t n);

struct McCheck {
    std::size_t marginal_violations = 0;
    std::size_t usage_violations = 0;
    std::size_t tail_violations = 0;
    double worst_marginal_excess = 0.0;  // max(|emp - u| - slack), may be negative
    double worst_usage_excess = 0.0;

    bool passed() const {
        return marginal_violations == 0 && usage_violations == 0 && tail_violations == 0;
    }
};

/// Marginals within 4 sigma of u, usage within guarantee * y_k plus
/// 4 sqrt(0.25 / N), and (dilate) tail within q e^{-t} plus the same slack.
McCheck check_report(const MarginalMatrix& m, const McReport& r);

/// CSV `item,fc,u,empirical,abs_err`.
void write_marginals_csv(const MarginalMatrix& m, const McReport& r, std::ostream& out);
/// CSV `fc,y,usage_empirical,bound,scheme`.
void write_usage_csv(const MarginalMatrix& m, const McReport& r, std::ostream& out);

}  // namespace corround
