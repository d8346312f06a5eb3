#include "corround/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace corround {

std::vector<double> tail_grid() {
    std::vector<double> grid;
    for (int j = 0; j <= 20; ++j) grid.push_back(0.5 * j);
    return grid;
}

McReport mc_estimate(const MarginalMatrix& m, Scheme scheme, std::size_t samples,
                     RandomStream& rng) {
    const std::size_t q = m.items(), K = m.fcs();
    McReport r{scheme, samples, q, K, {}, {}, {}};
    std::vector<std::size_t> marginal_counts(q * K, 0), usage_counts(K, 0);
    const auto grid = tail_grid();
    std::vector<std::size_t> tail_counts(scheme == Scheme::Dilate ? grid.size() : 0, 0);
    std::vector<unsigned char> used(K);

    for (std::size_t n = 0; n < samples; ++n) {
        RoundingOutcome out;
        if (scheme == Scheme::Dilate) {
            auto traced = dilate_round_traced(m, rng);
            // Time by which every item has seen its FC: max_i min_k X_{ki}.
            double last = 0.0;
            for (std::size_t i = 0; i < q; ++i)
                last = std::max(last, traced.trace.observed_at(i, traced.outcome.fc[i]));
            for (std::size_t g = 0; g < grid.size(); ++g)
                if (last >= grid[g]) ++tail_counts[g];
            out = std::move(traced.outcome);
        } else {
            out = round(scheme, m, rng);
        }
        std::fill(used.begin(), used.end(), 0);
        for (std::size_t i = 0; i < q; ++i) {
            ++marginal_counts[i * K + out.fc[i]];
            used[out.fc[i]] = 1;
        }
        for (std::size_t k = 0; k < K; ++k) usage_counts[k] += used[k];
    }

    const double inv = 1.0 / static_cast<double>(samples);
    r.marginals.resize(q * K);
    for (std::size_t j = 0; j < q * K; ++j) r.marginals[j] = marginal_counts[j] * inv;
    r.usage.resize(K);
    for (std::size_t k = 0; k < K; ++k) r.usage[k] = usage_counts[k] * inv;
    r.tail.resize(tail_counts.size());
    for (std::size_t g = 0; g < tail_counts.size(); ++g) r.tail[g] = tail_counts[g] * inv;
    return r;
}

double scheme_guarantee(Scheme scheme, const MarginalMatrix& m) {
    switch (scheme) {
        case Scheme::Independent: return static_cast<double>(m.items());
        case Scheme::Dilate: return guarantee_dilate(m.items());
        case Scheme::ForceOpen: return guarantee_force_open(m);
    }
    return 0.0;
}

double binomial_slack(double p, std::size_t n) {
    return 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

McCheck check_report(const MarginalMatrix& m, const McReport& r) {
    McCheck c;
    c.worst_marginal_excess = -1.0;
    c.worst_usage_excess = -1.0;
    for (std::size_t i = 0; i < m.items(); ++i) {
        for (std::size_t k = 0; k < m.fcs(); ++k) {
            const double u = m(i, k);
            const double excess = std::abs(r.marginal(i, k) - u) - binomial_slack(u, r.samples);
            c.worst_marginal_excess = std::max(c.worst_marginal_excess, excess);
            if (excess > 1e-12) ++c.marginal_violations;
        }
    }
    const double usage_slack = binomial_slack(0.5, r.samples);
    const double alpha = scheme_guarantee(r.scheme, m);
    const auto& y = m.usage_bounds();
    for (std::size_t k = 0; k < m.fcs(); ++k) {
        if (y[k] <= 0.0) continue;
        const double excess = r.usage[k] - (alpha * y[k] + usage_slack);
        c.worst_usage_excess = std::max(c.worst_usage_excess, excess);
        if (excess > 0.0) ++c.usage_violations;
    }
    const auto grid = tail_grid();
    for (std::size_t g = 0; g < r.tail.size(); ++g) {
        const double bound = static_cast<double>(m.items()) * std::exp(-grid[g]);
        if (r.tail[g] > bound + usage_slack) ++c.tail_violations;
    }
    return c;
}

void write_marginals_csv(const MarginalMatrix& m, const McReport& r, std::ostream& out) {
    out << "item,fc,u,empirical,abs_err\n" << std::setprecision(10);
    for (std::size_t i = 0; i < m.items(); ++i)
        for (std::size_t k = 0; k < m.fcs(); ++k)
            out << i << ',' << k << ',' << m(i, k) << ',' << r.marginal(i, k) << ','
                << std::abs(r.marginal(i, k) - m(i, k)) << '\n';
}

void write_usage_csv(const MarginalMatrix& m, const McReport& r, std::ostream& out) {
    out << "fc,y,usage_empirical,bound,scheme\n" << std::setprecision(10);
    const double alpha = scheme_guarantee(r.scheme, m);
    const auto& y = m.usage_bounds();
    for (std::size_t k = 0; k < m.fcs(); ++k)
        out << k << ',' << y[k] << ',' << r.usage[k] << ',' << alpha * y[k] << ','
            << to_string(r.scheme) << '\n';
}

}  // namespace corround
