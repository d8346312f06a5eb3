#include "corround/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corround/error.hpp"

namespace corround {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Independent: return "independent";
        case Scheme::Dilate: return "dilate";
        case Scheme::ForceOpen: return "force_open";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    if (name == "independent" || name == "indep") return Scheme::Independent;
    if (name == "dilate") return Scheme::Dilate;
    if (name == "force_open" || name == "force-open" || name == "forceopen")
        return Scheme::ForceOpen;
    return std::nullopt;
}

RoundingOutcome independent_round(const MarginalMatrix& m, RandomStream& rng) {
    RoundingOutcome out{std::vector<std::size_t>(m.items())};
    for (std::size_t i = 0; i < m.items(); ++i) out.fc[i] = rng.categorical(m.row(i));
    return out;
}

namespace {

void draw_openings(const MarginalMatrix& m, RandomStream& rng, std::vector<double>& opening) {
    const auto& y = m.usage_bounds();
    opening.resize(m.fcs());
    for (std::size_t k = 0; k < m.fcs(); ++k) {
        // An all-zero column is never observed; skip the draw's value but
        // keep the draw so stream positions do not depend on zero columns.
        const double e = rng.exponential(1.0);
        opening[k] = y[k] > 0.0 ? e / y[k] : kNever;
    }
}

// Dilated view of FC k by item i: (y_k / u_{ki}) E_k.
inline double dilated(double y, double u, double e) { return u > 0.0 ? (y * e) / u : kNever; }

template <bool Traced>
void run_dilate(const MarginalMatrix& m, RandomStream& rng, RoundingOutcome& out,
                RoundingTrace* trace) {
    const std::size_t q = m.items(), K = m.fcs();
    const auto& y = m.usage_bounds();
    std::vector<double> opening;
    draw_openings(m, rng, opening);
    out.fc.assign(q, 0);
    if constexpr (Traced) trace->observed.assign(q * K, kNever);
    for (std::size_t i = 0; i < q; ++i) {
        const auto row = m.row(i);
        double best = kNever;
        std::size_t best_k = K;
        for (std::size_t k = 0; k < K; ++k) {
            const double x = dilated(y[k], row[k], opening[k]);
            if constexpr (Traced) trace->observed[i * K + k] = x;
            if (x < best) {
                best = x;
                best_k = k;
            }
        }
        out.fc[i] = best_k;
    }
    if constexpr (Traced) {
        trace->opening = std::move(opening);
        trace->fcs = K;
    }
}

template <bool Traced>
void run_force_open(const MarginalMatrix& m, RandomStream& rng, RoundingOutcome& out,
                    RoundingTrace* trace) {
    const std::size_t q = m.items(), K = m.fcs();
    const auto& y = m.usage_bounds();
    std::vector<double> opening;
    draw_openings(m, rng, opening);
    out.fc.assign(q, 0);
    if constexpr (Traced) {
        trace->observed.assign(q * K, kNever);
        trace->hidden.assign(q, 0);
        trace->target.assign(q, 0);
    }
    for (std::size_t i = 0; i < q; ++i) {
        const auto row = m.row(i);
        std::size_t target = 0;
        for (std::size_t k = 1; k < K; ++k)
            if (row[k] > row[target]) target = k;
        const double u_t = row[target];
        const bool hide = rng.bernoulli(hiding_probability(u_t));

        // Natural opening of the target unless hidden, capped by the
        // forced opening at 1 / y_target in FC time.
        const double natural = hide ? kNever : opening[target];
        const double x_target = (y[target] / u_t) * std::min(natural, 1.0 / y[target]);

        double best = kNever;
        std::size_t best_k = K;
        for (std::size_t k = 0; k < K; ++k) {
            const double x = k == target ? x_target : dilated(y[k], row[k], opening[k]);
            if constexpr (Traced) trace->observed[i * K + k] = x;
            if (x < best) {
                best = x;
                best_k = k;
            }
        }
        out.fc[i] = best_k;
        if constexpr (Traced) {
            trace->hidden[i] = hide ? 1 : 0;
            trace->target[i] = target;
        }
    }
    if constexpr (Traced) {
        trace->opening = std::move(opening);
        trace->fcs = K;
    }
}

}  // namespace

RoundingOutcome dilate_round(const MarginalMatrix& m, RandomStream& rng) {
    RoundingOutcome out;
    run_dilate<false>(m, rng, out, nullptr);
    return out;
}

TracedOutcome dilate_round_traced(const MarginalMatrix& m, RandomStream& rng) {
    TracedOutcome t;
    run_dilate<true>(m, rng, t.outcome, &t.trace);
    return t;
}

RoundingOutcome force_open_round(const MarginalMatrix& m, RandomStream& rng) {
    RoundingOutcome out;
    run_force_open<false>(m, rng, out, nullptr);
    return out;
}

TracedOutcome force_open_round_traced(const MarginalMatrix& m, RandomStream& rng) {
    TracedOutcome t;
    run_force_open<true>(m, rng, t.outcome, &t.trace);
    return t;
}

RoundingOutcome round(Scheme scheme, const MarginalMatrix& m, RandomStream& rng) {
    switch (scheme) {
        case Scheme::Independent: return independent_round(m, rng);
        case Scheme::Dilate: return dilate_round(m, rng);
        case Scheme::ForceOpen: return force_open_round(m, rng);
    }
    return {};
}

double hiding_probability(double u_max) {
    CORROUND_REQUIRE(u_max > 0.0 && u_max <= 1.0, ErrorCode::DomainError,
                     "hiding probability needs u in (0,1], got " + std::to_string(u_max));
    if (u_max == 1.0) return 1.0;
    // Rewrite the denominator as (1-u) + e*u*(expm1(x) - x) with
    // x = (1-u)/u; the direct form cancels catastrophically as u -> 1.
    const double slack = 1.0 - u_max;
    const double x = slack / u_max;
    double excess;  // expm1(x) - x
    if (x < 1e-3) {
        excess = x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120)));
    } else {
        excess = std::expm1(x) - x;
    }
    const double denom = slack + std::numbers::e * u_max * excess;
    if (!std::isfinite(denom)) return 0.0;
    return std::clamp(slack / denom, 0.0, 1.0);
}

double guarantee_dilate(std::size_t items) {
    return 1.0 + std::log(static_cast<double>(items));
}

double guarantee_force_open(const MarginalMatrix& m) { return m.alpha_force(); }

double guarantee_js(std::size_t items) {
    const double q = static_cast<double>(items);
    if (items % 2 == 1) return (q + 1) * (q + 1) / (4 * q);
    return (q + 2) / 4;
}

SchemeChoice select_scheme(const MarginalMatrix& m) {
    const double dilate = guarantee_dilate(m.items());
    const double force = guarantee_force_open(m);
    const double js = guarantee_js(m.items());
    const Scheme pick = dilate <= force ? Scheme::Dilate : Scheme::ForceOpen;
    return {pick, std::min({dilate, force, js})};
}

}  // namespace corround
