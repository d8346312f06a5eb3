#include "corround/set_cover.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "corround/error.hpp"

namespace corround {

void SetCoverInstance::validate() const {
    CORROUND_REQUIRE(elements > 0 && !members.empty(), ErrorCode::EmptyInstance,
                     "set cover instance needs at least one element and one set");
    CORROUND_REQUIRE(costs.size() == members.size(), ErrorCode::DimensionMismatch,
                     "one cost per set expected");
    std::vector<unsigned char> seen(elements, 0);
    for (std::size_t k = 0; k < members.size(); ++k) {
        CORROUND_REQUIRE(std::isfinite(costs[k]) && costs[k] >= 0.0, ErrorCode::DomainError,
                         "set " + std::to_string(k) + " has a bad cost");
        for (std::size_t e : members[k]) {
            CORROUND_REQUIRE(e < elements, ErrorCode::DimensionMismatch,
                             "set " + std::to_string(k) + " lists element " + std::to_string(e) +
                                 " outside 0.." + std::to_string(elements - 1));
            seen[e] = 1;
        }
    }
    for (std::size_t e = 0; e < elements; ++e)
        CORROUND_REQUIRE(seen[e], ErrorCode::DomainError,
                         "element " + std::to_string(e) + " lies in no set");
}

MarginalMatrix marginals_from_fractional_cover(const SetCoverInstance& sc,
                                               const FractionalCover& y) {
    sc.validate();
    const std::size_t q = sc.elements, K = sc.sets();
    CORROUND_REQUIRE(y.y.size() == K, ErrorCode::DimensionMismatch,
                     "fractional cover has " + std::to_string(y.y.size()) + " entries for " +
                         std::to_string(K) + " sets");
    for (double v : y.y)
        CORROUND_REQUIRE(std::isfinite(v) && v >= 0.0 && v <= 1.0 + kCoverTolerance,
                         ErrorCode::DomainError, "fractional cover entries must lie in [0, 1]");

    std::vector<std::vector<std::size_t>> covering(q);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t e : sc.members[k]) covering[e].push_back(k);

    std::vector<double> u(q * K, 0.0);
    for (std::size_t i = 0; i < q; ++i) {
        auto& sets = covering[i];
        std::sort(sets.begin(), sets.end());
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
        double remaining = 1.0;
        std::size_t last = K;
        for (std::size_t k : sets) {
            if (remaining <= 0.0) break;
            const double take = std::min(std::min(y.y[k], 1.0), remaining);
            if (take <= 0.0) continue;
            u[i * K + k] = take;
            remaining -= take;
            last = k;
        }
        CORROUND_REQUIRE(remaining <= kCoverTolerance, ErrorCode::InfeasibleFractional,
                         "element " + std::to_string(i) + " is covered with mass " +
                             std::to_string(1.0 - remaining) + " < 1");
        // Rounding dust goes to the last set used, which has y_k >= its share.
        if (remaining > 0.0) u[i * K + last] += remaining;
    }
    return MarginalMatrix::validate(q, K, std::move(u));
}

CoverOutcome round_cover(const MarginalMatrix& reduced, Scheme scheme, RandomStream& rng) {
    const auto assignment = round(scheme, reduced, rng);
    CoverOutcome out{std::vector<unsigned char>(reduced.fcs(), 0)};
    for (std::size_t k : assignment.fc) out.picked[k] = 1;
    return out;
}

CoverOutcome round_cover(const SetCoverInstance& sc, const FractionalCover& y, Scheme scheme,
                         RandomStream& rng) {
    return round_cover(marginals_from_fractional_cover(sc, y), scheme, rng);
}

bool covers_all(const SetCoverInstance& sc, const CoverOutcome& out) {
    std::vector<unsigned char> hit(sc.elements, 0);
    for (std::size_t k = 0; k < sc.sets() && k < out.picked.size(); ++k)
        if (out.picked[k])
            for (std::size_t e : sc.members[k]) hit[e] = 1;
    return std::all_of(hit.begin(), hit.end(), [](unsigned char h) { return h != 0; });
}

namespace {

// C(n, r), or cap + 1 once it exceeds cap.
std::size_t binomial_capped(std::size_t n, std::size_t r, std::size_t cap) {
    r = std::min(r, n - r);
    long double c = 1.0L;
    for (std::size_t j = 1; j <= r; ++j) {
        c = c * static_cast<long double>(n - r + j) / static_cast<long double>(j);
        if (c > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::size_t>(std::llround(c));
}

}  // namespace

HardInstance hard_instance(std::size_t d, std::size_t sets, std::size_t cap) {
    CORROUND_REQUIRE(d >= 1 && d <= sets, ErrorCode::DomainError,
                     "hard instance needs 1 <= d <= K");
    const std::size_t q = binomial_capped(sets, d, cap);
    CORROUND_REQUIRE(q <= cap, ErrorCode::CapExceeded,
                     "C(" + std::to_string(sets) + ", " + std::to_string(d) +
                         ") elements exceeds the cap of " + std::to_string(cap));

    HardInstance h;
    h.instance.elements = q;
    h.instance.members.assign(sets, {});
    h.instance.costs.assign(sets, 1.0);
    h.cover.y.assign(sets, 1.0 / static_cast<double>(d));

    // Lexicographic d-subsets of {0..K-1}.
    std::vector<std::size_t> pick(d);
    for (std::size_t j = 0; j < d; ++j) pick[j] = j;
    for (std::size_t e = 0; e < q; ++e) {
        for (std::size_t k : pick) h.instance.members[k].push_back(e);
        std::size_t j = d;
        while (j > 0 && pick[j - 1] == sets - d + j - 1) --j;
        if (j == 0) break;
        ++pick[j - 1];
        for (std::size_t t = j; t < d; ++t) pick[t] = pick[t - 1] + 1;
    }
    return h;
}

SetCoverInstance read_set_cover(std::istream& in) {
    std::vector<std::string> lines;
    std::vector<std::size_t> line_nos;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        lines.push_back(line);
        line_nos.push_back(no);
    }
    auto parse_fail = [&](std::size_t idx, const std::string& what) {
        fail(ErrorCode::ParseError,
             "line " + std::to_string(idx < line_nos.size() ? line_nos[idx] : 0) + ": " + what);
    };
    if (lines.empty()) parse_fail(0, "empty input");

    SetCoverInstance sc;
    long long q = 0, K = 0;
    {
        std::istringstream hs(lines[0]);
        std::string extra;
        if (!(hs >> q >> K) || (hs >> extra) || q <= 0 || K <= 0)
            parse_fail(0, "expected `q K` with positive counts");
    }
    if (lines.size() != static_cast<std::size_t>(K) + 1)
        parse_fail(lines.size() - 1, "expected " + std::to_string(K) + " set lines, found " +
                                         std::to_string(lines.size() - 1));
    sc.elements = static_cast<std::size_t>(q);
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
        std::istringstream ls(lines[k + 1]);
        double cost = 0.0;
        long long count = 0;
        if (!(ls >> cost >> count) || count < 0) parse_fail(k + 1, "expected `cost count ...`");
        std::vector<std::size_t> members;
        for (long long t = 0; t < count; ++t) {
            long long e = 0;
            if (!(ls >> e)) parse_fail(k + 1, "fewer elements than the declared count");
            if (e < 1 || e > q) parse_fail(k + 1, "element id " + std::to_string(e) + " out of 1.." +
                                                      std::to_string(q));
            members.push_back(static_cast<std::size_t>(e - 1));
        }
        std::string extra;
        if (ls >> extra) parse_fail(k + 1, "more elements than the declared count");
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        sc.members.push_back(std::move(members));
        sc.costs.push_back(cost);
    }
    sc.validate();
    return sc;
}

void write_set_cover(const SetCoverInstance& sc, std::ostream& out) {
    out << sc.elements << ' ' << sc.sets() << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < sc.sets(); ++k) {
        out << (k < sc.costs.size() ? sc.costs[k] : 1.0) << ' ' << sc.members[k].size();
        for (std::size_t e : sc.members[k]) out << ' ' << e + 1;
        out << '\n';
    }
}

}  // namespace corround
