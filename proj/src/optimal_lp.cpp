#include "corround/optimal_lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "corround/error.hpp"

namespace corround {

OptimalLpModel build_lp(const MarginalMatrix& m, const OptimalLpOptions& options) {
    const std::size_t q = m.items(), K = m.fcs();
    CORROUND_REQUIRE(K <= options.max_fcs && K < 32, ErrorCode::CapExceeded,
                     "K = " + std::to_string(K) + " exceeds the cap of " +
                         std::to_string(options.max_fcs) + " FCs (LP has 2^K subsets)");
    const auto& y = m.usage_bounds();

    std::vector<FcMask> support(q, 0);
    FcMask live = 0;
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t k = 0; k < K; ++k)
            if (m(i, k) > 0.0) support[i] |= FcMask{1} << k;
    for (std::size_t k = 0; k < K; ++k)
        if (y[k] > 0.0) live |= FcMask{1} << k;

    OptimalLpModel model;
    auto& lp = model.problem;
    model.alpha_var = lp.add_variable(1.0, 0.0, lp::kInf, "alpha");

    const FcMask full = K == 32 ? ~FcMask{0} : (FcMask{1} << K) - 1;
    for (FcMask mask = 1; mask <= full && mask != 0; ++mask) {
        if ((mask & ~live) != 0) continue;
        bool meets_all = true;
        for (std::size_t i = 0; i < q && meets_all; ++i) meets_all = (support[i] & mask) != 0;
        if (!meets_all) continue;
        model.subsets.push_back(mask);
        model.z_var.push_back(lp.add_variable(0.0, 0.0, lp::kInf, "z_" + std::to_string(mask)));
    }

    // cond_index[(i * K + k)] lists conditional variables for (k, i).
    std::vector<std::vector<std::size_t>> by_fc_item(q * K);
    for (std::size_t s = 0; s < model.subsets.size(); ++s) {
        const FcMask mask = model.subsets[s];
        for (std::size_t i = 0; i < q; ++i) {
            std::vector<lp::Term> row;
            for (std::size_t k = 0; k < K; ++k) {
                if (!(mask >> k & 1) || m(i, k) <= 0.0) continue;
                const std::size_t v =
                    lp.add_variable(0.0, 0.0, lp::kInf,
                                    "u_" + std::to_string(k) + "_" + std::to_string(i) + "_" +
                                        std::to_string(mask));
                model.conditionals.push_back({k, i, s, v});
                by_fc_item[i * K + k].push_back(v);
                row.push_back({v, 1.0});
            }
            row.push_back({model.z_var[s], -1.0});
            lp.add_constraint(std::move(row), lp::Relation::Equal, 0.0);
            ++model.rows_fulfil_once;
        }
    }
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            if (m(i, k) <= 0.0) continue;
            std::vector<lp::Term> row;
            for (std::size_t v : by_fc_item[i * K + k]) row.push_back({v, 1.0});
            lp.add_constraint(std::move(row), lp::Relation::Equal, m(i, k));
            ++model.rows_marginal;
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (y[k] <= 0.0) continue;
        std::vector<lp::Term> row;
        for (std::size_t s = 0; s < model.subsets.size(); ++s)
            if (model.subsets[s] >> k & 1) row.push_back({model.z_var[s], 1.0});
        row.push_back({model.alpha_var, -y[k]});
        lp.add_constraint(std::move(row), lp::Relation::LessEqual, 0.0);
        ++model.rows_competitive;
    }
    {
        std::vector<lp::Term> row;
        for (std::size_t v : model.z_var) row.push_back({v, 1.0});
        lp.add_constraint(std::move(row), lp::Relation::Equal, 1.0);
        ++model.rows_distribution;
    }
    return model;
}

namespace {

constexpr double kClamp = 1e-9;

double clamp_nonnegative(double v) {
    CORROUND_REQUIRE(v >= -kClamp, ErrorCode::InvariantViolation,
                     "LP returned a negative probability " + std::to_string(v));
    return std::max(v, 0.0);
}

}  // namespace

OptimalSchemeSolution solve_optimal_alpha(const MarginalMatrix& m,
                                          const OptimalLpOptions& options) {
    const auto model = build_lp(m, options);
    const auto sol = lp::solve(model.problem, options.solver);
    CORROUND_REQUIRE(sol.optimal(), ErrorCode::SolverFailure,
                     "optimal-scheme LP ended with status " + std::string(lp::to_string(sol.status)));

    OptimalSchemeSolution out;
    out.items = m.items();
    out.fcs = m.fcs();
    out.alpha = sol.x[model.alpha_var];
    for (std::size_t s = 0; s < model.subsets.size(); ++s) {
        const double z = clamp_nonnegative(sol.x[model.z_var[s]]);
        if (z > 0.0) out.subsets.push_back({model.subsets[s], z});
    }
    for (const auto& c : model.conditionals) {
        const double v = clamp_nonnegative(sol.x[c.var]);
        if (v > 0.0) out.conditionals.push_back({c.fc, c.item, model.subsets[c.subset], v});
    }
    std::sort(out.conditionals.begin(), out.conditionals.end(), [](const auto& a, const auto& b) {
        return std::tie(a.fc, a.item, a.mask) < std::tie(b.fc, b.item, b.mask);
    });
    verify_solution(out, m);
    return out;
}

void verify_solution(const OptimalSchemeSolution& s, const MarginalMatrix& m, double tol) {
    const std::size_t q = m.items(), K = m.fcs();
    auto require = [](bool ok, const std::string& what) {
        CORROUND_REQUIRE(ok, ErrorCode::InvariantViolation, what);
    };
    require(s.items == q && s.fcs == K, "solution shape does not match instance");
    double total = 0.0;
    std::map<FcMask, double> z;
    for (const auto& sub : s.subsets) {
        require(sub.z >= -kClamp, "negative z");
        total += sub.z;
        z[sub.mask] += sub.z;
    }
    require(std::abs(total - 1.0) <= tol, "subset probabilities sum to " + std::to_string(total));

    std::map<std::pair<FcMask, std::size_t>, double> per_subset_item;
    std::vector<double> marginal(q * K, 0.0);
    for (const auto& c : s.conditionals) {
        require(c.fc < K && c.item < q && (c.mask >> c.fc & 1), "malformed conditional entry");
        per_subset_item[{c.mask, c.item}] += c.value;
        marginal[c.item * K + c.fc] += c.value;
    }
    for (const auto& [mask, zs] : z) {
        if (zs <= 0.0) continue;
        for (std::size_t i = 0; i < q; ++i) {
            const auto it = per_subset_item.find({mask, i});
            const double got = it == per_subset_item.end() ? 0.0 : it->second;
            require(std::abs(got - zs) <= tol, "item " + std::to_string(i) + " on subset " +
                                                    std::to_string(mask) + " has mass " +
                                                    std::to_string(got) + " vs z " +
                                                    std::to_string(zs));
        }
    }
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t k = 0; k < K; ++k)
            require(std::abs(marginal[i * K + k] - m(i, k)) <= tol,
                    "marginal (" + std::to_string(i) + "," + std::to_string(k) + ") off");
    const auto& y = m.usage_bounds();
    for (std::size_t k = 0; k < K; ++k) {
        double usage = 0.0;
        for (const auto& [mask, zs] : z)
            if (mask >> k & 1) usage += zs;
        require(usage <= s.alpha * y[k] + tol, "FC " + std::to_string(k) + " used with " +
                                                   std::to_string(usage) + " > alpha * y");
    }
}

OptimalSampler::OptimalSampler(const OptimalSchemeSolution& s) : items_(s.items) {
    std::map<FcMask, std::size_t> index;
    for (const auto& sub : s.subsets) {
        if (sub.z <= 0.0) continue;
        index[sub.mask] = masks_.size();
        masks_.push_back(sub.mask);
        z_.push_back(sub.z);
    }
    choices_.assign(masks_.size(), std::vector<Choice>(items_));
    for (const auto& c : s.conditionals) {
        const auto it = index.find(c.mask);
        if (it == index.end() || c.value <= 0.0) continue;
        auto& choice = choices_[it->second][c.item];
        choice.fcs.push_back(c.fc);
        choice.weights.push_back(c.value);
    }
    for (std::size_t j = 0; j < masks_.size(); ++j)
        for (std::size_t i = 0; i < items_; ++i)
            CORROUND_REQUIRE(!choices_[j][i].fcs.empty(), ErrorCode::DegenerateSubset,
                             "subset " + std::to_string(masks_[j]) + " has z > 0 but item " +
                                 std::to_string(i) + " has no mass on it");
}

RoundingOutcome OptimalSampler::sample(RandomStream& rng) const {
    const std::size_t j = rng.categorical(z_);
    last_ = masks_[j];
    RoundingOutcome out{std::vector<std::size_t>(items_)};
    for (std::size_t i = 0; i < items_; ++i) {
        const auto& choice = choices_[j][i];
        out.fc[i] = choice.fcs[rng.categorical(choice.weights)];
    }
    return out;
}

RoundingOutcome sample_optimal(const OptimalSchemeSolution& s, RandomStream& rng) {
    return OptimalSampler(s).sample(rng);
}

void write_solution(const OptimalSchemeSolution& s, std::ostream& out) {
    out << std::setprecision(17) << "alpha " << s.alpha << '\n';
    for (const auto& sub : s.subsets) out << sub.mask << ' ' << sub.z << '\n';
    for (const auto& c : s.conditionals)
        out << c.fc << ' ' << c.item << ' ' << c.mask << ' ' << c.value << '\n';
}

OptimalSchemeSolution read_solution(std::istream& in) {
    OptimalSchemeSolution s;
    std::string line;
    std::size_t line_no = 0;
    bool have_alpha = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> fields;
        for (std::string f; ls >> f;) fields.push_back(f);
        if (fields.empty()) continue;
        try {
            if (fields[0] == "alpha" && fields.size() == 2) {
                s.alpha = std::stod(fields[1]);
                have_alpha = true;
            } else if (fields.size() == 2) {
                s.subsets.push_back({static_cast<FcMask>(std::stoul(fields[0])), std::stod(fields[1])});
            } else if (fields.size() == 4) {
                OptimalSchemeSolution::Conditional c{std::stoul(fields[0]), std::stoul(fields[1]),
                                                     static_cast<FcMask>(std::stoul(fields[2])),
                                                     std::stod(fields[3])};
                s.items = std::max(s.items, c.item + 1);
                s.conditionals.push_back(c);
            } else {
                fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unexpected field count");
            }
        } catch (const std::logic_error&) {
            fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number");
        }
    }
    CORROUND_REQUIRE(have_alpha, ErrorCode::ParseError, "missing `alpha` line");
    FcMask all = 0;
    for (const auto& sub : s.subsets) all |= sub.mask;
    s.fcs = all == 0 ? 0 : static_cast<std::size_t>(std::bit_width(all));
    return s;
}

}  // namespace corround
