#include "corround/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "corround/error.hpp"

namespace corround::lp {

std::size_t Problem::add_variable(double cost, double lower, double upper, std::string name) {
    vars_.push_back({cost, lower, upper, std::move(name)});
    return vars_.size() - 1;
}

void Problem::add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                             std::string name) {
    rows_.push_back({std::move(terms), relation, rhs, std::move(name)});
}

void Problem::add_dense_constraint(const std::vector<double>& coefs, Relation relation,
                                   double rhs, std::string name) {
    CORROUND_REQUIRE(coefs.size() == vars_.size(), ErrorCode::DimensionMismatch,
                     "row has " + std::to_string(coefs.size()) + " coefficients for " +
                         std::to_string(vars_.size()) + " variables");
    std::vector<Term> terms;
    for (std::size_t j = 0; j < coefs.size(); ++j)
        if (coefs[j] != 0.0) terms.push_back({j, coefs[j]});
    add_constraint(std::move(terms), relation, rhs, std::move(name));
}

void Problem::validate() const {
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        const auto& v = vars_[j];
        CORROUND_REQUIRE(std::isfinite(v.cost), ErrorCode::DomainError,
                         "non-finite cost on variable " + std::to_string(j));
        CORROUND_REQUIRE(!std::isnan(v.lower) && !std::isnan(v.upper) && v.lower <= v.upper &&
                             v.lower < kInf && v.upper > -kInf,
                         ErrorCode::DomainError, "bad bounds on variable " + std::to_string(j));
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        CORROUND_REQUIRE(std::isfinite(rows_[r].rhs), ErrorCode::DomainError,
                         "non-finite rhs on row " + std::to_string(r));
        for (const auto& t : rows_[r].terms) {
            CORROUND_REQUIRE(t.var < vars_.size(), ErrorCode::DimensionMismatch,
                             "row " + std::to_string(r) + " references variable " +
                                 std::to_string(t.var));
            CORROUND_REQUIRE(std::isfinite(t.coef), ErrorCode::DomainError,
                             "non-finite coefficient on row " + std::to_string(r));
        }
    }
}

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "Optimal";
        case Status::Infeasible: return "Infeasible";
        case Status::Unbounded: return "Unbounded";
        case Status::IterationLimit: return "IterationLimit";
        case Status::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

double max_violation(const Problem& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        const auto& v = p.variables()[j];
        worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
    }
    for (const auto& row : p.constraints()) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.var];
        switch (row.relation) {
            case Relation::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
            case Relation::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
            case Relation::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

namespace {

// How an original variable maps onto nonnegative tableau columns.
enum class Map { Shift, Mirror, Split };

struct ColumnMap {
    Map kind;
    std::size_t col;  // Split uses col and col + 1
    double offset;    // lower bound (Shift) or upper bound (Mirror)
};

constexpr double kDropTolerance = 1e-12;

// Dictionary-form tableau: row r reads
//   x_{basic[r]} + sum_j D[r][j] x_{nonbasic[j]} = D[r][width]
// and each objective row reads  z + sum_j d_j x_{nonbasic[j]} = -rhs  in
// the sense that d_j is the reduced cost and -rhs the current objective.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t nonbasic)
        : rows_(rows), width_(nonbasic), stride_(nonbasic + 1), cells_(rows * stride_, 0.0),
          basic_(rows), nonbasic_(nonbasic), active_(rows, 1) {}

    double* row(std::size_t r) { return cells_.data() + r * stride_; }
    const double* row(std::size_t r) const { return cells_.data() + r * stride_; }
    double& rhs(std::size_t r) { return cells_[r * stride_ + width_]; }

    std::size_t rows() const { return rows_; }
    std::size_t width() const { return width_; }
    std::size_t stride() const { return stride_; }

    std::vector<std::size_t>& basic() { return basic_; }
    std::vector<std::size_t>& nonbasic() { return nonbasic_; }
    std::vector<unsigned char>& active() { return active_; }

    void pivot(std::size_t r, std::size_t s, std::vector<std::vector<double>*> objectives) {
        double* prow = row(r);
        const double inv = 1.0 / prow[s];
        nz_.clear();
        for (std::size_t j = 0; j < stride_; ++j) {
            if (j == s) continue;
            if (prow[j] == 0.0) continue;
            prow[j] *= inv;
            nz_.push_back(j);
        }
        prow[s] = inv;
        auto eliminate = [&](double* target) {
            const double f = target[s];
            if (f == 0.0) return;
            for (std::size_t j : nz_) {
                double v = target[j] - f * prow[j];
                target[j] = std::abs(v) < kDropTolerance ? 0.0 : v;
            }
            target[s] = -f * inv;
        };
        for (std::size_t i = 0; i < rows_; ++i)
            if (i != r && active_[i]) eliminate(row(i));
        for (auto* obj : objectives) eliminate(obj->data());
        std::swap(basic_[r], nonbasic_[s]);
    }

private:
    std::size_t rows_, width_, stride_;
    std::vector<double> cells_;
    std::vector<std::size_t> basic_, nonbasic_;
    std::vector<unsigned char> active_;
    std::vector<std::size_t> nz_;
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

class Simplex {
public:
    Simplex(Tableau& t, const SolverOptions& opt, std::vector<unsigned char>& barred,
            std::size_t& pivots)
        : t_(t), opt_(opt), barred_(barred), pivots_(pivots) {}

    // Minimise the objective encoded in `obj`; `other` rides along so it
    // stays consistent with the basis.
    Outcome run(std::vector<double>& obj, std::vector<double>* other,
                const std::vector<unsigned char>& is_artificial, bool bar_leaving_artificials) {
        std::size_t degenerate_run = 0;
        bool bland = opt_.bland_after == 0;
        const std::size_t width = t_.width();
        auto& nonbasic = t_.nonbasic();
        auto& basic = t_.basic();
        while (true) {
            // Entering column.
            std::size_t s = width;
            for (std::size_t j = 0; j < width; ++j) {
                if (barred_[nonbasic[j]] || obj[j] >= -opt_.pivot_tolerance) continue;
                if (s == width) {
                    s = j;
                } else if (bland) {
                    if (nonbasic[j] < nonbasic[s]) s = j;
                } else if (obj[j] < obj[s] ||
                           (obj[j] == obj[s] && nonbasic[j] < nonbasic[s])) {
                    s = j;
                }
            }
            if (s == width) return Outcome::Optimal;

            // Leaving row: Harris two-pass ratio test. Pass one finds the
            // step allowed when every basic variable may dip to -delta;
            // pass two takes the largest pivot among rows within that step.
            constexpr double kHarrisDelta = 1e-9;
            double step = kInf;
            for (std::size_t i = 0; i < t_.rows(); ++i) {
                if (!t_.active()[i]) continue;
                const double a = t_.row(i)[s];
                if (a <= opt_.pivot_tolerance) continue;
                step = std::min(step, (std::max(t_.rhs(i), 0.0) + kHarrisDelta) / a);
            }
            std::size_t r = t_.rows();
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < t_.rows() && step < kInf; ++i) {
                if (!t_.active()[i]) continue;
                const double a = t_.row(i)[s];
                if (a <= opt_.pivot_tolerance) continue;
                const double ratio = std::max(t_.rhs(i), 0.0) / a;
                if (ratio > step) continue;
                const bool take = r == t_.rows() ||
                                  (bland ? basic[i] < basic[r] : a > t_.row(r)[s]);
                if (take) {
                    r = i;
                    best_ratio = ratio;
                }
            }
            if (r == t_.rows()) return Outcome::Unbounded;
            if (pivots_ >= opt_.max_pivots) return Outcome::IterationLimit;

            if (best_ratio <= 1e-12) {
                if (++degenerate_run >= opt_.bland_after) bland = true;
            } else {
                degenerate_run = 0;
                bland = opt_.bland_after == 0;
            }

            const std::size_t leaving = basic[r];
            std::vector<std::vector<double>*> objs{&obj};
            if (other) objs.push_back(other);
            t_.pivot(r, s, objs);
            ++pivots_;
            if (bar_leaving_artificials && is_artificial[leaving]) barred_[leaving] = 1;
        }
    }

private:
    Tableau& t_;
    const SolverOptions& opt_;
    std::vector<unsigned char>& barred_;
    std::size_t& pivots_;
};

}  // namespace

Solution solve(const Problem& p, const SolverOptions& options) {
    p.validate();
    Solution sol;

    // Map original variables onto nonnegative columns.
    std::vector<ColumnMap> maps(p.num_variables());
    std::size_t ncols = 0;
    struct UpperRow {
        std::size_t col;
        double bound;
    };
    std::vector<UpperRow> upper_rows;
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        const auto& v = p.variables()[j];
        if (std::isfinite(v.lower)) {
            maps[j] = {Map::Shift, ncols, v.lower};
            if (std::isfinite(v.upper)) upper_rows.push_back({ncols, v.upper - v.lower});
            ncols += 1;
        } else if (std::isfinite(v.upper)) {
            maps[j] = {Map::Mirror, ncols, v.upper};
            ncols += 1;
        } else {
            maps[j] = {Map::Split, ncols, 0.0};
            ncols += 2;
        }
    }

    // Rows over the structural columns, normalised to rhs >= 0 and scaled
    // to unit max coefficient.
    struct Row {
        std::vector<std::pair<std::size_t, double>> coefs;
        Relation rel;
        double rhs;
    };
    std::vector<Row> rows;
    rows.reserve(p.num_constraints() + upper_rows.size());
    for (const auto& c : p.constraints()) {
        Row row{{}, c.relation, c.rhs};
        for (const auto& t : c.terms) {
            if (t.coef == 0.0) continue;
            const auto& m = maps[t.var];
            switch (m.kind) {
                case Map::Shift:
                    row.coefs.emplace_back(m.col, t.coef);
                    row.rhs -= t.coef * m.offset;
                    break;
                case Map::Mirror:
                    row.coefs.emplace_back(m.col, -t.coef);
                    row.rhs -= t.coef * m.offset;
                    break;
                case Map::Split:
                    row.coefs.emplace_back(m.col, t.coef);
                    row.coefs.emplace_back(m.col + 1, -t.coef);
                    break;
            }
        }
        rows.push_back(std::move(row));
    }
    for (const auto& u : upper_rows) rows.push_back({{{u.col, 1.0}}, Relation::LessEqual, u.bound});
    for (auto& row : rows) {
        double scale = 0.0;
        for (const auto& [col, a] : row.coefs) scale = std::max(scale, std::abs(a));
        if (scale == 0.0) scale = 1.0;
        double sign = 1.0;
        if (row.rhs < 0.0) {
            sign = -1.0;
            if (row.rel == Relation::LessEqual)
                row.rel = Relation::GreaterEqual;
            else if (row.rel == Relation::GreaterEqual)
                row.rel = Relation::LessEqual;
        }
        const double f = sign / scale;
        for (auto& [col, a] : row.coefs) a *= f;
        row.rhs *= f;
    }

    // Column ids: structural [0, ncols), then one slack/surplus per
    // inequality row, then one artificial per >= or = row.
    const std::size_t m = rows.size();
    std::size_t next_id = ncols;
    std::vector<std::size_t> aux_id(m), art_id(m, SIZE_MAX);
    for (std::size_t r = 0; r < m; ++r)
        aux_id[r] = rows[r].rel == Relation::Equal ? SIZE_MAX : next_id++;
    for (std::size_t r = 0; r < m; ++r)
        if (rows[r].rel != Relation::LessEqual) art_id[r] = next_id++;
    const std::size_t total = next_id;
    std::vector<unsigned char> is_artificial(total, 0);
    for (std::size_t r = 0; r < m; ++r)
        if (art_id[r] != SIZE_MAX) is_artificial[art_id[r]] = 1;

    // Nonbasic at start: structurals and surpluses.
    std::vector<std::size_t> nonbasic_ids;
    for (std::size_t c = 0; c < ncols; ++c) nonbasic_ids.push_back(c);
    std::vector<std::size_t> position(total, SIZE_MAX);
    for (std::size_t r = 0; r < m; ++r)
        if (rows[r].rel == Relation::GreaterEqual) nonbasic_ids.push_back(aux_id[r]);
    for (std::size_t j = 0; j < nonbasic_ids.size(); ++j) position[nonbasic_ids[j]] = j;

    const double cells = static_cast<double>(m) * static_cast<double>(nonbasic_ids.size() + 1);
    CORROUND_REQUIRE(cells <= static_cast<double>(options.max_cells), ErrorCode::CapExceeded,
                     "LP with " + std::to_string(m) + " rows and " +
                         std::to_string(nonbasic_ids.size()) +
                         " columns exceeds the dense tableau cap of " +
                         std::to_string(options.max_cells) + " cells");
    Tableau t(m, nonbasic_ids.size());
    t.nonbasic() = nonbasic_ids;
    for (std::size_t r = 0; r < m; ++r) {
        double* row = t.row(r);
        for (const auto& [col, a] : rows[r].coefs) row[position[col]] += a;
        if (rows[r].rel == Relation::GreaterEqual) row[position[aux_id[r]]] = -1.0;
        t.rhs(r) = rows[r].rhs;
        t.basic()[r] = rows[r].rel == Relation::LessEqual ? aux_id[r] : art_id[r];
    }

    const std::size_t width = t.width();
    std::vector<unsigned char> barred(total, 0);

    // Phase-2 costs on tableau columns.
    std::vector<double> cost(total, 0.0);
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        const double c = p.variables()[j].cost;
        const auto& mp = maps[j];
        switch (mp.kind) {
            case Map::Shift:
                cost[mp.col] = c;
                break;
            case Map::Mirror:
                cost[mp.col] = -c;
                break;
            case Map::Split:
                cost[mp.col] = c;
                cost[mp.col + 1] = -c;
                break;
        }
    }
    auto objective_row = [&](const std::vector<double>& c) {
        std::vector<double> obj(width + 1, 0.0);
        for (std::size_t j = 0; j < width; ++j) obj[j] = c[t.nonbasic()[j]];
        for (std::size_t r = 0; r < m; ++r) {
            if (!t.active()[r]) continue;
            const double cb = c[t.basic()[r]];
            if (cb == 0.0) continue;
            const double* row = t.row(r);
            for (std::size_t j = 0; j <= width; ++j) obj[j] -= cb * row[j];
        }
        return obj;
    };

    Simplex simplex(t, options, barred, sol.pivots);
    bool has_artificials = std::any_of(art_id.begin(), art_id.end(),
                                       [](std::size_t a) { return a != SIZE_MAX; });
    if (has_artificials) {
        std::vector<double> phase1_cost(total, 0.0);
        for (std::size_t id = 0; id < total; ++id) phase1_cost[id] = is_artificial[id] ? 1.0 : 0.0;
        auto obj1 = objective_row(phase1_cost);
        const Outcome o = simplex.run(obj1, nullptr, is_artificial, true);
        if (o == Outcome::IterationLimit) {
            sol.status = Status::IterationLimit;
            return sol;
        }
        const double infeasibility = -obj1[width];
        if (infeasibility > options.feasibility_tolerance) {
            sol.status = Status::Infeasible;
            return sol;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for (std::size_t r = 0; r < m; ++r) {
            if (!is_artificial[t.basic()[r]]) continue;
            const double* row = t.row(r);
            std::size_t s = width;
            double best = options.pivot_tolerance;
            for (std::size_t j = 0; j < width; ++j) {
                if (barred[t.nonbasic()[j]] || is_artificial[t.nonbasic()[j]]) continue;
                if (std::abs(row[j]) > best) {
                    best = std::abs(row[j]);
                    s = j;
                }
            }
            if (s == width) {
                t.active()[r] = 0;  // redundant row
                continue;
            }
            t.rhs(r) = 0.0;
            const std::size_t leaving = t.basic()[r];
            t.pivot(r, s, {});
            ++sol.pivots;
            barred[leaving] = 1;
        }
        for (std::size_t id = 0; id < total; ++id)
            if (is_artificial[id]) barred[id] = 1;
    }

    auto obj2 = objective_row(cost);
    const Outcome o = simplex.run(obj2, nullptr, is_artificial, false);
    if (o == Outcome::IterationLimit) {
        sol.status = Status::IterationLimit;
        return sol;
    }
    if (o == Outcome::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    std::vector<double> value(total, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (t.active()[r]) value[t.basic()[r]] = std::max(t.rhs(r), 0.0);
    sol.x.resize(p.num_variables());
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        const auto& mp = maps[j];
        const auto& v = p.variables()[j];
        double x = 0.0;
        switch (mp.kind) {
            case Map::Shift: x = mp.offset + value[mp.col]; break;
            case Map::Mirror: x = mp.offset - value[mp.col]; break;
            case Map::Split: x = value[mp.col] - value[mp.col + 1]; break;
        }
        if (x < v.lower && x > v.lower - 1e-9) x = v.lower;
        if (x > v.upper && x < v.upper + 1e-9) x = v.upper;
        sol.x[j] = x;
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < p.num_variables(); ++j)
        sol.objective += p.variables()[j].cost * sol.x[j];
    sol.max_residual = max_violation(p, sol.x);
    sol.status = sol.max_residual <= options.feasibility_tolerance ? Status::Optimal
                                                                   : Status::NumericalFailure;
    return sol;
}

void write_mps(const Problem& p, std::ostream& out, std::string_view name) {
    auto row_name = [&](std::size_t r) {
        const auto& n = p.constraints()[r].name;
        return n.empty() ? "R" + std::to_string(r) : n;
    };
    auto col_name = [&](std::size_t j) {
        const auto& n = p.variables()[j].name;
        return n.empty() ? "X" + std::to_string(j) : n;
    };
    out << std::setprecision(17);
    out << "NAME " << name << "\nROWS\n N OBJ\n";
    for (std::size_t r = 0; r < p.num_constraints(); ++r) {
        const char tag = p.constraints()[r].relation == Relation::LessEqual      ? 'L'
                         : p.constraints()[r].relation == Relation::GreaterEqual ? 'G'
                                                                                 : 'E';
        out << ' ' << tag << ' ' << row_name(r) << '\n';
    }
    // Column-major view of the rows.
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(p.num_variables());
    for (std::size_t r = 0; r < p.num_constraints(); ++r)
        for (const auto& t : p.constraints()[r].terms) cols[t.var].emplace_back(r, t.coef);
    out << "COLUMNS\n";
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        if (p.variables()[j].cost != 0.0)
            out << "    " << col_name(j) << " OBJ " << p.variables()[j].cost << '\n';
        for (const auto& [r, a] : cols[j]) out << "    " << col_name(j) << ' ' << row_name(r) << ' ' << a << '\n';
    }
    out << "RHS\n";
    for (std::size_t r = 0; r < p.num_constraints(); ++r)
        if (p.constraints()[r].rhs != 0.0)
            out << "    RHS " << row_name(r) << ' ' << p.constraints()[r].rhs << '\n';
    out << "BOUNDS\n";
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        const auto& v = p.variables()[j];
        const auto n = col_name(j);
        if (v.lower == -kInf && v.upper == kInf) {
            out << " FR BND " << n << '\n';
            continue;
        }
        if (v.lower == v.upper) {
            out << " FX BND " << n << ' ' << v.lower << '\n';
            continue;
        }
        if (v.lower == -kInf)
            out << " MI BND " << n << '\n';
        else if (v.lower != 0.0)
            out << " LO BND " << n << ' ' << v.lower << '\n';
        if (v.upper != kInf) out << " UP BND " << n << ' ' << v.upper << '\n';
    }
    out << "ENDATA\n";
}

}  // namespace corround::lp
