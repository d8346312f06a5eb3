#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace corround::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var;
    double coef;
};

struct Variable {
    double cost = 0.0;
    double lower = 0.0;
    double upper = kInf;
    std::string name;
};

struct Constraint {
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// min c'x subject to linear rows and per-variable bounds (either side may
/// be infinite). Rows are stored sparsely; a term's variable index must be
/// below num_variables() at solve time.
class Problem {
public:
    std::size_t add_variable(double cost, double lower = 0.0, double upper = kInf,
                             std::string name = {});
    void add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                        std::string name = {});
    /// Dense row; throws DimensionMismatch unless coefs.size() == num_variables().
    void add_dense_constraint(const std::vector<double>& coefs, Relation relation, double rhs,
                              std::string name = {});

    std::size_t num_variables() const noexcept { return vars_.size(); }
    std::size_t num_constraints() const noexcept { return rows_.size(); }
    const std::vector<Variable>& variables() const noexcept { return vars_; }
    const std::vector<Constraint>& constraints() const noexcept { return rows_; }

    /// Throws DimensionMismatch on out-of-range terms, DomainError on
    /// non-finite data or crossed bounds.
    void validate() const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

std::string_view to_string(Status s);

struct SolverOptions {
    std::size_t max_pivots = 1'000'000;
    double pivot_tolerance = 1e-9;
    double feasibility_tolerance = 1e-7;
    /// Consecutive degenerate pivots after which pricing switches from
    /// Dantzig's rule to Bland's rule (0 = Bland throughout). Bland stays in
    /// force until the objective strictly improves.
    std::size_t bland_after = 50;
    /// The tableau is dense; larger problems throw CapExceeded up front.
    std::size_t max_cells = 64'000'000;
};

struct Solution {
    Status status = Status::NumericalFailure;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t pivots = 0;
    /// Largest row or bound violation of x, measured on the original rows.
    double max_residual = 0.0;

    bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Two-phase dense simplex. Throws CapExceeded when the tableau would
/// exceed options.max_cells, DimensionMismatch or DomainError on a bad
/// problem. Optimal results are re-checked against the
/// original rows; a residual above feasibility_tolerance turns the status
/// into NumericalFailure.
Solution solve(const Problem& p, const SolverOptions& options = {});

/// Largest violation of rows and bounds by x.
double max_violation(const Problem& p, const std::vector<double>& x);

/// Free-format MPS for cross-checking with external solvers.
void write_mps(const Problem& p, std::ostream& out, std::string_view name = "CORROUND");

}  // namespace corround::lp
