#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace corround {

inline constexpr double kRowSumTolerance = 1e-9;

/// q items by K FCs; entry (i, k) is the probability that item i ships
/// from FC k. Rows sum to one. Immutable once validated.
class MarginalMatrix {
public:
    /// Validates `rows` (q rows of K entries). Rows whose sum is off by
    /// less than kRowSumTolerance are renormalised; anything larger throws.
    static MarginalMatrix validate(const std::vector<std::vector<double>>& rows);

    /// Row-major flat variant of validate().
    static MarginalMatrix validate(std::size_t items, std::size_t fcs, std::vector<double> values);

    std::size_t items() const noexcept { return items_; }
    std::size_t fcs() const noexcept { return fcs_; }

    double operator()(std::size_t item, std::size_t fc) const noexcept {
        return values_[item * fcs_ + fc];
    }
    std::span<const double> row(std::size_t item) const noexcept {
        return {values_.data() + item * fcs_, fcs_};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// y_k = max_i u_{ki}, the least probability with which any scheme
    /// must use FC k.
    const std::vector<double>& usage_bounds() const noexcept { return usage_bounds_; }

    /// Max number of FCs with positive marginal for a single item.
    std::size_t sparsity() const noexcept { return sparsity_; }

    /// 1 / min_i max_k u_{ki}.
    double alpha_force() const noexcept { return alpha_force_; }

    friend bool operator==(const MarginalMatrix& a, const MarginalMatrix& b) {
        return a.items_ == b.items_ && a.fcs_ == b.fcs_ && a.values_ == b.values_;
    }

private:
    MarginalMatrix(std::size_t items, std::size_t fcs, std::vector<double> values);

    std::size_t items_;
    std::size_t fcs_;
    std::vector<double> values_;
    std::vector<double> usage_bounds_;
    std::size_t sparsity_ = 0;
    double alpha_force_ = 1.0;
};

struct UsageBounds {
    std::vector<double> y;
};

struct SparsityStats {
    std::size_t d;
    double alpha_force;
};

UsageBounds usage_lower_bounds(const MarginalMatrix& m);
SparsityStats sparsity_stats(const MarginalMatrix& m);

/// Text format: first line `q K`, then q lines of K probabilities.
MarginalMatrix read_matrix(std::istream& in);
void write_matrix(const MarginalMatrix& m, std::ostream& out);

}  // namespace corround
