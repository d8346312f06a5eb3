#include "corround/marginal_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "corround/error.hpp"

namespace corround {

MarginalMatrix::MarginalMatrix(std::size_t items, std::size_t fcs, std::vector<double> values)
    : items_(items), fcs_(fcs), values_(std::move(values)), usage_bounds_(fcs, 0.0) {
    double min_row_max = 1.0;
    for (std::size_t i = 0; i < items_; ++i) {
        double row_max = 0.0;
        std::size_t support = 0;
        for (std::size_t k = 0; k < fcs_; ++k) {
            const double u = values_[i * fcs_ + k];
            if (u > 0.0) ++support;
            row_max = std::max(row_max, u);
            usage_bounds_[k] = std::max(usage_bounds_[k], u);
        }
        sparsity_ = std::max(sparsity_, support);
        min_row_max = std::min(min_row_max, row_max);
    }
    alpha_force_ = 1.0 / min_row_max;
}

MarginalMatrix MarginalMatrix::validate(std::size_t items, std::size_t fcs,
                                        std::vector<double> values) {
    CORROUND_REQUIRE(items >= 1 && fcs >= 1, ErrorCode::EmptyInstance,
                     "need at least one item and one FC");
    CORROUND_REQUIRE(values.size() == items * fcs, ErrorCode::DimensionMismatch,
                     "expected " + std::to_string(items * fcs) + " entries, got " +
                         std::to_string(values.size()));
    for (std::size_t i = 0; i < items; ++i) {
        for (std::size_t k = 0; k < fcs; ++k) {
            const double u = values[i * fcs + k];
            CORROUND_REQUIRE(std::isfinite(u) && u >= 0.0, ErrorCode::NegativeEntry,
                             "entry (" + std::to_string(i) + "," + std::to_string(k) +
                                 ") is " + std::to_string(u));
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < fcs; ++k) {
            const double u = values[i * fcs + k];
            CORROUND_REQUIRE(u <= 1.0 + kRowSumTolerance, ErrorCode::RowSumMismatch,
                             "entry exceeds 1 in row " + std::to_string(i));
            sum += u;
        }
        CORROUND_REQUIRE(std::abs(sum - 1.0) < kRowSumTolerance, ErrorCode::RowSumMismatch,
                         "row " + std::to_string(i) + " sums to " + std::to_string(sum));
        if (sum != 1.0) {
            for (std::size_t k = 0; k < fcs; ++k) values[i * fcs + k] /= sum;
        }
    }
    return MarginalMatrix(items, fcs, std::move(values));
}

MarginalMatrix MarginalMatrix::validate(const std::vector<std::vector<double>>& rows) {
    CORROUND_REQUIRE(!rows.empty() && !rows.front().empty(), ErrorCode::EmptyInstance,
                     "empty matrix");
    const std::size_t fcs = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * fcs);
    for (const auto& r : rows) {
        CORROUND_REQUIRE(r.size() == fcs, ErrorCode::DimensionMismatch, "ragged rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return validate(rows.size(), fcs, std::move(flat));
}

UsageBounds usage_lower_bounds(const MarginalMatrix& m) { return {m.usage_bounds()}; }

SparsityStats sparsity_stats(const MarginalMatrix& m) { return {m.sparsity(), m.alpha_force()}; }

MarginalMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    CORROUND_REQUIRE(next_line(), ErrorCode::ParseError, "missing header line `q K`");
    std::size_t q = 0, k = 0;
    {
        std::istringstream header(line);
        CORROUND_REQUIRE(static_cast<bool>(header >> q >> k), ErrorCode::ParseError,
                         "line " + std::to_string(line_no) + ": expected `q K`");
    }
    std::vector<double> values;
    values.reserve(q * k);
    for (std::size_t i = 0; i < q; ++i) {
        CORROUND_REQUIRE(next_line(), ErrorCode::ParseError,
                         "expected " + std::to_string(q) + " rows, got " + std::to_string(i));
        std::istringstream row(line);
        for (std::size_t j = 0; j < k; ++j) {
            double v;
            CORROUND_REQUIRE(static_cast<bool>(row >> v), ErrorCode::ParseError,
                             "line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(k) + " values");
            values.push_back(v);
        }
        std::string extra;
        CORROUND_REQUIRE(!(row >> extra), ErrorCode::ParseError,
                         "line " + std::to_string(line_no) + ": trailing data `" + extra + "`");
    }
    return MarginalMatrix::validate(q, k, std::move(values));
}

void write_matrix(const MarginalMatrix& m, std::ostream& out) {
    out << m.items() << ' ' << m.fcs() << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < m.items(); ++i) {
        for (std::size_t k = 0; k < m.fcs(); ++k) out << (k ? " " : "") << m(i, k);
        out << '\n';
    }
}

}  // namespace corround
