#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace rmot {

/// Dense row-major weights with a feasibility mask. Rows are ground-truth
/// boxes, columns predicted boxes.
class WeightMatrix {
public:
    WeightMatrix() = default;
    WeightMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), weights_(rows * cols, 0.0), mask_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double weight(std::size_t r, std::size_t c) const { return weights_[r * cols_ + c]; }
    bool feasible(std::size_t r, std::size_t c) const { return mask_[r * cols_ + c] != 0; }

    void set(std::size_t r, std::size_t c, double w, bool feasible = true) {
        weights_[r * cols_ + c] = w;
        mask_[r * cols_ + c] = feasible ? 1 : 0;
    }

    /// Feasible and non-negative: the pairs a solver may select.
    bool matchable(std::size_t r, std::size_t c) const { return feasible(r, c) && weight(r, c) >= 0.0; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> weights_;
    std::vector<std::uint8_t> mask_;
};

struct Matching {
    /// (row, col) pairs sorted by row.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double total_weight = 0.0;
};

/// Matchings whose weight is within this relative distance of the optimum
/// count as ties.
inline constexpr double kTieTolerance = 1e-9;

/// Exact maximum-weight matching. Negative-weight pairs are never matched.
/// Among optimal matchings (up to kTieTolerance) returns the one whose
/// row -> column assignment vector is lexicographically smallest, with
/// "unmatched" ordered after every column. Throws rmot::Error
/// (NON_FINITE_WEIGHT) on NaN/inf weights.
Matching solve_max_weight(const WeightMatrix& m);

/// Brute-force enumeration of every injective partial assignment with the
/// same objective and tie-break. Limited to 8x8 (SIZE_LIMIT otherwise).
Matching solve_oracle(const WeightMatrix& m);

inline constexpr std::size_t kOracleMaxDim = 8;

}  // namespace rmot
