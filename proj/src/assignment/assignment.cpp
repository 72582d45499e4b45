#include "rmot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <optional>

#include "rmot/error.hpp"

namespace rmot {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_finite(const WeightMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m.weight(r, c))) {
                throw Error("NON_FINITE_WEIGHT", fmt::format("weight at ({}, {}) is not finite", r, c));
            }
        }
    }
}

double tie_tolerance(double best) { return kTieTolerance * std::max(1.0, std::abs(best)); }

struct SubSolution {
    double value = 0.0;
    std::vector<std::size_t> assign;  // parallel to the row list; kNone if unmatched
};

/// Shortest augmenting path Hungarian method (potentials form) on the
/// square padding of the selected rows x cols. Unmatchable cells cost 0,
/// which is the same as leaving both ends unmatched.
SubSolution hungarian(const WeightMatrix& m, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols) {
    SubSolution out;
    out.assign.assign(rows.size(), kNone);
    const std::size_t n = std::max(rows.size(), cols.size());
    if (rows.empty() || cols.empty()) return out;

    auto cost = [&](std::size_t i, std::size_t j) -> double {
        if (i >= rows.size() || j >= cols.size()) return 0.0;
        const std::size_t r = rows[i];
        const std::size_t c = cols[j];
        return m.matchable(r, c) ? -m.weight(r, c) : 0.0;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = p[j] - 1;
        const std::size_t jj = j - 1;
        if (i < rows.size() && jj < cols.size() && m.matchable(rows[i], cols[jj])) {
            out.assign[i] = jj;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (out.assign[i] != kNone) out.value += m.weight(rows[i], cols[out.assign[i]]);
    }
    return out;
}

/// Lexicographically smallest optimal assignment for one connected component.
void solve_component(const WeightMatrix& m, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols, Matching& out) {
    SubSolution best = hungarian(m, rows, cols);
    const double target = best.value - tie_tolerance(best.value);

    std::vector<char> free_col(cols.size(), 1);
    // Column indices (into `cols`) of the current optimal completion, one per row.
    std::vector<std::size_t> completion = best.assign;
    double prefix = 0.0;

    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t r = rows[k];
        const std::size_t current = completion[k];
        std::size_t chosen = current;

        const std::vector<std::size_t> rest_rows(rows.begin() + static_cast<std::ptrdiff_t>(k) + 1, rows.end());
        for (std::size_t j = 0; j < cols.size() && (current == kNone || j < current); ++j) {
            if (!free_col[j] || !m.matchable(r, cols[j])) continue;
            std::vector<std::size_t> rest_cols;
            std::vector<std::size_t> rest_index;
            for (std::size_t jj = 0; jj < cols.size(); ++jj) {
                if (free_col[jj] && jj != j) {
                    rest_cols.push_back(cols[jj]);
                    rest_index.push_back(jj);
                }
            }
            SubSolution sub = hungarian(m, rest_rows, rest_cols);
            if (prefix + m.weight(r, cols[j]) + sub.value >= target) {
                chosen = j;
                for (std::size_t i = 0; i < rest_rows.size(); ++i) {
                    completion[k + 1 + i] = sub.assign[i] == kNone ? kNone : rest_index[sub.assign[i]];
                }
                break;
            }
        }

        if (chosen != kNone) {
            free_col[chosen] = 0;
            prefix += m.weight(r, cols[chosen]);
            out.pairs.emplace_back(r, cols[chosen]);
        }
    }
}

}  // namespace

Matching solve_max_weight(const WeightMatrix& m) {
    check_finite(m);
    Matching out;
    const std::size_t nr = m.rows();
    const std::size_t nc = m.cols();
    if (nr == 0 || nc == 0) return out;

    // Union-find over rows [0, nr) and cols [nr, nr + nc).
    std::vector<std::size_t> parent(nr + nc);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    bool any = false;
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            if (!m.matchable(r, c)) continue;
            any = true;
            const std::size_t a = find(r);
            const std::size_t b = find(nr + c);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    if (!any) return out;

    std::vector<std::vector<std::size_t>> comp_rows(nr + nc), comp_cols(nr + nc);
    for (std::size_t r = 0; r < nr; ++r) comp_rows[find(r)].push_back(r);
    for (std::size_t c = 0; c < nc; ++c) comp_cols[find(nr + c)].push_back(c);

    for (std::size_t root = 0; root < nr + nc; ++root) {
        const auto& rows = comp_rows[root];
        const auto& cols = comp_cols[root];
        if (rows.empty() || cols.empty()) continue;
        if (rows.size() == 1 && cols.size() == 1) {
            out.pairs.emplace_back(rows[0], cols[0]);
            continue;
        }
        solve_component(m, rows, cols, out);
    }

    std::sort(out.pairs.begin(), out.pairs.end());
    for (const auto& [r, c] : out.pairs) out.total_weight += m.weight(r, c);
    return out;
}

namespace {

struct Enumerator {
    const WeightMatrix& m;
    std::vector<char> used;
    std::vector<std::size_t> assign;
    double best = 0.0;
    double threshold = 0.0;
    std::optional<std::vector<std::size_t>> found;

    void maximize(std::size_t r, double acc) {
        if (r == m.rows()) {
            best = std::max(best, acc);
            return;
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (used[c] || !m.matchable(r, c)) continue;
            used[c] = 1;
            maximize(r + 1, acc + m.weight(r, c));
            used[c] = 0;
        }
        maximize(r + 1, acc);
    }

    // Depth-first in lexicographic order; the first hit is the tie-break winner.
    bool first_within(std::size_t r, double acc) {
        if (r == m.rows()) {
            if (acc >= threshold) {
                found = assign;
                return true;
            }
            return false;
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (used[c] || !m.matchable(r, c)) continue;
            used[c] = 1;
            assign[r] = c;
            if (first_within(r + 1, acc + m.weight(r, c))) return true;
            used[c] = 0;
        }
        assign[r] = kNone;
        return first_within(r + 1, acc);
    }
};

}  // namespace

Matching solve_oracle(const WeightMatrix& m) {
    if (m.rows() > kOracleMaxDim || m.cols() > kOracleMaxDim) {
        throw Error("SIZE_LIMIT", fmt::format("oracle limited to {0}x{0}, got {1}x{2}", kOracleMaxDim, m.rows(), m.cols()));
    }
    check_finite(m);
    Enumerator e{m, std::vector<char>(m.cols(), 0), std::vector<std::size_t>(m.rows(), kNone), 0.0, 0.0, std::nullopt};
    e.maximize(0, 0.0);
    e.threshold = e.best - tie_tolerance(e.best);
    std::fill(e.used.begin(), e.used.end(), 0);
    e.first_within(0, 0.0);

    Matching out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if ((*e.found)[r] != kNone) {
            out.pairs.emplace_back(r, (*e.found)[r]);
            out.total_weight += m.weight(r, (*e.found)[r]);
        }
    }
    return out;
}

}  // namespace rmot
