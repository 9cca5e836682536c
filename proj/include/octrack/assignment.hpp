#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <vector>

namespace octrack {

namespace detail {

// Jonker-Volgenant shortest augmenting path solver for square cost matrices.
// Deterministic: rows are processed in index order and column scans run in
// index order, so equal-cost alternatives resolve toward low indices.
inline std::vector<int> lap_square(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<int> col_to_row(n + 1, 0);
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        col_to_row[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = col_to_row[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
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
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[col_to_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[j0] != 0);
        do {
            const int j1 = way[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (col_to_row[j] != 0) {
            row_to_col[col_to_row[j] - 1] = j - 1;
        }
    }
    return row_to_col;
}

}  // namespace detail

/// Minimum-total-cost one-to-one assignment of rows to columns. Returns, per
/// row, the assigned column index or -1; exactly min(rows, cols) pairs are
/// assigned. Costs must be finite. Rectangular inputs are padded to square
/// with zero-cost dummies, which leaves the optimum over real pairs intact
/// since every dummy contributes the same constant.
inline std::vector<int> solve_lap(const Eigen::MatrixXd& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    if (rows == 0 || cols == 0) {
        return std::vector<int>(rows, -1);
    }
    if (!cost.allFinite()) {
        throw std::invalid_argument("solve_lap: costs must be finite");
    }

    const int n = std::max(rows, cols);
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
    padded.topLeftCorner(rows, cols) = cost;

    std::vector<int> assignment = detail::lap_square(padded);
    assignment.resize(rows);
    for (int i = 0; i < rows; ++i) {
        if (assignment[i] >= cols) {
            assignment[i] = -1;  // row matched to a dummy column
        }
    }
    return assignment;
}

}  // namespace octrack
