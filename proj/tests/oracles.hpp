// Test-only reference implementations, deliberately independent of the
// library's numerics: plain nested-vector matrices with Gauss-Jordan
// inversion for the filter, and exhaustive permutation search for the
// assignment problem.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Mat zeros(int r, int c) { return Mat(r, Vec(c, 0.0)); }

inline Mat identity(int n) {
    Mat m = zeros(n, n);
    for (int i = 0; i < n; ++i) {
        m[i][i] = 1.0;
    }
    return m;
}

inline Mat mul(const Mat& a, const Mat& b) {
    const int r = static_cast<int>(a.size());
    const int k = static_cast<int>(b.size());
    const int c = static_cast<int>(b[0].size());
    Mat out = zeros(r, c);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            double s = 0.0;
            for (int t = 0; t < k; ++t) {
                s += a[i][t] * b[t][j];
            }
            out[i][j] = s;
        }
    }
    return out;
}

inline Mat add(const Mat& a, const Mat& b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            out[i][j] += b[i][j];
        }
    }
    return out;
}

inline Mat sub(const Mat& a, const Mat& b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            out[i][j] -= b[i][j];
        }
    }
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat out = zeros(static_cast<int>(a[0].size()), static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            out[j][i] = a[i][j];
        }
    }
    return out;
}

inline Vec mul_vec(const Mat& a, const Vec& x) {
    Vec out(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            out[i] += a[i][j] * x[j];
        }
    }
    return out;
}

// Gauss-Jordan inverse with partial pivoting.
inline Mat inverse(Mat a) {
    const int n = static_cast<int>(a.size());
    Mat inv = identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (a[pivot][col] == 0.0) {
            throw std::runtime_error("oracle inverse: singular matrix");
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (int j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) {
                continue;
            }
            const double f = a[r][col];
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

// Constant-velocity box filter reference. Mirrors the modelled dynamics,
// including the guard that zeroes the area velocity when the area would go
// non-positive.
struct KfRef {
    Vec mean = Vec(7, 0.0);
    Mat cov = zeros(7, 7);
    Mat f = identity(7);
    Mat h = zeros(4, 7);
    Mat q = zeros(7, 7);
    Mat r = zeros(4, 4);

    static KfRef init(const Vec& obs4, const Vec& p0_diag, const Vec& q_diag,
                      const Vec& r_diag) {
        KfRef kf;
        for (int i = 0; i < 4; ++i) {
            kf.mean[i] = obs4[i];
            kf.h[i][i] = 1.0;
            kf.r[i][i] = r_diag[i];
        }
        for (int i = 0; i < 7; ++i) {
            kf.cov[i][i] = p0_diag[i];
            kf.q[i][i] = q_diag[i];
        }
        kf.f[0][4] = kf.f[1][5] = kf.f[2][6] = 1.0;
        return kf;
    }

    void predict() {
        if (mean[2] + mean[6] <= 0.0) {
            mean[6] = 0.0;
        }
        mean = mul_vec(f, mean);
        cov = add(mul(mul(f, cov), transpose(f)), q);
    }

    void update(const Vec& z) {
        const Mat ht = transpose(h);
        const Mat s = add(mul(mul(h, cov), ht), r);
        const Mat k = mul(mul(cov, ht), inverse(s));
        Vec innovation(4, 0.0);
        const Vec hx = mul_vec(h, mean);
        for (int i = 0; i < 4; ++i) {
            innovation[i] = z[i] - hx[i];
        }
        const Vec corr = mul_vec(k, innovation);
        for (int i = 0; i < 7; ++i) {
            mean[i] += corr[i];
        }
        cov = mul(sub(identity(7), mul(k, h)), cov);
    }
};

// Exhaustive minimum-cost assignment over all permutations of the padded
// square problem. cost is rows x cols with rows, cols <= 7.
inline double brute_force_min_cost(const std::vector<std::vector<double>>& cost) {
    const int rows = static_cast<int>(cost.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(cost[0].size());
    if (rows == 0 || cols == 0) {
        return 0.0;
    }
    const int n = std::max(rows, cols);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (perm[i] < cols) {
                total += cost[i][perm[i]];
            }
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace oracle
