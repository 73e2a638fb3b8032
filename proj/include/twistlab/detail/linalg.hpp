#ifndef TWISTLAB_DETAIL_LINALG_HPP
#define TWISTLAB_DETAIL_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace twistlab::detail {

/// In-place Gaussian elimination with partial pivoting; A is n x n row-major.
/// Returns false on (near-)singular pivot.
inline bool solve_dense(std::vector<double> A, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(A[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double a = std::abs(A[i * n + k]);
            if (a > best) { best = a; piv = i; }
        }
        if (best < 1e-300) return false;
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        double inv = 1.0 / A[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = A[i * n + k] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
        x[i] = s / A[i * n + i];
    }
    return true;
}

/// Thomas algorithm for a tridiagonal system (lower, diag, upper, rhs).
/// Diagonals are modified in place. Returns false on singular pivot.
inline bool solve_tridiag(std::vector<double> lo, std::vector<double> di,
                          std::vector<double> up, std::vector<double> rhs,
                          std::vector<double>& x) {
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(di[i - 1]) < 1e-300) return false;
        double f = lo[i] / di[i - 1];
        di[i] -= f * up[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    if (std::abs(di[n - 1]) < 1e-300) return false;
    x.assign(n, 0.0);
    x[n - 1] = rhs[n - 1] / di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
    return true;
}

} // namespace twistlab::detail

#endif
