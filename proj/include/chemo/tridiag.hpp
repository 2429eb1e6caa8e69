#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

/**
 * Thomas algorithm for a tridiagonal system
 *
 *   a[i]*x[i-1] + b[i]*x[i] + c[i]*x[i+1] = d[i],   a[0] = c[n-1] = 0.
 *
 * d is overwritten with the solution. For M-matrix input (b > 0, a, c <= 0,
 * diagonally dominant) every elimination step adds nonnegative quantities to
 * the right-hand side and the back substitution multiplies nonnegatives, so a
 * nonnegative d yields an exactly nonnegative x in floating point. The
 * implicit diffusion update depends on that property.
 */
inline void solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& c, std::vector<double>& d,
                              std::vector<double>& scratch) {
    const std::size_t n = b.size();
    if (a.size() != n || c.size() != n || d.size() != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    if (n == 0) return;
    scratch.resize(n);
    double diag = b[0];
    if (diag == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot at row 0");
    scratch[0] = c[0] / diag;
    d[0] /= diag;
    for (std::size_t i = 1; i < n; ++i) {
        diag = b[i] - a[i] * scratch[i - 1];
        if (diag == 0.0)
            throw std::runtime_error("solve_tridiagonal: zero pivot at row " + std::to_string(i));
        scratch[i] = c[i] / diag;
        d[i] = (d[i] - a[i] * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= scratch[i] * d[i + 1];
}

inline void solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& c, std::vector<double>& d) {
    std::vector<double> scratch;
    solve_tridiagonal(a, b, c, d, scratch);
}

/**
 * Cyclic tridiagonal solver:
 *
 *   a[i]*x[i-1] + b[i]*x[i] + c[i]*x[i+1] = d[i]   (indices mod n),
 *
 * i.e. a[0] couples row 0 to x[n-1] and c[n-1] couples row n-1 to x[0].
 * Implemented as bordered Gaussian elimination with x[n-1] as the border
 * unknown. Unlike the Sherman-Morrison trick, this keeps the M-matrix sign
 * pattern intact through every intermediate quantity (Schur complements of
 * M-matrices are M-matrices), so nonnegative d gives exactly nonnegative x.
 * Requires n >= 3.
 */
inline void solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                     const std::vector<double>& c, std::vector<double>& d) {
    const std::size_t n = b.size();
    if (a.size() != n || c.size() != n || d.size() != n)
        throw std::invalid_argument("solve_cyclic_tridiagonal: size mismatch");
    if (n < 3) throw std::invalid_argument("solve_cyclic_tridiagonal: need at least 3 unknowns");

    const std::size_t m = n - 1;  // rows 0..m-1 are the reduced tridiagonal block
    std::vector<double> diag(m), upper(m), fill(m, 0.0), last(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] = b[i];
        upper[i] = (i + 1 < m) ? c[i] : 0.0;
    }
    fill[0] = a[0];
    fill[m - 1] += c[m - 1];
    last[0] = c[n - 1];
    last[m - 1] += a[n - 1];
    double last_diag = b[n - 1];
    double last_rhs = d[n - 1];

    // Forward elimination over rows 0..m-2, updating the next row and the
    // border row. All update terms are products of two nonpositive factors.
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (diag[i] == 0.0)
            throw std::runtime_error("solve_cyclic_tridiagonal: zero pivot at row " +
                                     std::to_string(i));
        const double sub = a[i + 1];
        if (sub != 0.0) {
            const double f = sub / diag[i];
            diag[i + 1] -= f * upper[i];
            fill[i + 1] -= f * fill[i];
            d[i + 1] -= f * d[i];
        }
        if (last[i] != 0.0) {
            const double f = last[i] / diag[i];
            last[i + 1] -= f * upper[i];
            last_diag -= f * fill[i];
            last_rhs -= f * d[i];
            last[i] = 0.0;
        }
    }
    // Eliminate the final interior row from the border row.
    if (diag[m - 1] == 0.0)
        throw std::runtime_error("solve_cyclic_tridiagonal: zero pivot at row " +
                                 std::to_string(m - 1));
    if (last[m - 1] != 0.0) {
        const double f = last[m - 1] / diag[m - 1];
        last_diag -= f * fill[m - 1];
        last_rhs -= f * d[m - 1];
    }
    if (last_diag == 0.0) throw std::runtime_error("solve_cyclic_tridiagonal: singular border row");

    const double x_last = last_rhs / last_diag;
    d[n - 1] = x_last;
    d[m - 1] = (d[m - 1] - fill[m - 1] * x_last) / diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;)
        d[i] = (d[i] - upper[i] * d[i + 1] - fill[i] * x_last) / diag[i];
}

}  // namespace chemo
