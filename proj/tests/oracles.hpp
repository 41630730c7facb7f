#pragma once

// Brute-force reference implementations used to cross-check the library.
// Everything here trades efficiency for being obviously correct and for
// sharing no code path with the routines under test.

#include <cstddef>
#include <functional>
#include <vector>

#include "k3lat/matrix.hpp"

namespace oracle {

using k3lat::Int;
using k3lat::IntMat;
using k3lat::IntVec;
using k3lat::Rat;
using k3lat::RatMat;
using k3lat::RatVec;

// Cofactor expansion along the first row.  Exponential, fine up to 6x6.
inline Int laplace_determinant(const IntMat& a) {
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    if (n == 1) return a(0, 0);
    Int det = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (a(0, j) == 0) continue;
        IntMat minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        const Int cof = a(0, j) * laplace_determinant(minor);
        det += (j % 2 == 0) ? cof : -cof;
    }
    return det;
}

inline void combinations(std::size_t n, std::size_t k,
                         const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i-- > 0) {
            if (idx[i] != i + n - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
    }
}

// gcd of all k x k minors (0 if every minor vanishes).
inline Int gcd_of_k_minors(const IntMat& a, std::size_t k) {
    Int g = 0;
    combinations(a.rows(), k, [&](const std::vector<std::size_t>& ri) {
        combinations(a.cols(), k, [&](const std::vector<std::size_t>& ci) {
            IntMat sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = a(ri[i], ci[j]);
            g = k3lat::gcd(g, laplace_determinant(sub));
        });
    });
    return g;
}

// Invariant-factor sequence from determinantal divisors:
// d_k = gcd(k-minors) / gcd((k-1)-minors), and 0 once the minors vanish.
inline IntVec invariant_factors_by_minors(const IntMat& a) {
    const std::size_t n = a.rows() < a.cols() ? a.rows() : a.cols();
    IntVec d(n);
    Int prev = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        const Int g = gcd_of_k_minors(a, k);
        if (g == 0) break; // remaining factors stay 0
        d[k - 1] = g / prev;
        prev = g;
    }
    return d;
}

// Solve b * x = p exactly, requiring b to have full column rank; returns
// false if the system is inconsistent.  Used as an independent membership
// test "p lies in the integer column span of b" (check x integral).
inline bool solve_full_column_rank(const IntMat& b, const IntVec& p, RatVec& x) {
    const std::size_t rows = b.rows(), cols = b.cols();
    RatMat m(rows, cols + 1);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = Rat(b(i, j));
        m(i, cols) = Rat(p[i]);
    }
    std::vector<std::size_t> pivot_of_col(cols, rows);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == rows) return false; // column rank deficient: caller misuse
        m.swap_rows(r, piv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            const Rat f = m(i, c) / m(r, c);
            for (std::size_t j = c; j <= cols; ++j) m(i, j) -= f * m(r, j);
        }
        pivot_of_col[c] = r;
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (m(i, cols) != 0) return false; // inconsistent
    x.assign(cols, Rat(0));
    for (std::size_t c = 0; c < cols; ++c) x[c] = m(pivot_of_col[c], cols) / m(pivot_of_col[c], c);
    return true;
}

inline bool in_integer_column_span(const IntMat& b, const IntVec& p) {
    RatVec x;
    if (!solve_full_column_rank(b, p, x)) return false;
    return k3lat::is_integral(x);
}

} // namespace oracle
