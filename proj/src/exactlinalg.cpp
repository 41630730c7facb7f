#include "k3lat/exactlinalg.hpp"

#include <cstddef>
#include <utility>

namespace k3lat {

namespace {

// Working state for the Smith reduction.  Invariant maintained by every
// elementary operation:  a_orig = u * a * v  and  vinv = v^{-1}.
struct SnfWorker {
    IntMat a, u, v, vinv;

    explicit SnfWorker(const IntMat& m)
        : a(m),
          u(IntMat::identity(m.rows())),
          v(IntMat::identity(m.cols())),
          vinv(IntMat::identity(m.cols())) {}

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        a.swap_rows(i, j);
        u.swap_cols(i, j);
    }

    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        a.swap_cols(i, j);
        v.swap_rows(i, j);
        vinv.swap_cols(i, j);
    }

    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) = -a(i, k);
        for (std::size_t k = 0; k < u.rows(); ++k) u(k, i) = -u(k, i);
    }

    // row_i += t * row_j
    void add_row(std::size_t i, std::size_t j, const Int& t) {
        if (t == 0) return;
        for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) += t * a(j, k);
        for (std::size_t k = 0; k < u.rows(); ++k) u(k, j) -= t * u(k, i);
    }

    // col_j += t * col_i
    void add_col(std::size_t j, std::size_t i, const Int& t) {
        if (t == 0) return;
        for (std::size_t k = 0; k < a.rows(); ++k) a(k, j) += t * a(k, i);
        for (std::size_t k = 0; k < vinv.rows(); ++k) vinv(k, j) += t * vinv(k, i);
        for (std::size_t k = 0; k < v.cols(); ++k) v(i, k) -= t * v(j, k);
    }

};

} // namespace

SnfDecomposition smith_normal_form(const IntMat& a_in) {
    SnfWorker w(a_in);
    const std::size_t rows = a_in.rows(), cols = a_in.cols();
    const std::size_t n = rows < cols ? rows : cols;

    // One elimination round per diagonal slot, always pivoting on the
    // entry of smallest absolute value and clearing with floor division
    // (Kannan-Bachem).  Each re-pick strictly shrinks the pivot, and the
    // minimum pivot keeps intermediate entries from exploding on dense
    // matrices.
    bool exhausted = false;
    for (std::size_t t = 0; t < n && !exhausted; ++t) {
        for (;;) {
            std::size_t pi = rows, pj = cols;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (w.a(i, j) != 0 &&
                        (pi == rows || abs(w.a(i, j)) < abs(w.a(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == rows) {
                exhausted = true; // trailing submatrix is zero
                break;
            }
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (w.a(i, t) == 0) continue;
                w.add_row(i, t, -fdiv_q(w.a(i, t), w.a(t, t)));
                if (w.a(i, t) != 0) clean = false; // remainder smaller than pivot
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (w.a(t, j) == 0) continue;
                w.add_col(j, t, -fdiv_q(w.a(t, j), w.a(t, t)));
                if (w.a(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            // Pivot must divide every remaining entry; pull an offender into
            // the pivot row and repeat (this too shrinks the next pivot).
            bool divides_all = true;
            for (std::size_t i = t + 1; i < rows && divides_all; ++i)
                for (std::size_t j = t + 1; j < cols && divides_all; ++j)
                    if (w.a(i, j) % w.a(t, t) != 0) {
                        w.add_row(t, i, 1);
                        divides_all = false;
                    }
            if (divides_all) break;
        }
    }

    for (std::size_t t = 0; t < n; ++t)
        if (w.a(t, t) < 0) w.negate_row(t);

    SnfDecomposition r{std::move(w.u), std::move(w.a), std::move(w.v), std::move(w.vinv)};
    ensure(r.u * r.d * r.v == a_in, "smith_normal_form: factorisation check failed");
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const Int &x = r.d(t, t), &y = r.d(t + 1, t + 1);
        ensure(x >= 0 && (x == 0 ? y == 0 : y % x == 0),
               "smith_normal_form: divisor chain check failed");
    }
    return r;
}

IntMat hermite_normal_form(const IntMat& a) {
    IntMat h = a;
    const std::size_t rows = h.rows(), cols = h.cols();
    std::size_t p = 0; // next pivot column
    std::vector<std::size_t> pivot_row;

    for (std::size_t i = 0; i < rows && p < cols; ++i) {
        // Reduce row i across columns p.. to a single nonzero at column p.
        for (;;) {
            std::size_t best = cols;
            for (std::size_t j = p; j < cols; ++j)
                if (h(i, j) != 0 && (best == cols || abs(h(i, j)) < abs(h(i, best)))) best = j;
            if (best == cols) break; // row is zero past p
            h.swap_cols(p, best);
            bool done = true;
            for (std::size_t j = p + 1; j < cols; ++j) {
                if (h(i, j) == 0) continue;
                const Int q = fdiv_q(h(i, j), h(i, p));
                for (std::size_t r = 0; r < rows; ++r) h(r, j) -= q * h(r, p);
                if (h(i, j) != 0) done = false;
            }
            if (done) break;
        }
        if (h(i, p) == 0) continue;
        if (h(i, p) < 0)
            for (std::size_t r = 0; r < rows; ++r) h(r, p) = -h(r, p);
        // Normalise earlier pivot columns against the new pivot row.
        for (std::size_t j = 0; j < p; ++j) {
            const Int q = fdiv_q(h(i, j), h(i, p));
            if (q == 0) continue;
            for (std::size_t r = 0; r < rows; ++r) h(r, j) -= q * h(r, p);
        }
        pivot_row.push_back(i);
        ++p;
    }

    IntMat out(rows, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t r = 0; r < rows; ++r) out(r, j) = h(r, j);
    return out;
}

bool same_column_lattice(const IntMat& a, const IntMat& b) {
    if (a.rows() != b.rows()) return false;
    return hermite_normal_form(a) == hermite_normal_form(b);
}

IntMat integer_kernel(const IntMat& a) {
    const SnfDecomposition s = smith_normal_form(a);
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < a.cols(); ++i)
        if (s.divisor(i) == 0) free_idx.push_back(i);
    IntMat k(a.cols(), free_idx.size());
    for (std::size_t j = 0; j < free_idx.size(); ++j)
        for (std::size_t r = 0; r < a.cols(); ++r) k(r, j) = s.vinv(r, free_idx[j]);
    return k;
}

IntMat rational_kernel_basis(const RatMat& a) {
    const Int q = common_denominator(a);
    return integer_kernel(to_integral(a * Rat(q)));
}

namespace {

// Forward elimination with partial (first nonzero) pivoting on [a | rhs].
// Returns the number of row swaps mod 2 via `sign`; on exit `a` is upper
// triangular when square and nonsingular.
void eliminate(RatMat& a, RatMat& rhs, int& sign) {
    const std::size_t rows = a.rows(), cols = a.cols();
    sign = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (a(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        if (piv != r) {
            a.swap_rows(r, piv);
            if (rhs.cols()) rhs.swap_rows(r, piv);
            sign = -sign;
        }
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (a(i, c) == 0) continue;
            const Rat f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
            for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) -= f * rhs(r, j);
        }
        ++r;
    }
}

} // namespace

Rat determinant(const RatMat& a_in) {
    require(a_in.rows() == a_in.cols(), "determinant: matrix not square");
    RatMat a = a_in;
    RatMat rhs(a.rows(), 0);
    int sign = 0;
    eliminate(a, rhs, sign);
    Rat det = sign;
    for (std::size_t i = 0; i < a.rows(); ++i) det *= a(i, i);
    return det;
}

Int determinant(const IntMat& a) {
    const Rat d = determinant(to_rational(a));
    ensure(is_integral(d), "determinant: integer matrix with non-integer determinant");
    return d.get_num();
}

RatMat solve(const RatMat& a_in, const RatMat& b_in) {
    require(a_in.rows() == a_in.cols(), "solve: matrix not square");
    require(a_in.rows() == b_in.rows(), "solve: right-hand side has wrong height");
    RatMat a = a_in, b = b_in;
    int sign = 0;
    eliminate(a, b, sign);
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        require(a(i, i) != 0, "solve: singular matrix");
    RatMat x(n, b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t ii = n; ii-- > 0;) {
            Rat acc = b(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) acc -= a(ii, k) * x(k, j);
            x(ii, j) = acc / a(ii, ii);
        }
    return x;
}

RatVec solve(const RatMat& a, const RatVec& b) {
    RatMat rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    return solve(a, rhs).column(0);
}

RatMat inverse(const RatMat& a) {
    return solve(a, to_rational(IntMat::identity(a.rows())));
}

IntMat intersect_column_lattices(const IntMat& a, const IntMat& b) {
    require(a.rows() == b.rows(), "intersect_column_lattices: ambient dimension mismatch");
    IntMat stacked(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) stacked(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) stacked(i, a.cols() + j) = -b(i, j);
    }
    const IntMat k = integer_kernel(stacked);
    IntMat xs(a.cols(), k.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < k.cols(); ++j) xs(i, j) = k(i, j);
    return hermite_normal_form(a * xs);
}

RatMat dual_basis(const IntMat& basis, const IntMat& gram) {
    require(gram.rows() == gram.cols() && gram.rows() == basis.rows(),
            "dual_basis: shape mismatch");
    const RatMat b = to_rational(basis);
    const RatMat n = to_rational(basis.transpose() * gram * basis);
    require(determinant(n) != 0, "dual_basis: degenerate restricted form");
    return b * inverse(n);
}

IntMat sublattice_where_integral(const RatMat& phi) {
    const Int q = common_denominator(phi);
    if (q == 1) return IntMat::identity(phi.cols());
    // The condition q | (q·phi)·z only involves q·phi mod q, so reduce the
    // entries into [0, q) before decomposing; this keeps the elimination on
    // small numbers.
    IntMat n = to_integral(phi * Rat(q));
    for (std::size_t i = 0; i < n.rows(); ++i)
        for (std::size_t j = 0; j < n.cols(); ++j) n(i, j) = fdiv_r(n(i, j), q);
    const SnfDecomposition s = smith_normal_form(n);
    IntMat m = s.vinv;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const Int mult = q / gcd(s.divisor(j), q);
        if (mult == 1) continue;
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) *= mult;
    }
    return hermite_normal_form(m);
}

} // namespace k3lat
