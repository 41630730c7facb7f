#include "k3lat/isometry.hpp"

#include <utility>

namespace k3lat {

RationalIsometry::RationalIsometry(Lattice lattice, RatMat matrix)
    : lattice_(std::move(lattice)), m_(std::move(matrix)) {
    require(m_.rows() == m_.cols() && m_.rows() == lattice_.rank(),
            "RationalIsometry: matrix shape does not match the lattice");
    const RatMat g = to_rational(lattice_.gram());
    require(m_.transpose() * g * m_ == g,
            "RationalIsometry: matrix does not preserve the bilinear form");
}

RationalIsometry RationalIsometry::identity(Lattice lattice) {
    RatMat m = to_rational(IntMat::identity(lattice.rank()));
    return RationalIsometry(std::move(lattice), std::move(m), trusted{});
}

RationalIsometry RationalIsometry::compose(const RationalIsometry& inner) const {
    require(lattice_ == inner.lattice_, "compose: isometries of different lattices");
    return RationalIsometry(lattice_, m_ * inner.m_, trusted{});
}

RationalIsometry RationalIsometry::inverse() const {
    return RationalIsometry(lattice_, k3lat::inverse(m_), trusted{});
}

RatMat reflection_matrix(const IntMat& gram, const IntVec& x) {
    const std::size_t n = gram.rows();
    require(x.size() == n, "reflection_matrix: size mismatch");
    const Int s = inner_product(gram, x, x);
    require(s != 0, "reflection_matrix: isotropic axis");
    const IntVec gx = gram * x; // (e_j, x) in slot j
    RatMat m = to_rational(IntMat::identity(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) -= make_rat(2 * x[i] * gx[j], s);
    return m;
}

RationalIsometry reflection(const Lattice& lattice, const IntVec& x) {
    require(is_primitive(lattice, x), "reflection: axis must be primitive");
    return RationalIsometry(lattice, reflection_matrix(lattice.gram(), x));
}

IntMat transvection_matrix(const IntMat& gram, const IntVec& f, const IntVec& w) {
    const std::size_t n = gram.rows();
    require(f.size() == n && w.size() == n, "transvection_matrix: size mismatch");
    require(inner_product(gram, f, f) == 0, "transvection_matrix: f must be isotropic");
    require(inner_product(gram, f, w) == 0, "transvection_matrix: w must be orthogonal to f");
    const Int ww = inner_product(gram, w, w);
    require(ww % 2 == 0, "transvection_matrix: (w,w) must be even");
    const Int half = ww / 2;
    const IntVec gf = gram * f, gw = gram * w;
    IntMat m = IntMat::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) += gf[j] * w[i] - gw[j] * f[i] - half * gf[j] * f[i];
    return m;
}

RationalIsometry eichler_transvection(const Lattice& lattice, const IntVec& f,
                                      const IntVec& w) {
    require(lattice.is_even(), "eichler_transvection: lattice must be even");
    return RationalIsometry(lattice, to_rational(transvection_matrix(lattice.gram(), f, w)));
}

IntMat coinvariant_sublattice(const RationalIsometry& phi) {
    return sublattice_where_integral(phi.matrix());
}

QuotientStructure quotient_structure(const RationalIsometry& phi) {
    const IntMat basis = coinvariant_sublattice(phi);
    ensure(basis.cols() == phi.rank(), "quotient_structure: sublattice not of full rank");
    const SnfDecomposition s = smith_normal_form(basis);
    QuotientStructure q;
    for (std::size_t i = 0; i < basis.cols(); ++i) {
        const Int d = s.divisor(i);
        ensure(d > 0, "quotient_structure: finite index expected");
        if (d > 1) q.elementary_divisors.push_back(d);
        q.index *= d;
    }
    return q;
}

std::optional<Int> cyclic_type(const RationalIsometry& phi) {
    const QuotientStructure q = quotient_structure(phi);
    if (q.elementary_divisors.empty()) return Int(1);
    if (q.elementary_divisors.size() == 1) return q.elementary_divisors[0];
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reflection decomposition
// ---------------------------------------------------------------------------

namespace {

// Coefficient vector c (small entries) with cᵀ a c ≠ 0 for a symmetric
// integer matrix a, or nothing when the quadratic form is identically
// zero.  A diagonal hit gives a unit vector; otherwise any nonzero
// off-diagonal entry a(i,j) makes e_i + e_j work (the diagonal is zero).
std::optional<IntVec> anisotropic_coefficients(const IntMat& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j)
        if (a(j, j) != 0) return unit_vector(n, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a(i, j) != 0) {
                IntVec c(n);
                c[i] = 1;
                c[j] = 1;
                return c;
            }
    return std::nullopt;
}

Int eval_form(const IntMat& a, const IntVec& c) {
    Int acc = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (c[i] == 0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (c[j] != 0) acc += c[i] * a(i, j) * c[j];
    }
    return acc;
}

IntVec primitive_integer(IntVec w) {
    const Int c = content(w);
    ensure(c != 0, "primitive_integer: zero vector");
    if (c > 1)
        for (auto& x : w) x = divexact(x, c);
    return w;
}

IntMat content_reduced_columns(IntMat m) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        IntVec col = m.column(j);
        const Int c = content(col);
        if (c > 1) {
            for (auto& x : col) x = divexact(x, c);
            m.set_column(j, col);
        }
    }
    return m;
}

// Integer columns spanning the rational kernel of a, found by fraction-free
// (Bareiss) elimination followed by back substitution.  Unlike the Smith-form
// kernel this is a single elimination pass with determinant-bounded entries,
// and the basis vectors it produces stay close to elementary — both matter
// here, because kernel output feeds back into the working bases of the
// decomposition loop and oversized vectors would compound from round to
// round.  The columns are primitive but the basis is not saturated, which is
// fine for every use below: only the spanned subspace is consumed.
IntMat fraction_free_kernel(IntMat a) {
    const std::size_t rows = a.rows();
    const std::size_t k = a.cols();
    std::vector<std::size_t> pivot_col;
    std::vector<bool> is_pivot(k, false);
    Int prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < k && r < rows; ++c) {
        std::size_t best = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (a(i, c) == 0) continue;
            if (best == rows || abs(a(i, c)) < abs(a(best, c))) best = i;
        }
        if (best == rows) continue;
        if (best != r)
            for (std::size_t j = 0; j < k; ++j) std::swap(a(r, j), a(best, j));
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < k; ++j)
                a(i, j) = divexact(a(r, c) * a(i, j) - a(i, c) * a(r, j), prev);
            a(i, c) = 0;
        }
        prev = a(r, c);
        pivot_col.push_back(c);
        is_pivot[c] = true;
        ++r;
    }
    IntMat basis(k, k - r);
    std::size_t out = 0;
    for (std::size_t f = 0; f < k; ++f) {
        if (is_pivot[f]) continue;
        RatVec sol(k);
        sol[f] = 1;
        for (std::size_t i = r; i-- > 0;) {
            const std::size_t p = pivot_col[i];
            if (p >= f) continue;
            Rat acc = 0;
            for (std::size_t j = p + 1; j <= f; ++j)
                if (sol[j] != 0 && a(i, j) != 0) acc += Rat(a(i, j)) * sol[j];
            sol[p] = -acc / Rat(a(i, p));
        }
        Int den = 1;
        for (const auto& q : sol) den = lcm(den, Int(q.get_den()));
        basis.set_column(out, primitive_integer(to_integral(scale(Rat(den), sol))));
        ++out;
    }
    return basis;
}

} // namespace

std::vector<IntVec> cartan_dieudonne(const RationalIsometry& phi) {
    const IntMat& g = phi.lattice().gram();
    const std::size_t n = phi.rank();

    // The shrinking isometry is carried as an exact pair pn/pd (integer
    // matrix over a positive denominator, reduced by their common content
    // after every update), so all the linear algebra stays integral.
    Int pd = common_denominator(phi.matrix());
    IntMat pn = to_integral(phi.matrix() * Rat(pd));
    const IntMat target_n = pn;
    const Int target_d = pd;

    const auto reduce_pair = [&](IntMat& m, Int& d) {
        Int c = d;
        for (std::size_t i = 0; i < n && c != 1; ++i)
            for (std::size_t j = 0; j < n && c != 1; ++j) c = gcd(c, m(i, j));
        if (c > 1) {
            d = divexact(d, c);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = divexact(m(i, j), c);
        }
    };

    // (m, d) <- r_x * (m, d):  r_x m = m - (2/(x,x)) x ((Gx)^T m), so the
    // pair picks up a factor (x,x) top and bottom.
    const auto reflect_left = [&](const IntVec& x, IntMat& m, Int& d) {
        const Int s = inner_product(g, x, x);
        const IntVec gx = g * x;
        IntVec row(n);
        for (std::size_t j = 0; j < n; ++j) {
            Int acc = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (gx[i] != 0) acc += gx[i] * m(i, j);
            row[j] = acc;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) *= s;
                if (x[i] != 0 && row[j] != 0) m(i, j) -= 2 * x[i] * row[j];
            }
        d *= s;
        if (d < 0) {
            d = -d;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = -m(i, j);
        }
        reduce_pair(m, d);
    };

    const auto is_identity = [&](const IntMat& m, const Int& d) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i == j ? m(i, j) != d : m(i, j) != 0) return false;
        return true;
    };

    IntMat w_basis = IntMat::identity(n); // integer basis of the working subspace W
    std::vector<IntVec> out;

    while (!is_identity(pn, pd)) {
        ensure(w_basis.cols() > 0, "cartan_dieudonne: ran out of directions");
        const std::size_t k = w_basis.cols();
        // Columns pd*(psi - 1)(w_j), integral by construction.
        const IntMat m_diff = pn * w_basis - w_basis * pd;

        // The vector v whose orthogonal complement we descend into; chosen
        // fixed when possible, else so that one or two reflections make it
        // fixed.
        IntVec v;

        const IntMat fixed_coeff = fraction_free_kernel(m_diff);
        bool progressed = false;
        if (fixed_coeff.cols() > 0) {
            const IntMat fixed_basis = content_reduced_columns(w_basis * fixed_coeff);
            const IntMat fixed_gram = fixed_basis.transpose() * g * fixed_basis;
            if (auto c = anisotropic_coefficients(fixed_gram)) {
                v = fixed_basis * *c; // psi v = v, no reflection needed
                progressed = true;
            }
        }

        if (!progressed) {
            // Quadratic form c -> q(pd*(psi-1)(W c)) on coefficient space
            // (the pd^2 factor does not affect where it vanishes).
            const IntMat bform = m_diff.transpose() * g * m_diff;
            const IntMat wgram = w_basis.transpose() * g * w_basis;
            const auto aniso = anisotropic_coefficients(wgram);
            ensure(aniso.has_value(), "cartan_dieudonne: working space degenerate");

            if (auto moved = anisotropic_coefficients(bform)) {
                // Want both q(v) != 0 and q(psi v - v) != 0.  The two sparse
                // picks cover one condition each; a short pencil v1 + t*v2
                // always contains a simultaneous witness (each failure locus
                // is a polynomial in t of degree <= 2 that does not vanish
                // identically).
                IntVec c;
                if (eval_form(bform, *aniso) != 0) {
                    c = *aniso;
                } else if (eval_form(wgram, *moved) != 0) {
                    c = *moved;
                } else {
                    bool found = false;
                    for (Int t = 1; t <= 4 && !found; ++t) {
                        IntVec cand(aniso->size());
                        for (std::size_t i = 0; i < cand.size(); ++i)
                            cand[i] = (*aniso)[i] + t * (*moved)[i];
                        if (eval_form(wgram, cand) != 0 && eval_form(bform, cand) != 0) {
                            c = cand;
                            found = true;
                        }
                    }
                    ensure(found, "cartan_dieudonne: pencil search failed");
                }
                v = w_basis * c;
                // pd*(psi v - v) = pn v - pd v is integral already.
                const IntVec x = primitive_integer(add(pn * v, scale(-pd, v)));
                out.push_back(x);
                reflect_left(x, pn, pd); // now psi v = v
            } else {
                // q vanishes on the whole image of (psi - 1): no single
                // reflection can fix an anisotropic vector, but two can,
                // via -psi v.  Here q(psi v + v) = 4 q(v) != 0 automatically.
                v = w_basis * *aniso;
                const IntVec pv = pn * v; // pd * (psi v)
                const IntVec x1 = primitive_integer(pv);
                const IntVec x2 = primitive_integer(add(pv, scale(pd, v)));
                out.push_back(x1);
                out.push_back(x2);
                reflect_left(x1, pn, pd);
                reflect_left(x2, pn, pd);
            }
            ensure(pn * v == scale(pd, v),
                   "cartan_dieudonne: reduction failed to fix its vector");
        }

        // Descend into the orthogonal complement of v inside W.
        IntMat pairings(1, k);
        for (std::size_t j = 0; j < k; ++j)
            pairings(0, j) = inner_product(g, v, w_basis.column(j));
        const IntMat perp_coeff = fraction_free_kernel(pairings);
        ensure(perp_coeff.cols() + 1 == k,
               "cartan_dieudonne: orthogonal complement has wrong dimension");
        w_basis = content_reduced_columns(w_basis * perp_coeff);
    }

    ensure(out.size() <= n + 2, "cartan_dieudonne: decomposition too long");
    // Recompose right-to-left and compare with the input as cross products.
    IntMat qn = IntMat::identity(n);
    Int qd = 1;
    for (auto it = out.rbegin(); it != out.rend(); ++it) reflect_left(*it, qn, qd);
    bool same = true;
    for (std::size_t i = 0; i < n && same; ++i)
        for (std::size_t j = 0; j < n && same; ++j)
            if (qn(i, j) * target_d != target_n(i, j) * qd) same = false;
    ensure(same, "cartan_dieudonne: recomposition mismatch");
    return out;
}

// ---------------------------------------------------------------------------
// Moving a primitive vector into the first hyperbolic summand
// ---------------------------------------------------------------------------

namespace {

// Bezout witness: integer vector w supported on the block [lo, hi) with
// (y, w) = content of the functional (y, ·) restricted to that block.
IntVec block_pairing_witness(const IntMat& gram, const IntVec& y, std::size_t lo,
                             std::size_t hi) {
    const IntVec gy = gram * y;
    IntVec w(y.size());
    Int g = 0;
    for (std::size_t j = lo; j < hi; ++j) {
        if (gy[j] == 0) continue;
        if (g == 0) {
            // First nonzero entry: (y, e_j) = gy[j]; start with ±e_j.
            w[j] = gy[j] > 0 ? 1 : -1;
            g = abs(gy[j]);
            continue;
        }
        if (gy[j] % g == 0) continue;
        Int s, t;
        const Int g2 = gcdext(g, gy[j], s, t);
        for (std::size_t i = lo; i < j; ++i) w[i] *= s;
        w[j] = t;
        g = g2;
    }
    ensure(g != 0, "block_pairing_witness: functional vanishes on the block");
    return w;
}

} // namespace

RationalIsometry map_primitive_to_standard(const IntVec& y) {
    const Lattice lambda = standard_lattice(LatticeName::K3);
    const IntMat& g = lambda.gram();
    require(y.size() == k3_rank, "map_primitive_to_standard: vector has wrong length");
    require(is_primitive(lambda, y), "map_primitive_to_standard: vector must be primitive");

    const Int square_y = square(lambda, y);
    ensure(square_y % 2 == 0, "map_primitive_to_standard: odd square in an even lattice");
    const Int d = square_y / 2;
    IntVec target(k3_rank);
    target[0] = 1;
    target[1] = d;

    if (y == target) return RationalIsometry::identity(lambda);

    const IntVec e1 = unit_vector(k3_rank, 0), e2 = unit_vector(k3_rank, 1);
    const IntVec f1 = unit_vector(k3_rank, 2), f2 = unit_vector(k3_rank, 3);

    IntVec cur = y;
    IntMat acc = IntMat::identity(k3_rank);
    const auto apply = [&](const IntMat& m) {
        cur = m * cur;
        acc = m * acc;
    };
    const auto transvect = [&](const IntVec& f, const IntVec& w) {
        apply(transvection_matrix(g, f, w));
    };
    // The eight mixed transvections inside U₁ ⊕ U₂, by their effect on
    // cur = (a, b, c, c', ...):  each uses an isotropic basis vector of one
    // summand and a multiple of one from the other.
    const auto mv_b_from_c = [&](const Int& t) { transvect(e2, scale(t, f2)); };  // b -= t·c
    const auto mv_b_from_cp = [&](const Int& t) { transvect(e2, scale(t, f1)); }; // b -= t·c'
    const auto mv_cp_from_b = [&](const Int& t) { transvect(e1, scale(t, f2)); }; // c' += t·b
    const auto mv_c_from_b = [&](const Int& t) { transvect(e1, scale(t, f1)); };  // c += t·b
    const auto mv_c_from_a = [&](const Int& t) { transvect(f1, scale(t, e2)); };  // c -= t·a, b += t·c'

    // Swap / negate the first hyperbolic summand (both preserve the form).
    IntMat u1_swap = IntMat::identity(k3_rank);
    u1_swap(0, 0) = u1_swap(1, 1) = 0;
    u1_swap(0, 1) = u1_swap(1, 0) = 1;
    IntMat u1_negate = IntMat::identity(k3_rank);
    u1_negate(0, 0) = u1_negate(1, 1) = -1;

    const auto rest_is_zero = [&]() {
        for (std::size_t i = 4; i < k3_rank; ++i)
            if (cur[i] != 0) return false;
        return true;
    };

    // Stage 0: make the e2-coordinate nonzero so it can serve as the
    // Euclid accumulator.
    if (cur[1] == 0) {
        if (cur[2] != 0) {
            mv_b_from_c(1);
        } else if (cur[3] != 0) {
            mv_b_from_cp(1);
        } else if (!rest_is_zero()) {
            // Find a block vector pairing nontrivially with cur, then use
            // E(e2, ±w): the e2-coordinate becomes ∓(cur,w) − ½(w,w)a, and
            // the two signs cannot both give zero.
            const IntVec gy = g * cur;
            std::size_t j = 4;
            while (gy[j] == 0) ++j;
            const IntVec w = unit_vector(k3_rank, j);
            const IntMat try1 = transvection_matrix(g, e2, w);
            if ((try1 * cur)[1] != 0) {
                apply(try1);
            } else {
                IntVec wn = w;
                for (auto& x : wn) x = -x;
                apply(transvection_matrix(g, e2, wn));
            }
        } else {
            // cur is ±e1 (primitive, supported on e1 alone): swap the summand.
            apply(u1_swap);
        }
    }
    ensure(cur[1] != 0, "map_primitive_to_standard: failed to seed the accumulator");

    // Euclidean absorption of the second-summand coordinates into cur[1].
    // Each inner step either clears the coordinate or strictly shrinks
    // |cur[1]|, and cur[1] is never allowed to reach zero.
    const auto reduce_coordinate = [&](std::size_t which) {
        const bool is_c = which == 2;
        while (cur[which] != 0) {
            const Int t = -fdiv_q(cur[which], cur[1]);
            if (is_c)
                mv_c_from_b(t);
            else
                mv_cp_from_b(t);
            if (cur[which] == 0) break;
            Int q = fdiv_q(cur[1], cur[which]);
            if (q * cur[which] == cur[1]) q -= 1; // keep cur[1] nonzero
            if (q != 0) {
                if (is_c)
                    mv_b_from_c(q);
                else
                    mv_b_from_cp(q);
            }
        }
    };
    const auto absorb = [&]() {
        while (cur[2] != 0 || cur[3] != 0) {
            reduce_coordinate(2);
            reduce_coordinate(3); // may repollute cur[2], but only while |cur[1]| shrinks
        }
    };

    absorb();
    while (abs(cur[1]) != 1) {
        if (cur[0] % cur[1] != 0) {
            // Feed the e1-coordinate into the Euclid loop: с ← c − a with
            // the accumulator untouched (c' is zero here).
            mv_c_from_a(1);
            absorb();
        } else {
            // cur = a·e1 + b·e2 + m with b | a, c = c' = 0.  Primitivity
            // gives gcd(b, content(m)) = 1, so absorbing (y, w*) = content(m)
            // finishes the descent.  m = 0 would force |b| = 1 already.
            ensure(!rest_is_zero(), "map_primitive_to_standard: primitivity violated");
            const IntVec w = block_pairing_witness(g, cur, 4, k3_rank);
            transvect(f1, w); // c ← c − (m, w) = −content(m)
            absorb();
            ensure(abs(cur[1]) == 1, "map_primitive_to_standard: descent did not finish");
        }
    }

    // Clear the complement block, then normalise inside the first summand.
    if (!rest_is_zero()) {
        IntVec w(k3_rank);
        for (std::size_t i = 4; i < k3_rank; ++i) w[i] = -cur[1] * cur[i];
        transvect(e1, w); // block part ← m + b·w = 0
    }
    ensure(cur[2] == 0 && cur[3] == 0 && rest_is_zero(),
           "map_primitive_to_standard: residue outside the first summand");
    if (cur[1] < 0) apply(u1_negate);
    apply(u1_swap);

    ensure(cur == target, "map_primitive_to_standard: postcondition failed");
    return RationalIsometry(lambda, to_rational(acc));
}

bool is_signed(const RationalIsometry& phi) {
    require(phi.lattice().gram() == gram_k3(),
            "is_signed: defined for the rank-22 lattice only");
    // e+f in each hyperbolic summand spans a positive-definite 3-space.
    std::vector<IntVec> ref;
    for (std::size_t b = 0; b < 3; ++b) {
        IntVec v(k3_rank);
        v[2 * b] = 1;
        v[2 * b + 1] = 1;
        ref.push_back(v);
    }
    RatMat pairing(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const RatVec img = phi.apply(ref[i]);
        for (std::size_t j = 0; j < 3; ++j)
            pairing(i, j) = inner_product(phi.lattice().gram(), img, to_rational(ref[j]));
    }
    const Rat det = determinant(pairing);
    // A positive 3-space cannot map into the orthogonal complement of
    // another one, so the projection is nonsingular.
    ensure(det != 0, "is_signed: degenerate projection onto the positive 3-space");
    return det > 0;
}

RationalIsometry embed_U_isometry(const RationalIsometry& f) {
    require(f.lattice().gram() == gram_u(), "embed_U_isometry: input must live on U");
    RatMat m = to_rational(IntMat::identity(k3_rank));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = f.matrix()(i, j);
    return RationalIsometry(standard_lattice(LatticeName::K3), std::move(m));
}

} // namespace k3lat
