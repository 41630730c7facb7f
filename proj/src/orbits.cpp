#include "k3lat/orbits.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "k3lat/exactlinalg.hpp"

namespace k3lat {

namespace {

Int floor_rat(const Rat& q) { return fdiv_q(Int(q.get_num()), Int(q.get_den())); }

// Representative of q in [0, m) for a positive integer m.
Rat mod_interval(const Rat& q, const Int& m) {
    const Rat scaled = q / Rat(m);
    return q - Rat(m) * Rat(floor_rat(scaled));
}

IntVec make_primitive(IntVec v) {
    const Int c = content(v);
    ensure(c != 0, "make_primitive: zero vector");
    if (c > 1)
        for (auto& x : v) x = divexact(x, c);
    return v;
}

IntVec add_coords(const IntVec& x, const IntVec& y) {
    IntVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Finite quadratic modules
// ---------------------------------------------------------------------------

Int FiniteQuadraticModule::order() const {
    Int n = 1;
    for (const auto& d : elementary_divisors) n *= d;
    return n;
}

IntVec FiniteQuadraticModule::reduce(const IntVec& coords) const {
    require(coords.size() == elementary_divisors.size(), "module element has wrong length");
    IntVec out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        out[i] = fdiv_r(coords[i], elementary_divisors[i]);
    return out;
}

Int FiniteQuadraticModule::element_order(const IntVec& coords) const {
    require(coords.size() == elementary_divisors.size(), "module element has wrong length");
    Int ord = 1;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const Int& d = elementary_divisors[i];
        ord = lcm(ord, divexact(d, gcd(d, coords[i])));
    }
    return ord;
}

Rat FiniteQuadraticModule::q_value(const IntVec& coords) const {
    require(coords.size() == elementary_divisors.size(), "module element has wrong length");
    Rat acc = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] == 0) continue;
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (coords[j] != 0) acc += Rat(coords[i] * coords[j]) * lift_pairings(i, j);
    }
    return mod_interval(acc, 2);
}

Rat FiniteQuadraticModule::b_value(const IntVec& x, const IntVec& y) const {
    require(x.size() == elementary_divisors.size() && y.size() == elementary_divisors.size(),
            "module element has wrong length");
    Rat acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0) acc += Rat(x[i] * y[j]) * lift_pairings(i, j);
    }
    return mod_interval(acc, 1);
}

std::vector<IntVec> FiniteQuadraticModule::all_elements(const Int& size_cap) const {
    require(order() <= size_cap, "module order exceeds the size cap");
    std::vector<IntVec> out;
    IntVec cur(elementary_divisors.size());
    while (true) {
        out.push_back(cur);
        std::size_t i = cur.size();
        while (i > 0) {
            --i;
            cur[i] += 1;
            if (cur[i] < elementary_divisors[i]) break;
            cur[i] = 0;
            if (i == 0) return out;
        }
        if (cur.size() == 0) return out;
    }
}

FiniteQuadraticModule discriminant_module(const Lattice& lattice, const IntMat& sublattice_basis) {
    const std::size_t n = lattice.rank();
    require(lattice.is_even(), "discriminant_module: expects an even lattice");
    require(sublattice_basis.rows() == n && sublattice_basis.cols() == n,
            "discriminant_module: basis must be square of full rank");
    const IntMat gram_i = sublattice_basis.transpose() * lattice.gram() * sublattice_basis;
    require(determinant(gram_i) != 0, "discriminant_module: degenerate sublattice");

    const SnfDecomposition snf = smith_normal_form(gram_i);
    const RatMat dual = dual_basis(sublattice_basis, lattice.gram());

    FiniteQuadraticModule m;
    Int total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Int d = snf.divisor(i);
        total *= d;
        if (d > 1) {
            m.elementary_divisors.push_back(d);
            m.generator_lifts.push_back(dual * to_rational(snf.u.column(i)));
        }
    }
    ensure(total == abs(determinant(gram_i)), "discriminant_module: order mismatch");

    const std::size_t k = m.generator_lifts.size();
    m.lift_pairings = RatMat(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m.lift_pairings(i, j) = inner_product(lattice, m.generator_lifts[i], m.generator_lifts[j]);
    return m;
}

FiniteQuadraticModule u_discriminant_module(const Int& a, const Int& b) {
    require(a > 0 && b > 0 && gcd(a, b) == 1, "u_discriminant_module: expects positive coprime a, b");
    const Int n = a * b;
    FiniteQuadraticModule m;
    m.lift_pairings = RatMat(0, 0);
    if (n == 1) return m;
    m.elementary_divisors = IntVec{n, n};
    m.generator_lifts = {RatVec{make_rat(1, a), Rat(0)}, RatVec{Rat(0), make_rat(1, b)}};
    m.lift_pairings = RatMat(2, 2);
    m.lift_pairings(0, 1) = make_rat(1, n);
    m.lift_pairings(1, 0) = make_rat(1, n);
    return m;
}

// ---------------------------------------------------------------------------
// Subgroups and lagrangians
// ---------------------------------------------------------------------------

ModuleSubgroup subgroup_closure(const FiniteQuadraticModule& m, std::vector<IntVec> generators,
                                const Int& size_cap) {
    std::set<IntVec> seen;
    seen.insert(m.reduce(IntVec(m.elementary_divisors.size())));
    for (auto& g : generators) g = m.reduce(g);

    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& g : generators) {
            std::vector<IntVec> fresh;
            for (const auto& e : seen) {
                IntVec next = m.reduce(add_coords(e, g));
                if (!seen.count(next)) fresh.push_back(std::move(next));
            }
            for (auto& e : fresh) {
                seen.insert(std::move(e));
                grew = true;
            }
            require(Int(seen.size()) <= size_cap, "subgroup closure exceeds the size cap");
        }
    }

    ModuleSubgroup out;
    out.generators = std::move(generators);
    out.order = Int(seen.size());
    out.elements.assign(seen.begin(), seen.end());
    return out;
}

std::vector<ModuleSubgroup> enumerate_lagrangians(const FiniteQuadraticModule& m, const Int& n,
                                                  const Int& size_cap) {
    require(n >= 1, "enumerate_lagrangians: n must be positive");
    require(m.order() == n * n, "enumerate_lagrangians: module order is not n^2");

    std::map<std::vector<IntVec>, ModuleSubgroup> found;
    for (const auto& x : m.all_elements(size_cap)) {
        if (m.element_order(x) != n) continue;
        if (m.q_value(x) != 0) continue;
        std::vector<IntVec> elements;
        IntVec cur(m.elementary_divisors.size());
        for (Int k = 0; k < n; ++k) {
            elements.push_back(cur);
            cur = m.reduce(add_coords(cur, x));
        }
        std::sort(elements.begin(), elements.end());
        ensure(std::adjacent_find(elements.begin(), elements.end()) == elements.end(),
               "enumerate_lagrangians: generator order is wrong");
        if (found.count(elements)) continue;
        ModuleSubgroup sub;
        sub.generators = {x};
        sub.order = n;
        sub.elements = elements;
        found.emplace(std::move(elements), std::move(sub));
    }

    std::vector<ModuleSubgroup> out;
    out.reserve(found.size());
    for (auto& entry : found) out.push_back(std::move(entry.second));
    return out;
}

ModuleSubgroup lagrangian_from_pair(const FiniteQuadraticModule& m, const Int& a, const Int& b,
                                    const Int& c, const Int& d) {
    require(a > 0 && b > 0 && c > 0 && d > 0, "lagrangian_from_pair: entries must be positive");
    const Int n = a * b;
    require(c * d == n, "lagrangian_from_pair: pair products differ");
    require(gcd(a, b) == 1 && gcd(c, d) == 1, "lagrangian_from_pair: pairs must be coprime");

    if (n == 1) {
        require(m.elementary_divisors.empty(), "lagrangian_from_pair: module shape mismatch");
        ModuleSubgroup out;
        out.elements = {IntVec{}};
        return out;
    }

    require(m.elementary_divisors == IntVec{n, n}, "lagrangian_from_pair: module shape mismatch");
    require(m.q_value(IntVec{1, 0}) == 0 && m.q_value(IntVec{0, 1}) == 0 &&
                m.b_value(IntVec{1, 0}, IntVec{0, 1}) == make_rat(1, n),
            "lagrangian_from_pair: module does not have the scaling-plane shape");

    ModuleSubgroup out;
    out.generators = {m.reduce(IntVec{c, 0}), m.reduce(IntVec{0, d})};
    std::vector<IntVec> elements;
    for (Int i = 0; i * c < n; ++i)
        for (Int j = 0; j * d < n; ++j) elements.push_back(IntVec{i * c, j * d});
    std::sort(elements.begin(), elements.end());
    out.order = Int(elements.size());
    out.elements = std::move(elements);
    ensure(out.order == n, "lagrangian_from_pair: subgroup has wrong order");
    return out;
}

// ---------------------------------------------------------------------------
// Double orbits on the hyperbolic plane
// ---------------------------------------------------------------------------

RationalIsometry u_pair_isometry(const Int& a, const Int& b) {
    require(a > 0 && b > 0 && gcd(a, b) == 1, "u_pair_isometry: expects positive coprime a, b");
    RatMat m(2, 2);
    m(0, 0) = make_rat(a, b);
    m(1, 1) = make_rat(b, a);
    return RationalIsometry(standard_lattice(LatticeName::U), m);
}

UCanonicalPair canonical_cyclic_pair(const Int& n) {
    require(n >= 1, "canonical_cyclic_pair: n must be positive");
    if (n == 1) return UCanonicalPair{1, 1};

    // Prime-power factorization by trial division; every coprime ordered
    // factorization splits this list, so the most balanced admissible pair
    // is a minimum over the subsets.
    std::vector<Int> prime_powers;
    Int rest = n;
    auto strip = [&](const Int& p) {
        if (rest % p != 0) return;
        Int pe = 1;
        while (rest % p == 0) {
            pe *= p;
            rest = divexact(rest, p);
        }
        prime_powers.push_back(pe);
    };
    strip(2);
    strip(3);
    for (Int d = 5; d * d <= rest; d += 6) {
        strip(d);
        strip(d + 2);
    }
    if (rest > 1) prime_powers.push_back(rest);

    ensure(prime_powers.size() <= 63, "canonical_cyclic_pair: too many prime factors");
    UCanonicalPair best{n, 1};
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << prime_powers.size()); ++mask) {
        Int p = 1;
        for (std::size_t i = 0; i < prime_powers.size(); ++i)
            if (mask & (std::uint64_t(1) << i)) p *= prime_powers[i];
        const Int q = divexact(n, p);
        const Int hi = p >= q ? p : q;
        if (hi < best.a) best = UCanonicalPair{hi, divexact(n, hi)};
    }
    ensure(best.a >= best.b && best.a * best.b == n && gcd(best.a, best.b) == 1,
           "canonical_cyclic_pair: pair invariant failed");
    return best;
}

UOrbitDecomposition u_double_orbit_decompose(const RationalIsometry& f) {
    require(f.lattice().gram() == gram_u(), "u_double_orbit_decompose: expects the hyperbolic plane");
    const Lattice& u = f.lattice();
    const RationalIsometry ident = RationalIsometry::identity(u);
    const RationalIsometry swap_u(u, to_rational(IntMat{{0, 1}, {1, 0}}));
    const RationalIsometry neg_u(u, to_rational(IntMat{{-1, 0}, {0, -1}}));

    RationalIsometry post = ident;
    RationalIsometry pre = ident;
    RationalIsometry work = f;

    // Invariant: f == post ∘ work ∘ pre.  Any isometry of the plane is
    // diagonal or antidiagonal on the isotropic vectors, so one swap makes
    // it diagonal, a sign flip makes the scale positive, and conjugating by
    // the swap inverts a scale below 1.
    if (work.matrix()(0, 0) == 0) {
        work = swap_u * work;
        post = post * swap_u;
    }
    ensure(work.matrix()(0, 0) != 0, "u_double_orbit_decompose: isometry is neither diagonal nor antidiagonal");
    if (work.matrix()(0, 0) < 0) {
        work = neg_u * work;
        post = post * neg_u;
    }
    if (work.matrix()(0, 0) < 1) {
        work = (swap_u * work) * swap_u;
        post = post * swap_u;
        pre = swap_u * pre;
    }

    const Rat scale = work.matrix()(0, 0);
    UCanonicalPair pair{Int(scale.get_num()), Int(scale.get_den())};
    const RationalIsometry expected(u, u_pair_isometry(pair.a, pair.b).matrix());
    ensure(work == expected, "u_double_orbit_decompose: normalized isometry is not a scaling");
    ensure(f == (post * work) * pre, "u_double_orbit_decompose: witnesses do not recompose");
    return UOrbitDecomposition{post, pair, pre};
}

UCanonicalPair u_double_orbit_canonical(const RationalIsometry& f) {
    return u_double_orbit_decompose(f).pair;
}

// ---------------------------------------------------------------------------
// The congruence test and the double-orbit reduction on the rank-22 lattice
// ---------------------------------------------------------------------------

std::optional<Int> congruence_orbit_test(const Lattice& lattice, const IntVec& lambda1,
                                         const IntVec& lambda2, const Int& n) {
    require(n >= 1, "congruence_orbit_test: n must be positive");
    require(lattice.is_even(), "congruence_orbit_test: expects an even lattice");
    require(is_primitive(lattice, lambda1) && is_primitive(lattice, lambda2),
            "congruence_orbit_test: vectors must be primitive");
    const Int d1 = divexact(square(lattice, lambda1), 2);
    const Int d2 = divexact(square(lattice, lambda2), 2);
    for (Int k = 1; k <= n; ++k) {
        if (gcd(k, n) != 1) continue;
        if (fdiv_r(d1 - k * k * d2, n) == 0) return k;
    }
    return std::nullopt;
}

DoubleOrbitReduction double_orbit_reduce(const RationalIsometry& phi) {
    const Lattice& lam = phi.lattice();
    require(lam.gram() == gram_k3(), "double_orbit_reduce: expects the rank-22 lattice");
    const IntMat& g = lam.gram();
    const std::size_t rank = lam.rank();

    const auto type = cyclic_type(phi);
    require(type.has_value(), "double_orbit_reduce: isometry is not of cyclic type");
    const Int n = *type;

    if (n == 1) {
        ensure(phi.is_integral(), "double_orbit_reduce: trivial cyclic type but non-integral isometry");
        return DoubleOrbitReduction{phi, UCanonicalPair{1, 1}, RationalIsometry::identity(lam)};
    }

    // A generator x = y/n of I*/Λ, read off the Smith form of the pairing
    // matrix of I: the dual lattice I* has basis V⁻¹·D⁻¹, and the single
    // nontrivial invariant factor contributes the generating column.
    const IntMat basis_i = coinvariant_sublattice(phi);
    const IntMat pairing = basis_i.transpose() * g;
    const SnfDecomposition snf = smith_normal_form(pairing);
    for (std::size_t i = 0; i + 1 < rank; ++i)
        ensure(snf.divisor(i) == 1, "double_orbit_reduce: dual quotient is not cyclic");
    ensure(snf.divisor(rank - 1) == n, "double_orbit_reduce: dual quotient has wrong order");
    IntVec y = snf.vinv.column(rank - 1);

    // Shift x by an integral vector until y = n·x is primitive; the content
    // of y is coprime to n, so a small shift in one coordinate works.
    if (content(y) != 1) {
        ensure(gcd(content(y), n) == 1, "double_orbit_reduce: dual generator content divides n");
        bool fixed = false;
        for (std::size_t i = 0; i < rank && !fixed; ++i) {
            for (Int t = 1; t <= 64 && !fixed; ++t) {
                IntVec cand = y;
                cand[i] += n * t;
                if (content(cand) == 1) {
                    y = cand;
                    fixed = true;
                }
            }
        }
        ensure(fixed, "double_orbit_reduce: failed to make the dual generator primitive");
    }

    // Move y into the first hyperbolic plane.
    const RationalIsometry g1 = map_primitive_to_standard(y);
    const RationalIsometry g1i = g1.inverse();

    // φ(g1⁻¹(U^⊥)) is an integral unimodular sublattice; its orthogonal
    // complement is a copy of the hyperbolic plane.
    const RatMat moved = phi.matrix() * g1i.matrix();
    IntMat moved_perp(rank, rank - 2);
    for (std::size_t j = 2; j < rank; ++j) {
        const RatVec col = moved.column(j);
        ensure(is_integral(col), "double_orbit_reduce: moved complement is not integral");
        moved_perp.set_column(j - 2, to_integral(col));
    }
    const IntMat t_basis = integer_kernel(moved_perp.transpose() * g);
    ensure(t_basis.cols() == 2, "double_orbit_reduce: complement has wrong rank");
    const IntMat gt = t_basis.transpose() * g * t_basis;
    ensure(determinant(gt) == -1, "double_orbit_reduce: complement is not unimodular hyperbolic");

    // An isotropic basis vector of the complement: the binary form has
    // discriminant 1, so an exact rational root always exists.
    IntVec root(2);
    if (gt(0, 0) == 0) {
        root[0] = 1;
    } else {
        root[0] = 1 - gt(0, 1);
        root[1] = gt(0, 0);
    }
    const IntVec u1 = t_basis * make_primitive(root);
    ensure(square(lam, u1) == 0, "double_orbit_reduce: isotropic root is not isotropic");
    ensure(is_primitive(lam, u1), "double_orbit_reduce: isotropic root is imprimitive");

    // A partner with (u1, u2) = 1 and (u2, u2) = 0.
    Int s, t;
    const Int pg = gcdext(inner_product(lam, u1, t_basis.column(0)),
                          inner_product(lam, u1, t_basis.column(1)), s, t);
    ensure(pg == 1, "double_orbit_reduce: isotropic root does not pair unimodularly");
    const IntVec w = add(scale(s, t_basis.column(0)), scale(t, t_basis.column(1)));
    const IntVec u2 = add(w, scale(-divexact(square(lam, w), 2), u1));
    ensure(square(lam, u2) == 0 && inner_product(lam, u1, u2) == 1,
           "double_orbit_reduce: hyperbolic basis construction failed");

    // Carry (u1, u2) onto (e1, e2): first move u1 to e1, then push the
    // image of u2 down to e2 with a transvection fixing e1.
    const RationalIsometry h1 = map_primitive_to_standard(u1);
    const RatVec v2r = h1.apply(u2);
    ensure(is_integral(v2r), "double_orbit_reduce: moved partner is not integral");
    const IntVec v2 = to_integral(v2r);
    ensure(v2[1] == 1, "double_orbit_reduce: moved partner does not pair to one");
    IntVec w_t(rank);
    for (std::size_t i = 2; i < rank; ++i) w_t[i] = -v2[i];
    const RationalIsometry h2 = eichler_transvection(lam, unit_vector(rank, 0), w_t);
    const RationalIsometry h = h2 * h1;
    ensure(h.apply(u1) == to_rational(unit_vector(rank, 0)) &&
               h.apply(u2) == to_rational(unit_vector(rank, 1)),
           "double_orbit_reduce: hyperbolic plane was not carried to standard position");

    // ψ = h φ g1⁻¹ preserves both the plane and its complement; its
    // restriction to the complement is integral.
    const RationalIsometry psi = (h * phi) * g1i;
    const RatMat& pm = psi.matrix();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 2; j < rank; ++j)
            ensure(pm(i, j) == 0 && pm(j, i) == 0, "double_orbit_reduce: reduced isometry is not block diagonal");
    RatMat fm(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) fm(i, j) = pm(i, j);
    const RationalIsometry f_u(standard_lattice(LatticeName::U), fm);
    RatMat em = RatMat::identity(rank);
    for (std::size_t i = 2; i < rank; ++i)
        for (std::size_t j = 2; j < rank; ++j) em(i, j) = pm(i, j);
    const RationalIsometry psi2(lam, em);
    ensure(psi2.is_integral(), "double_orbit_reduce: complement restriction is not integral");
    ensure(psi == psi2 * embed_U_isometry(f_u), "double_orbit_reduce: block factorization mismatch");

    RationalIsometry left = h.inverse() * psi2;
    RationalIsometry right = g1;

    // Normalize the plane factor over the integral isometries of the plane.
    UOrbitDecomposition ud = u_double_orbit_decompose(f_u);
    left = left * embed_U_isometry(ud.post);
    right = embed_U_isometry(ud.pre) * right;
    UCanonicalPair pair = ud.pair;
    ensure(pair.a * pair.b == n, "double_orbit_reduce: pair product differs from the cyclic type");

    // All coprime ordered factorizations of n land in one double orbit;
    // move the found pair to the canonical one.  The witness carries
    // λ = b e1 + a e2 to a vector congruent to the canonical λ mod nΛ, so
    // it identifies the two integrality sublattices, and complementary
    // lagrangians then force the remaining factor to be integral.
    const UCanonicalPair canon = canonical_cyclic_pair(n);
    if (pair != canon) {
        const IntVec e1v = unit_vector(rank, 0);
        const IntVec e2v = unit_vector(rank, 1);
        const IntVec lam_found = add(scale(pair.b, e1v), scale(pair.a, e2v));
        const IntVec lam_canon = add(scale(canon.b, e1v), scale(canon.a, e2v));

        const RationalIsometry g2 = map_primitive_to_standard(lam_canon);
        const RatVec alpha_r = g2.inverse().apply(unit_vector(rank, 2));
        ensure(is_integral(alpha_r), "double_orbit_reduce: congruence shift is not integral");
        const IntVec beta = add(lam_canon, scale(n, to_integral(alpha_r)));
        ensure(is_primitive(lam, beta) && square(lam, beta) == 2 * n,
               "double_orbit_reduce: congruence witness vector malformed");

        const RationalIsometry g_cong =
            map_primitive_to_standard(beta).inverse() * map_primitive_to_standard(lam_found);
        ensure(g_cong.is_integral(), "double_orbit_reduce: congruence isometry is not integral");
        ensure(g_cong.apply(lam_found) == to_rational(beta),
               "double_orbit_reduce: congruence isometry misses its target");

        // The two integrality sublattices match exactly.
        auto integrality_sublattice = [&](const IntVec& v) {
            const IntVec gv = g * v;
            RatMat row(1, rank);
            for (std::size_t j = 0; j < rank; ++j) row(0, j) = make_rat(gv[j], n);
            return sublattice_where_integral(row);
        };
        ensure(same_column_lattice(to_integral(g_cong.matrix()) * integrality_sublattice(lam_found),
                                   integrality_sublattice(lam_canon)),
               "double_orbit_reduce: congruence isometry does not carry the sublattice");

        const RationalIsometry ft_found = embed_U_isometry(u_pair_isometry(pair.a, pair.b));
        const RationalIsometry ft_canon = embed_U_isometry(u_pair_isometry(canon.a, canon.b));
        const RationalIsometry witness = (ft_found * g_cong.inverse()) * ft_canon.inverse();
        ensure(witness.is_integral(), "double_orbit_reduce: lagrangian complement witness is not integral");

        left = left * witness;
        right = g_cong * right;
        pair = canon;
    }

    ensure(left.is_integral() && right.is_integral(), "double_orbit_reduce: witnesses are not integral");
    ensure(phi == (left * embed_U_isometry(u_pair_isometry(pair.a, pair.b))) * right,
           "double_orbit_reduce: recomposition mismatch");
    return DoubleOrbitReduction{std::move(left), pair, std::move(right)};
}

} // namespace k3lat
