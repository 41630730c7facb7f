#include <doctest.h>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "k3lat/orbits.hpp"
#include "k3lat/sampling.hpp"

namespace k3lat {
namespace {

int distinct_prime_factors(Int n) {
    int w = 0;
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        ++w;
        while (n % p == 0) n = divexact(n, p);
    }
    if (n > 1) ++w;
    return w;
}

Rat reduce_mod(Rat q, const Int& m) {
    while (q < 0) q += Rat(m);
    while (q >= Rat(m)) q -= Rat(m);
    return q;
}

RationalIsometry embedded_pair(const Int& a, const Int& b) {
    return embed_U_isometry(u_pair_isometry(a, b));
}

// All four integral isometries of the hyperbolic plane.
std::vector<RationalIsometry> plane_isometry_group() {
    const Lattice u = standard_lattice(LatticeName::U);
    return {RationalIsometry(u, to_rational(IntMat{{1, 0}, {0, 1}})),
            RationalIsometry(u, to_rational(IntMat{{-1, 0}, {0, -1}})),
            RationalIsometry(u, to_rational(IntMat{{0, 1}, {1, 0}})),
            RationalIsometry(u, to_rational(IntMat{{0, -1}, {-1, 0}}))};
}

// Isomorphism-insensitive fingerprint: the multiset of (additive order,
// quadratic value) over all elements.
std::multiset<std::pair<Int, Rat>> module_fingerprint(const FiniteQuadraticModule& m) {
    std::multiset<std::pair<Int, Rat>> out;
    for (const auto& x : m.all_elements(4096)) out.emplace(m.element_order(x), m.q_value(x));
    return out;
}

std::vector<IntVec> sorted_intersection(const ModuleSubgroup& a, const ModuleSubgroup& b) {
    std::vector<IntVec> out;
    std::set_intersection(a.elements.begin(), a.elements.end(), b.elements.begin(),
                          b.elements.end(), std::back_inserter(out));
    return out;
}

} // namespace

TEST_SUITE("orbits") {

TEST_CASE("hyperbolic plane discriminant module has the closed form") {
    const auto trivial = u_discriminant_module(1, 1);
    CHECK(trivial.order() == 1);
    CHECK(trivial.elementary_divisors.empty());
    CHECK(trivial.all_elements(10) == std::vector<IntVec>{IntVec{}});
    CHECK(trivial.q_value(IntVec{}) == 0);

    for (const auto& [a, b] : std::vector<std::pair<Int, Int>>{{2, 1}, {3, 2}, {5, 2}, {7, 3}}) {
        const Int n = a * b;
        const auto m = u_discriminant_module(a, b);
        CHECK(m.elementary_divisors == IntVec{n, n});
        CHECK(m.order() == n * n);
        for (Int x = 0; x < n; ++x) {
            for (Int y = 0; y < n; ++y) {
                const IntVec e{x, y};
                CHECK(m.q_value(e) == reduce_mod(make_rat(2 * x * y, n), 2));
                CHECK(m.element_order(e) ==
                      lcm(divexact(n, gcd(n, x)), divexact(n, gcd(n, y))));
            }
        }
        CHECK(m.b_value(IntVec{1, 0}, IntVec{0, 1}) == make_rat(1, n));
        CHECK(m.b_value(IntVec{1, 0}, IntVec{1, 0}) == 0);
    }
}

TEST_CASE("discriminant module of a scaled plane matches hand computation") {
    const Lattice u2 = rescale(standard_lattice(LatticeName::U), 2);
    const auto m = discriminant_module(u2, IntMat::identity(2));
    CHECK(m.elementary_divisors == IntVec{2, 2});
    // Quadratic values on (Z/2)^2: zero except on the sum of the generators.
    CHECK(m.q_value(IntVec{0, 0}) == 0);
    CHECK(m.q_value(IntVec{1, 0}) == 0);
    CHECK(m.q_value(IntVec{0, 1}) == 0);
    CHECK(m.q_value(IntVec{1, 1}) == 1);
    CHECK(m.b_value(IntVec{1, 0}, IntVec{0, 1}) == make_rat(1, 2));
}

TEST_CASE("discriminant module agrees with the closed form on plane sublattices") {
    const Lattice u = standard_lattice(LatticeName::U);
    for (const auto& [a, b] : std::vector<std::pair<Int, Int>>{{2, 1}, {3, 2}, {4, 3}, {12, 5}}) {
        const auto closed = u_discriminant_module(a, b);
        const auto computed = discriminant_module(u, IntMat{{b, 0}, {0, a}});
        CHECK(computed.elementary_divisors == closed.elementary_divisors);
        CHECK(computed.order() == closed.order());
        CHECK(module_fingerprint(computed) == module_fingerprint(closed));
    }

    // A unimodular sublattice has trivial discriminant module.
    const auto full = discriminant_module(u, IntMat{{1, 3}, {0, 1}});
    CHECK(full.order() == 1);
    CHECK(full.elementary_divisors.empty());
}

TEST_CASE("coinvariant sublattice of a plane scaling has the plane module") {
    const auto phi = embedded_pair(3, 2);
    const auto basis = coinvariant_sublattice(phi);
    const auto m = discriminant_module(phi.lattice(), basis);
    CHECK(m.elementary_divisors == IntVec{6, 6});
    CHECK(module_fingerprint(m) == module_fingerprint(u_discriminant_module(3, 2)));
}

TEST_CASE("subgroup closure computes orders and respects the cap") {
    const auto m = u_discriminant_module(3, 2);
    CHECK(subgroup_closure(m, {}).order == 1);
    CHECK(subgroup_closure(m, {IntVec{2, 0}}).order == 3);
    CHECK(subgroup_closure(m, {IntVec{1, 0}, IntVec{0, 1}}).order == 36);
    CHECK(subgroup_closure(m, {IntVec{1, 5}}).order == 6);
    CHECK_THROWS_AS(subgroup_closure(m, {IntVec{1, 0}, IntVec{0, 1}}, 10), domain_error);
    CHECK_THROWS_AS(m.all_elements(10), domain_error);
}

TEST_CASE("lagrangian count is two to the number of distinct primes") {
    for (Int n = 1; n <= 30; ++n) {
        const auto pair = canonical_cyclic_pair(n);
        const auto m = u_discriminant_module(pair.a, pair.b);
        const auto found = enumerate_lagrangians(m, n);
        const Int expected = Int(1) << distinct_prime_factors(n);
        CHECK(Int(found.size()) == expected);
    }
}

TEST_CASE("lagrangians are exactly the coprime ordered factorizations") {
    const Int n = 12;
    const auto m = u_discriminant_module(4, 3);
    const auto found = enumerate_lagrangians(m, n);
    const std::vector<std::pair<Int, Int>> pairs{{1, 12}, {3, 4}, {4, 3}, {12, 1}};
    CHECK(found.size() == pairs.size());
    for (const auto& [c, d] : pairs) {
        const auto built = lagrangian_from_pair(m, 4, 3, c, d);
        CHECK(built.order == n);
        CHECK(std::count(found.begin(), found.end(), built) == 1);
        for (const auto& x : built.elements) CHECK(m.q_value(x) == 0);
    }
}

TEST_CASE("lagrangian intersections follow the lcm rule") {
    const Int n = 12;
    const auto m = u_discriminant_module(4, 3);
    const std::vector<std::pair<Int, Int>> pairs{{1, 12}, {3, 4}, {4, 3}, {12, 1}};
    for (const auto& [c1, d1] : pairs) {
        for (const auto& [c2, d2] : pairs) {
            const auto l1 = lagrangian_from_pair(m, 4, 3, c1, d1);
            const auto l2 = lagrangian_from_pair(m, 4, 3, c2, d2);
            const auto meet = sorted_intersection(l1, l2);
            const auto expected =
                subgroup_closure(m, {IntVec{lcm(c1, c2), 0}, IntVec{0, lcm(d1, d2)}});
            CHECK(meet == expected.elements);
            // Complementary exactly when the factorizations are swapped.
            CHECK((meet.size() == 1) == (c1 == d2 && d1 == c2));
        }
    }
}

TEST_CASE("module shape validation rejects mismatched input") {
    const auto m = u_discriminant_module(4, 3);
    CHECK_THROWS_AS(lagrangian_from_pair(m, 4, 3, 2, 6), domain_error);   // not coprime
    CHECK_THROWS_AS(lagrangian_from_pair(m, 4, 3, 5, 2), domain_error);   // wrong product
    CHECK_THROWS_AS(lagrangian_from_pair(m, 2, 3, 6, 1), domain_error);   // wrong module
    // Right divisors but non-isotropic generators: q(g_i) = 1/2 on A1 + A1.
    const auto roots = discriminant_module(Lattice(IntMat{{2, 0}, {0, 2}}), IntMat::identity(2));
    REQUIRE(roots.elementary_divisors == IntVec{2, 2});
    CHECK_THROWS_AS(lagrangian_from_pair(roots, 2, 1, 2, 1), domain_error);
}

TEST_CASE("canonical pair picks the most balanced coprime factorization") {
    CHECK(canonical_cyclic_pair(1) == UCanonicalPair{1, 1});
    CHECK(canonical_cyclic_pair(2) == UCanonicalPair{2, 1});
    CHECK(canonical_cyclic_pair(6) == UCanonicalPair{3, 2});
    CHECK(canonical_cyclic_pair(8) == UCanonicalPair{8, 1});
    CHECK(canonical_cyclic_pair(12) == UCanonicalPair{4, 3});
    CHECK(canonical_cyclic_pair(30) == UCanonicalPair{6, 5});
    CHECK(canonical_cyclic_pair(36) == UCanonicalPair{9, 4});
    CHECK(canonical_cyclic_pair(60) == UCanonicalPair{12, 5});
    CHECK(canonical_cyclic_pair(97) == UCanonicalPair{97, 1});
    CHECK(canonical_cyclic_pair(210) == UCanonicalPair{15, 14});
    CHECK_THROWS_AS(canonical_cyclic_pair(0), domain_error);
}

TEST_CASE("pair isometries have the expected cyclic type") {
    CHECK(cyclic_type(u_pair_isometry(1, 1)) == Int(1));
    CHECK(cyclic_type(u_pair_isometry(3, 2)) == Int(6));
    CHECK(cyclic_type(u_pair_isometry(12, 5)) == Int(60));
    CHECK(cyclic_type(embedded_pair(5, 2)) == Int(10));
    CHECK_THROWS_AS(u_pair_isometry(4, 2), domain_error);
}

TEST_CASE("plane double orbit invariants survive integral translations") {
    const auto group = plane_isometry_group();
    for (const auto& [a, b] : std::vector<std::pair<Int, Int>>{{1, 1}, {3, 2}, {7, 4}}) {
        const auto f = u_pair_isometry(a, b);
        for (const auto& sigma : group) {
            for (const auto& tau : group) {
                const auto twisted = (sigma * f) * tau;
                const auto dec = u_double_orbit_decompose(twisted);
                CHECK(dec.pair == UCanonicalPair{a, b});
                CHECK(dec.post.is_integral());
                CHECK(dec.pre.is_integral());
                CHECK((dec.post * u_pair_isometry(dec.pair.a, dec.pair.b)) * dec.pre == twisted);
            }
        }
    }
}

TEST_CASE("congruence orbit test finds scaling witnesses") {
    const Lattice lam = standard_lattice(LatticeName::K3);
    const auto vec = [](const Int& d) { return embed_at(u_vector_of_square(d), 0, 22); };

    // Same square: k = 1 for every modulus.
    CHECK(congruence_orbit_test(lam, vec(12), vec(12), 6) == Int(1));
    CHECK(congruence_orbit_test(lam, vec(7), vec(7), 1) == Int(1));
    // 1 = k^2 * 4 mod 5 holds for k = 2.
    CHECK(congruence_orbit_test(lam, vec(1), vec(4), 5) == Int(2));
    // 2 = k^2 mod 4 has no odd solution.
    CHECK(congruence_orbit_test(lam, vec(2), vec(1), 4) == std::nullopt);
    CHECK_THROWS_AS(congruence_orbit_test(lam, IntVec(22), vec(1), 2), domain_error);
    IntVec doubled(22);
    doubled[0] = 2;
    CHECK_THROWS_AS(congruence_orbit_test(lam, doubled, vec(1), 2), domain_error);
}

TEST_CASE("double orbit reduction handles plane scalings and reflections") {
    const Lattice lam = standard_lattice(LatticeName::K3);

    const auto direct = double_orbit_reduce(embedded_pair(3, 2));
    CHECK(direct.pair == UCanonicalPair{3, 2});
    CHECK((direct.left * embedded_pair(3, 2)) * direct.right == embedded_pair(3, 2));

    // A reflection in a vector of square 2d has cyclic type d.
    const IntVec x = embed_at(u_vector_of_square(5), 0, 22);
    const auto r = reflection(lam, x);
    REQUIRE(cyclic_type(r) == Int(5));
    const auto red = double_orbit_reduce(r);
    CHECK(red.pair == UCanonicalPair{5, 1});
    CHECK(red.left.is_integral());
    CHECK(red.right.is_integral());
    CHECK((red.left * embedded_pair(5, 1)) * red.right == r);

    // Integral isometries reduce to the trivial pair.
    Rng rng(41);
    const auto g = random_integral_isometry(rng, lam);
    const auto triv = double_orbit_reduce(g);
    CHECK(triv.pair == UCanonicalPair{1, 1});
    CHECK((triv.left * embedded_pair(1, 1)) * triv.right == g);

    // Two independent scaled planes: the quotient is not cyclic.
    RatMat block = to_rational(IntMat::identity(22));
    block(0, 0) = make_rat(3, 2);
    block(1, 1) = make_rat(2, 3);
    block(2, 2) = make_rat(5, 2);
    block(3, 3) = make_rat(2, 5);
    const RationalIsometry two_planes(lam, block);
    REQUIRE(!cyclic_type(two_planes).has_value());
    CHECK_THROWS_AS(double_orbit_reduce(two_planes), domain_error);
}

TEST_CASE("double orbit reduction recovers the canonical pair from twisted input") {
    const Lattice lam = standard_lattice(LatticeName::K3);
    Rng rng(7);
    for (const Int n : {2, 3, 6, 10, 12}) {
        const auto a = random_integral_isometry(rng, lam);
        const auto b = random_integral_isometry(rng, lam);
        // Built from the unbalanced factorization (n, 1); the reduction must
        // still land on the canonical pair.
        const auto phi = (a * embedded_pair(n, 1)) * b;
        REQUIRE(cyclic_type(phi) == n);
        const auto red = double_orbit_reduce(phi);
        CHECK(red.pair == canonical_cyclic_pair(n));
        CHECK(red.left.is_integral());
        CHECK(red.right.is_integral());
        CHECK((red.left * embedded_pair(red.pair.a, red.pair.b)) * red.right == phi);
    }
}

} // TEST_SUITE

} // namespace k3lat
