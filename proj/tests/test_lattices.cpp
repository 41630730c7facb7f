#include <doctest.h>

#include "k3lat/exactlinalg.hpp"
#include "k3lat/lattices.hpp"
#include "k3lat/sampling.hpp"
#include "oracles.hpp"

using namespace k3lat;

TEST_SUITE("lattices") {

TEST_CASE("lattice construction validates the Gram matrix") {
    CHECK_THROWS_AS(Lattice(IntMat{{0, 1}, {2, 0}}), domain_error);  // asymmetric
    CHECK_THROWS_AS(Lattice(IntMat{{1, 1}, {1, 1}}), domain_error);  // degenerate
    CHECK_THROWS_AS(Lattice(IntMat(2, 3)), domain_error);            // not square
    const Lattice u = standard_lattice(LatticeName::U);
    CHECK(u.rank() == 2);
    CHECK(u.is_even());
    CHECK_FALSE(Lattice(IntMat{{1}}).is_even());
}

TEST_CASE("hyperbolic plane") {
    const Lattice u = standard_lattice(LatticeName::U);
    CHECK(determinant(u.gram()) == -1);
    CHECK(signature(u) == Signature{1, 1, 0});
    CHECK(square(u, IntVec{1, 1}) == 2);
    CHECK(square(u, IntVec{1, -1}) == -2);
}

TEST_CASE("E8 is even unimodular definite, both signs") {
    const Lattice e8 = standard_lattice(LatticeName::E8);
    CHECK(determinant(e8.gram()) == 1);
    CHECK(e8.is_even());
    CHECK(signature(e8) == Signature{8, 0, 0});
    for (std::size_t i = 0; i < 8; ++i) CHECK(e8.gram()(i, i) == 2);

    const Lattice e8m = standard_lattice(LatticeName::E8_minus);
    CHECK(determinant(e8m.gram()) == 1);
    CHECK(signature(e8m) == Signature{0, 8, 0});
}

TEST_CASE("rank-22 lattice U^3 + E8(-1)^2") {
    const Lattice l = standard_lattice(LatticeName::K3);
    const IntMat& g = l.gram();
    REQUIRE(l.rank() == k3_rank);
    CHECK(l.is_even());
    CHECK(determinant(g) == -1);
    CHECK(signature(l) == Signature{3, 19, 0});
    // Hyperbolic blocks sit where the conventions say they do.
    for (std::size_t b = 0; b < 3; ++b) {
        CHECK(g(2 * b, 2 * b + 1) == 1);
        CHECK(g(2 * b, 2 * b) == 0);
        CHECK(g(2 * b + 1, 2 * b + 1) == 0);
    }
    CHECK(g(6, 6) == -2);
    CHECK(g(14, 14) == -2);
}

TEST_CASE("rank-24 lattice U^4 + E8(-1)^2") {
    const Lattice l = standard_lattice(LatticeName::Mukai);
    REQUIRE(l.rank() == 24);
    CHECK(l.is_even());
    CHECK(determinant(l.gram()) == 1);
    CHECK(signature(l) == Signature{4, 20, 0});
}

TEST_CASE("direct sums") {
    const Lattice u = standard_lattice(LatticeName::U);
    const Lattice uu = direct_sum(u, u);
    CHECK(uu.rank() == 4);
    CHECK(determinant(uu.gram()) == 1);
    // Summing U^3 and both negative E8 blocks reproduces the rank-22 Gram.
    const Lattice e8m = standard_lattice(LatticeName::E8_minus);
    const Lattice big = direct_sum(direct_sum(uu, u), direct_sum(e8m, e8m));
    CHECK(big.gram() == gram_k3());
    // Zero-rank summand is the identity for the sum.
    const Lattice trivial{IntMat(0, 0)};
    CHECK(direct_sum(u, trivial).gram() == u.gram());
}

TEST_CASE("signature is a congruence invariant") {
    Rng rng(808);
    const IntMat g = gram_k3();
    for (int iter = 0; iter < 10; ++iter) {
        const IntMat w = random_unimodular(rng, k3_rank, 20);
        CHECK(signature(w.transpose() * g * w) == Signature{3, 19, 0});
    }
    CHECK(signature(IntMat(3, 3)) == Signature{0, 0, 3});
    CHECK(signature(IntMat{{0, 1}, {1, 0}}) == Signature{1, 1, 0});
}

TEST_CASE("inner products are symmetric and bilinear") {
    Rng rng(321);
    const Lattice l = standard_lattice(LatticeName::K3);
    for (int iter = 0; iter < 30; ++iter) {
        const IntVec x = random_vector(rng, k3_rank, 7);
        const IntVec y = random_vector(rng, k3_rank, 7);
        const IntVec z = random_vector(rng, k3_rank, 7);
        CHECK(inner_product(l, x, y) == inner_product(l, y, x));
        CHECK(inner_product(l, add(x, y), z) ==
              inner_product(l, x, z) + inner_product(l, y, z));
        CHECK(inner_product(l, scale(Int(5), x), y) == 5 * inner_product(l, x, y));
    }
}

TEST_CASE("vectors of prescribed even square in U") {
    const Lattice u = standard_lattice(LatticeName::U);
    for (long d = -6; d <= 6; ++d) {
        const IntVec v = u_vector_of_square(d);
        CHECK(square(u, v) == 2 * d);
        CHECK(is_primitive(u, v));
    }
    CHECK(u_vector_of_square(0) == IntVec{1, 0});
}

TEST_CASE("primitivity and divisibility") {
    const Lattice u = standard_lattice(LatticeName::U);
    CHECK(is_primitive(u, IntVec{2, 3}));
    CHECK_FALSE(is_primitive(u, IntVec{2, 4}));
    CHECK_THROWS_AS(is_primitive(u, IntVec{0, 0}), domain_error);

    CHECK(divisibility(u, IntVec{1, 0}) == 1);
    CHECK(divisibility(u, IntVec{3, 0}) == 3);
    CHECK(divisibility(u, IntVec{4, 6}) == 2);
    CHECK_THROWS_AS(divisibility(u, IntVec{0, 0}), domain_error);

    // div(y) divides (y, w) for sampled w, divides (y,y), scales linearly,
    // and equals 1 for primitive vectors of a unimodular lattice.
    Rng rng(1234);
    const Lattice l = standard_lattice(LatticeName::K3);
    for (int iter = 0; iter < 50; ++iter) {
        const IntVec v = random_nonzero_vector(rng, k3_rank, 5);
        const Int d = divisibility(l, v);
        CHECK(d > 0);
        for (int t = 0; t < 10; ++t) {
            const IntVec w = random_vector(rng, k3_rank, 6);
            CHECK(inner_product(l, v, w) % d == 0);
        }
        CHECK(square(l, v) % d == 0);
        CHECK(divisibility(l, scale(Int(3), v)) == 3 * d);
        // Unimodularity: primitive vectors pair onto all of Z.
        if (content(v) == 1) CHECK(d == 1);
    }
}

TEST_CASE("embedding helpers") {
    const IntVec v{5, -7};
    const IntVec e = embed_at(v, 2, 6);
    CHECK(e == IntVec{0, 0, 5, -7, 0, 0});
    CHECK(unit_vector(4, 2) == IntVec{0, 0, 1, 0});
    CHECK_THROWS_AS(unit_vector(2, 2), domain_error);
}

} // TEST_SUITE

