#include <doctest.h>

#include <array>
#include <vector>

#include "k3lat/exactlinalg.hpp"
#include "k3lat/mukai.hpp"
#include "k3lat/sampling.hpp"

namespace k3lat {
namespace {

const Lattice& k3() {
    static const Lattice lam = standard_lattice(LatticeName::K3);
    return lam;
}

RatMat outer_product(const IntVec& a, const IntVec& b) {
    RatMat m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = Rat(a[i] * b[j]);
    return m;
}

MukaiVector random_mukai_vector(Rng& rng) {
    MukaiVector v;
    v.r = random_int(rng, -6, 6);
    v.c = random_vector(rng, 22, 5);
    v.s = random_int(rng, -6, 6);
    return v;
}

IntVec to_flat(const MukaiVector& v) {
    IntVec out(24);
    out[0] = v.r;
    for (std::size_t i = 0; i < 22; ++i) out[i + 1] = v.c[i];
    out[23] = v.s;
    return out;
}

} // namespace

TEST_SUITE("mukai") {

TEST_CASE("full-cohomology gram is even unimodular of signature (4,20)") {
    const IntMat g = mukai_gram();
    CHECK(g == g.transpose());
    CHECK(abs(determinant(g)) == 1);
    for (std::size_t i = 0; i < 24; ++i) CHECK(fdiv_r(g(i, i), 2) == 0);
    CHECK(signature(g) == Signature{4, 20, 0});
}

TEST_CASE("pairing matches the flat gram and the worked examples") {
    MukaiVector point;
    point.s = 1;
    MukaiVector structure;
    structure.r = 1;
    CHECK(mukai_pairing(point, structure) == -1);
    CHECK(mukai_pairing(structure, structure) == 0);
    CHECK(mukai_pairing(point, point) == 0);

    // (n, h, s) with (h,h) = 2ns is isotropic.
    for (const auto& [n, s] : std::vector<std::pair<Int, Int>>{{2, 1}, {3, 2}, {5, 4}}) {
        MukaiVector v;
        v.r = n;
        v.c = embed_at(u_vector_of_square(n * s), 0, 22);
        v.s = s;
        CHECK(mukai_pairing(v, v) == 0);
    }

    // Agreement with the rank-24 gram matrix on random vectors.
    Rng rng(11);
    const IntMat g = mukai_gram();
    for (int it = 0; it < 50; ++it) {
        const auto v = random_mukai_vector(rng);
        const auto w = random_mukai_vector(rng);
        CHECK(mukai_pairing(v, w) == inner_product(g, to_flat(v), to_flat(w)));
        CHECK(mukai_pairing(v, w) == mukai_pairing(w, v));
    }
}

TEST_CASE("exponential action: fixed points, series truncation, pairing") {
    Rng rng(23);
    MukaiVector point;
    point.s = 1;
    CHECK(exp_action(random_vector(rng, 22, 8), point) == point);

    const IntVec alpha = random_vector(rng, 22, 8);
    MukaiVector structure;
    structure.r = 1;
    const MukaiVector image = exp_action(alpha, structure);
    CHECK(image.r == 1);
    CHECK(image.c == alpha);
    CHECK(image.s == divexact(square(k3(), alpha), 2));

    // Pairing preservation on 500 random triples.
    for (int it = 0; it < 500; ++it) {
        const IntVec a = random_vector(rng, 22, 6);
        const auto v = random_mukai_vector(rng);
        const auto w = random_mukai_vector(rng);
        CHECK(mukai_pairing(exp_action(a, v), exp_action(a, w)) == mukai_pairing(v, w));
    }
}

TEST_CASE("exponential action is a homomorphism in the exponent") {
    Rng rng(31);
    for (int it = 0; it < 100; ++it) {
        const IntVec a = random_vector(rng, 22, 6);
        const IntVec b = random_vector(rng, 22, 6);
        const auto v = random_mukai_vector(rng);
        CHECK(exp_action(a, exp_action(b, v)) == exp_action(add(a, b), v));
        CHECK(exp_action(IntVec(22), v) == v);
    }
}

TEST_CASE("induced degree-2 map reads only the middle component") {
    // Gram-inverse kernel induces the identity.
    KunnethKernel diag;
    diag.m22 = inverse(to_rational(k3().gram()));
    CHECK(induced_h2_map(diag) == to_rational(IntMat::identity(22)));

    // Pure tensor: γ ↦ (γ, α)·β, checked on every basis vector.
    Rng rng(47);
    const IntVec alpha = random_vector(rng, 22, 5);
    const IntVec beta = random_vector(rng, 22, 5);
    KunnethKernel tensor;
    tensor.m22 = outer_product(alpha, beta);
    const RatMat ind = induced_h2_map(tensor);
    for (std::size_t i = 0; i < 22; ++i) {
        const IntVec gamma = unit_vector(22, i);
        const RatVec expected = to_rational(scale(inner_product(k3(), gamma, alpha), beta));
        CHECK(ind * to_rational(gamma) == expected);
    }

    // Scalar-only kernels act as zero on degree 2.
    CHECK(induced_h2_map(sqrt_todd_kernel()) == RatMat(22, 22));

    // Linear in the kernel.
    for (int it = 0; it < 20; ++it) {
        KunnethKernel z1, z2;
        z1.m22 = to_rational(random_matrix(rng, 22, 22, 4));
        z2.m22 = to_rational(random_matrix(rng, 22, 22, 4));
        CHECK(induced_h2_map(z1 + z2) == induced_h2_map(z1) + induced_h2_map(z2));
        CHECK(induced_h2_map(z1.scaled(make_rat(3, 7))) == induced_h2_map(z1) * make_rat(3, 7));
    }
}

TEST_CASE("square-root-of-Todd kernel has four unit scalars and nothing else") {
    const auto td = sqrt_todd_kernel();
    CHECK(td.s00 == 1);
    CHECK(td.s40 == 1);
    CHECK(td.s04 == 1);
    CHECK(td.s44 == 1);
    CHECK(td.m22 == RatMat(22, 22));
    CHECK(td.v20 == RatVec(22));
    CHECK(td.v02 == RatVec(22));
    CHECK(td.v42 == RatVec(22));
    CHECK(td.v24 == RatVec(22));
}

TEST_CASE("degree-4 kernel of a sheaf model splits by bidegree") {
    Rng rng(53);
    const IntMat c_mid = random_matrix(rng, 22, 22, 5);

    // Zero classes leave only the integral part.
    KunnethKernel plain;
    plain.m22 = to_rational(c_mid);
    CHECK(kappa_two(c_mid, IntVec(22), IntVec(22), 7) == plain);

    // A class of square 2ns puts −s on the (4,0) slot.
    const Int n = 4, s = 3;
    const IntVec alpha = embed_at(u_vector_of_square(n * s), 0, 22);
    const IntVec beta = random_vector(rng, 22, 5);
    const auto kern = kappa_two(c_mid, alpha, beta, n);
    CHECK(kern.s40 == Rat(-s));
    CHECK(kern.s04 == -Rat(square(k3(), beta)) * make_rat(1, 2 * n));

    // The mixed term sends γ to −(γ,α)β/n on top of the integral part.
    const RatMat diff = induced_h2_map(kern) - induced_h2_map(plain);
    for (std::size_t i = 0; i < 22; ++i) {
        const IntVec gamma = unit_vector(22, i);
        const Rat coeff = -Rat(inner_product(k3(), gamma, alpha)) * make_rat(1, n);
        CHECK(diff * to_rational(gamma) == scale(coeff, to_rational(beta)));
    }

    CHECK_THROWS_AS(kappa_two(c_mid, alpha, beta, 0), domain_error);
}

TEST_CASE("sheaf isometry domain is cyclic of the predicted order") {
    Rng rng(61);
    const IntVec x = unit_vector(22, 0);
    const IntVec y = embed_at(u_vector_of_square(3), 2, 22);

    const auto fixed = sheaf_isometry_domain(4, 1, 2, x, y, random_matrix(rng, 22, 22, 3));
    CHECK(fixed.index == 2);
    CHECK(fixed.elementary_divisors == IntVec{2});

    const auto full = sheaf_isometry_domain(6, 1, 1, x, y, random_matrix(rng, 22, 22, 3));
    CHECK(full.index == 6);
    CHECK(full.elementary_divisors == IntVec{6});

    // jk divisible by n: the map is integral.
    const auto integral = sheaf_isometry_domain(4, 2, 2, x, y, random_matrix(rng, 22, 22, 3));
    CHECK(integral.index == 1);
    CHECK(integral.elementary_divisors.empty());

    // The order n/gcd(jk, n) is independent of the integral part.
    for (const auto& [n2, k2, j2] : std::vector<std::array<Int, 3>>{
             {4, 1, 2}, {6, 1, 1}, {12, 2, 3}, {9, 3, 1}, {10, 7, 1}}) {
        const Int expected = divexact(n2, gcd(j2 * k2, n2));
        for (int it = 0; it < 20; ++it) {
            const IntVec xr = random_primitive_vector(rng, 22, 4);
            const auto q = sheaf_isometry_domain(n2, k2, j2, xr, y, random_matrix(rng, 22, 22, 3));
            CHECK(q.index == expected);
            CHECK(q.elementary_divisors.size() <= 1);
            if (expected > 1) CHECK(q.elementary_divisors == IntVec{expected});
        }
    }

    IntVec imprimitive(22);
    imprimitive[0] = 2;
    CHECK_THROWS_AS(sheaf_isometry_domain(4, 1, 1, imprimitive, y, IntMat(22, 22)), domain_error);
}

TEST_CASE("universal sheaf model carries one polarization onto the other") {
    const auto rep = verify_universal_example(3, 2);
    CHECK(rep.k == 2);
    CHECK(rep.psi_coefficient == 9);
    CHECK(rep.sends_h_to_h_hat);
    CHECK(rep.image_of_h == to_rational(rep.h_hat));
    CHECK(square(k3(), rep.h) == 12);
    // Degree-4 scalar slots: −s from the model plus n from the Todd factor,
    // then the overall sign.
    CHECK(rep.degree4.s40 == Rat(rep.s - rep.n));

    CHECK(verify_universal_example(2, 1).sends_h_to_h_hat);
    CHECK(verify_universal_example(1, 1).sends_h_to_h_hat);
    CHECK(verify_universal_example(5, 2, 3).sends_h_to_h_hat);

    // The opposite sign convention lands on the negative class.
    const auto flipped = verify_universal_example(3, 2, 1, KappaSign::plus);
    CHECK(!flipped.sends_h_to_h_hat);
    CHECK(flipped.image_of_h == to_rational(scale(Int(-1), flipped.h_hat)));

    for (Int n = 1; n <= 12; ++n) {
        for (Int s = 1; s <= 12; ++s) {
            if (gcd(n, s) != 1) continue;
            const auto r = verify_universal_example(n, s);
            CHECK(r.sends_h_to_h_hat);
            CHECK(r.k >= 1);
            CHECK(r.k <= n);
            CHECK(fdiv_r(r.s * r.k - 1, r.n) == 0);
        }
    }

    CHECK_THROWS_AS(verify_universal_example(4, 2), domain_error);
}

} // TEST_SUITE

} // namespace k3lat
