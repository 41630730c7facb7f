#include <doctest.h>

#include <vector>

#include "k3lat/chern.hpp"
#include "k3lat/sampling.hpp"

namespace k3lat {
namespace {

Rat random_rat(Rng& rng) {
    return make_rat(random_int(rng, -7, 7), random_int(rng, 1, 7));
}

RootBundle random_bundle(Rng& rng, std::size_t rank) {
    RootBundle f;
    for (std::size_t i = 0; i < rank; ++i) f.roots.push_back(random_rat(rng));
    return f;
}

GradedSeries random_series(Rng& rng, std::size_t degree) {
    GradedSeries s(degree);
    for (auto& x : s.c) x = random_rat(rng);
    return s;
}

GradedSeries half(const GradedSeries& s) { return s.scaled(make_rat(1, 2)); }

} // namespace

TEST_SUITE("chern") {

TEST_CASE("chern character from roots matches hand expansions") {
    CHECK(ch_from_roots(RootBundle{}, 4) == GradedSeries(4));

    GradedSeries unit(3);
    unit.c[0] = 1;
    CHECK(ch_from_roots(RootBundle{{Rat(0)}}, 3) == unit);

    const auto pm = ch_from_roots(RootBundle{{Rat(1), Rat(-1)}}, 2);
    GradedSeries expected(2);
    expected.c[0] = 2;
    expected.c[2] = 1;
    CHECK(pm == expected);

    // Rank in slot 0 always.
    Rng rng(3);
    const auto f = random_bundle(rng, 5);
    CHECK(ch_from_roots(f, 6).c[0] == 5);
}

TEST_CASE("the grading automorphism doubles roots and is a ring map") {
    Rng rng(9);
    CHECK(r2(ch_from_roots(RootBundle{{Rat(1)}}, 8)) ==
          ch_from_roots(RootBundle{{Rat(2)}}, 8));

    // r2 twice multiplies slot i by 4^i.
    const auto s = random_series(rng, 7);
    const auto twice = r2(r2(s));
    Int power = 1;
    for (std::size_t i = 0; i <= 7; ++i) {
        const Rat scaled_slot = s.c[i] * Rat(power);
        CHECK(twice.c[i] == scaled_slot);
        power *= 4;
    }
    CHECK(r2(s).c[0] == s.c[0]);

    // Ring homomorphism on truncated series.
    for (int it = 0; it < 30; ++it) {
        const auto u = random_series(rng, 8);
        const auto v = random_series(rng, 8);
        CHECK(r2(u * v) == r2(u) * r2(v));
        CHECK(r2(u + v) == r2(u) + r2(v));
    }
}

TEST_CASE("alternating square: pair sum equals the halved closed form") {
    Rng rng(17);
    CHECK(wedge2_ch(RootBundle{{Rat(5)}}, 6) == GradedSeries(6));

    // Two roots: the single pair x+y.
    const Rat x = make_rat(2, 3), y = make_rat(-1, 2);
    CHECK(wedge2_ch(RootBundle{{x, y}}, 7) == ch_from_roots(RootBundle{{x + y}}, 7));

    // (ch² − r₂ch)/2 for all ranks ≤ 5 at degree 10, random rational roots.
    for (std::size_t rank = 0; rank <= 5; ++rank) {
        for (int it = 0; it < 8; ++it) {
            const auto f = random_bundle(rng, rank);
            const auto ch = ch_from_roots(f, 10);
            CHECK(wedge2_ch(f, 10) == half(ch * ch - r2(ch)));
        }
    }

    // The published display without the /2 on the r₂ term fails already
    // for the simplest nontrivial bundle.
    const auto f2 = random_bundle(rng, 2);
    const auto ch2 = ch_from_roots(f2, 4);
    CHECK(wedge2_ch(f2, 4) != half(ch2 * ch2) - r2(ch2));
}

TEST_CASE("symmetric square identity and the tensor-square decomposition") {
    Rng rng(29);
    const Rat x = make_rat(3, 4);
    CHECK(sym2_ch(RootBundle{{x}}, 6) == ch_from_roots(RootBundle{{x + x}}, 6));
    CHECK(sym2_ch(RootBundle{{Rat(0), Rat(0)}}, 5) ==
          ch_from_roots(RootBundle{{Rat(0), Rat(0), Rat(0)}}, 5));

    for (std::size_t rank = 0; rank <= 5; ++rank) {
        for (int it = 0; it < 8; ++it) {
            const auto f = random_bundle(rng, rank);
            const auto ch = ch_from_roots(f, 10);
            CHECK(sym2_ch(f, 10) == half(ch * ch + r2(ch)));
            // ∧² ⊕ Sym² = F ⊗ F.
            CHECK(wedge2_ch(f, 10) + sym2_ch(f, 10) == ch * ch);
        }
    }
}

TEST_CASE("virtual wedge square matches the closed form on differences") {
    Rng rng(37);
    const auto a = random_bundle(rng, 3);
    const auto b = random_bundle(rng, 2);

    CHECK(virtual_wedge2(VirtualBundle{a, RootBundle{}}, 6) == wedge2_ch(a, 6));
    CHECK(virtual_wedge2(VirtualBundle{RootBundle{}, b}, 6) == sym2_ch(b, 6));

    for (int it = 0; it < 20; ++it) {
        const auto plus = random_bundle(rng, static_cast<std::size_t>(random_int(rng, 0, 3).get_si()));
        const auto minus = random_bundle(rng, static_cast<std::size_t>(random_int(rng, 0, 3).get_si()));
        const auto chv = ch_from_roots(plus, 6) - ch_from_roots(minus, 6);
        CHECK(virtual_wedge2(VirtualBundle{plus, minus}, 6) == half(chv * chv - r2(chv)));
    }
}

TEST_CASE("vandermonde extraction recovers the homogeneous components") {
    // Trivial bundle: everything in slot 0.
    const auto flat = ch_from_roots(RootBundle{{Rat(0), Rat(0)}}, 3);
    std::vector<GradedSeries> iterates{flat, r2(flat), r2(r2(flat)), r2(r2(r2(flat)))};
    const auto parts = extract_graded(iterates);
    REQUIRE(parts.size() == 4);
    GradedSeries rank_only(3);
    rank_only.c[0] = 2;
    CHECK(parts[0] == rank_only);
    for (std::size_t i = 1; i < 4; ++i) CHECK(parts[i] == GradedSeries(3));

    // Single root 1: components 1, 1, 1/2, 1/6.
    const auto e1 = ch_from_roots(RootBundle{{Rat(1)}}, 3);
    const auto comps = extract_graded({e1, r2(e1), r2(r2(e1)), r2(r2(r2(e1)))});
    const std::vector<Rat> values{Rat(1), Rat(1), make_rat(1, 2), make_rat(1, 6)};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(comps[i].c[j] == (i == j ? values[i] : Rat(0)));
    }

    // Round trip on 100 random root sets: component i carries slot i of ch
    // and nothing else.
    Rng rng(43);
    for (int it = 0; it < 100; ++it) {
        const std::size_t degree = static_cast<std::size_t>(random_int(rng, 0, 6).get_si());
        const auto f = random_bundle(rng, static_cast<std::size_t>(random_int(rng, 0, 4).get_si()));
        const auto ch = ch_from_roots(f, degree);
        std::vector<GradedSeries> its{ch};
        for (std::size_t k = 0; k < degree; ++k) its.push_back(r2(its.back()));
        const auto out = extract_graded(its);
        REQUIRE(out.size() == degree + 1);
        for (std::size_t i = 0; i <= degree; ++i)
            for (std::size_t j = 0; j <= degree; ++j)
                CHECK(out[i].c[j] == (i == j ? ch.c[i] : Rat(0)));
    }

    CHECK_THROWS_AS(extract_graded({}), domain_error);
    CHECK_THROWS_AS(extract_graded({GradedSeries(2), GradedSeries(2)}), domain_error);
}

} // TEST_SUITE

} // namespace k3lat
