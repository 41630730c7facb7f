#pragma once

// Exact Chern-character calculus on a graded model of even cohomology.
//
// A GradedSeries stores the degree-2i component of a cohomology class in
// slot i as one exact rational; every class here is a polynomial in a
// single formal variable of degree 2, truncated at a fixed top slot.
// Bundles enter through their Chern roots (the splitting principle turned
// into the data structure): ch(F) = Σ_j e^{x_j} with rational roots x_j.
//
// The two square-type identities — for the alternating and the symmetric
// square — are NOT baked into the wedge/sym constructors below: those sum
// e^{x_i+x_j} over index pairs directly, so the closed forms
//   ch(∧²F) = (ch(F)² − r₂ ch(F)) / 2,
//   ch(Sym²F) = (ch(F)² + r₂ ch(F)) / 2
// stay independently checkable.  One published display of the first
// identity carries the r₂ term without the /2; the pair-sum definition
// used here decides the normalization unambiguously, and the tests pin it.

#include <cstddef>
#include <vector>

#include "k3lat/rational.hpp"

namespace k3lat {

// Slots 0..degree(); slot i models cohomology degree 2i.
struct GradedSeries {
    std::vector<Rat> c;

    GradedSeries() = default;
    explicit GradedSeries(std::size_t degree) : c(degree + 1) {}

    std::size_t degree() const { return c.size() - 1; }

    bool operator==(const GradedSeries&) const = default;

    GradedSeries operator+(const GradedSeries& o) const;
    GradedSeries operator-(const GradedSeries& o) const;
    // Truncated product: slot k = Σ_{i+j=k} a_i b_j.
    GradedSeries operator*(const GradedSeries& o) const;
    GradedSeries scaled(const Rat& t) const;
};

// A bundle modeled by its exact rational Chern roots.
struct RootBundle {
    std::vector<Rat> roots;

    std::size_t rank() const { return roots.size(); }
};

// A formal difference of bundles.
struct VirtualBundle {
    RootBundle plus;
    RootBundle minus;
};

// e^x truncated: slot i = x^i / i!.
GradedSeries exp_series(const Rat& x, std::size_t degree);

// ch(F) = Σ_j e^{x_j}: slot i = Σ_j x_j^i / i!.
GradedSeries ch_from_roots(const RootBundle& f, std::size_t degree);

// The grading automorphism: slot i is multiplied by 2^i.  Equals the Chern
// character of the bundle with all roots doubled.
GradedSeries r2(const GradedSeries& series);

// ch(∧²F) = Σ_{i<j} e^{x_i+x_j}, summed over root pairs directly.
GradedSeries wedge2_ch(const RootBundle& f, std::size_t degree);

// ch(Sym²F) = Σ_{i≤j} e^{x_i+x_j}, summed over root pairs directly.
GradedSeries sym2_ch(const RootBundle& f, std::size_t degree);

// ch(∧²([A]−[B])) = ch(∧²A) − ch(A)ch(B) + ch(Sym²B).
GradedSeries virtual_wedge2(const VirtualBundle& v, std::size_t degree);

// Recover the homogeneous components h_0..h_D from the iterates
// [u, r₂u, r₂²u, …] (D+1 series of top slot D): u_k = Σ_i 2^{ki} h_i is a
// Vandermonde system in the nodes 2^0..2^D, always invertible.  Component
// i of a consistent input is supported in slot i alone.
std::vector<GradedSeries> extract_graded(const std::vector<GradedSeries>& iterates);

} // namespace k3lat
