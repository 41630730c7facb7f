#pragma once

#include <optional>
#include <vector>

#include "k3lat/isometry.hpp"
#include "k3lat/lattices.hpp"
#include "k3lat/matrix.hpp"

namespace k3lat {

// The finite quadratic module I*/I of a finite-index sublattice I of an even
// lattice L.  The group is ⊕ Z/dᵢ with dᵢ | dᵢ₊₁ (trivial factors dropped);
// element coordinates are integer tuples against `generator_lifts`, which
// are explicit rational vectors in L⊗Q representing each cyclic generator.
// The residual quadratic form q(x) = (x,x) mod 2Z and its bilinear companion
// b(x,y) = (x,y) mod Z are evaluated through `lift_pairings`, the rational
// Gram matrix of the lifts, so q(x+y) − q(x) − q(y) ≡ 2 b(x,y) mod 2Z and
// q(kx) = k² q(x) hold identically.
struct FiniteQuadraticModule {
    IntVec elementary_divisors;
    std::vector<RatVec> generator_lifts;
    RatMat lift_pairings;

    Int order() const;

    // Coordinates reduced into [0, dᵢ).
    IntVec reduce(const IntVec& coords) const;

    // Additive order of the element with the given coordinates.
    Int element_order(const IntVec& coords) const;

    // q(x) represented in [0, 2);  b(x, y) represented in [0, 1).
    Rat q_value(const IntVec& coords) const;
    Rat b_value(const IntVec& x, const IntVec& y) const;

    // Every element, in lexicographically sorted coordinate order.  Refuses
    // to run when the group order exceeds `size_cap`.
    std::vector<IntVec> all_elements(const Int& size_cap) const;
};

// A subgroup of a finite quadratic module, held both by generators and by
// its full sorted element list (the canonical representation used for
// equality and intersection).
struct ModuleSubgroup {
    std::vector<IntVec> generators;
    Int order = 1;
    std::vector<IntVec> elements;

    bool operator==(const ModuleSubgroup& other) const { return elements == other.elements; }
    bool operator!=(const ModuleSubgroup& other) const { return !(*this == other); }
};

// Representative (a, b) of a double orbit of rational isometries of the
// hyperbolic plane: a ≥ b > 0, gcd(a, b) = 1, with (1, 1) for the integral
// orbit.  The represented isometry sends e1 ↦ (a/b) e1, e2 ↦ (b/a) e2.
struct UCanonicalPair {
    Int a = 1;
    Int b = 1;

    bool operator==(const UCanonicalPair& other) const { return a == other.a && b == other.b; }
    bool operator!=(const UCanonicalPair& other) const { return !(*this == other); }
};

// Witness form of the double-orbit normalization on the hyperbolic plane:
// f = post ∘ (scaling by pair) ∘ pre with post, pre integral on U.
struct UOrbitDecomposition {
    RationalIsometry post;
    UCanonicalPair pair;
    RationalIsometry pre;
};

// Witness form of the double-orbit reduction on the rank-22 lattice:
// φ = left ∘ embed_U_isometry(u_pair_isometry(pair)) ∘ right with
// left, right integral.
struct DoubleOrbitReduction {
    RationalIsometry left;
    UCanonicalPair pair;
    RationalIsometry right;
};

// I*/I for the sublattice I of L spanned by the columns of `sublattice_basis`
// (a square full-rank integer matrix; degenerate input is rejected).  The
// group order equals |det Gram(I)|.
FiniteQuadraticModule discriminant_module(const Lattice& lattice, const IntMat& sublattice_basis);

// The discriminant module of I_f inside U for the scaling isometry
// f(e1) = (a/b) e1, f(e2) = (b/a) e2 with gcd(a, b) = 1: the group
// (Z/n)² with n = ab and generators e1/a, e2/b in that order, on which
// q(x·e1/a + y·e2/b) = 2xy/n mod 2Z.
FiniteQuadraticModule u_discriminant_module(const Int& a, const Int& b);

// Subgroup generated by the given coordinate tuples, closed by addition.
// Fails fast when the closure would exceed `size_cap` elements.
ModuleSubgroup subgroup_closure(const FiniteQuadraticModule& m, std::vector<IntVec> generators,
                                const Int& size_cap = 4096);

// All lagrangian subgroups — cyclic of order n with q vanishing identically —
// of a module of order n².  Exhaustive over generator candidates; refuses to
// run when the module order exceeds `size_cap`.
std::vector<ModuleSubgroup> enumerate_lagrangians(const FiniteQuadraticModule& m, const Int& n,
                                                  const Int& size_cap = 4096);

// The lagrangian L_(c,d) = ⟨(c/a) e1, (d/b) e2⟩ of the module of
// u_discriminant_module(a, b), for a coprime ordered factorization cd = ab.
// The module argument must carry that module's generator shape: two
// isotropic generators of order n = ab pairing to 1/n.
ModuleSubgroup lagrangian_from_pair(const FiniteQuadraticModule& m, const Int& a, const Int& b,
                                    const Int& c, const Int& d);

// The scaling isometry e1 ↦ (a/b) e1, e2 ↦ (b/a) e2 on the standard
// hyperbolic plane, for positive coprime a, b.
RationalIsometry u_pair_isometry(const Int& a, const Int& b);

// The canonical coprime ordered factorization n = a·b with a ≥ b and
// gcd(a, b) = 1, choosing the factorization with the smallest possible a
// (the most balanced one); (1, 1) for n = 1.
UCanonicalPair canonical_cyclic_pair(const Int& n);

// Normalize a rational isometry of the hyperbolic plane over its integral
// isometry group on both sides, returning the pair together with the two
// integral witnesses.
UOrbitDecomposition u_double_orbit_decompose(const RationalIsometry& f);

// The double-orbit invariant (a, b) of a rational isometry of the
// hyperbolic plane: a ≥ b > 0, gcd(a, b) = 1, a·b its cyclic type.
UCanonicalPair u_double_orbit_canonical(const RationalIsometry& f);

// For primitive λ1, λ2 in the rank-22 lattice, the least k in [1, n] with
// gcd(k, n) = 1 and (λ1,λ1)/2 ≡ k²(λ2,λ2)/2 mod n, if one exists: the
// arithmetic criterion deciding whether an integral isometry carries
// (Λ + Z·λ1/n)* onto (Λ + Z·λ2/n)*.  Only the witness k is produced, not
// the isometry.
std::optional<Int> congruence_orbit_test(const Lattice& lattice, const IntVec& lambda1,
                                         const IntVec& lambda2, const Int& n);

// Constructive double-orbit reduction on the rank-22 lattice: for φ of
// n-cyclic type, produce integral left, right and the canonical pair (a, b)
// with ab = n such that φ = left ∘ embed_U_isometry(u_pair_isometry(a, b))
// ∘ right, recomposition checked exactly.  Rejects φ that is not of cyclic
// type.
DoubleOrbitReduction double_orbit_reduce(const RationalIsometry& phi);

} // namespace k3lat
