#pragma once

#include <optional>
#include <vector>

#include "k3lat/exactlinalg.hpp"
#include "k3lat/lattices.hpp"

namespace k3lat {

// A rational isometry of a fixed lattice: v ↦ M v with Mᵀ G M = G exactly.
// The public constructor verifies Gram preservation; compositions and
// inverses of already-verified isometries skip the (quadratic-form) check
// because the group laws guarantee it.
class RationalIsometry {
public:
    RationalIsometry(Lattice lattice, RatMat matrix);
    static RationalIsometry identity(Lattice lattice);

    const Lattice& lattice() const { return lattice_; }
    const RatMat& matrix() const { return m_; }
    std::size_t rank() const { return m_.rows(); }

    RatVec apply(const RatVec& v) const { return m_ * v; }
    RatVec apply(const IntVec& v) const { return m_ * to_rational(v); }

    // compose(inner): first apply inner, then this (matrix product this*inner).
    RationalIsometry compose(const RationalIsometry& inner) const;
    RationalIsometry inverse() const;
    bool is_integral() const { return k3lat::is_integral(m_); }

    bool operator==(const RationalIsometry& o) const { return m_ == o.m_; }
    bool operator!=(const RationalIsometry& o) const { return !(*this == o); }

private:
    struct trusted {};
    RationalIsometry(Lattice lattice, RatMat matrix, trusted)
        : lattice_(std::move(lattice)), m_(std::move(matrix)) {}

    Lattice lattice_;
    RatMat m_;
};

inline RationalIsometry operator*(const RationalIsometry& outer, const RationalIsometry& inner) {
    return outer.compose(inner);
}

// Elementary divisors of L / I_φ (only the nontrivial ones, ascending,
// each dividing the next) together with the index [L : I_φ].
struct QuotientStructure {
    IntVec elementary_divisors;
    Int index = 1;
    bool operator==(const QuotientStructure&) const = default;
};

// Reflection r_x : v ↦ v − (2(v,x)/(x,x)) x.  Requires x primitive and
// anisotropic; the result is integral exactly when (x,x) = ±2.
RationalIsometry reflection(const Lattice& lattice, const IntVec& x);

// Raw matrices of the two basic constructions, without the isometry
// wrapper (used where many of them are chained and a single final
// validation suffices).
RatMat reflection_matrix(const IntMat& gram, const IntVec& x);
IntMat transvection_matrix(const IntMat& gram, const IntVec& f, const IntVec& w);

// Basis (Hermite form, full rank) of I_φ = L ∩ φ⁻¹(L): the sublattice of
// vectors whose image under φ is still integral.
IntMat coinvariant_sublattice(const RationalIsometry& phi);

QuotientStructure quotient_structure(const RationalIsometry& phi);

// n when L/I_φ is cyclic of order n (n = 1 for integral isometries),
// std::nullopt when the quotient needs two or more generators.
std::optional<Int> cyclic_type(const RationalIsometry& phi);

// Reflection vectors x₁, …, x_k (primitive, anisotropic, ambient
// coordinates) whose left-to-right matrix product r_{x₁} r_{x₂} ⋯ r_{x_k}
// equals φ exactly; k ≤ rank + 2.  The identity yields an empty list.
std::vector<IntVec> cartan_dieudonne(const RationalIsometry& phi);

// Eichler transvection E(f, w) : v ↦ v + (v,f) w − (v,w) f − ½(w,w)(v,f) f
// for isotropic f and w ⊥ f, both in an even lattice.  Always an integral
// isometry of determinant +1 that fixes f.
RationalIsometry eichler_transvection(const Lattice& lattice, const IntVec& f, const IntVec& w);

// For a primitive y in the rank-22 lattice with (y,y) = 2d, produce an
// integral isometry g with g(y) = e1 + d·e2 in the first hyperbolic
// summand.  The postcondition is checked on every call.
RationalIsometry map_primitive_to_standard(const IntVec& y);

// Orientation test on the positive 3-space spanned by e+f in each
// hyperbolic summand: true iff det((φ(vᵢ), vⱼ)) > 0.
bool is_signed(const RationalIsometry& phi);

// Extend an isometry of U to the rank-22 lattice: acts as f on the first
// hyperbolic summand and as the identity on its complement.
RationalIsometry embed_U_isometry(const RationalIsometry& f);

} // namespace k3lat
