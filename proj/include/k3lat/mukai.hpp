#pragma once

// The full-cohomology lattice of a K3 surface and the calculus of
// Künneth-type correspondence kernels on a product of two such surfaces.
//
// A full-cohomology vector is written (r, c, s) with r the degree-0
// coefficient, c the rank-22 degree-2 part in the fixed coordinates of
// standard_lattice(LatticeName::K3), and s the degree-4 coefficient.  The
// pairing is the middle intersection form minus the two cross terms of the
// extreme degrees; it is even, unimodular, of signature (4, 20).
//
// A correspondence kernel lives in the even-bidegree part of the product:
// scalars in bidegrees (0,0), (4,0), (0,4), (4,4), one rank-22 vector for
// each bidegree with a single middle factor, and a 22×22 matrix for (2,2).
// Only the (2,2) component induces a map between the two degree-2 pieces;
// the induced map is what all the verification routines inspect.

#include <vector>

#include "k3lat/isometry.hpp"
#include "k3lat/lattices.hpp"

namespace k3lat {

// (r, c, s): degree-0, degree-2, degree-4 coefficients.
struct MukaiVector {
    Int r;
    IntVec c = IntVec(22);
    Int s;

    bool operator==(const MukaiVector&) const = default;
};

// Gram matrix of the rank-24 full-cohomology lattice in the coordinate
// order (r, c0..c21, s).
IntMat mukai_gram();

// −v.r·w.s − v.s·w.r + (v.c, w.c) on the rank-22 lattice.
Int mukai_pairing(const MukaiVector& v, const MukaiVector& w);

// Multiplication by the exponential of a degree-2 class α:
// (r, c, s) ↦ (r, c + rα, s + (c,α) + r(α,α)/2).  Integral because the
// rank-22 lattice is even; preserves mukai_pairing.
MukaiVector exp_action(const IntVec& alpha, const MukaiVector& v);

// Correspondence kernel with even bidegrees (p,q), p the degree on the
// first factor and q on the second.  Scalar components are named s{pq},
// vector components v{pq}, and the middle component m22.
struct KunnethKernel {
    Rat s00, s40, s04, s44;
    RatVec v20 = RatVec(22), v02 = RatVec(22);
    RatVec v42 = RatVec(22), v24 = RatVec(22);
    RatMat m22 = RatMat(22, 22);

    bool operator==(const KunnethKernel&) const = default;
    KunnethKernel operator+(const KunnethKernel& o) const;
    KunnethKernel operator-() const;
    KunnethKernel scaled(const Rat& t) const;
};

// The map between the degree-2 pieces induced by a kernel: γ on the first
// factor pairs into the (2,2) component, producing a class on the second
// factor.  In matrix form this is m22ᵀ · gram; no other component can
// land in degree 2, so none contributes.
RatMat induced_h2_map(const KunnethKernel& z);

// The degree-4 kernel C − (π₁*α + π₂*β)²/2n for a rank-n sheaf model whose
// integral degree-4 part is C ⊗ (2,2)-placed: components
//   (2,2) = C − α βᵀ/n,  (4,0) = −(α,α)/2n,  (0,4) = −(β,β)/2n.
KunnethKernel kappa_two(const IntMat& c_mid, const IntVec& alpha, const IntVec& beta,
                        const Int& n);

// The degree ≤ 8 kernel of the square-root-of-Todd product on a product of
// two K3 surfaces: 1 in bidegrees (0,0), (4,0), (0,4), (4,4), zero
// elsewhere.
KunnethKernel sqrt_todd_kernel();

// Integrality domain of the degree-2 map induced by kappa_two(C, kx, jy, n)
// for primitive x, y: the sublattice {γ : (γ,x) ≡ 0 mod n/gcd(jk,n)},
// reported as the elementary divisors and index of its quotient.  The
// result does not depend on the integral part C.
QuotientStructure sheaf_isometry_domain(const Int& n, const Int& k, const Int& j,
                                        const IntVec& x, const IntVec& y, const IntMat& c_mid);

// Which sign the correspondence kernel carries when it is turned into a
// degree-2 isometry; the two conventions differ by an overall negation.
enum class KappaSign { plus, minus };

// Worked verification of the rank-n moduli-space model with coprime n, s:
// both surfaces carry a polarization of square 2ns, the normalized sheaf
// has first Chern class with cross coefficient j on the dual side, and its
// degree-4 kernel must carry one polarization exactly onto the other.
struct UniversalExampleReport {
    Int n, s, j, k;           // parameters; k is the least inverse of s mod n
    IntVec h = IntVec(22);     // polarization on the first surface
    IntVec h_hat = IntVec(22); // polarization on the second surface
    Int psi_coefficient;       // 1 + 2(n−1)sj: degree-4 image coefficient
    KunnethKernel degree4;     // signed degree-4 kernel of the sheaf model
    RatVec image_of_h = RatVec(22);
    bool sends_h_to_h_hat = false;
};

UniversalExampleReport verify_universal_example(const Int& n, const Int& s, const Int& j = 1,
                                                KappaSign sign = KappaSign::minus);

} // namespace k3lat
