#pragma once

#include "k3lat/matrix.hpp"

namespace k3lat {

// Smith normal form  a = u * d * v  with u, v unimodular and d diagonal,
// d(0,0) | d(1,1) | ... , all diagonal entries >= 0.  vinv is kept alongside
// because several callers need columns of v^{-1} (kernels, mod-q kernels)
// and tracking it during the elimination is exact and cheap.
struct SnfDecomposition {
    IntMat u;    // rows x rows, unimodular
    IntMat d;    // rows x cols, diagonal
    IntMat v;    // cols x cols, unimodular
    IntMat vinv; // v^{-1}

    // Diagonal entry i, taken as 0 past the diagonal's end.
    Int divisor(std::size_t i) const {
        if (i < d.rows() && i < d.cols()) return d(i, i);
        return 0;
    }
};

SnfDecomposition smith_normal_form(const IntMat& a);

// Hermite normal form of the column lattice of `a`: the unique basis matrix
// with staircase pivots (scanning rows top to bottom), positive pivots, and
// entries left of each pivot reduced into [0, pivot).  Zero columns are
// dropped, so the result has exactly rank(a) columns.  Two integer matrices
// span the same column lattice iff their Hermite forms are identical.
IntMat hermite_normal_form(const IntMat& a);

bool same_column_lattice(const IntMat& a, const IntMat& b);

// Basis (as columns) of { x : a*x = 0 } over the integers.
IntMat integer_kernel(const IntMat& a);

// Integer matrix whose columns are a basis of the null space of `a` as a
// vector space over the rationals (clear denominators, take the integer
// kernel).
IntMat rational_kernel_basis(const RatMat& a);

// Exact Gaussian elimination.  `solve` requires a square nonsingular system.
Rat determinant(const RatMat& a);
Int determinant(const IntMat& a);
RatMat inverse(const RatMat& a);
RatVec solve(const RatMat& a, const RatVec& b);
RatMat solve(const RatMat& a, const RatMat& b);

// Basis of the intersection of two column lattices in the same ambient
// space, in Hermite normal form.
IntMat intersect_column_lattices(const IntMat& a, const IntMat& b);

// Dual basis of a sublattice: columns c_j with (c_j, b_i) = delta_ij under
// the ambient Gram matrix, expressed in ambient coordinates.  Computed as
// B (B^T G B)^{-1}; requires the restricted Gram form to be nonsingular.
RatMat dual_basis(const IntMat& basis, const IntMat& gram);

// The integers v with phi*v integral form a finite-index sublattice of
// Z^cols(phi); this returns its Hermite basis.  With phi = N/q in lowest
// common-denominator form, v qualifies iff N v = 0 mod q, a mod-q kernel
// read off the Smith form of N.
IntMat sublattice_where_integral(const RatMat& phi);

} // namespace k3lat
