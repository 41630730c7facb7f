#pragma once

#include <string>

#include "k3lat/matrix.hpp"

namespace k3lat {

// A lattice given by its Gram matrix in a fixed basis.  The constructor
// checks symmetry and nondegeneracy; vectors are integer (or rational)
// coordinate tuples of length rank().
class Lattice {
public:
    explicit Lattice(IntMat gram, std::string label = "");

    const IntMat& gram() const { return gram_; }
    const std::string& label() const { return label_; }
    std::size_t rank() const { return gram_.rows(); }
    bool is_even() const;

    bool operator==(const Lattice& o) const { return gram_ == o.gram_; }
    bool operator!=(const Lattice& o) const { return !(*this == o); }

private:
    IntMat gram_;
    std::string label_;
};

// Gram matrices of the standard even lattices, with a fixed basis layout
// that the rest of the project relies on.
//
//   gram_u():    hyperbolic plane U, basis e, f with (e,e)=(f,f)=0, (e,f)=1.
//   gram_e8():   positive definite E8 root lattice, Cartan matrix in the
//                Bourbaki node order (node 2 is the branch node attached
//                to node 4).
//   gram_k3():   U^3 + E8(-1)^2, rank 22, signature (3,19).  Hyperbolic
//                planes occupy coordinates {0,1}, {2,3}, {4,5}; the two
//                negative E8 blocks occupy {6..13} and {14..21}.
//   gram_mukai_lattice(): U^4 + E8(-1)^2, rank 24, signature (4,20).
IntMat gram_u();
IntMat gram_e8();
IntMat gram_k3();
IntMat gram_mukai_lattice();

inline constexpr std::size_t k3_rank = 22;

enum class LatticeName { U, E8, E8_minus, K3, Mukai };

Lattice standard_lattice(LatticeName name);

// Block-diagonal sum.
IntMat direct_sum(const IntMat& a, const IntMat& b);
Lattice direct_sum(const Lattice& a, const Lattice& b);

// Same bilinear form scaled by n.
IntMat rescale(const IntMat& gram, const Int& n);
Lattice rescale(const Lattice& lattice, const Int& n);

struct Signature {
    std::size_t plus = 0, minus = 0, zero = 0;
    bool operator==(const Signature&) const = default;
};

// Inertia of a symmetric integer matrix, computed by exact rational
// congruence diagonalisation (no floating point).  The Lattice overload
// is guaranteed nondegenerate, so its zero count is always 0.
Signature signature(const IntMat& gram);
Signature signature(const Lattice& lattice);

Int inner_product(const IntMat& gram, const IntVec& x, const IntVec& y);
Rat inner_product(const IntMat& gram, const RatVec& x, const RatVec& y);
Int square(const IntMat& gram, const IntVec& x);
Rat square(const IntMat& gram, const RatVec& x);
Int inner_product(const Lattice& lattice, const IntVec& x, const IntVec& y);
Rat inner_product(const Lattice& lattice, const RatVec& x, const RatVec& y);
Int square(const Lattice& lattice, const IntVec& x);
Rat square(const Lattice& lattice, const RatVec& x);

// A nonzero lattice vector is primitive when its coordinates have content
// 1, i.e. it is not a proper multiple of another lattice vector.  The zero
// vector is rejected.
bool is_primitive(const Lattice& lattice, const IntVec& v);

// div(y) = gcd of (y, w) over all lattice vectors w; equals the content of
// gram * y.  Rejects the zero vector.
Int divisibility(const Lattice& lattice, const IntVec& y);

// The vector e + d·f in U, primitive of square 2d.
IntVec u_vector_of_square(const Int& d);

// Standard basis vector, and embedding of a short vector into a larger
// space at a coordinate offset (zero elsewhere).
IntVec unit_vector(std::size_t dim, std::size_t i);
IntVec embed_at(const IntVec& v, std::size_t offset, std::size_t dim);

} // namespace k3lat
