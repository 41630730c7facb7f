#include "k3lat/lattices.hpp"

#include <array>
#include <utility>

#include "k3lat/exactlinalg.hpp"

namespace k3lat {

Lattice::Lattice(IntMat gram, std::string label)
    : gram_(std::move(gram)), label_(std::move(label)) {
    require(gram_.rows() == gram_.cols(), "Lattice: Gram matrix not square");
    for (std::size_t i = 0; i < gram_.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(gram_(i, j) == gram_(j, i), "Lattice: Gram matrix not symmetric");
    require(determinant(gram_) != 0, "Lattice: degenerate Gram matrix");
}

bool Lattice::is_even() const {
    for (std::size_t i = 0; i < gram_.rows(); ++i)
        if (gram_(i, i) % 2 != 0) return false;
    return true;
}

IntMat gram_u() { return IntMat{{0, 1}, {1, 0}}; }

IntMat gram_e8() {
    IntMat g(8, 8);
    for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2;
    // Dynkin diagram edges, Bourbaki numbering (1-based nodes).
    constexpr std::array<std::pair<int, int>, 7> edges{
        {{1, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {2, 4}}};
    for (auto [a, b] : edges) {
        g(a - 1, b - 1) = -1;
        g(b - 1, a - 1) = -1;
    }
    return g;
}

IntMat direct_sum(const IntMat& a, const IntMat& b) {
    require(a.rows() == a.cols() && b.rows() == b.cols(), "direct_sum: blocks must be square");
    IntMat s(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) s(a.rows() + i, a.cols() + j) = b(i, j);
    return s;
}

Lattice direct_sum(const Lattice& a, const Lattice& b) {
    std::string label;
    if (!a.label().empty() && !b.label().empty()) label = a.label() + "+" + b.label();
    return Lattice(direct_sum(a.gram(), b.gram()), label);
}

IntMat rescale(const IntMat& gram, const Int& n) { return gram * n; }

Lattice rescale(const Lattice& lattice, const Int& n) {
    require(n != 0, "rescale: scale must be nonzero");
    return Lattice(rescale(lattice.gram(), n));
}

IntMat gram_k3() {
    const IntMat e8m = rescale(gram_e8(), -1);
    return direct_sum(direct_sum(direct_sum(gram_u(), gram_u()), direct_sum(gram_u(), e8m)), e8m);
}

IntMat gram_mukai_lattice() { return direct_sum(gram_u(), gram_k3()); }

Lattice standard_lattice(LatticeName name) {
    switch (name) {
        case LatticeName::U:
            return Lattice(gram_u(), "U");
        case LatticeName::E8:
            return Lattice(gram_e8(), "E8");
        case LatticeName::E8_minus:
            return Lattice(rescale(gram_e8(), -1), "E8(-1)");
        case LatticeName::K3:
            return Lattice(gram_k3(), "U^3+E8(-1)^2");
        case LatticeName::Mukai:
            return Lattice(gram_mukai_lattice(), "U^4+E8(-1)^2");
    }
    throw domain_error("standard_lattice: unknown name");
}

Signature signature(const IntMat& gram) {
    require(gram.rows() == gram.cols(), "signature: matrix not square");
    RatMat a = to_rational(gram);
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(gram(i, j) == gram(j, i), "signature: matrix not symmetric");

    Signature sig;
    for (std::size_t k = 0; k < n; ++k) {
        if (a(k, k) == 0) {
            // Prefer swapping in a later nonzero diagonal entry; otherwise
            // fold a nonzero off-diagonal partner into the pivot slot
            // (congruence by "row k += row j, col k += col j" turns the
            // zero diagonal into 2*a(k,j) because a(j,j) is zero too).
            std::size_t dj = n;
            for (std::size_t j = k + 1; j < n && dj == n; ++j)
                if (a(j, j) != 0) dj = j;
            if (dj != n) {
                a.swap_rows(k, dj);
                a.swap_cols(k, dj);
            } else {
                std::size_t oj = n;
                for (std::size_t j = k + 1; j < n && oj == n; ++j)
                    if (a(k, j) != 0) oj = j;
                if (oj == n) {
                    ++sig.zero; // row k is dead in the remaining block
                    continue;
                }
                for (std::size_t c = 0; c < n; ++c) a(k, c) += a(oj, c);
                for (std::size_t r = 0; r < n; ++r) a(r, k) += a(r, oj);
            }
        }
        const Rat piv = a(k, k);
        if (piv > 0)
            ++sig.plus;
        else
            ++sig.minus;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const Rat f = a(i, k) / piv;
            for (std::size_t c = 0; c < n; ++c) a(i, c) -= f * a(k, c);
            for (std::size_t r = 0; r < n; ++r) a(r, i) -= f * a(r, k);
        }
    }
    ensure(sig.plus + sig.minus + sig.zero == n, "signature: inertia count mismatch");
    return sig;
}

Signature signature(const Lattice& lattice) {
    const Signature s = signature(lattice.gram());
    ensure(s.zero == 0, "signature: nondegenerate lattice produced a zero count");
    return s;
}

Int inner_product(const IntMat& gram, const IntVec& x, const IntVec& y) {
    require(gram.rows() == x.size() && gram.cols() == y.size(), "inner_product: size mismatch");
    Int acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        Int row = 0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0) row += gram(i, j) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

Rat inner_product(const IntMat& gram, const RatVec& x, const RatVec& y) {
    require(gram.rows() == x.size() && gram.cols() == y.size(), "inner_product: size mismatch");
    Rat acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        Rat row = 0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0) row += Rat(gram(i, j)) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

Int square(const IntMat& gram, const IntVec& x) { return inner_product(gram, x, x); }
Rat square(const IntMat& gram, const RatVec& x) { return inner_product(gram, x, x); }

Int inner_product(const Lattice& lattice, const IntVec& x, const IntVec& y) {
    return inner_product(lattice.gram(), x, y);
}
Rat inner_product(const Lattice& lattice, const RatVec& x, const RatVec& y) {
    return inner_product(lattice.gram(), x, y);
}
Int square(const Lattice& lattice, const IntVec& x) { return square(lattice.gram(), x); }
Rat square(const Lattice& lattice, const RatVec& x) { return square(lattice.gram(), x); }

bool is_primitive(const Lattice& lattice, const IntVec& v) {
    require(v.size() == lattice.rank(), "is_primitive: size mismatch");
    const Int c = content(v);
    require(c != 0, "is_primitive: zero vector");
    return c == 1;
}

Int divisibility(const Lattice& lattice, const IntVec& y) {
    require(y.size() == lattice.rank(), "divisibility: size mismatch");
    IntVec gy(lattice.rank());
    for (std::size_t i = 0; i < lattice.rank(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) gy[i] += lattice.gram()(i, j) * y[j];
    const Int c = content(gy);
    require(c != 0, "divisibility: zero vector");
    return c;
}

IntVec u_vector_of_square(const Int& d) { return IntVec{1, d}; }

IntVec unit_vector(std::size_t dim, std::size_t i) {
    require(i < dim, "unit_vector: index out of range");
    IntVec v(dim);
    v[i] = 1;
    return v;
}

IntVec embed_at(const IntVec& v, std::size_t offset, std::size_t dim) {
    require(offset + v.size() <= dim, "embed_at: vector does not fit");
    IntVec r(dim);
    for (std::size_t i = 0; i < v.size(); ++i) r[offset + i] = v[i];
    return r;
}

} // namespace k3lat
