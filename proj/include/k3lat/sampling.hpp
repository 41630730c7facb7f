#pragma once

#include <random>
#include <utility>
#include <vector>

#include "k3lat/isometry.hpp"
#include "k3lat/matrix.hpp"

namespace k3lat {

// All randomness in the project flows through an explicitly seeded engine:
// callers pass the seed, so every run is reproducible.
using Rng = std::mt19937_64;

inline Int random_int(Rng& rng, long lo, long hi) {
    std::uniform_int_distribution<long> dist(lo, hi);
    return Int(dist(rng));
}

inline IntVec random_vector(Rng& rng, std::size_t dim, long bound) {
    IntVec v(dim);
    for (auto& x : v) x = random_int(rng, -bound, bound);
    return v;
}

inline IntVec random_nonzero_vector(Rng& rng, std::size_t dim, long bound) {
    for (;;) {
        IntVec v = random_vector(rng, dim, bound);
        for (const auto& x : v)
            if (x != 0) return v;
    }
}

inline IntVec random_primitive_vector(Rng& rng, std::size_t dim, long bound) {
    for (;;) {
        IntVec v = random_vector(rng, dim, bound);
        if (content(v) == 1) return v;
    }
}

inline IntMat random_matrix(Rng& rng, std::size_t rows, std::size_t cols, long bound) {
    IntMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_int(rng, -bound, bound);
    return m;
}

// Product of a few random elementary operations: always determinant +-1,
// with entries kept small by bounding the step count and multipliers.
inline IntMat random_unimodular(Rng& rng, std::size_t n, std::size_t steps = 8) {
    IntMat m = IntMat::identity(n);
    if (n < 2) return m;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t i = static_cast<std::size_t>(random_int(rng, 0, long(n) - 1).get_si());
        std::size_t j = static_cast<std::size_t>(random_int(rng, 0, long(n) - 2).get_si());
        if (j >= i) ++j;
        switch (random_int(rng, 0, 3).get_si()) {
            case 0:
                m.swap_rows(i, j);
                break;
            case 1:
                for (std::size_t k = 0; k < n; ++k) m(i, k) = -m(i, k);
                break;
            default: {
                const Int t = random_int(rng, -3, 3);
                for (std::size_t k = 0; k < n; ++k) m(i, k) += t * m(j, k);
                break;
            }
        }
    }
    return m;
}

// Random integral isometry of an even lattice: a product of reflections in
// vectors of square +-2 and (when the Gram matrix exposes a hyperbolic
// basis pair) Eichler transvections, optionally negated.  Raw matrices are
// accumulated and the result is validated once at the end.
inline RationalIsometry random_integral_isometry(Rng& rng, const Lattice& lattice,
                                                 std::size_t steps = 6) {
    const IntMat& g = lattice.gram();
    const std::size_t n = lattice.rank();
    std::vector<std::pair<std::size_t, std::size_t>> hyperbolic_pairs;
    for (std::size_t p = 0; p + 1 < n; ++p)
        if (g(p, p) == 0 && g(p + 1, p + 1) == 0 && g(p, p + 1) == 1)
            hyperbolic_pairs.emplace_back(p, p + 1);

    IntMat acc = IntMat::identity(n);
    std::size_t done = 0;
    for (std::size_t guard = 0; done < steps && guard < 64 * steps; ++guard) {
        const bool transvect = !hyperbolic_pairs.empty() && random_int(rng, 0, 1) == 1;
        if (transvect) {
            auto [p, q] = hyperbolic_pairs[static_cast<std::size_t>(
                random_int(rng, 0, long(hyperbolic_pairs.size()) - 1).get_si())];
            if (random_int(rng, 0, 1) == 1) std::swap(p, q);
            const IntVec f = unit_vector(n, p);
            IntVec w = random_vector(rng, n, 2);
            w[q] -= inner_product(g, w, f); // now w is orthogonal to f
            acc = transvection_matrix(g, f, w) * acc;
            ++done;
        } else {
            const IntVec x = random_nonzero_vector(rng, n, 2);
            const Int s = square(g, x);
            if (s != 2 && s != -2) continue;
            acc = to_integral(reflection_matrix(g, x)) * acc;
            ++done;
        }
    }
    if (random_int(rng, 0, 3) == 0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) acc(i, j) = -acc(i, j);
    return RationalIsometry(lattice, to_rational(acc));
}

inline RatMat random_rational_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                     long num_bound, long den_bound) {
    RatMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = make_rat(random_int(rng, -num_bound, num_bound),
                               random_int(rng, 1, den_bound));
    return m;
}

} // namespace k3lat
