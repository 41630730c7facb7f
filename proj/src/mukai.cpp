#include "k3lat/mukai.hpp"

#include "k3lat/exactlinalg.hpp"

namespace k3lat {

namespace {

const Lattice& k3_lattice() {
    static const Lattice lam = standard_lattice(LatticeName::K3);
    return lam;
}

RatMat outer(const IntVec& a, const IntVec& b) {
    RatMat m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = Rat(a[i] * b[j]);
    return m;
}

RatVec scaled_vec(const RatVec& v, const Rat& t) {
    RatVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * t;
    return out;
}

} // namespace

IntMat mukai_gram() {
    IntMat g(24, 24);
    const IntMat& mid = k3_lattice().gram();
    for (std::size_t i = 0; i < 22; ++i)
        for (std::size_t j = 0; j < 22; ++j) g(i + 1, j + 1) = mid(i, j);
    g(0, 23) = -1;
    g(23, 0) = -1;
    return g;
}

Int mukai_pairing(const MukaiVector& v, const MukaiVector& w) {
    require(v.c.size() == 22 && w.c.size() == 22, "mukai_pairing: degree-2 part must have length 22");
    return -v.r * w.s - v.s * w.r + inner_product(k3_lattice(), v.c, w.c);
}

MukaiVector exp_action(const IntVec& alpha, const MukaiVector& v) {
    require(alpha.size() == 22 && v.c.size() == 22, "exp_action: degree-2 part must have length 22");
    MukaiVector out;
    out.r = v.r;
    out.c = add(v.c, scale(v.r, alpha));
    out.s = v.s + inner_product(k3_lattice(), v.c, alpha) +
            v.r * divexact(square(k3_lattice(), alpha), 2);
    ensure(mukai_pairing(out, out) == mukai_pairing(v, v), "exp_action: pairing drifted");
    return out;
}

KunnethKernel KunnethKernel::operator+(const KunnethKernel& o) const {
    KunnethKernel out;
    out.s00 = s00 + o.s00;
    out.s40 = s40 + o.s40;
    out.s04 = s04 + o.s04;
    out.s44 = s44 + o.s44;
    out.v20 = add(v20, o.v20);
    out.v02 = add(v02, o.v02);
    out.v42 = add(v42, o.v42);
    out.v24 = add(v24, o.v24);
    out.m22 = m22 + o.m22;
    return out;
}

KunnethKernel KunnethKernel::operator-() const { return scaled(-1); }

KunnethKernel KunnethKernel::scaled(const Rat& t) const {
    KunnethKernel out;
    out.s00 = s00 * t;
    out.s40 = s40 * t;
    out.s04 = s04 * t;
    out.s44 = s44 * t;
    out.v20 = scaled_vec(v20, t);
    out.v02 = scaled_vec(v02, t);
    out.v42 = scaled_vec(v42, t);
    out.v24 = scaled_vec(v24, t);
    out.m22 = m22 * t;
    return out;
}

RatMat induced_h2_map(const KunnethKernel& z) {
    return z.m22.transpose() * to_rational(k3_lattice().gram());
}

KunnethKernel kappa_two(const IntMat& c_mid, const IntVec& alpha, const IntVec& beta,
                        const Int& n) {
    require(n >= 1, "kappa_two: rank must be positive");
    require(c_mid.rows() == 22 && c_mid.cols() == 22, "kappa_two: integral part must be 22x22");
    require(alpha.size() == 22 && beta.size() == 22, "kappa_two: classes must have length 22");
    KunnethKernel out;
    const Rat inv_n = make_rat(1, n);
    out.m22 = to_rational(c_mid) - outer(alpha, beta) * inv_n;
    out.s40 = -Rat(square(k3_lattice(), alpha)) * make_rat(1, 2 * n);
    out.s04 = -Rat(square(k3_lattice(), beta)) * make_rat(1, 2 * n);
    return out;
}

KunnethKernel sqrt_todd_kernel() {
    KunnethKernel out;
    out.s00 = 1;
    out.s40 = 1;
    out.s04 = 1;
    out.s44 = 1;
    return out;
}

QuotientStructure sheaf_isometry_domain(const Int& n, const Int& k, const Int& j,
                                        const IntVec& x, const IntVec& y, const IntMat& c_mid) {
    require(n >= 1 && k >= 1 && j >= 1, "sheaf_isometry_domain: parameters must be positive");
    require(is_primitive(k3_lattice(), x) && is_primitive(k3_lattice(), y),
            "sheaf_isometry_domain: x and y must be primitive");
    const KunnethKernel kern = kappa_two(c_mid, scale(k, x), scale(j, y), n);
    const IntMat domain = sublattice_where_integral(induced_h2_map(kern));
    const SnfDecomposition snf = smith_normal_form(domain);
    QuotientStructure out;
    for (std::size_t i = 0; i < 22; ++i) {
        const Int d = snf.divisor(i);
        out.index *= d;
        if (d > 1) out.elementary_divisors.push_back(d);
    }
    return out;
}

UniversalExampleReport verify_universal_example(const Int& n, const Int& s, const Int& j,
                                                KappaSign sign) {
    require(n >= 1 && s >= 1 && j >= 1, "verify_universal_example: parameters must be positive");
    require(gcd(n, s) == 1, "verify_universal_example: n and s must be coprime");

    UniversalExampleReport rep;
    rep.n = n;
    rep.s = s;
    rep.j = j;
    for (rep.k = 1; fdiv_r(s * rep.k - 1, n) != 0; ++rep.k) {}
    rep.h = embed_at(u_vector_of_square(n * s), 0, 22);
    rep.h_hat = rep.h;
    rep.psi_coefficient = 1 + 2 * (n - 1) * s * j;

    // Degree-4 data of the rank-n sheaf model with first Chern class
    // −π₁*h − j·π₂*ĥ.  Its integral degree-4 (2,2) part is the cross term
    // of c₁²/2 minus the second Chern class; the latter is pinned down on
    // the line through h by the known image ψ = psi_coefficient·ĥ, modeled
    // by a rank-one kernel against a unimodular partner of h.
    const IntVec w = unit_vector(22, 1);
    ensure(inner_product(k3_lattice(), w, rep.h) == 1, "verify_universal_example: partner pairing");
    const RatMat c_mid_rat = outer(rep.h, rep.h_hat) * Rat(j) -
                             outer(w, rep.h_hat) * Rat(rep.psi_coefficient);
    const IntMat c_mid = to_integral(c_mid_rat);
    const KunnethKernel kern =
        kappa_two(c_mid, scale(Int(-1), rep.h), scale(-j, rep.h_hat), n);

    // Degree-4 part of the product with the square-root-of-Todd kernel:
    // the degree-0 coefficient n lands on both fundamental-class slots.
    KunnethKernel degree4 = kern;
    degree4.s40 += Rat(n);
    degree4.s04 += Rat(n);
    rep.degree4 = sign == KappaSign::minus ? -degree4 : degree4;

    rep.image_of_h = induced_h2_map(rep.degree4) * to_rational(rep.h);
    rep.sends_h_to_h_hat = rep.image_of_h == to_rational(rep.h_hat);
    return rep;
}

} // namespace k3lat
