#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "k3lat/error.hpp"

namespace k3lat {

// Arbitrary-precision integers and exact rationals.  All arithmetic in this
// project is exact; no floating point anywhere.
using Int = mpz_class;
using Rat = mpq_class;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

// Extended gcd: returns g = gcd(a,b) and sets s,t with s*a + t*b = g; g >= 0.
inline Int gcdext(const Int& a, const Int& b, Int& s, Int& t) {
    Int g;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

// Floor division and the matching non-negative remainder.
inline Int fdiv_q(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int fdiv_r(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Exact division; throws if b does not divide a.
inline Int divexact(const Int& a, const Int& b) {
    require(b != 0, "divexact: division by zero");
    ensure(a % b == 0, "divexact: not divisible");
    Int q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int abs(const Int& a) { return ::abs(a); }

inline Int pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// Rational from a (numerator, denominator) pair, canonicalized.
inline Rat make_rat(const Int& num, const Int& den) {
    require(den != 0, "make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integral(const Rat& q) { return q.get_den() == 1; }

inline bool is_integral(const RatVec& v) {
    for (const Rat& q : v)
        if (!is_integral(q)) return false;
    return true;
}

// gcd of the coordinates (the content); 0 for the zero vector.
inline Int content(const IntVec& v) {
    Int g = 0;
    for (const Int& x : v) g = gcd(g, x);
    return g;
}

inline bool fits_int64(const Int& v) {
    return v.fits_slong_p() || (mpz_sizeinbase(v.get_mpz_t(), 2) <= 62);
}

// "p/q" in lowest terms with q > 0, or plain decimal when integral.
inline std::string rat_to_string(const Rat& q) {
    if (is_integral(q)) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Accepts "p", "-p", or "p/q" with arbitrary-precision components.
inline Rat rat_from_string(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw domain_error("rat_from_string: cannot parse '" + s + "'");
    require(q.get_den() != 0, "rat_from_string: zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

} // namespace k3lat
