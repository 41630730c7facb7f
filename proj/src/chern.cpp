#include "k3lat/chern.hpp"

#include "k3lat/exactlinalg.hpp"
#include "k3lat/matrix.hpp"

namespace k3lat {

GradedSeries GradedSeries::operator+(const GradedSeries& o) const {
    require(c.size() == o.c.size(), "GradedSeries: degree mismatch");
    GradedSeries out(degree());
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] = c[i] + o.c[i];
    return out;
}

GradedSeries GradedSeries::operator-(const GradedSeries& o) const {
    require(c.size() == o.c.size(), "GradedSeries: degree mismatch");
    GradedSeries out(degree());
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] = c[i] - o.c[i];
    return out;
}

GradedSeries GradedSeries::operator*(const GradedSeries& o) const {
    require(c.size() == o.c.size(), "GradedSeries: degree mismatch");
    GradedSeries out(degree());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        for (std::size_t j = 0; i + j < c.size(); ++j) out.c[i + j] += c[i] * o.c[j];
    }
    return out;
}

GradedSeries GradedSeries::scaled(const Rat& t) const {
    GradedSeries out(degree());
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] = c[i] * t;
    return out;
}

GradedSeries exp_series(const Rat& x, std::size_t degree) {
    GradedSeries out(degree);
    Rat power = 1;
    Int factorial = 1;
    out.c[0] = 1;
    for (std::size_t i = 1; i <= degree; ++i) {
        power *= x;
        factorial *= Int(i);
        out.c[i] = power / Rat(factorial);
    }
    return out;
}

GradedSeries ch_from_roots(const RootBundle& f, std::size_t degree) {
    GradedSeries out(degree);
    for (const Rat& x : f.roots) out = out + exp_series(x, degree);
    return out;
}

GradedSeries r2(const GradedSeries& series) {
    GradedSeries out(series.degree());
    Int power = 1;
    for (std::size_t i = 0; i < series.c.size(); ++i) {
        out.c[i] = series.c[i] * Rat(power);
        power *= 2;
    }
    return out;
}

GradedSeries wedge2_ch(const RootBundle& f, std::size_t degree) {
    GradedSeries out(degree);
    for (std::size_t i = 0; i < f.roots.size(); ++i)
        for (std::size_t j = i + 1; j < f.roots.size(); ++j)
            out = out + exp_series(f.roots[i] + f.roots[j], degree);
    return out;
}

GradedSeries sym2_ch(const RootBundle& f, std::size_t degree) {
    GradedSeries out(degree);
    for (std::size_t i = 0; i < f.roots.size(); ++i)
        for (std::size_t j = i; j < f.roots.size(); ++j)
            out = out + exp_series(f.roots[i] + f.roots[j], degree);
    return out;
}

GradedSeries virtual_wedge2(const VirtualBundle& v, std::size_t degree) {
    const GradedSeries cross = ch_from_roots(v.plus, degree) * ch_from_roots(v.minus, degree);
    return (wedge2_ch(v.plus, degree) - cross) + sym2_ch(v.minus, degree);
}

std::vector<GradedSeries> extract_graded(const std::vector<GradedSeries>& iterates) {
    require(!iterates.empty(), "extract_graded: empty input");
    const std::size_t count = iterates.size();
    for (const auto& u : iterates)
        require(u.c.size() == count, "extract_graded: series length must match the iterate count");

    // Vandermonde matrix in the nodes 2^0 .. 2^(count-1); row k holds the
    // coefficients of u_k = Σ_i (2^i)^k h_i.
    RatMat nodes(count, count);
    for (std::size_t i = 0; i < count; ++i) {
        Int shifted = 1;
        shifted <<= i;
        const Rat node = Rat(shifted);
        Rat power = 1;
        for (std::size_t k = 0; k < count; ++k) {
            nodes(k, i) = power;
            power *= node;
        }
    }
    RatMat rhs(count, count);
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i < count; ++i) rhs(k, i) = iterates[k].c[i];

    const RatMat solved = solve(nodes, rhs);
    std::vector<GradedSeries> out(count, GradedSeries(count - 1));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < count; ++j) out[i].c[j] = solved(i, j);
    return out;
}

} // namespace k3lat
