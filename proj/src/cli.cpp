#include "k3lat/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "k3lat/chern.hpp"
#include "k3lat/error.hpp"
#include "k3lat/exactlinalg.hpp"
#include "k3lat/isometry.hpp"
#include "k3lat/lattices.hpp"
#include "k3lat/matrix.hpp"
#include "k3lat/mukai.hpp"
#include "k3lat/orbits.hpp"
#include "k3lat/rational.hpp"
#include "k3lat/sampling.hpp"

namespace k3lat::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

// A malformed command line or operand (exit code 2), as opposed to a
// well-formed operand that violates a library precondition (exit code 3).
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Operand parsing.  Math operands are JSON with two liberties: bare integer
// and p/q tokens are accepted where JSON would demand quoted strings, and a
// value of the form @path names a file holding the JSON.

std::string read_referenced_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw usage_error("cannot read operand file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

// Wrap bare -?digits(/digits)? tokens in quotes so "[[3/2,0],[0,2/3]]"
// becomes valid JSON; text inside string literals is left alone.
std::string quote_math_tokens(const std::string& in) {
    std::string out;
    out.reserve(in.size() + 16);
    bool in_string = false;
    std::size_t i = 0;
    while (i < in.size()) {
        const char ch = in[i];
        if (in_string) {
            out += ch;
            if (ch == '\\' && i + 1 < in.size()) {
                out += in[i + 1];
                i += 2;
                continue;
            }
            if (ch == '"') in_string = false;
            ++i;
            continue;
        }
        if (ch == '"') {
            in_string = true;
            out += ch;
            ++i;
            continue;
        }
        if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            if (in[j] == '-') ++j;
            const std::size_t first_digit = j;
            while (j < in.size() && std::isdigit(static_cast<unsigned char>(in[j]))) ++j;
            if (j == first_digit) {  // lone '-'; let the JSON parser complain
                out += ch;
                ++i;
                continue;
            }
            if (j < in.size() && in[j] == '/') {
                std::size_t k = j + 1;
                const std::size_t den_start = k;
                while (k < in.size() && std::isdigit(static_cast<unsigned char>(in[k]))) ++k;
                if (k > den_start) j = k;
            }
            out += '"';
            out.append(in, i, j - i);
            out += '"';
            i = j;
            continue;
        }
        out += ch;
        ++i;
    }
    return out;
}

ordered_json parse_math_json(const std::string& raw, const std::string& what) {
    const std::string text = raw.rfind('@', 0) == 0 ? read_referenced_file(raw.substr(1)) : raw;
    try {
        return ordered_json::parse(quote_math_tokens(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw usage_error(what + ": invalid JSON: " + e.what());
    }
}

Int parse_int_token(const std::string& s, const std::string& what) {
    std::size_t i = s.rfind('-', 0) == 0 ? 1 : 0;
    if (i == s.size()) throw usage_error(what + ": expected an integer, got \"" + s + "\"");
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw usage_error(what + ": expected an integer, got \"" + s + "\"");
    return Int(s);
}

Rat parse_rat_token(const std::string& s, const std::string& what) {
    const std::size_t slash = s.find('/');
    if (slash == std::string::npos) return Rat(parse_int_token(s, what));
    const Int num = parse_int_token(s.substr(0, slash), what);
    const std::string den_text = s.substr(slash + 1);
    if (den_text.empty() || den_text[0] == '-')
        throw usage_error(what + ": denominator must be a positive integer in \"" + s + "\"");
    const Int den = parse_int_token(den_text, what);
    if (den == 0) throw usage_error(what + ": zero denominator in \"" + s + "\"");
    return make_rat(num, den);
}

Int json_to_int(const ordered_json& j, const std::string& what) {
    if (j.is_number_integer() || j.is_number_unsigned())
        return Int(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return parse_int_token(j.get<std::string>(), what);
    throw usage_error(what + ": expected an integer entry");
}

Rat json_to_rat(const ordered_json& j, const std::string& what) {
    if (j.is_number_integer() || j.is_number_unsigned())
        return Rat(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return parse_rat_token(j.get<std::string>(), what);
    throw usage_error(what + ": expected a rational entry (integer or \"p/q\")");
}

IntVec json_to_int_vec(const ordered_json& j, const std::string& what) {
    if (!j.is_array()) throw usage_error(what + ": expected an array");
    IntVec v;
    v.reserve(j.size());
    for (const auto& entry : j) v.push_back(json_to_int(entry, what));
    return v;
}

RatMat json_to_rat_mat(const ordered_json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw usage_error(what + ": expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw usage_error(what + ": rows must be nonempty arrays");
    RatMat m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw usage_error(what + ": rows must all have the same length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = json_to_rat(j[r][c], what);
    }
    return m;
}

IntMat json_to_int_mat(const ordered_json& j, const std::string& what) {
    const RatMat m = json_to_rat_mat(j, what);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (!is_integral(m(r, c)))
                throw usage_error(what + ": entries must all be integers");
    return to_integral(m);
}

// ---------------------------------------------------------------------------
// Report serialization.  Integers become bare JSON numbers while they are
// exactly representable as doubles (|v| < 2^53) and decimal strings beyond;
// rationals are always strings in lowest terms with positive denominator.

ordered_json json_int(const Int& v) {
    static const Int double_exact_limit = Int(1) << 53;
    if (abs(v) < double_exact_limit) return ordered_json(static_cast<long long>(v.get_si()));
    return ordered_json(v.get_str());
}

ordered_json json_rat(const Rat& v) { return ordered_json(rat_to_string(v)); }

ordered_json json_int_vec(const IntVec& v) {
    ordered_json a = ordered_json::array();
    for (const Int& x : v) a.push_back(json_int(x));
    return a;
}

ordered_json json_rat_vec(const RatVec& v) {
    ordered_json a = ordered_json::array();
    for (const Rat& x : v) a.push_back(json_rat(x));
    return a;
}

ordered_json json_rat_mat(const RatMat& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(json_rat(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Lattice and isometry operand forms.

Lattice parse_lattice(const std::string& form) {
    if (form == "U") return standard_lattice(LatticeName::U);
    if (form == "E8") return standard_lattice(LatticeName::E8);
    if (form == "E8-" || form == "E8(-1)") return standard_lattice(LatticeName::E8_minus);
    if (form == "K3") return standard_lattice(LatticeName::K3);
    if (form == "Mukai") return standard_lattice(LatticeName::Mukai);
    const ordered_json j = parse_math_json(form, "--lattice");
    if (j.is_array()) return Lattice(json_to_int_mat(j, "--lattice"));
    if (j.is_object() && j.size() == 1 && j.contains("gram"))
        return Lattice(json_to_int_mat(j["gram"], "--lattice gram"));
    throw usage_error("--lattice: expected U, E8, E8-, K3, Mukai, a Gram matrix, or {\"gram\": ...}");
}

RationalIsometry parse_isometry(const Lattice& lattice, const ordered_json& form) {
    if (form.is_array()) return RationalIsometry(lattice, json_to_rat_mat(form, "isometry matrix"));
    if (!form.is_object() || form.size() != 1)
        throw usage_error("isometry: expected a matrix or an object with exactly one of "
                         "matrix, reflection, transvection, embed_u, product");
    const std::string key = form.begin().key();
    const ordered_json& value = form.begin().value();
    if (key == "matrix") return RationalIsometry(lattice, json_to_rat_mat(value, "isometry matrix"));
    if (key == "reflection") return reflection(lattice, json_to_int_vec(value, "reflection vector"));
    if (key == "transvection") {
        if (!value.is_object() || value.size() != 2 || !value.contains("f") || !value.contains("w"))
            throw usage_error("transvection: expected {\"f\": vector, \"w\": vector}");
        return eichler_transvection(lattice, json_to_int_vec(value["f"], "transvection f"),
                                    json_to_int_vec(value["w"], "transvection w"));
    }
    if (key == "embed_u") {
        const RationalIsometry on_u(standard_lattice(LatticeName::U),
                                    json_to_rat_mat(value, "embed_u matrix"));
        const RationalIsometry embedded = embed_U_isometry(on_u);
        require(embedded.lattice() == lattice,
                "embed_u produces an isometry of the rank-22 lattice; pass --lattice K3");
        return embedded;
    }
    if (key == "product") {
        if (!value.is_array() || value.empty())
            throw usage_error("product: expected a nonempty array of isometry args");
        RationalIsometry g = parse_isometry(lattice, value[0]);
        for (std::size_t i = 1; i < value.size(); ++i) g = g * parse_isometry(lattice, value[i]);
        return g;
    }
    throw usage_error("isometry: unknown form \"" + key + "\"");
}

RationalIsometry parse_isometry(const Lattice& lattice, const std::string& raw) {
    return parse_isometry(lattice, parse_math_json(raw, "--isometry"));
}

MukaiVector parse_mukai_vector(const std::string& raw, const std::string& what) {
    const ordered_json j = parse_math_json(raw, what);
    MukaiVector v;
    if (j.is_array()) {
        if (j.size() != 24) throw usage_error(what + ": flat form needs exactly 24 entries");
        v.r = json_to_int(j[0], what);
        for (std::size_t i = 0; i < 22; ++i) v.c[i] = json_to_int(j[i + 1], what);
        v.s = json_to_int(j[23], what);
        return v;
    }
    if (j.is_object() && j.size() == 3 && j.contains("r") && j.contains("c") && j.contains("s")) {
        v.r = json_to_int(j["r"], what + " r");
        const IntVec c = json_to_int_vec(j["c"], what + " c");
        if (c.size() != 22) throw usage_error(what + ": c needs exactly 22 entries");
        v.c = c;
        v.s = json_to_int(j["s"], what + " s");
        return v;
    }
    throw usage_error(what + ": expected a flat 24-entry array or {\"r\",\"c\",\"s\"}");
}

// ---------------------------------------------------------------------------
// Shared rechecks.

bool preserves_form(const Lattice& lattice, const RatMat& m) {
    const RatMat g = to_rational(lattice.gram());
    return m.transpose() * g * m == g;
}

bool quotient_index_consistent(const QuotientStructure& qs) {
    Int product = 1;
    for (const Int& d : qs.elementary_divisors) product *= d;
    return product == qs.index;
}

ordered_json pair_json(const UCanonicalPair& pair) {
    ordered_json a = ordered_json::array();
    a.push_back(json_int(pair.a));
    a.push_back(json_int(pair.b));
    return a;
}

// ---------------------------------------------------------------------------
// Command runners.  Each returns the result payload plus named verification
// flags; every flag is an independent recheck of a postcondition.

struct CommandOutcome {
    ordered_json result = ordered_json::object();
    ordered_json verified = ordered_json::object();
};

CommandOutcome run_cyclic_type(const std::string& lattice_arg, const std::string& isometry_arg) {
    const Lattice lattice = parse_lattice(lattice_arg);
    const RationalIsometry phi = parse_isometry(lattice, isometry_arg);
    const std::optional<Int> type = cyclic_type(phi);
    const QuotientStructure qs = quotient_structure(phi);

    CommandOutcome oc;
    oc.result["cyclic_type"] = type ? json_int(*type) : ordered_json(nullptr);
    oc.result["elementary_divisors"] = json_int_vec(qs.elementary_divisors);
    oc.result["index"] = json_int(qs.index);

    const IntMat coinvariant = coinvariant_sublattice(phi);
    oc.verified["preserves_form"] = preserves_form(lattice, phi.matrix());
    oc.verified["coinvariant_mapped_integrally"] =
        is_integral(phi.matrix() * to_rational(coinvariant));
    oc.verified["index_is_divisor_product"] = quotient_index_consistent(qs);
    const bool type_matches =
        type ? (qs.elementary_divisors.size() <= 1 &&
                (qs.elementary_divisors.empty() ? *type == 1 : *type == qs.elementary_divisors[0]))
             : qs.elementary_divisors.size() >= 2;
    oc.verified["type_matches_quotient"] = type_matches;
    return oc;
}

CommandOutcome run_double_orbit(const std::string& lattice_arg, const std::string& matrix_arg) {
    const Lattice lattice = parse_lattice(lattice_arg);
    require(lattice == standard_lattice(LatticeName::U),
            "double-orbit normalizes isometries of the hyperbolic plane; pass --lattice U");
    const RationalIsometry f(lattice,
                             json_to_rat_mat(parse_math_json(matrix_arg, "--matrix"), "--matrix"));
    const UOrbitDecomposition d = u_double_orbit_decompose(f);

    CommandOutcome oc;
    oc.result["pair"] = pair_json(d.pair);
    oc.result["post"] = json_rat_mat(d.post.matrix());
    oc.result["pre"] = json_rat_mat(d.pre.matrix());

    oc.verified["post_integral"] = d.post.is_integral();
    oc.verified["pre_integral"] = d.pre.is_integral();
    oc.verified["post_preserves_form"] = preserves_form(lattice, d.post.matrix());
    oc.verified["pre_preserves_form"] = preserves_form(lattice, d.pre.matrix());
    oc.verified["pair_canonical"] =
        d.pair.a >= d.pair.b && d.pair.b > 0 && gcd(d.pair.a, d.pair.b) == 1;
    const RationalIsometry recomposed = (d.post * u_pair_isometry(d.pair.a, d.pair.b)) * d.pre;
    oc.verified["recomposition"] = recomposed == f;
    return oc;
}

CommandOutcome run_decompose_reflections(const std::string& lattice_arg,
                                         const std::string& isometry_arg) {
    const Lattice lattice = parse_lattice(lattice_arg);
    const RationalIsometry phi = parse_isometry(lattice, isometry_arg);
    const std::vector<IntVec> roots = cartan_dieudonne(phi);

    CommandOutcome oc;
    oc.result["count"] = ordered_json(roots.size());
    ordered_json list = ordered_json::array();
    for (const IntVec& x : roots) list.push_back(json_int_vec(x));
    oc.result["reflections"] = std::move(list);

    RationalIsometry product = RationalIsometry::identity(lattice);
    bool anisotropic = true;
    for (const IntVec& x : roots) {
        anisotropic = anisotropic && square(lattice, x) != 0;
        product = product * reflection(lattice, x);
    }
    oc.verified["product_recomposes"] = product == phi;
    oc.verified["count_within_rank_plus_2"] = roots.size() <= lattice.rank() + 2;
    oc.verified["roots_anisotropic"] = anisotropic;
    return oc;
}

Int coprime_ordered_factor_pairs(const Int& n) {
    Int count = 0;
    for (Int d = 1; d <= n; ++d)
        if (fdiv_r(n, d) == 0 && gcd(d, divexact(n, d)) == 1) ++count;
    return count;
}

CommandOutcome run_discriminant(const std::string& lattice_arg, const std::string& pair_arg,
                                const std::string& basis_arg, bool want_lagrangians,
                                unsigned long long cap) {
    if (pair_arg.empty() == basis_arg.empty())
        throw usage_error("discriminant: pass exactly one of --pair or --basis");

    FiniteQuadraticModule m;
    std::optional<Int> pair_n;
    Int expected_order;
    if (!pair_arg.empty()) {
        const std::size_t comma = pair_arg.find(',');
        if (comma == std::string::npos)
            throw usage_error("--pair: expected \"a,b\" with integer a, b");
        const Int a = parse_int_token(pair_arg.substr(0, comma), "--pair a");
        const Int b = parse_int_token(pair_arg.substr(comma + 1), "--pair b");
        m = u_discriminant_module(a, b);
        pair_n = a * b;
        expected_order = *pair_n * *pair_n;
    } else {
        const Lattice lattice = parse_lattice(lattice_arg);
        const IntMat basis = json_to_int_mat(parse_math_json(basis_arg, "--basis"), "--basis");
        m = discriminant_module(lattice, basis);
        const IntMat gram_i =
            to_integral(to_rational(basis).transpose() * to_rational(lattice.gram()) *
                        to_rational(basis));
        expected_order = abs(determinant(gram_i));
    }

    CommandOutcome oc;
    oc.result["elementary_divisors"] = json_int_vec(m.elementary_divisors);
    oc.result["order"] = json_int(m.order());
    const std::size_t gens = m.elementary_divisors.size();
    ordered_json squares = ordered_json::array();
    ordered_json pairings = ordered_json::array();
    for (std::size_t i = 0; i < gens; ++i) {
        squares.push_back(json_rat(m.q_value(unit_vector(gens, i))));
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < gens; ++j)
            row.push_back(json_rat(m.b_value(unit_vector(gens, i), unit_vector(gens, j))));
        pairings.push_back(std::move(row));
    }
    oc.result["generator_squares"] = std::move(squares);
    oc.result["generator_pairings"] = std::move(pairings);

    oc.verified["order_matches_determinant"] = m.order() == expected_order;

    if (want_lagrangians) {
        const Int order = m.order();
        Int n = sqrt(order);
        const std::vector<ModuleSubgroup> lagrangians = enumerate_lagrangians(m, n, Int(static_cast<unsigned long>(cap)));
        ordered_json list = ordered_json::array();
        bool isotropic = true;
        bool cyclic_order_n = true;
        for (const ModuleSubgroup& sub : lagrangians) {
            ordered_json entry = ordered_json::object();
            ordered_json gens_json = ordered_json::array();
            for (const IntVec& g : sub.generators) gens_json.push_back(json_int_vec(g));
            entry["generators"] = std::move(gens_json);
            entry["order"] = json_int(sub.order);
            ordered_json elems = ordered_json::array();
            for (const IntVec& e : sub.elements) elems.push_back(json_int_vec(e));
            entry["elements"] = std::move(elems);
            list.push_back(std::move(entry));

            bool has_full_order_element = false;
            for (const IntVec& e : sub.elements) {
                isotropic = isotropic && m.q_value(e) == 0;
                has_full_order_element = has_full_order_element || m.element_order(e) == n;
            }
            cyclic_order_n =
                cyclic_order_n && sub.order == n && Int(sub.elements.size()) == n &&
                has_full_order_element;
        }
        oc.result["lagrangians"] = std::move(list);
        oc.verified["lagrangians_isotropic"] = isotropic;
        oc.verified["lagrangians_cyclic_of_order_n"] = cyclic_order_n;
        if (pair_n)
            oc.verified["count_matches_coprime_factor_pairs"] =
                Int(lagrangians.size()) == coprime_ordered_factor_pairs(*pair_n);
    }
    return oc;
}

CommandOutcome run_congruence(const std::string& lattice_arg, const std::string& v1_arg,
                              const std::string& v2_arg, const std::string& modulus_arg) {
    const Lattice lattice = parse_lattice(lattice_arg);
    const IntVec v1 = json_to_int_vec(parse_math_json(v1_arg, "--v1"), "--v1");
    const IntVec v2 = json_to_int_vec(parse_math_json(v2_arg, "--v2"), "--v2");
    const Int n = parse_int_token(modulus_arg, "--modulus");
    const std::optional<Int> unit = congruence_orbit_test(lattice, v1, v2, n);

    CommandOutcome oc;
    oc.result["congruent"] = unit.has_value();
    oc.result["unit"] = unit ? json_int(*unit) : ordered_json(nullptr);

    oc.verified["vectors_primitive"] = is_primitive(lattice, v1) && is_primitive(lattice, v2);
    bool witness_valid = true;
    if (unit) {
        const Int d1 = divexact(square(lattice, v1), 2);
        const Int d2 = divexact(square(lattice, v2), 2);
        witness_valid = gcd(*unit, n) == 1 && fdiv_r(d1 - *unit * *unit * d2, n) == 0;
    }
    oc.verified["witness_valid"] = witness_valid;
    return oc;
}

CommandOutcome run_reduce_double_orbit(const std::string& lattice_arg,
                                       const std::string& isometry_arg) {
    const Lattice lattice = parse_lattice(lattice_arg);
    const RationalIsometry phi = parse_isometry(lattice, isometry_arg);
    const DoubleOrbitReduction red = double_orbit_reduce(phi);

    CommandOutcome oc;
    oc.result["pair"] = pair_json(red.pair);
    oc.result["left"] = json_rat_mat(red.left.matrix());
    oc.result["right"] = json_rat_mat(red.right.matrix());

    oc.verified["left_integral"] = red.left.is_integral();
    oc.verified["right_integral"] = red.right.is_integral();
    oc.verified["left_preserves_form"] = preserves_form(lattice, red.left.matrix());
    oc.verified["right_preserves_form"] = preserves_form(lattice, red.right.matrix());
    const RationalIsometry recomposed =
        (red.left * embed_U_isometry(u_pair_isometry(red.pair.a, red.pair.b))) * red.right;
    oc.verified["recomposition"] = recomposed == phi;
    const std::optional<Int> type = cyclic_type(phi);
    oc.verified["pair_product_is_cyclic_type"] =
        type.has_value() && red.pair.a * red.pair.b == *type;
    return oc;
}

CommandOutcome run_mukai_pairing(const std::string& v_arg, const std::string& w_arg) {
    const MukaiVector v = parse_mukai_vector(v_arg, "--v1");
    const MukaiVector w = parse_mukai_vector(w_arg, "--v2");
    const Int p = mukai_pairing(v, w);

    CommandOutcome oc;
    oc.result["pairing"] = json_int(p);

    oc.verified["symmetric"] = mukai_pairing(w, v) == p;
    const auto flatten = [](const MukaiVector& x) {
        IntVec flat;
        flat.push_back(x.r);
        for (const Int& c : x.c) flat.push_back(c);
        flat.push_back(x.s);
        return flat;
    };
    oc.verified["matches_gram_form"] =
        inner_product(mukai_gram(), flatten(v), flatten(w)) == p;
    return oc;
}

CommandOutcome run_mukai_domain(const std::string& n_arg, const std::string& k_arg,
                                const std::string& j_arg, const std::string& x_arg,
                                const std::string& y_arg, const std::string& c_arg) {
    const Int n = parse_int_token(n_arg, "--n");
    const Int k = parse_int_token(k_arg, "--k");
    const Int j = parse_int_token(j_arg, "--j");
    const IntVec x = json_to_int_vec(parse_math_json(x_arg, "--x"), "--x");
    const IntVec y = json_to_int_vec(parse_math_json(y_arg, "--y"), "--y");
    if (x.size() != 22) throw usage_error("--x: expected 22 entries");
    if (y.size() != 22) throw usage_error("--y: expected 22 entries");
    const IntMat c_mid = json_to_int_mat(parse_math_json(c_arg, "--c"), "--c");
    if (c_mid.rows() != 22 || c_mid.cols() != 22) throw usage_error("--c: expected a 22x22 matrix");

    const QuotientStructure qs = sheaf_isometry_domain(n, k, j, x, y, c_mid);

    CommandOutcome oc;
    oc.result["elementary_divisors"] = json_int_vec(qs.elementary_divisors);
    oc.result["index"] = json_int(qs.index);

    oc.verified["index_is_divisor_product"] = quotient_index_consistent(qs);
    oc.verified["cyclic"] = qs.elementary_divisors.size() <= 1;
    oc.verified["order_matches_formula"] = qs.index == divexact(n, gcd(j * k, n));
    return oc;
}

CommandOutcome run_mukai_universal(const std::string& n_arg, const std::string& s_arg,
                                   const std::string& j_arg, const std::string& sign_arg) {
    const Int n = parse_int_token(n_arg, "--n");
    const Int s = parse_int_token(s_arg, "--s");
    const Int j = parse_int_token(j_arg, "--j");
    KappaSign sign = KappaSign::minus;
    if (sign_arg == "plus") sign = KappaSign::plus;
    else if (sign_arg != "minus") throw usage_error("--sign: expected minus or plus");

    const UniversalExampleReport rep = verify_universal_example(n, s, j, sign);

    CommandOutcome oc;
    oc.result["n"] = json_int(rep.n);
    oc.result["s"] = json_int(rep.s);
    oc.result["j"] = json_int(rep.j);
    oc.result["k"] = json_int(rep.k);
    oc.result["psi_coefficient"] = json_int(rep.psi_coefficient);
    oc.result["h"] = json_int_vec(rep.h);
    oc.result["h_hat"] = json_int_vec(rep.h_hat);
    oc.result["image_of_h"] = json_rat_vec(rep.image_of_h);
    oc.result["sends_h_to_h_hat"] = rep.sends_h_to_h_hat;

    const Lattice k3 = standard_lattice(LatticeName::K3);
    oc.verified["k_is_inverse_of_s"] = fdiv_r(rep.s * rep.k - 1, rep.n) == 0;
    oc.verified["polarizations_have_square_2ns"] =
        square(k3, rep.h) == 2 * rep.n * rep.s && square(k3, rep.h_hat) == 2 * rep.n * rep.s;
    oc.verified["image_recomputed"] =
        induced_h2_map(rep.degree4) * to_rational(rep.h) == rep.image_of_h;
    oc.verified["flag_matches_image"] =
        rep.sends_h_to_h_hat == (rep.image_of_h == to_rational(rep.h_hat));
    oc.verified["sign_convention_consistent"] =
        rep.sends_h_to_h_hat == (sign == KappaSign::minus);
    return oc;
}

struct ChernFlags {
    bool wedge = true;
    bool sym = true;
    bool tensor = true;
    bool virt = true;
    bool vandermonde = true;

    bool all() const { return wedge && sym && tensor && virt && vandermonde; }
};

ChernFlags run_chern_checks(unsigned long long seed, std::size_t max_rank, std::size_t degree,
                            long trials) {
    Rng rng(seed);
    const Rat one_half = make_rat(1, 2);
    const auto random_bundle = [&rng, max_rank]() {
        RootBundle f;
        const std::size_t rank =
            static_cast<std::size_t>(random_int(rng, 0, static_cast<long>(max_rank)).get_si());
        for (std::size_t i = 0; i < rank; ++i)
            f.roots.push_back(make_rat(random_int(rng, -7, 7), random_int(rng, 1, 7)));
        return f;
    };

    ChernFlags flags;
    for (long t = 0; t < trials; ++t) {
        const RootBundle a = random_bundle();
        const GradedSeries ch = ch_from_roots(a, degree);
        const GradedSeries square = ch * ch;
        const GradedSeries twisted = r2(ch);
        const GradedSeries wedge = wedge2_ch(a, degree);
        const GradedSeries sym = sym2_ch(a, degree);
        flags.wedge = flags.wedge && wedge == (square - twisted).scaled(one_half);
        flags.sym = flags.sym && sym == (square + twisted).scaled(one_half);
        flags.tensor = flags.tensor && wedge + sym == square;

        const RootBundle b = random_bundle();
        const GradedSeries chv = ch - ch_from_roots(b, degree);
        flags.virt = flags.virt && virtual_wedge2(VirtualBundle{a, b}, degree) ==
                                       (chv * chv - r2(chv)).scaled(one_half);

        std::vector<GradedSeries> iterates{ch};
        for (std::size_t i = 0; i < degree; ++i) iterates.push_back(r2(iterates.back()));
        const std::vector<GradedSeries> parts = extract_graded(iterates);
        for (std::size_t i = 0; i <= degree; ++i)
            for (std::size_t col = 0; col <= degree; ++col)
                flags.vandermonde = flags.vandermonde &&
                                    parts[i].c[col] == (i == col ? ch.c[i] : Rat(0));
    }
    return flags;
}

CommandOutcome run_chern_verify(unsigned long long seed, std::size_t max_rank, std::size_t degree,
                                long trials) {
    require(max_rank <= 16, "chern verify: --rank must be at most 16");
    require(degree <= 64, "chern verify: --degree must be at most 64");
    require(trials >= 1 && trials <= 10000, "chern verify: --trials must be in 1..10000");
    const ChernFlags flags = run_chern_checks(seed, max_rank, degree, trials);

    CommandOutcome oc;
    oc.result["rank"] = max_rank;
    oc.result["degree"] = degree;
    oc.result["trials"] = trials;
    oc.result["seed"] = seed;

    oc.verified["wedge_square_closed_form"] = flags.wedge;
    oc.verified["sym_square_closed_form"] = flags.sym;
    oc.verified["tensor_square_decomposition"] = flags.tensor;
    oc.verified["virtual_wedge_closed_form"] = flags.virt;
    oc.verified["vandermonde_round_trip"] = flags.vandermonde;
    return oc;
}

// ---------------------------------------------------------------------------
// Self-test: one quick deterministic oracle per library area, run in
// parallel.

bool selftest_linear_algebra() {
    Rng rng(2024);
    for (int it = 0; it < 4; ++it) {
        const IntMat a = random_matrix(rng, 5, 5, 6);
        const SnfDecomposition s = smith_normal_form(a);
        if (s.u * s.d * s.v != a) return false;
        if (s.v * s.vinv != IntMat::identity(5)) return false;

        const IntMat m = random_unimodular(rng, 5);
        const RatMat mq = to_rational(m);
        RatVec x(5);
        for (auto& entry : x) entry = make_rat(random_int(rng, -9, 9), random_int(rng, 1, 9));
        if (solve(mq, mq * x) != x) return false;
    }
    return true;
}

bool selftest_lattices() {
    const auto check = [](LatticeName name, const Signature& sig, const Int& det) {
        const Lattice lattice = standard_lattice(name);
        return lattice.is_even() && signature(lattice) == sig &&
               determinant(lattice.gram()) == det;
    };
    return check(LatticeName::U, Signature{1, 1, 0}, -1) &&
           check(LatticeName::E8, Signature{8, 0, 0}, 1) &&
           check(LatticeName::E8_minus, Signature{0, 8, 0}, 1) &&
           check(LatticeName::K3, Signature{3, 19, 0}, -1) &&
           check(LatticeName::Mukai, Signature{4, 20, 0}, 1);
}

bool selftest_isometry() {
    Rng rng(7);
    const Lattice uu = direct_sum(standard_lattice(LatticeName::U), standard_lattice(LatticeName::U));
    for (int it = 0; it < 6; ++it) {
        const RationalIsometry g = random_integral_isometry(rng, uu, 5);
        const std::vector<IntVec> roots = cartan_dieudonne(g);
        if (roots.size() > uu.rank() + 2) return false;
        RationalIsometry product = RationalIsometry::identity(uu);
        for (const IntVec& x : roots) product = product * reflection(uu, x);
        if (product != g) return false;
    }
    return true;
}

bool selftest_orbits() {
    for (const long n : {2L, 6L, 12L}) {
        const UCanonicalPair pair = canonical_cyclic_pair(Int(n));
        const RationalIsometry phi = embed_U_isometry(u_pair_isometry(pair.a, pair.b));
        const DoubleOrbitReduction red = double_orbit_reduce(phi);
        if (red.pair != pair) return false;
        const RationalIsometry recomposed =
            (red.left * embed_U_isometry(u_pair_isometry(red.pair.a, red.pair.b))) * red.right;
        if (recomposed != phi) return false;
    }
    return true;
}

bool selftest_mukai() {
    if (signature(mukai_gram()) != Signature{4, 20, 0}) return false;
    Rng rng(11);
    const auto random_mukai = [&rng]() {
        MukaiVector v;
        v.r = random_int(rng, -5, 5);
        v.c = random_vector(rng, 22, 4);
        v.s = random_int(rng, -5, 5);
        return v;
    };
    for (int it = 0; it < 30; ++it) {
        const MukaiVector v = random_mukai();
        const MukaiVector w = random_mukai();
        const IntVec alpha = random_vector(rng, 22, 3);
        if (mukai_pairing(exp_action(alpha, v), exp_action(alpha, w)) != mukai_pairing(v, w))
            return false;
    }
    return verify_universal_example(3, 2).sends_h_to_h_hat;
}

bool selftest_chern() { return run_chern_checks(5, 3, 6, 8).all(); }

CommandOutcome run_selftest() {
    struct Suite {
        const char* name;
        bool (*check)();
    };
    const Suite suites[] = {
        {"linear-algebra", selftest_linear_algebra}, {"lattices", selftest_lattices},
        {"isometry", selftest_isometry},             {"orbits", selftest_orbits},
        {"mukai", selftest_mukai},                   {"chern", selftest_chern},
    };

    std::vector<std::future<bool>> futures;
    for (const Suite& suite : suites)
        futures.push_back(std::async(std::launch::async, suite.check));

    CommandOutcome oc;
    ordered_json list = ordered_json::array();
    bool all_passed = true;
    for (std::size_t i = 0; i < std::size(suites); ++i) {
        bool passed = false;
        try {
            passed = futures[i].get();
        } catch (...) {
            passed = false;
        }
        all_passed = all_passed && passed;
        ordered_json entry = ordered_json::object();
        entry["name"] = suites[i].name;
        entry["passed"] = passed;
        list.push_back(std::move(entry));
    }
    oc.result["suites"] = std::move(list);
    oc.verified["all_passed"] = all_passed;
    return oc;
}

// ---------------------------------------------------------------------------

unsigned long long resolve_seed(const std::string& seed_flag) {
    std::string text = seed_flag;
    if (const char* env = std::getenv("K3LAT_SEED"); env != nullptr && *env != '\0') text = env;
    try {
        std::size_t consumed = 0;
        const unsigned long long value = std::stoull(text, &consumed);
        if (consumed != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw usage_error("seed must be a nonnegative integer, got \"" + text + "\"");
    }
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact lattice-isometry and characteristic-class toolkit"};
    app.name("k3lat");
    app.require_subcommand(1);

    std::string lattice_arg = "K3";
    std::string plane_lattice_arg = "U";
    std::string isometry_arg;
    std::string matrix_arg;
    std::string pair_arg;
    std::string basis_arg;
    bool want_lagrangians = false;
    unsigned long long cap = 4096;
    std::string v1_arg, v2_arg, modulus_arg;
    std::string n_arg, k_arg, s_arg, x_arg, y_arg, c_arg;
    std::string j_arg = "1";
    std::string sign_arg = "minus";
    std::string seed_arg = "0";
    std::size_t rank = 3, degree = 8;
    long trials = 50;

    const char* lattice_help = "U, E8, E8-, K3, Mukai, a Gram matrix, or {\"gram\": ...}";
    const char* isometry_help =
        "matrix, {\"matrix\"}, {\"reflection\"}, {\"transvection\": {\"f\",\"w\"}}, "
        "{\"embed_u\"}, or {\"product\": [...]}; @path reads a file";

    CLI::App* cmd_cyclic = app.add_subcommand(
        "cyclic-type", "Order of the cyclic quotient L / (L ∩ φ⁻¹L) of a rational isometry");
    cmd_cyclic->add_option("--lattice", lattice_arg, lattice_help);
    cmd_cyclic->add_option("--isometry", isometry_arg, isometry_help)->required();

    CLI::App* cmd_double = app.add_subcommand(
        "double-orbit", "Canonical pair (a, b) of a rational isometry of the hyperbolic plane");
    cmd_double->add_option("--lattice", plane_lattice_arg, "must name the hyperbolic plane U");
    cmd_double->add_option("--matrix", matrix_arg, "2x2 rational matrix; @path reads a file")
        ->required();

    CLI::App* cmd_reflections = app.add_subcommand(
        "decompose-reflections", "Write an isometry as a product of at most rank+2 reflections");
    cmd_reflections->add_option("--lattice", lattice_arg, lattice_help);
    cmd_reflections->add_option("--isometry", isometry_arg, isometry_help)->required();

    CLI::App* cmd_discriminant = app.add_subcommand(
        "discriminant", "Finite quadratic module I*/I of a finite-index sublattice");
    cmd_discriminant->add_option("--lattice", lattice_arg, lattice_help);
    cmd_discriminant->add_option("--pair", pair_arg,
                                 "\"a,b\": module of the plane rescaled by (a, b)");
    cmd_discriminant->add_option("--basis", basis_arg,
                                 "square integer matrix whose columns span the sublattice");
    cmd_discriminant->add_flag("--lagrangians", want_lagrangians,
                               "enumerate the cyclic isotropic subgroups of order sqrt(|module|)");
    cmd_discriminant->add_option("--cap", cap, "largest module order to enumerate (default 4096)");

    CLI::App* cmd_congruence = app.add_subcommand(
        "congruence", "Test d1 ≡ k²·d2 mod n for primitive vectors of squares 2d1, 2d2");
    cmd_congruence->add_option("--lattice", lattice_arg, lattice_help);
    cmd_congruence->add_option("--v1", v1_arg, "first primitive vector")->required();
    cmd_congruence->add_option("--v2", v2_arg, "second primitive vector")->required();
    cmd_congruence->add_option("--modulus", modulus_arg, "the modulus n")->required();

    CLI::App* cmd_reduce = app.add_subcommand(
        "reduce-double-orbit",
        "Factor a cyclic-type isometry of the rank-22 lattice as integral ∘ pair-scaling ∘ integral");
    cmd_reduce->add_option("--lattice", lattice_arg, "must name the rank-22 lattice K3");
    cmd_reduce->add_option("--isometry", isometry_arg, isometry_help)->required();

    CLI::App* cmd_mukai = app.add_subcommand("mukai", "Extended-lattice and sheaf-kernel checks");
    cmd_mukai->require_subcommand(1);
    CLI::App* cmd_mukai_pairing =
        cmd_mukai->add_subcommand("pairing", "Pairing of two extended-lattice vectors");
    cmd_mukai_pairing
        ->add_option("--v1", v1_arg, "flat 24-entry array or {\"r\",\"c\",\"s\"}; @path reads a file")
        ->required();
    cmd_mukai_pairing->add_option("--v2", v2_arg, "second vector, same forms")->required();
    CLI::App* cmd_mukai_domain = cmd_mukai->add_subcommand(
        "domain", "Quotient by the integrality domain of a rank-n sheaf-kernel isometry");
    cmd_mukai_domain->add_option("--n", n_arg, "sheaf rank")->required();
    cmd_mukai_domain->add_option("--k", k_arg, "dual-side twist multiplier")->required();
    cmd_mukai_domain->add_option("--j", j_arg, "cross-term multiplier (default 1)");
    cmd_mukai_domain->add_option("--x", x_arg, "primitive 22-entry vector")->required();
    cmd_mukai_domain->add_option("--y", y_arg, "primitive 22-entry vector")->required();
    cmd_mukai_domain->add_option("--c", c_arg, "22x22 integer matrix")->required();
    CLI::App* cmd_mukai_universal = cmd_mukai->add_subcommand(
        "universal", "Check that the rank-n moduli model carries one polarization onto the other");
    cmd_mukai_universal->add_option("--n", n_arg, "sheaf rank")->required();
    cmd_mukai_universal->add_option("--s", s_arg, "half the polarization square divided by n")
        ->required();
    cmd_mukai_universal->add_option("--j", j_arg, "cross coefficient (default 1)");
    cmd_mukai_universal->add_option("--sign", sign_arg, "kernel sign convention: minus or plus");

    CLI::App* cmd_chern = app.add_subcommand("chern", "Chern-character identity checks");
    cmd_chern->require_subcommand(1);
    CLI::App* cmd_chern_verify = cmd_chern->add_subcommand(
        "verify", "Check the square-bundle identities on random rational root sets");
    cmd_chern_verify->add_option("--rank", rank, "largest bundle rank to sample (default 3)");
    cmd_chern_verify->add_option("--degree", degree, "truncation slot (default 8)");
    cmd_chern_verify->add_option("--trials", trials, "number of random root sets (default 50)");
    cmd_chern_verify->add_option("--seed", seed_arg,
                                 "RNG seed (default 0; K3LAT_SEED overrides)");

    CLI::App* cmd_selftest =
        app.add_subcommand("selftest", "Run one quick oracle per library area in parallel");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, err, err);
            return 0;
        }
        app.exit(e, err, err);
        return 2;
    }

    const auto started = std::chrono::steady_clock::now();
    std::string command;
    CommandOutcome oc;
    try {
        if (cmd_cyclic->parsed()) {
            command = "cyclic-type";
            oc = run_cyclic_type(lattice_arg, isometry_arg);
        } else if (cmd_double->parsed()) {
            command = "double-orbit";
            oc = run_double_orbit(plane_lattice_arg, matrix_arg);
        } else if (cmd_reflections->parsed()) {
            command = "decompose-reflections";
            oc = run_decompose_reflections(lattice_arg, isometry_arg);
        } else if (cmd_discriminant->parsed()) {
            command = "discriminant";
            oc = run_discriminant(lattice_arg, pair_arg, basis_arg, want_lagrangians, cap);
        } else if (cmd_congruence->parsed()) {
            command = "congruence";
            oc = run_congruence(lattice_arg, v1_arg, v2_arg, modulus_arg);
        } else if (cmd_reduce->parsed()) {
            command = "reduce-double-orbit";
            oc = run_reduce_double_orbit(lattice_arg, isometry_arg);
        } else if (cmd_mukai->parsed()) {
            if (cmd_mukai_pairing->parsed()) {
                command = "mukai pairing";
                oc = run_mukai_pairing(v1_arg, v2_arg);
            } else if (cmd_mukai_domain->parsed()) {
                command = "mukai domain";
                oc = run_mukai_domain(n_arg, k_arg, j_arg, x_arg, y_arg, c_arg);
            } else {
                command = "mukai universal";
                oc = run_mukai_universal(n_arg, s_arg, j_arg, sign_arg);
            }
        } else if (cmd_chern->parsed()) {
            command = "chern verify";
            oc = run_chern_verify(resolve_seed(seed_arg), rank, degree, trials);
        } else if (cmd_selftest->parsed()) {
            command = "selftest";
            oc = run_selftest();
        } else {
            throw usage_error("no command selected");
        }
    } catch (const usage_error& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "precondition violated: " << e.what() << "\n";
        return 3;
    } catch (const internal_error& e) {
        err << "internal invariant failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    ordered_json report;
    report["command"] = command;
    report["result"] = std::move(oc.result);
    report["verified"] = oc.verified;
    report["timing_ms"] = elapsed.count();
    out << report.dump() << "\n";

    for (const auto& [name, flag] : oc.verified.items()) {
        if (!(flag.is_boolean() && flag.get<bool>())) {
            err << "verification failed: " << name << "\n";
            return 4;
        }
    }
    return 0;
}

} // namespace k3lat::cli
