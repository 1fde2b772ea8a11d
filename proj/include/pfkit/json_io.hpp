#pragma once

/**
 * @file json_io.hpp
 * @brief JSON interchange for R1CS systems, witnesses and reports, and
 * syntactic diffing of systems.
 *
 * R1CS documents look like
 *
 *     {"constraints":[{"a":[["1","x"]],"b":[["1",null],["6","x"]],"c":[]}],
 *      "prime":"7","variables":["x"]}
 *
 * Coefficients are decimal strings in [0, p); a null pseudo-variable is
 * the constant One. Export writes sorted keys without insignificant
 * whitespace and a trailing newline, so equal systems give equal bytes.
 */

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"
#include "pfkit/r1cs.hpp"
#include "pfkit/simplify.hpp"
#include "pfkit/verify.hpp"

namespace pfkit::json_io {

using Json = nlohmann::json;

namespace detail {

inline Json lincomb_json(const LinearCombination& lc, const Prime& p) {
    Json out = Json::array();
    for (const auto& m : lc) {
        Json pv = m.pvar.is_one() ? Json(nullptr) : Json(m.pvar.name());
        out.push_back(Json::array({reduce_mod(m.coeff, p.value()).str(), pv}));
    }
    return out;
}

inline Json tuple_json(const Tuple& t) {
    Json out = Json::array();
    for (const auto& v : t) out.push_back(v.str());
    return out;
}

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw FormatError(where.empty() ? what : where + ": " + what);
}

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

inline BigInt decimal_field(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a decimal string");
    try {
        return parse_decimal(j.get<std::string>());
    } catch (const FormatError& e) {
        fail(where, e.what());
    }
}

inline LinearCombination read_lincomb(const Json& j, const Prime& p, const std::set<std::string>& declared,
                                      const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of monomials");
    LinearCombination out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        const Json& m = j[i];
        if (!m.is_array() || m.size() != 2) fail(at, "expected [coefficient, variable]");
        BigInt coeff = decimal_field(m[0], at);
        if (coeff < 0 || coeff >= p.value()) fail(at, "coefficient " + coeff.str() + " outside [0, " + p.str() + ")");
        if (m[1].is_null()) {
            out.push_back(Monomial{coeff, PseudoVar::one()});
            continue;
        }
        if (!m[1].is_string()) fail(at, "variable must be a string or null");
        std::string name = m[1].get<std::string>();
        if (!declared.contains(name)) fail(at, "unknown variable '" + name + "'");
        out.push_back(Monomial{coeff, PseudoVar::var(name)});
    }
    return out;
}

inline Json parse_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace detail

inline Json r1cs_to_json(const R1CSSystem& sys) {
    Json constraints = Json::array();
    for (const auto& k : sys.constraints) {
        constraints.push_back(Json{{"a", detail::lincomb_json(k.a, sys.prime)},
                                   {"b", detail::lincomb_json(k.b, sys.prime)},
                                   {"c", detail::lincomb_json(k.c, sys.prime)}});
    }
    return Json{{"prime", sys.prime.str()}, {"variables", sys.variables}, {"constraints", std::move(constraints)}};
}

/// Compact JSON with sorted keys and a trailing newline. Coefficients are
/// reduced into [0, p); monomial order is kept.
inline std::string export_r1cs(const R1CSSystem& sys) { return r1cs_to_json(sys).dump() + "\n"; }

inline R1CSSystem r1cs_from_json(const Json& doc) {
    if (!doc.is_object()) detail::fail("", "expected an object");
    const Json& prime_json = detail::member(doc, "prime", "");
    BigInt pv = detail::decimal_field(prime_json, "prime");
    if (!is_prime(pv)) detail::fail("prime", pv.str() + " is not prime");
    R1CSSystem sys{Prime(pv), {}, {}};

    const Json& vars = detail::member(doc, "variables", "");
    if (!vars.is_array()) detail::fail("variables", "expected an array");
    std::set<std::string> declared;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string at = "variables[" + std::to_string(i) + "]";
        if (!vars[i].is_string()) detail::fail(at, "expected a string");
        std::string name = vars[i].get<std::string>();
        if (name.empty()) detail::fail(at, "empty variable name");
        if (!declared.insert(name).second) detail::fail(at, "duplicate variable '" + name + "'");
        sys.variables.push_back(std::move(name));
    }

    const Json& cs = detail::member(doc, "constraints", "");
    if (!cs.is_array()) detail::fail("constraints", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string at = "constraints[" + std::to_string(i) + "]";
        if (!cs[i].is_object()) detail::fail(at, "expected an object with a, b, c");
        R1CSConstraint k;
        k.a = detail::read_lincomb(detail::member(cs[i], "a", at), sys.prime, declared, at + ".a");
        k.b = detail::read_lincomb(detail::member(cs[i], "b", at), sys.prime, declared, at + ".b");
        k.c = detail::read_lincomb(detail::member(cs[i], "c", at), sys.prime, declared, at + ".c");
        sys.constraints.push_back(std::move(k));
    }
    return sys;
}

/// Parses and validates an R1CS document. Throws FormatError with the
/// location of the first problem.
inline R1CSSystem import_r1cs(const std::string& text) { return r1cs_from_json(detail::parse_text(text)); }

/// Witness documents map variable names to decimal strings.
inline Valuation import_witness(const std::string& text, const Prime& p) {
    Json doc = detail::parse_text(text);
    if (!doc.is_object()) throw FormatError("witness: expected an object of name -> value");
    Valuation out;
    for (const auto& [name, value] : doc.items()) {
        BigInt v;
        if (value.is_string()) v = detail::decimal_field(value, name);
        else if (value.is_number_unsigned()) v = value.get<std::uint64_t>();
        else detail::fail(name, "expected a decimal string");
        out.bind(name, FieldElement(v, p));
    }
    return out;
}

inline Json witness_to_json(const Valuation& v) {
    Json out = Json::object();
    for (const auto& [name, value] : v) out[name] = value.str();
    return out;
}

inline std::string export_witness(const Valuation& v) { return witness_to_json(v).dump() + "\n"; }

struct DiffResult {
    enum class Kind { None, Prime, Variables, ConstraintCount, Monomial };

    bool equal = true;
    Kind kind = Kind::None;
    std::size_t constraint = 0;
    char side = 0;
    std::size_t position = 0;
    std::string message;
};

/**
 * Canonicalizes both systems and compares them structurally: prime,
 * variable list, number of constraints, then each side monomial by
 * monomial. Reports the first divergence.
 */
inline DiffResult diff_systems(const R1CSSystem& x, const R1CSSystem& y) {
    DiffResult d;
    auto differ = [&](DiffResult::Kind kind, std::string message) {
        d.equal = false;
        d.kind = kind;
        d.message = std::move(message);
        return d;
    };
    if (!(x.prime == y.prime)) return differ(DiffResult::Kind::Prime, "prime " + x.prime.str() + " vs " + y.prime.str());

    R1CSSystem cx = canonicalize(x);
    R1CSSystem cy = canonicalize(y);
    if (cx.variables != cy.variables) {
        std::size_t i = 0;
        while (i < cx.variables.size() && i < cy.variables.size() && cx.variables[i] == cy.variables[i]) ++i;
        d.position = i;
        auto name = [](const std::vector<std::string>& vs, std::size_t i) {
            return i < vs.size() ? "'" + vs[i] + "'" : std::string("end of list");
        };
        return differ(DiffResult::Kind::Variables,
                      "variables[" + std::to_string(i) + "]: " + name(cx.variables, i) + " vs " + name(cy.variables, i));
    }
    if (cx.constraints.size() != cy.constraints.size()) {
        d.constraint = std::min(cx.constraints.size(), cy.constraints.size());
        return differ(DiffResult::Kind::ConstraintCount, std::to_string(cx.constraints.size()) + " constraints vs " +
                                                             std::to_string(cy.constraints.size()));
    }
    for (std::size_t i = 0; i < cx.constraints.size(); ++i) {
        const R1CSConstraint& kx = cx.constraints[i];
        const R1CSConstraint& ky = cy.constraints[i];
        for (auto [side, lx, ly] : {std::tuple{'a', &kx.a, &ky.a}, std::tuple{'b', &kx.b, &ky.b},
                                    std::tuple{'c', &kx.c, &ky.c}}) {
            if (*lx == *ly) continue;
            std::size_t j = 0;
            while (j < lx->size() && j < ly->size() && (*lx)[j] == (*ly)[j]) ++j;
            auto mono = [](const LinearCombination& lc, std::size_t j) {
                return j < lc.size() ? lc[j].coeff.str() + "*" + lc[j].pvar.str() : std::string("nothing");
            };
            d.constraint = i;
            d.side = side;
            d.position = j;
            return differ(DiffResult::Kind::Monomial, "constraints[" + std::to_string(i) + "]." + side + "[" +
                                                          std::to_string(j) + "]: " + mono(*lx, j) + " vs " +
                                                          mono(*ly, j));
        }
    }
    return d;
}

inline Json diff_to_json(const DiffResult& d) {
    if (d.equal) return Json{{"equal", true}};
    Json out{{"equal", false}, {"message", d.message}};
    switch (d.kind) {
        case DiffResult::Kind::Prime: out["divergence"] = "prime"; break;
        case DiffResult::Kind::Variables:
            out["divergence"] = "variables";
            out["position"] = d.position;
            break;
        case DiffResult::Kind::ConstraintCount:
            out["divergence"] = "constraint_count";
            out["constraint"] = d.constraint;
            break;
        case DiffResult::Kind::Monomial:
            out["divergence"] = "monomial";
            out["constraint"] = d.constraint;
            out["side"] = std::string(1, d.side);
            out["position"] = d.position;
            break;
        case DiffResult::Kind::None: break;
    }
    return out;
}

inline Json simplify_to_json(const SimplifyReport& r) {
    Json eliminated = Json::array();
    for (const auto& s : r.eliminated) {
        eliminated.push_back(Json{{"variable", s.variable}, {"rhs", detail::lincomb_json(s.rhs, r.residual.prime)}});
    }
    return Json{{"eliminated", std::move(eliminated)}, {"residual", r1cs_to_json(r.residual)}, {"rounds", r.rounds}};
}

inline Json verdict_to_json(const verify::VerdictReport& r) {
    Json out{{"relation", r.relation},
             {"spec", r.spec_id},
             {"prime", r.prime},
             {"order", r.order},
             {"passed", r.passed()},
             {"solutions", r.solutions},
             {"enumerated", r.enumerated},
             {"domain_restricted", r.domain_restricted},
             {"out_of_domain", r.out_of_domain}};
    if (r.first_out_of_domain) out["first_out_of_domain"] = detail::tuple_json(*r.first_out_of_domain);
    if (r.sound) {
        out["sound"] = *r.sound;
        if (r.unsound_tuple) out["counterexample"] = detail::tuple_json(*r.unsound_tuple);
    }
    if (r.complete) {
        out["complete"] = *r.complete;
        if (r.missing_tuple) out["missing"] = detail::tuple_json(*r.missing_tuple);
    }
    if (r.deterministic) {
        out["deterministic"] = *r.deterministic;
        out["inputs"] = r.inputs;
        if (r.collision) {
            out["collision"] = Json::array({detail::tuple_json(r.collision->first), detail::tuple_json(r.collision->second)});
        }
    }
    if (r.hypothesis_violation) out["hypothesis_violation"] = *r.hypothesis_violation;
    if (r.known_nondeterministic) out["known_nondeterministic"] = true;
    return out;
}

}  // namespace pfkit::json_io
