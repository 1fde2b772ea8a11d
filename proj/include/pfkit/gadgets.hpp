#pragma once

/**
 * @file gadgets.hpp
 * @brief Gadget constructors emitted as PFCS definitions.
 *
 * Each bundle is self-contained: it carries the top relation and every
 * relation it calls, in dependency order. Families indexed by a size n
 * get the suffix `_<n>` on the relation name and on indexed parameters.
 */

#include <string>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/pfcs.hpp"

namespace pfkit::gadgets {

struct GadgetBundle {
    pfcs::System defs;
    std::string top;
    std::string spec_id;

    const pfcs::Definition& definition() const { return defs.get(top); }
    std::size_t arity() const { return definition().params.size(); }
};

namespace detail {

inline std::string iname(const std::string& base, std::size_t i) { return base + "_" + std::to_string(i); }

inline std::vector<std::string> iname_list(const std::string& base, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(iname(base, i));
    return out;
}

// e1 + -1 * e2
inline pfcs::Expr minus(pfcs::Expr a, pfcs::Expr b) { return std::move(a) + pfcs::cst(-1) * std::move(b); }

// names[0] + 2 * names[1] + 4 * names[2] + ...
inline pfcs::Expr pow2sum(const std::vector<std::string>& names) {
    pfcs::Expr sum = pfcs::var(names.at(0));
    BigInt weight = 1;
    for (std::size_t i = 1; i < names.size(); ++i) {
        weight *= 2;
        sum = sum + pfcs::cst(weight) * pfcs::var(names[i]);
    }
    return sum;
}

inline pfcs::Definition boolean_assert_def() {
    using namespace pfcs;
    return Definition{"boolean_assert", {"x"}, {Equal{var("x") * (cst(1) + cst(-1) * var("x")), cst(0)}}};
}

inline pfcs::Definition if_then_else_def() {
    using namespace pfcs;
    return Definition{"if_then_else",
                      {"w", "x", "y", "z"},
                      {Equal{var("w") * minus(var("x"), var("y")), minus(var("z"), var("y"))}}};
}

inline pfcs::Definition equality_test_def() {
    using namespace pfcs;
    return Definition{"equality_test",
                      {"u", "v", "w"},
                      {Equal{minus(var("u"), var("v")) * var("s"), minus(cst(1), var("w"))},
                       Equal{minus(var("u"), var("v")) * var("w"), cst(0)}}};
}

inline std::vector<pfcs::Constraint> assert_bits(const std::vector<std::string>& names) {
    std::vector<pfcs::Constraint> out;
    for (const auto& n : names) out.push_back(pfcs::Call{"boolean_assert", {pfcs::var(n)}});
    return out;
}

}  // namespace detail

/// x * (1 - x) == 0; spec bitp.
inline GadgetBundle boolean_assert() {
    return GadgetBundle{pfcs::System{{detail::boolean_assert_def()}}, "boolean_assert", "bitp"};
}

/// n calls of boolean_assert; spec bit_listp.
inline GadgetBundle boolean_assert_list(std::size_t n) {
    auto xs = detail::iname_list("x", n);
    pfcs::Definition top{detail::iname("boolean_assert_list", n), xs, detail::assert_bits(xs)};
    return GadgetBundle{pfcs::System{{detail::boolean_assert_def(), top}}, top.name, "bit_listp"};
}

/// w * (x - y) == z - y; z = x if w = 1, y if w = 0, given bitp(w).
inline GadgetBundle if_then_else() {
    return GadgetBundle{pfcs::System{{detail::if_then_else_def()}}, "if_then_else", "if_then_else"};
}

/// (u - v) * s == 1 - w, (u - v) * w == 0; w = [u = v] with internal s.
inline GadgetBundle equality_test() {
    return GadgetBundle{pfcs::System{{detail::equality_test_def()}}, "equality_test", "equality_test"};
}

/// z = x if u = v else y, sharing w between the two sub-gadgets.
inline GadgetBundle if_equal_then_else() {
    using namespace pfcs;
    Definition top{"if_equal_then_else",
                   {"u", "v", "x", "y", "z"},
                   {Call{"if_then_else", {var("w"), var("x"), var("y"), var("z")}},
                    Call{"equality_test", {var("u"), var("v"), var("w")}}}};
    return GadgetBundle{System{{detail::if_then_else_def(), detail::equality_test_def(), top}}, top.name,
                        "if_equal_then_else"};
}

/**
 * Unsigned n-bit addition: z_0..z_n are bits and
 * sum 2^i z_i == sum 2^i x_i + sum 2^i y_i. The spec additionally needs
 * bit inputs and a prime of at least n + 2 bits.
 */
inline GadgetBundle unsigned_add(std::size_t n) {
    if (n == 0) throw UsageError("unsigned_add needs n >= 1");
    using namespace pfcs;
    auto xs = detail::iname_list("x", n);
    auto ys = detail::iname_list("y", n);
    auto zs = detail::iname_list("z", n + 1);
    std::vector<std::string> params = xs;
    params.insert(params.end(), ys.begin(), ys.end());
    params.insert(params.end(), zs.begin(), zs.end());
    auto body = detail::assert_bits(zs);
    body.push_back(Equal{detail::pow2sum(zs), detail::pow2sum(xs) + detail::pow2sum(ys)});
    Definition top{detail::iname("unsigned_add", n), params, body};
    return GadgetBundle{System{{detail::boolean_assert_def(), top}}, top.name, "unsigned_add"};
}

/// x * y == 1 - z.
inline GadgetBundle nand() {
    using namespace pfcs;
    Definition top{"nand", {"x", "y", "z"}, {Equal{var("x") * var("y"), detail::minus(cst(1), var("z"))}}};
    return GadgetBundle{System{{top}}, "nand", "nand"};
}

/**
 * Field element to n bits without a range check: bits b_i and
 * sum 2^i b_i == f. Not deterministic when 2^n > p, since the bits of any
 * f + k*p below 2^n also satisfy it.
 */
inline GadgetBundle bits_to_field_unchecked(std::size_t n) {
    if (n == 0) throw UsageError("bits_to_field_unchecked needs n >= 1");
    using namespace pfcs;
    auto bs = detail::iname_list("b", n);
    std::vector<std::string> params{"f"};
    params.insert(params.end(), bs.begin(), bs.end());
    auto body = detail::assert_bits(bs);
    body.push_back(Equal{detail::pow2sum(bs), var("f")});
    Definition top{detail::iname("bits_to_field_unchecked", n), params, body};
    return GadgetBundle{System{{detail::boolean_assert_def(), top}}, top.name, "bits_to_field"};
}

/// Names accepted by by_name, and whether each takes a size.
struct GadgetInfo {
    const char* name;
    bool sized;
};

inline const std::vector<GadgetInfo>& catalog() {
    static const std::vector<GadgetInfo> list{
        {"boolean_assert", false},  {"boolean_assert_list", true}, {"if_then_else", false},
        {"equality_test", false},   {"if_equal_then_else", false}, {"unsigned_add", true},
        {"nand", false},            {"bits_to_field_unchecked", true},
    };
    return list;
}

inline GadgetBundle by_name(const std::string& name, std::size_t n) {
    if (name == "boolean_assert") return boolean_assert();
    if (name == "boolean_assert_list") return boolean_assert_list(n);
    if (name == "if_then_else") return if_then_else();
    if (name == "equality_test") return equality_test();
    if (name == "if_equal_then_else") return if_equal_then_else();
    if (name == "unsigned_add") return unsigned_add(n);
    if (name == "nand") return nand();
    if (name == "bits_to_field_unchecked") return bits_to_field_unchecked(n);
    throw UsageError("unknown gadget '" + name + "'");
}

}  // namespace pfkit::gadgets
