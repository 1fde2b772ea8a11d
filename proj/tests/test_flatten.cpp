#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "pfkit/flatten.hpp"
#include "pfkit/gadgets.hpp"
#include "pfkit/pfcs_parser.hpp"

using namespace pfkit;
using pfcs::cst;
using pfcs::var;

namespace {

Monomial m(long c, const std::string& v) { return Monomial{BigInt(c), v.empty() ? PseudoVar::one() : PseudoVar::var(v)}; }

std::vector<gadgets::GadgetBundle> all_bundles() {
    return {gadgets::boolean_assert(),        gadgets::boolean_assert_list(3), gadgets::if_then_else(),
            gadgets::equality_test(),         gadgets::if_equal_then_else(),   gadgets::nand(),
            gadgets::unsigned_add(1),         gadgets::unsigned_add(2),        gadgets::bits_to_field_unchecked(3)};
}

}  // namespace

TEST(NormalizeEquality, BooleanAssert) {
    auto n = normalize_equality(var("x") * (cst(1) + cst(-1) * var("x")), cst(0));
    EXPECT_EQ(n.a, (LinearCombination{m(1, "x")}));
    EXPECT_EQ(n.b, (LinearCombination{m(1, ""), m(-1, "x")}));
    EXPECT_TRUE(n.c.empty());
}

TEST(NormalizeEquality, Linear) {
    auto n = normalize_equality(var("x"), var("y"));
    EXPECT_EQ(n.a, (LinearCombination{m(1, "x")}));
    EXPECT_EQ(n.b, (LinearCombination{m(1, "")}));
    EXPECT_EQ(n.c, (LinearCombination{m(1, "y")}));
}

TEST(NormalizeEquality, Rejections) {
    EXPECT_THROW(normalize_equality(var("x") * var("y") * var("z"), cst(0)), NotR1CSForm);
    EXPECT_THROW(normalize_equality(var("x"), var("y") * var("z")), NotR1CSForm);
    EXPECT_THROW(normalize_equality(var("x") * var("y") + var("z") * var("w"), cst(0)), NotR1CSForm);
    // factorable as y * (x + z), but not written as one product
    EXPECT_THROW(normalize_equality(var("x") * var("y") + var("y") * var("z"), cst(0)), NotR1CSForm);
}

TEST(NormalizeEquality, ConstantFactorsAndLinearRemainder) {
    // 3 * x * (y + 1) + 2 * z + 5 == w
    auto n = normalize_equality(cst(3) * var("x") * (var("y") + cst(1)) + cst(2) * var("z") + cst(5), var("w"));
    EXPECT_EQ(n.a, (LinearCombination{m(3, "x")}));
    EXPECT_EQ(n.b, (LinearCombination{m(1, "y"), m(1, "")}));
    EXPECT_EQ(n.c, (LinearCombination{m(1, "w"), m(-2, "z"), m(-5, "")}));
}

TEST(NormalizeEquality, PreservesSolutions) {
    // compare the equality and its R1CS rendering on every assignment
    std::vector<std::pair<pfcs::Expr, pfcs::Expr>> cases{
        {var("x") * (cst(1) + cst(-1) * var("x")), cst(0)},
        {cst(3) * var("x") * (var("y") + cst(1)) + cst(2) * var("z") + cst(5), var("x") + var("z")},
        {(var("x") + var("x")) * cst(2) * (var("y") + cst(-3)), cst(4) * var("y")},
        {cst(7) + var("x") * var("y"), var("z")},
        {var("x") + cst(2) * var("y"), cst(-1)},
    };
    const long p = 7;
    Prime P(7);
    for (const auto& [lhs, rhs] : cases) {
        auto n = normalize_equality(lhs, rhs);
        R1CSSystem sys{P, {"x", "y", "z"}, {n.constraint()}};
        oracle::odometer(3, p, [&](const oracle::ITuple& t) {
            std::map<std::string, oracle::I> rho{{"x", t[0]}, {"y", t[1]}, {"z", t[2]}};
            bool direct = oracle::eval_expr(lhs, rho, p) == oracle::eval_expr(rhs, rho, p);
            EXPECT_EQ(oracle::holds(sys, rho, p), direct) << pfcs::print_expr(lhs);
        });
    }
}

TEST(Flatten, BooleanAssert) {
    auto g = gadgets::boolean_assert();
    auto r = flatten(g.defs, g.top, Prime(7));
    EXPECT_EQ(r.system.constraints.size(), 1u);
    EXPECT_TRUE(r.internal_names.empty());
    EXPECT_EQ(r.system.variables, std::vector<std::string>{"x"});
}

TEST(Flatten, IfEqualThenElse) {
    auto g = gadgets::if_equal_then_else();
    auto r = flatten(g.defs, g.top, Prime(7));
    EXPECT_EQ(r.system.constraints.size(), 3u);
    EXPECT_EQ(r.internal_names, (std::vector<std::string>{"if_equal_then_else.0.w", "equality_test.2.s"}));
    EXPECT_EQ(r.system.variables, (std::vector<std::string>{"u", "v", "x", "y", "z", "if_equal_then_else.0.w",
                                                            "equality_test.2.s"}));
    // the conditional comes first, with w renamed
    EXPECT_EQ(r.system.constraints[0].a, (LinearCombination{m(1, "if_equal_then_else.0.w")}));
    EXPECT_TRUE(well_formed(r.system));
}

TEST(Flatten, BooleanAssertList) {
    auto g = gadgets::boolean_assert_list(3);
    auto r = flatten(g.defs, g.top, Prime(7));
    EXPECT_EQ(r.system.constraints.size(), 3u);
    EXPECT_TRUE(r.internal_names.empty());
}

TEST(Flatten, Errors) {
    auto g = gadgets::boolean_assert();
    EXPECT_THROW(flatten(g.defs, "nope", Prime(7)), UsageError);
    auto sys = pfcs::parse_system("cube(x) { x * x * x == 1 }\nr(a) { cube(a) }");
    try {
        flatten(sys, "r", Prime(7));
        FAIL();
    } catch (const NotR1CSForm& e) {
        EXPECT_NE(std::string(e.what()).find("cube"), std::string::npos);
    }
    auto sq = pfcs::parse_system("sq(x) { x * x == 0 }\nr(a) { sq(a * a) }");
    EXPECT_THROW(flatten(sq, "r", Prime(7)), NotR1CSForm);
}

TEST(Flatten, LinearArgumentsAllowedAnywhere) {
    auto sys = pfcs::parse_system("mul(x, y, z) { x * y == z }\nr(a, b) { mul(a + 1, 2 * b + a, a + b) }");
    auto r = flatten(sys, "r", Prime(5));
    ASSERT_EQ(r.system.constraints.size(), 1u);
    EXPECT_EQ(oracle::r1cs_projection(r.system, {"a", "b"}, 5), oracle::pfcs_relation(sys, "r", 5));
}

TEST(Flatten, NamesAreFreshAndDeterministic) {
    for (const auto& g : all_bundles()) {
        auto r = flatten(g.defs, g.top, Prime(7));
        std::set<std::string> seen(r.internal_names.begin(), r.internal_names.end());
        EXPECT_EQ(seen.size(), r.internal_names.size());
        for (const auto& [param, v] : r.external_map) {
            EXPECT_EQ(param, v);
            EXPECT_FALSE(seen.contains(v));
        }
        EXPECT_TRUE(well_formed(r.system)) << g.top;
        auto again = flatten(g.defs, g.top, Prime(7));
        EXPECT_EQ(again.system, r.system);
        EXPECT_EQ(again.internal_names, r.internal_names);
    }
}

TEST(Flatten, RepeatedCallsGetDistinctNames) {
    auto sys = pfcs::parse_system("nz(x) { x * s == 1 }\nr(a, b) {\n  nz(a)\n  nz(b)\n}\n");
    auto r = flatten(sys, "r", Prime(7));
    EXPECT_EQ(r.internal_names, (std::vector<std::string>{"nz.1.s", "nz.2.s"}));
}

TEST(FlattenEquiv, Examples) {
    auto ba = gadgets::boolean_assert();
    auto r = flatten_equiv_report(ba.defs, ba.top, Prime(7));
    EXPECT_TRUE(r.equivalent());
    EXPECT_EQ(r.pfcs_solutions, 2u);

    auto eq = gadgets::equality_test();
    auto r2 = flatten_equiv_report(eq.defs, eq.top, Prime(5));
    EXPECT_TRUE(r2.equivalent());
    EXPECT_EQ(r2.pfcs_solutions, 25u);
    EXPECT_EQ(r2.r1cs_solutions, 25u);
}

TEST(FlattenEquiv, DroppedConstraintDetected) {
    auto eq = gadgets::equality_test();
    Prime p(5);
    auto flat = flatten(eq.defs, eq.top, p);
    flat.system.constraints.pop_back();
    auto r = flatten_equiv_report(eq.defs, eq.top, flat, p);
    EXPECT_EQ(r.status, EquivalenceReport::Status::NotEquivalent);
    ASSERT_TRUE(r.counterexample.has_value());
    EXPECT_FALSE(r.counterexample_satisfies_pfcs);
}

TEST(FlattenEquiv, NameCollisionDetected) {
    // renaming the internal s onto the external w changes the relation
    auto eq = gadgets::equality_test();
    Prime p(5);
    auto flat = flatten(eq.defs, eq.top, p);
    for (auto& k : flat.system.constraints) {
        for (auto* lc : {&k.a, &k.b, &k.c}) {
            for (auto& mono : *lc) {
                if (!mono.pvar.is_one() && mono.pvar.name() == "equality_test.0.s") mono.pvar = PseudoVar::var("w");
            }
        }
    }
    flat.system.variables.pop_back();
    auto r = flatten_equiv_report(eq.defs, eq.top, flat, p);
    EXPECT_EQ(r.status, EquivalenceReport::Status::NotEquivalent);
}

TEST(FlattenEquiv, Aborted) {
    auto g = gadgets::equality_test();
    auto r = flatten_equiv_report(g.defs, g.top, Prime(7), 50);
    EXPECT_EQ(r.status, EquivalenceReport::Status::Aborted);
}

TEST(FlattenEquiv, AllBundlesAtSeveralPrimes) {
    for (long pv : {5, 7, 11, 13}) {
        for (const auto& g : all_bundles()) {
            auto r = flatten_equiv_report(g.defs, g.top, Prime(static_cast<std::uint64_t>(pv)), 3'000'000);
            if (pv <= 7) EXPECT_EQ(r.status, EquivalenceReport::Status::Equivalent) << g.top << " p=" << pv;
            else EXPECT_NE(r.status, EquivalenceReport::Status::NotEquivalent) << g.top << " p=" << pv;
        }
    }
}

TEST(FlattenEquiv, AgreesWithNaiveFlatEnumeration) {
    for (long pv : {3, 5}) {
        Prime p(static_cast<std::uint64_t>(pv));
        for (const auto& g : {gadgets::equality_test(), gadgets::if_then_else(), gadgets::bits_to_field_unchecked(2),
                              gadgets::unsigned_add(1)}) {
            auto flat = flatten(g.defs, g.top, p);
            EXPECT_EQ(oracle::r1cs_projection(flat.system, flat.externals(), pv), oracle::pfcs_relation(g.defs, g.top, pv))
                << g.top;
        }
    }
}

TEST(Witness, RoundTripThroughProofTree) {
    auto g = gadgets::if_equal_then_else();
    Prime p(7);
    std::vector<FieldElement> args;
    for (long v : {2, 3, 4, 1, 1}) args.emplace_back(BigInt(v), p);
    auto outcome = pfcs::sat_search(g.defs, g.top, args, p);
    ASSERT_TRUE(outcome.is_satisfied());
    Valuation w = witness_of(g.defs, outcome.witness());
    EXPECT_EQ(w.lookup("if_equal_then_else.0.w").value(), 0);
    EXPECT_EQ(w.lookup("equality_test.2.s").value(), 6);  // inv(2 - 3) = inv(6) = 6

    auto tree = proof_from_witness(g.defs, g.top, args, w, p);
    std::vector<BigInt> vals;
    for (const auto& a : args) vals.push_back(a.value());
    EXPECT_TRUE(pfcs::check_proof(g.defs, pfcs::ground_call(g.top, vals), pfcs::Assignment{}, tree, p));
    EXPECT_EQ(tree, outcome.witness());

    // the same values satisfy the flattened system
    auto flat = flatten(g.defs, g.top, p);
    Valuation full = w;
    for (std::size_t i = 0; i < args.size(); ++i) full.bind(flat.system.variables[i], args[i]);
    EXPECT_TRUE(system_holds(flat.system, full));
}

TEST(Witness, LocalNamesForTopLevelInternals) {
    auto g = gadgets::equality_test();
    Prime p(7);
    std::vector<FieldElement> args;
    for (long v : {3, 5, 0}) args.emplace_back(BigInt(v), p);
    Valuation w;
    w.bind("s", FieldElement(BigInt(3), p));
    auto tree = proof_from_witness(g.defs, g.top, args, w, p);
    EXPECT_TRUE(pfcs::check_proof(g.defs, pfcs::ground_call(g.top, {3, 5, 0}), pfcs::Assignment{}, tree, p));
    EXPECT_THROW(proof_from_witness(g.defs, g.top, args, Valuation{}, p), UsageError);
}
