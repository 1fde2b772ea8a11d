#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pfkit/gadgets.hpp"
#include "pfkit/pfcs_parser.hpp"
#include "pfkit/pfcs_sem.hpp"

using namespace pfkit;
using namespace pfkit::pfcs;

namespace {

Assignment asg(const Prime& p, std::initializer_list<std::pair<const char*, long>> binds) {
    Assignment a;
    for (auto [n, x] : binds) a.bind(n, FieldElement(BigInt(x), p));
    return a;
}

std::vector<FieldElement> args(const Prime& p, std::initializer_list<long> vs) {
    std::vector<FieldElement> out;
    for (long v : vs) out.emplace_back(BigInt(v), p);
    return out;
}

std::vector<BigInt> ints(std::initializer_list<long> vs) {
    std::vector<BigInt> out;
    for (long v : vs) out.emplace_back(v);
    return out;
}

ProofTree leaves_for(const System& defs, const std::string& rel, const Call& call, Assignment ext,
                     std::vector<ProofTree> calls = {}) {
    CallNode node{call, std::move(ext), {}};
    std::size_t next_call = 0;
    for (const auto& c : defs.get(rel).body) {
        if (const auto* eq = std::get_if<Equal>(&c)) node.subtrees.push_back(ProofTree{EqualityLeaf{*eq}});
        else node.subtrees.push_back(calls.at(next_call++));
    }
    return ProofTree{node};
}

}  // namespace

TEST(EvalExpr, Examples) {
    Prime p(7);
    Assignment rho = asg(p, {{"x", 3}, {"y", 5}});
    EXPECT_EQ(eval_expr(var("x") + cst(-1) * var("y"), rho, p).value(), 5);
    EXPECT_EQ(eval_expr(cst(0), rho, p).value(), 0);
    EXPECT_EQ(eval_expr(cst(-1), rho, p).value(), 6);
    EXPECT_THROW(eval_expr(var("q"), rho, p), UnboundVariable);
}

TEST(CheckProof, BooleanAssert) {
    Prime p(7);
    auto g = gadgets::boolean_assert();
    Call call = ground_call("boolean_assert", ints({1}));
    ProofTree tree = leaves_for(g.defs, "boolean_assert", call, asg(p, {{"x", 1}}));
    EXPECT_TRUE(check_proof(g.defs, call, Assignment{}, tree, p));

    Call bad = ground_call("boolean_assert", ints({2}));
    ProofTree bad_tree = leaves_for(g.defs, "boolean_assert", bad, asg(p, {{"x", 2}}));
    ProofCheck r = check_proof(g.defs, bad, Assignment{}, bad_tree, p);
    EXPECT_FALSE(r);
    EXPECT_FALSE(r.reason.empty());
}

TEST(CheckProof, IfEqualThenElseByHand) {
    Prime p(7);
    auto g = gadgets::if_equal_then_else();
    Call top = ground_call("if_equal_then_else", ints({2, 2, 4, 1, 4}));
    const auto& body = g.defs.get("if_equal_then_else").body;
    ProofTree ite = leaves_for(g.defs, "if_then_else", std::get<Call>(body[0]),
                               asg(p, {{"w", 1}, {"x", 4}, {"y", 1}, {"z", 4}}));
    ProofTree eqt = leaves_for(g.defs, "equality_test", std::get<Call>(body[1]),
                               asg(p, {{"u", 2}, {"v", 2}, {"w", 1}, {"s", 0}}));
    ProofTree tree = leaves_for(g.defs, "if_equal_then_else", top,
                                asg(p, {{"u", 2}, {"v", 2}, {"x", 4}, {"y", 1}, {"z", 4}, {"w", 1}}), {ite, eqt});
    EXPECT_TRUE(check_proof(g.defs, top, Assignment{}, tree, p));
}

TEST(CheckProof, WrongExtendedAssignment) {
    Prime p(7);
    auto g = gadgets::boolean_assert();
    Call call = ground_call("boolean_assert", ints({1}));
    ProofTree tree = leaves_for(g.defs, "boolean_assert", call, asg(p, {{"x", 0}}));
    EXPECT_FALSE(check_proof(g.defs, call, Assignment{}, tree, p));
}

TEST(CheckProof, StructuralMismatches) {
    Prime p(7);
    auto g = gadgets::equality_test();
    Call call = ground_call("equality_test", ints({3, 5, 0}));
    ProofTree good = leaves_for(g.defs, "equality_test", call, asg(p, {{"u", 3}, {"v", 5}, {"w", 0}, {"s", 3}}));
    EXPECT_TRUE(check_proof(g.defs, call, Assignment{}, good, p));

    ProofTree short_tree = good;
    std::get<CallNode>(short_tree.node).subtrees.pop_back();
    EXPECT_FALSE(check_proof(g.defs, call, Assignment{}, short_tree, p));

    Call wrong_arity = ground_call("equality_test", ints({3, 5}));
    EXPECT_FALSE(check_proof(g.defs, wrong_arity, Assignment{}, good, p));

    Call unknown = ground_call("nope", ints({1}));
    EXPECT_FALSE(check_proof(g.defs, unknown, Assignment{}, good, p));

    // an equality certified by a call node
    Equal eq{cst(1), cst(1)};
    EXPECT_FALSE(check_proof(g.defs, eq, Assignment{}, good, p));
    EXPECT_TRUE(check_proof(g.defs, eq, Assignment{}, ProofTree{EqualityLeaf{eq}}, p));

    // missing witness value
    ProofTree no_s = leaves_for(g.defs, "equality_test", call, asg(p, {{"u", 3}, {"v", 5}, {"w", 0}}));
    EXPECT_FALSE(check_proof(g.defs, call, Assignment{}, no_s, p));
}

TEST(SatSearch, Examples) {
    Prime p(7);
    auto eq = gadgets::equality_test();
    SatOutcome r = sat_search(eq.defs, "equality_test", args(p, {3, 5, 0}), p);
    ASSERT_TRUE(r.is_satisfied());
    const auto& node = std::get<CallNode>(r.witness().node);
    EXPECT_EQ(node.extended.lookup("s").value(), 3);

    EXPECT_TRUE(sat_search(eq.defs, "equality_test", args(p, {3, 3, 0}), p).is_unsatisfiable());

    auto ba = gadgets::boolean_assert();
    EXPECT_TRUE(sat_search(ba.defs, "boolean_assert", args(p, {1}), p).is_satisfied());
    EXPECT_TRUE(sat_search(ba.defs, "boolean_assert", args(p, {2}), p).is_unsatisfiable());
}

TEST(SatSearch, LeastWitness) {
    Prime p(7);
    auto eq = gadgets::equality_test();
    SatOutcome r = sat_search(eq.defs, "equality_test", args(p, {4, 4, 1}), p);
    ASSERT_TRUE(r.is_satisfied());
    EXPECT_EQ(std::get<CallNode>(r.witness().node).extended.lookup("s").value(), 0);
}

TEST(SatSearch, Errors) {
    Prime p(7);
    auto eq = gadgets::equality_test();
    EXPECT_THROW(sat_search(eq.defs, "nope", args(p, {1}), p), UsageError);
    EXPECT_THROW(sat_search(eq.defs, "equality_test", args(p, {1, 2}), p), UsageError);
    Prime q(5);
    EXPECT_THROW(sat_search(eq.defs, "equality_test", args(q, {1, 2, 0}), p), UsageError);
}

TEST(SatSearch, AbortedIsNotUnsatisfiable) {
    System sys = parse_system("r(x) { a * b * c == x; a == 0 }");
    Prime p(7);
    SatOutcome r = sat_search(sys, "r", args(p, {6}), p, 20);
    ASSERT_TRUE(r.is_aborted());
    EXPECT_EQ(r.search_space(), BigInt(343));
    EXPECT_TRUE(sat_search(sys, "r", args(p, {6}), p).is_unsatisfiable());
    EXPECT_TRUE(sat_search(sys, "r", args(p, {0}), p).is_satisfied());
}

TEST(SatSearch, ArgumentsReducedModP) {
    Prime p(7);
    auto ba = gadgets::boolean_assert();
    Solver s(ba.defs, p);
    EXPECT_TRUE(s.satisfiable("boolean_assert", ints({8})));
    EXPECT_TRUE(s.satisfiable("boolean_assert", ints({-6})));
    EXPECT_FALSE(s.satisfiable("boolean_assert", ints({-1})));
}

namespace {

std::vector<gadgets::GadgetBundle> small_bundles() {
    return {gadgets::boolean_assert(),      gadgets::boolean_assert_list(2), gadgets::if_then_else(),
            gadgets::equality_test(),       gadgets::nand(),                 gadgets::bits_to_field_unchecked(2),
            gadgets::if_equal_then_else(),  gadgets::unsigned_add(1)};
}

}  // namespace

TEST(SatSearch, AgreesWithNaiveSemantics) {
    for (long pv : {3, 5}) {
        Prime p(static_cast<std::uint64_t>(pv));
        for (const auto& g : small_bundles()) {
            Solver solver(g.defs, p);
            auto naive = oracle::pfcs_relation(g.defs, g.top, pv);
            oracle::odometer(g.arity(), pv, [&](const oracle::ITuple& t) {
                std::vector<BigInt> a(t.begin(), t.end());
                EXPECT_EQ(solver.satisfiable(g.top, a), naive.contains(t)) << g.top << " p=" << pv;
            });
            EXPECT_EQ(oracle::to_iset(satisfying_tuples(solver, g.top)), naive) << g.top;
        }
    }
}

TEST(SatSearch, EveryWitnessChecks) {
    Prime p(5);
    for (const auto& g : small_bundles()) {
        oracle::odometer(g.arity(), 5, [&](const oracle::ITuple& t) {
            std::vector<FieldElement> a;
            for (auto v : t) a.emplace_back(BigInt(v), p);
            SatOutcome r = sat_search(g.defs, g.top, a, p);
            if (!r.is_satisfied()) return;
            std::vector<BigInt> vals(t.begin(), t.end());
            ProofCheck c = check_proof(g.defs, ground_call(g.top, vals), Assignment{}, r.witness(), p);
            EXPECT_TRUE(c) << g.top << ": " << c.reason;
        });
    }
}

TEST(SatSearch, NoInternalsMeansDirectCheck) {
    Prime p(7);
    auto g = gadgets::if_then_else();
    Solver solver(g.defs, p);
    oracle::odometer(4, 7, [&](const oracle::ITuple& t) {
        bool direct = oracle::mod(t[0] * (t[1] - t[2]), 7) == oracle::mod(t[3] - t[2], 7);
        EXPECT_EQ(solver.satisfiable("if_then_else", std::vector<BigInt>(t.begin(), t.end())), direct);
    });
}

TEST(SatSearch, UnusedDefinitionsDoNotMatter) {
    Prime p(5);
    auto g = gadgets::equality_test();
    System bigger = g.defs;
    bigger.definitions.insert(bigger.definitions.begin(), gadgets::nand().definition());
    bigger.definitions.push_back(parse_system("junk(q) { q * q == 3 }").definitions[0]);
    Solver a(g.defs, p), b(bigger, p);
    EXPECT_EQ(satisfying_tuples(a, g.top), satisfying_tuples(b, g.top));
}

TEST(SatSearch, InternalsScopedPerCall) {
    // each call's s is searched independently
    System sys = parse_system(
        "nz(x) { x * s == 1 }\n"
        "both(a, b) {\n  nz(a)\n  nz(b)\n}\n");
    Prime p(7);
    SatOutcome r = sat_search(sys, "both", args(p, {3, 5}), p);
    ASSERT_TRUE(r.is_satisfied());
    const auto& top = std::get<CallNode>(r.witness().node);
    EXPECT_EQ(std::get<CallNode>(top.subtrees[0].node).extended.lookup("s").value(), 5);
    EXPECT_EQ(std::get<CallNode>(top.subtrees[1].node).extended.lookup("s").value(), 3);
    EXPECT_TRUE(sat_search(sys, "both", args(p, {3, 0}), p).is_unsatisfiable());
}

TEST(SatSearch, ArityMismatchInBodyCall) {
    System sys{{Definition{"s", {"x"}, {Equal{var("x"), cst(0)}}},
                Definition{"r", {"x"}, {Call{"s", {var("x"), var("x")}}}}}};
    Prime p(5);
    EXPECT_THROW(sat_search(sys, "r", args(p, {0}), p), UsageError);
}
