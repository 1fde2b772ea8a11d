#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "pfkit/flatten.hpp"
#include "pfkit/gadgets.hpp"
#include "pfkit/json_io.hpp"

using namespace pfkit;
using namespace pfkit::json_io;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(PFKIT_GOLDEN_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing golden file " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Monomial m(long c, const std::string& v) { return Monomial{BigInt(c), v.empty() ? PseudoVar::one() : PseudoVar::var(v)}; }

std::string error_of(const std::string& text) {
    try {
        import_r1cs(text);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Export, BooleanAssertGolden) {
    auto g = gadgets::boolean_assert();
    std::string out = export_r1cs(flatten(g.defs, g.top, Prime(7)).system);
    EXPECT_EQ(out, slurp("boolean_assert_p7.json"));
    EXPECT_EQ(out, export_r1cs(flatten(g.defs, g.top, Prime(7)).system));
}

TEST(Export, IfEqualThenElseGolden) {
    auto g = gadgets::if_equal_then_else();
    EXPECT_EQ(export_r1cs(flatten(g.defs, g.top, Prime(7)).system), slurp("if_equal_then_else_p7.json"));
}

TEST(Export, EmptySystem) {
    EXPECT_EQ(export_r1cs(R1CSSystem{Prime(7), {}, {}}), "{\"constraints\":[],\"prime\":\"7\",\"variables\":[]}\n");
}

TEST(Export, ReducesCoefficients) {
    R1CSSystem sys{Prime(7), {"x"}, {{{m(-1, "x")}, {m(9, "")}, {}}}};
    EXPECT_EQ(export_r1cs(sys),
              "{\"constraints\":[{\"a\":[[\"6\",\"x\"]],\"b\":[[\"2\",null]],\"c\":[]}],\"prime\":\"7\","
              "\"variables\":[\"x\"]}\n");
}

TEST(Import, RoundTrips) {
    for (const char* name : {"boolean_assert_p7.json", "if_equal_then_else_p7.json", "permuted_a.json",
                             "permuted_b.json"}) {
        std::string text = slurp(name);
        R1CSSystem sys = import_r1cs(text);
        EXPECT_EQ(export_r1cs(sys), text) << name;
        EXPECT_EQ(import_r1cs(export_r1cs(sys)), sys);
    }
}

TEST(Import, NullIsOne) {
    R1CSSystem sys = import_r1cs(R"({"prime":"5","variables":["x"],"constraints":[{"a":[["2",null]],"b":[],"c":[["1","x"]]}]})");
    ASSERT_EQ(sys.constraints.size(), 1u);
    EXPECT_TRUE(sys.constraints[0].a[0].pvar.is_one());
    EXPECT_EQ(sys.constraints[0].a[0].coeff, 2);
}

TEST(Import, Errors) {
    EXPECT_NE(error_of(R"({"prime":"13","variables":["x"],"constraints":[{"a":[["13","x"]],"b":[],"c":[]}]})")
                  .find("constraints[0].a[0]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"13","variables":["x"],"constraints":[{"a":[],"b":[],"c":[]},)"
                       R"({"a":[],"b":[["1","y"]],"c":[]}]})")
                  .find("constraints[1].b[0]: unknown variable 'y'"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"12","variables":[],"constraints":[]})").find("not prime"), std::string::npos);
    EXPECT_NE(error_of("{\"prime\":").find("malformed JSON"), std::string::npos);
    EXPECT_NE(error_of(R"({"prime":7,"variables":[],"constraints":[]})").find("prime"), std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"7","variables":["x","x"],"constraints":[]})").find("variables[1]"), std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"7","variables":[],"constraints":[{"a":[],"b":[]}]})").find("'c'"), std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"7","variables":[],"constraints":[{"a":[["-1",null]],"b":[],"c":[]}]})")
                  .find("outside"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"prime":"7","variables":[]})").find("constraints"), std::string::npos);
}

TEST(Witness, RoundTrip) {
    Prime p(7);
    Valuation v = import_witness(R"({"equality_test.0.s":"3","w":5,"neg":"-1"})", p);
    EXPECT_EQ(v.lookup("equality_test.0.s").value(), 3);
    EXPECT_EQ(v.lookup("w").value(), 5);
    EXPECT_EQ(v.lookup("neg").value(), 6);
    EXPECT_EQ(export_witness(v), "{\"equality_test.0.s\":\"3\",\"neg\":\"6\",\"w\":\"5\"}\n");
    EXPECT_THROW(import_witness("[1]", p), FormatError);
    EXPECT_THROW(import_witness(R"({"x":true})", p), FormatError);
}

TEST(Diff, SelfIsEqual) {
    auto g = gadgets::if_equal_then_else();
    R1CSSystem sys = flatten(g.defs, g.top, Prime(7)).system;
    EXPECT_TRUE(diff_systems(sys, sys).equal);
    EXPECT_EQ(diff_to_json(diff_systems(sys, sys)).dump(), "{\"equal\":true}");
}

TEST(Diff, ChangedCoefficient) {
    auto g = gadgets::if_equal_then_else();
    R1CSSystem a = flatten(g.defs, g.top, Prime(7)).system;
    R1CSSystem b = a;
    b.constraints[1].b[0].coeff = 2;
    DiffResult d = diff_systems(a, b);
    EXPECT_FALSE(d.equal);
    EXPECT_EQ(d.kind, DiffResult::Kind::Monomial);
    EXPECT_EQ(d.constraint, 1u);
    EXPECT_EQ(d.side, 'b');
    EXPECT_EQ(d.position, 0u);
}

TEST(Diff, PermutedMonomialsAreEqual) {
    R1CSSystem a = import_r1cs(slurp("permuted_a.json"));
    R1CSSystem b = import_r1cs(slurp("permuted_b.json"));
    EXPECT_NE(export_r1cs(a), export_r1cs(b));
    EXPECT_TRUE(diff_systems(a, b).equal);
}

TEST(Diff, StructuralDivergences) {
    R1CSSystem a{Prime(7), {"x", "y"}, {{{m(1, "x")}, {m(1, "y")}, {}}}};
    R1CSSystem other_prime = a;
    other_prime.prime = Prime(11);
    EXPECT_EQ(diff_systems(a, other_prime).kind, DiffResult::Kind::Prime);
    R1CSSystem vars = a;
    vars.variables = {"x", "z"};
    vars.constraints[0].b[0].pvar = PseudoVar::var("z");
    DiffResult dv = diff_systems(a, vars);
    EXPECT_EQ(dv.kind, DiffResult::Kind::Variables);
    EXPECT_EQ(dv.position, 1u);
    R1CSSystem more = a;
    more.constraints.push_back(a.constraints[0]);
    EXPECT_EQ(diff_systems(a, more).kind, DiffResult::Kind::ConstraintCount);
}

TEST(Diff, EqualImpliesSameSolutions) {
    R1CSSystem a = import_r1cs(slurp("permuted_a.json"));
    R1CSSystem b = import_r1cs(slurp("permuted_b.json"));
    ASSERT_TRUE(diff_systems(a, b).equal);
    R1CSProjector pa(a, a.variables), pb(b, b.variables);
    pfkit::detail::SearchBudget ba{1'000'000}, bb{1'000'000};
    EXPECT_EQ(pa.solutions(ba), pb.solutions(bb));
}

TEST(Reports, SimplifyJson) {
    Prime p(7);
    R1CSSystem sys{p, {"x", "y"}, {{{m(1, "x")}, {m(1, "")}, {m(1, "y"), m(1, "")}}}};
    auto rep = simplify_system(sys, 10);
    EXPECT_EQ(simplify_to_json(rep).dump(),
              "{\"eliminated\":[{\"rhs\":[[\"1\",null],[\"1\",\"y\"]],\"variable\":\"x\"}],"
              "\"residual\":{\"constraints\":[],\"prime\":\"7\",\"variables\":[\"y\"]},\"rounds\":1}");
}

TEST(Reports, VerdictJson) {
    auto g = gadgets::bits_to_field_unchecked(3);
    auto r = verify::check_deterministic(g, Prime(7), {"f"});
    auto j = verdict_to_json(r);
    EXPECT_EQ(j["deterministic"], false);
    EXPECT_EQ(j["collision"].dump(), "[[\"0\",\"0\",\"0\",\"0\"],[\"0\",\"1\",\"1\",\"1\"]]");
    EXPECT_EQ(j["passed"], false);
}
