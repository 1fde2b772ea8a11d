// pfkit command-line front end. Exit status: 0 success, 1 negative result
// (report on stdout), 2 usage, parse, format or budget error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pfkit/pfkit.hpp"

using namespace pfkit;
using json_io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

void emit(const Json& doc) { std::cout << doc.dump() << "\n"; }

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<FieldElement> parse_args(const std::string& csv, const Prime& p) {
    std::vector<FieldElement> out;
    for (const auto& item : split_csv(csv)) out.emplace_back(parse_decimal(item), p);
    return out;
}

// Relation named on the command line, or the last definition of the file.
std::string pick_relation(const pfcs::System& sys, const std::string& rel) {
    if (!rel.empty()) {
        sys.get(rel);
        return rel;
    }
    if (sys.definitions.empty()) throw UsageError("no definitions in input");
    return sys.definitions.back().name;
}

pfcs::System load_pfcs(const std::string& path) {
    pfcs::System sys = pfcs::parse_system(read_file(path));
    pfcs::validate(sys);
    return sys;
}

struct Common {
    std::string file;
    std::string rel;
    std::string prime;
    std::string args;
    std::uint64_t budget = pfcs::default_budget;
};

int cmd_parse(const Common& c) {
    std::cout << pfcs::print_system(load_pfcs(c.file));
    return kOk;
}

int cmd_gen(const std::string& name, std::size_t n) {
    std::cout << pfcs::print_system(gadgets::by_name(name, n).defs);
    return kOk;
}

int cmd_flatten(const Common& c, const std::string& out, const std::string& map_out) {
    pfcs::System sys = load_pfcs(c.file);
    FlattenResult flat = flatten(sys, pick_relation(sys, c.rel), Prime::parse(c.prime));
    std::string text = json_io::export_r1cs(flat.system);
    if (out.empty()) std::cout << text;
    else write_file(out, text);
    if (!map_out.empty()) {
        Json map = Json::object();
        for (const auto& [param, var] : flat.external_map) map[param] = var;
        write_file(map_out, map.dump() + "\n");
    }
    return kOk;
}

int cmd_check(const Common& c, const std::string& witness_path) {
    pfcs::System sys = load_pfcs(c.file);
    std::string rel = pick_relation(sys, c.rel);
    Prime p = Prime::parse(c.prime);
    auto args = parse_args(c.args, p);
    if (args.size() != sys.get(rel).params.size()) {
        throw UsageError("relation '" + rel + "' takes " + std::to_string(sys.get(rel).params.size()) +
                         " arguments, got " + std::to_string(args.size()));
    }
    Valuation witness = witness_path.empty() ? Valuation{} : json_io::import_witness(read_file(witness_path), p);
    pfcs::ProofTree tree = proof_from_witness(sys, rel, args, witness, p);
    std::vector<BigInt> vals;
    for (const auto& a : args) vals.push_back(a.value());
    pfcs::ProofCheck result = pfcs::check_proof(sys, pfcs::ground_call(rel, vals), Valuation{}, tree, p);
    Json out{{"relation", rel}, {"holds", result.valid}};
    if (!result.valid) out["reason"] = result.reason;
    emit(out);
    return result.valid ? kOk : kNegative;
}

int cmd_sat(const Common& c) {
    pfcs::System sys = load_pfcs(c.file);
    std::string rel = pick_relation(sys, c.rel);
    Prime p = Prime::parse(c.prime);
    auto outcome = pfcs::sat_search(sys, rel, parse_args(c.args, p), p, c.budget);
    Json out{{"relation", rel}};
    if (outcome.is_satisfied()) {
        out["result"] = "satisfied";
        out["witness"] = json_io::witness_to_json(witness_of(sys, outcome.witness()));
        emit(out);
        return kOk;
    }
    if (outcome.is_unsatisfiable()) {
        out["result"] = "unsatisfiable";
        emit(out);
        return kNegative;
    }
    out["result"] = "aborted";
    out["reason"] = "search_space";
    out["search_space"] = outcome.search_space().str();
    out["budget"] = c.budget;
    emit(out);
    return kError;
}

int cmd_verify(const Common& c, const std::string& spec_id, const std::string& inputs, const std::string& checks,
               const std::string& enumeration) {
    pfcs::System sys = load_pfcs(c.file);
    gadgets::GadgetBundle bundle{sys, pick_relation(sys, c.rel), spec_id};
    Prime p = Prime::parse(c.prime);
    verify::SpecPredicate spec = verify::SpecRegistry::builtin().make(spec_id, bundle.arity());
    verify::VerifyOptions opts;
    opts.soundness = opts.completeness = opts.determinism = false;
    for (const auto& check : split_csv(checks)) {
        if (check == "sound") opts.soundness = true;
        else if (check == "complete") opts.completeness = true;
        else if (check == "det") opts.determinism = true;
        else throw UsageError("unknown check '" + check + "' (expected sound, complete or det)");
    }
    opts.inputs = split_csv(inputs);
    opts.budget = c.budget;
    if (enumeration == "full") opts.enumeration = verify::Enumeration::Full;
    else if (enumeration == "domain") opts.enumeration = verify::Enumeration::Domain;
    auto report = verify::verify(bundle, p, spec, opts);
    emit(json_io::verdict_to_json(report));
    return report.passed() ? kOk : kNegative;
}

int cmd_simplify(const std::string& path, std::size_t max_rounds) {
    R1CSSystem sys = json_io::import_r1cs(read_file(path));
    emit(json_io::simplify_to_json(simplify_system(sys, max_rounds)));
    return kOk;
}

int cmd_diff(const std::string& a, const std::string& b) {
    auto d = json_io::diff_systems(json_io::import_r1cs(read_file(a)), json_io::import_r1cs(read_file(b)));
    emit(json_io::diff_to_json(d));
    return d.equal ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prime field constraint systems: parse, flatten, search, verify and compare"};
    app.require_subcommand(1);

    Common c;
    auto add_file = [&](CLI::App* sub) { sub->add_option("FILE", c.file, "PFCS source file")->required(); };
    auto add_rel = [&](CLI::App* sub) {
        sub->add_option("--rel", c.rel, "Relation to use (default: last definition)");
    };
    auto add_prime = [&](CLI::App* sub) { sub->add_option("--prime,-p", c.prime, "Prime modulus")->required(); };
    auto add_args = [&](CLI::App* sub) {
        sub->add_option("--args", c.args, "Comma-separated argument values")->required();
    };
    auto add_budget = [&](CLI::App* sub) {
        sub->add_option("--budget", c.budget, "Maximum candidate assignments to try")->capture_default_str();
    };

    auto* parse = app.add_subcommand("parse", "Parse and validate a PFCS file, print it back");
    add_file(parse);

    std::string gadget;
    std::size_t n = 1;
    auto* gen = app.add_subcommand("gen-gadget", "Print a gadget from the built-in library as PFCS");
    gen->add_option("NAME", gadget, "Gadget name")->required();
    gen->add_option("--n", n, "Size for sized families")->capture_default_str();

    std::string out, map_out;
    auto* flat = app.add_subcommand("flatten", "Flatten a relation into R1CS JSON");
    add_file(flat);
    add_rel(flat);
    add_prime(flat);
    flat->add_option("-o,--output", out, "Write the R1CS here instead of stdout");
    flat->add_option("--map", map_out, "Write the parameter-to-variable map here");

    std::string witness;
    auto* check = app.add_subcommand("check", "Check a witness for a ground call");
    add_file(check);
    add_rel(check);
    add_prime(check);
    add_args(check);
    check->add_option("--witness", witness, "Witness JSON keyed by flattened internal names");

    auto* sat = app.add_subcommand("sat", "Search for a witness");
    add_file(sat);
    add_rel(sat);
    add_prime(sat);
    add_args(sat);
    add_budget(sat);

    std::string spec, inputs, checks = "sound,complete", enumeration = "auto";
    auto* ver = app.add_subcommand("verify", "Check a relation against a specification by enumeration");
    add_file(ver);
    add_rel(ver);
    add_prime(ver);
    ver->add_option("--spec", spec, "Specification id, e.g. builtin:if_then_else")->required();
    ver->add_option("--inputs", inputs, "Input parameters for the determinism check");
    ver->add_option("--checks", checks, "Any of sound,complete,det")->capture_default_str();
    ver->add_option("--enumeration", enumeration, "auto, full or domain")
        ->check(CLI::IsMember({"auto", "full", "domain"}))
        ->capture_default_str();
    add_budget(ver);

    std::string r1cs;
    std::size_t max_rounds = 100;
    auto* simp = app.add_subcommand("simplify", "Eliminate linearly determined variables");
    simp->add_option("R1CS", r1cs, "R1CS JSON file")->required();
    simp->add_option("--max-rounds", max_rounds, "Substitution rounds")->capture_default_str();

    std::string left, right;
    auto* diff = app.add_subcommand("diff", "Compare two R1CS JSON files after canonicalization");
    diff->add_option("A", left, "First file")->required();
    diff->add_option("B", right, "Second file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*parse) return cmd_parse(c);
        if (*gen) return cmd_gen(gadget, n);
        if (*flat) return cmd_flatten(c, out, map_out);
        if (*check) return cmd_check(c, witness);
        if (*sat) return cmd_sat(c);
        if (*ver) return cmd_verify(c, spec, inputs, checks, enumeration);
        if (*simp) return cmd_simplify(r1cs, max_rounds);
        if (*diff) return cmd_diff(left, right);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: search budget exceeded: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kError;
}
