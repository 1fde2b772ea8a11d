#pragma once

/**
 * @file flatten.hpp
 * @brief Compiles a PFCS relation into a flat R1CS system.
 *
 * Calls are inlined depth-first in body order. Parameters of a called
 * relation are replaced by the (already substituted) argument expressions;
 * its internal variables get fresh names `<relation>.<call-index>.<local>`,
 * where the top relation is call 0 and call sites are numbered 1, 2, ...
 * in the order they are inlined. Generated names contain '.', which PFCS
 * identifiers cannot, so they never collide with parameter names.
 *
 * The same numbering names witness values: a flat witness map uses the
 * flattened internal names, and proof_from_witness / witness_of convert
 * between that map and a ProofTree.
 */

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/pfcs.hpp"
#include "pfkit/pfcs_parser.hpp"
#include "pfkit/pfcs_sem.hpp"
#include "pfkit/r1cs.hpp"
#include "pfkit/r1cs_search.hpp"

namespace pfkit {

struct NormalizedEquality {
    LinearCombination a;
    LinearCombination b;
    LinearCombination c;

    R1CSConstraint constraint() const { return R1CSConstraint{a, b, c}; }
    friend bool operator==(const NormalizedEquality&, const NormalizedEquality&) = default;
};

struct FlattenResult {
    R1CSSystem system;
    /// (parameter, R1CS variable) in parameter order.
    std::vector<std::pair<std::string, std::string>> external_map;
    std::vector<std::string> internal_names;

    std::vector<std::string> externals() const {
        std::vector<std::string> out;
        for (const auto& [param, var] : external_map) out.push_back(var);
        return out;
    }
};

namespace detail {

// Polynomial with integer coefficients; each monomial is a sorted list of
// variable names (repeats allowed). Terms keep first-occurrence order.
struct Poly {
    std::vector<std::pair<std::vector<std::string>, BigInt>> terms;

    void add_term(std::vector<std::string> mono, const BigInt& coeff) {
        for (auto& [m, c] : terms) {
            if (m == mono) {
                c += coeff;
                return;
            }
        }
        terms.emplace_back(std::move(mono), coeff);
    }

    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto& [m, c] : terms) {
            if (c != 0) d = std::max(d, m.size());
        }
        return d;
    }
};

inline Poly expand(const pfcs::Expr& e) {
    using namespace pfcs;
    return std::visit(
        [&](const auto& n) -> Poly {
            using T = std::decay_t<decltype(n)>;
            Poly out;
            if constexpr (std::is_same_v<T, Var>) {
                out.add_term({n.name}, 1);
            } else if constexpr (std::is_same_v<T, Const>) {
                out.add_term({}, n.value);
            } else if constexpr (std::is_same_v<T, Add>) {
                out = expand(n.lhs);
                for (const auto& [m, c] : expand(n.rhs).terms) out.add_term(m, c);
            } else {
                Poly l = expand(n.lhs), r = expand(n.rhs);
                for (const auto& [ml, cl] : l.terms) {
                    for (const auto& [mr, cr] : r.terms) {
                        std::vector<std::string> m = ml;
                        m.insert(m.end(), mr.begin(), mr.end());
                        std::sort(m.begin(), m.end());
                        out.add_term(std::move(m), cl * cr);
                    }
                }
            }
            return out;
        },
        e.node());
}

// Linear polynomial to a merged linear combination without zero terms.
inline LinearCombination to_lc(const Poly& poly) {
    LinearCombination out;
    for (const auto& [m, c] : poly.terms) {
        if (c == 0) continue;
        out.push_back(Monomial{c, m.empty() ? PseudoVar::one() : PseudoVar::var(m.front())});
    }
    return out;
}

// Sums duplicate pseudo-variables in place of their first occurrence and
// drops zero coefficients.
inline LinearCombination merge_terms(const LinearCombination& lc) {
    LinearCombination out;
    for (const auto& m : lc) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Monomial& x) { return x.pvar == m.pvar; });
        if (it == out.end()) out.push_back(m);
        else it->coeff += m.coeff;
    }
    std::erase_if(out, [](const Monomial& m) { return m.coeff == 0; });
    return out;
}

struct Decomposed {
    std::optional<std::pair<LinearCombination, LinearCombination>> product;
    LinearCombination linear;
};

inline void collect_factors(const pfcs::Expr& e, std::vector<pfcs::Expr>& out) {
    if (const auto* m = std::get_if<pfcs::Mul>(&e.node())) {
        collect_factors(m->lhs, out);
        collect_factors(m->rhs, out);
    } else {
        out.push_back(e);
    }
}

// Splits k*e into at most one product of two linear factors plus a linear
// remainder. Only called on expressions of degree <= 2.
inline Decomposed decompose(const pfcs::Expr& e, const BigInt& k) {
    Poly poly = expand(e);
    if (poly.degree() <= 1) return Decomposed{std::nullopt, scale(to_lc(poly), k)};

    if (const auto* a = std::get_if<pfcs::Add>(&e.node())) {
        Decomposed l = decompose(a->lhs, k), r = decompose(a->rhs, k);
        if (l.product && r.product) {
            throw NotR1CSForm("non-factorable quadratic: more than one product term in '" + pfcs::print_expr(e) + "'");
        }
        Decomposed out;
        out.product = l.product ? l.product : r.product;
        out.linear = concat(l.linear, r.linear);
        return out;
    }
    std::vector<pfcs::Expr> factors;
    collect_factors(e, factors);
    BigInt scalar = k;
    std::vector<pfcs::Expr> nonconst;
    for (const auto& f : factors) {
        Poly fp = expand(f);
        if (fp.degree() == 0) {
            BigInt v = 0;
            for (const auto& [m, c] : fp.terms) v += c;
            scalar *= v;
        } else {
            nonconst.push_back(f);
        }
    }
    if (nonconst.size() == 1) return decompose(nonconst.front(), scalar);
    if (nonconst.size() == 2 && expand(nonconst[0]).degree() == 1 && expand(nonconst[1]).degree() == 1) {
        auto first = merge_terms(scale(to_lc(expand(nonconst[0])), scalar));
        auto second = merge_terms(to_lc(expand(nonconst[1])));
        return Decomposed{std::make_pair(std::move(first), std::move(second)), {}};
    }
    throw NotR1CSForm("non-factorable quadratic '" + pfcs::print_expr(e) + "'");
}

}  // namespace detail

/**
 * Renders lhs == rhs as (a)(b) = (c).
 *
 * The right side must be linear. The left side must have degree at most 2
 * and contain at most one product of two linear factors (constant factors
 * are folded into the first one); any remaining linear terms move to c
 * with their sign flipped. A linear left side gives b = [(1, One)].
 */
inline NormalizedEquality normalize_equality(const pfcs::Expr& lhs, const pfcs::Expr& rhs) {
    detail::Poly right = detail::expand(rhs);
    if (right.degree() > 1) throw NotR1CSForm("nonlinear right side '" + pfcs::print_expr(rhs) + "'");
    std::size_t deg = detail::expand(lhs).degree();
    if (deg > 2) {
        throw NotR1CSForm("left side '" + pfcs::print_expr(lhs) + "' has degree " + std::to_string(deg));
    }
    detail::Decomposed d = detail::decompose(lhs, 1);
    NormalizedEquality out;
    if (d.product) {
        out.a = std::move(d.product->first);
        out.b = std::move(d.product->second);
        out.c = detail::merge_terms(concat(detail::to_lc(right), scale(d.linear, -1)));
    } else {
        out.a = detail::merge_terms(d.linear);
        out.b = constant_lc(1);
        out.c = detail::merge_terms(detail::to_lc(right));
    }
    return out;
}

namespace detail {

inline pfcs::Expr substitute(const pfcs::Expr& e, const std::map<std::string, pfcs::Expr>& env) {
    using namespace pfcs;
    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                return env.at(n.name);
            } else if constexpr (std::is_same_v<T, Const>) {
                return e;
            } else if constexpr (std::is_same_v<T, Add>) {
                return Expr::add(substitute(n.lhs, env), substitute(n.rhs, env));
            } else {
                return Expr::mul(substitute(n.lhs, env), substitute(n.rhs, env));
            }
        },
        e.node());
}

inline std::string fresh_name(const std::string& relation, std::size_t call_index, const std::string& local) {
    return relation + "." + std::to_string(call_index) + "." + local;
}

class Inliner {
public:
    explicit Inliner(const pfcs::System& defs) : defs_(defs) {}

    void run(const std::string& relname) {
        const pfcs::Definition& def = defs_.get(relname);
        std::map<std::string, pfcs::Expr> env;
        for (const auto& p : def.params) env.emplace(p, pfcs::Expr::var(p));
        inline_body(def, env, 0, relname);
    }

    std::vector<R1CSConstraint> constraints;
    std::vector<std::string> internals;

private:
    void inline_body(const pfcs::Definition& def, std::map<std::string, pfcs::Expr> env, std::size_t index,
                     const std::string& path) {
        for (const auto& local : pfcs::internal_vars(def)) {
            std::string name = fresh_name(def.name, index, local);
            internals.push_back(name);
            env.emplace(local, pfcs::Expr::var(name));
        }
        for (std::size_t i = 0; i < def.body.size(); ++i) {
            const auto& c = def.body[i];
            if (const auto* eq = std::get_if<pfcs::Equal>(&c)) {
                try {
                    constraints.push_back(normalize_equality(substitute(eq->lhs, env), substitute(eq->rhs, env)).constraint());
                } catch (const NotR1CSForm& ex) {
                    throw NotR1CSForm(path + "[" + std::to_string(i) + "]: " + ex.what());
                }
                continue;
            }
            const auto& call = std::get<pfcs::Call>(c);
            const pfcs::Definition& callee = defs_.get(call.relation);
            if (callee.params.size() != call.args.size()) {
                throw UsageError(path + ": '" + call.relation + "' expects " + std::to_string(callee.params.size()) +
                                 " arguments, got " + std::to_string(call.args.size()));
            }
            std::map<std::string, pfcs::Expr> sub_env;
            for (std::size_t j = 0; j < callee.params.size(); ++j) {
                sub_env.emplace(callee.params[j], substitute(call.args[j], env));
            }
            const std::size_t sub_index = ++calls_;
            inline_body(callee, std::move(sub_env), sub_index,
                        path + " > " + call.relation + "#" + std::to_string(sub_index));
        }
    }

    const pfcs::System& defs_;
    std::size_t calls_ = 0;
};

}  // namespace detail

/// Flattens `relname` into an R1CS system over p. Variables are the
/// parameters in order followed by the generated internals.
inline FlattenResult flatten(const pfcs::System& defs, const std::string& relname, const Prime& p) {
    pfcs::validate(defs);
    detail::Inliner inliner(defs);
    inliner.run(relname);
    const pfcs::Definition& def = defs.get(relname);
    FlattenResult out{R1CSSystem{p, {}, std::move(inliner.constraints)}, {}, std::move(inliner.internals)};
    for (const auto& param : def.params) {
        out.external_map.emplace_back(param, param);
        out.system.variables.push_back(param);
    }
    out.system.variables.insert(out.system.variables.end(), out.internal_names.begin(), out.internal_names.end());
    return out;
}

namespace detail {

class WitnessReader {
public:
    WitnessReader(const pfcs::System& defs, const Valuation& witness, const Prime& p)
        : defs_(defs), witness_(witness), prime_(p) {}

    pfcs::CallNode node(const pfcs::Call& call, const Valuation& rho, std::size_t index) {
        const pfcs::Definition& def = defs_.get(call.relation);
        if (def.params.size() != call.args.size()) throw UsageError("arity mismatch calling '" + call.relation + "'");
        pfcs::CallNode out;
        out.constraint = call;
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            out.extended.bind(def.params[i], pfcs::eval_expr(call.args[i], rho, prime_));
        }
        for (const auto& local : pfcs::internal_vars(def)) {
            std::string flat = fresh_name(def.name, index, local);
            if (witness_.contains(flat)) {
                out.extended.bind(local, witness_.lookup(flat));
            } else if (index == 0 && witness_.contains(local)) {
                out.extended.bind(local, witness_.lookup(local));
            } else {
                throw UsageError("witness has no value for '" + flat + "'");
            }
        }
        for (const auto& c : def.body) {
            if (const auto* eq = std::get_if<pfcs::Equal>(&c)) {
                out.subtrees.push_back(pfcs::ProofTree{pfcs::EqualityLeaf{*eq}});
            } else {
                out.subtrees.push_back(pfcs::ProofTree{node(std::get<pfcs::Call>(c), out.extended, ++calls_)});
            }
        }
        return out;
    }

private:
    const pfcs::System& defs_;
    const Valuation& witness_;
    Prime prime_;
    std::size_t calls_ = 0;
};

inline void collect_witness(const pfcs::System& defs, const pfcs::CallNode& node, std::size_t index,
                            std::size_t& calls, Valuation& out) {
    const pfcs::Definition& def = defs.get(node.constraint.relation);
    for (const auto& local : pfcs::internal_vars(def)) {
        out.bind(fresh_name(def.name, index, local), node.extended.lookup(local));
    }
    for (const auto& sub : node.subtrees) {
        if (const auto* call = std::get_if<pfcs::CallNode>(&sub.node)) collect_witness(defs, *call, ++calls, calls, out);
    }
}

}  // namespace detail

/**
 * Builds the proof tree for relname(args) whose internal values come from
 * a flat witness keyed by flattened names. Top-level internals may also be
 * given by their local names. Throws UsageError for a missing value; the
 * tree itself is not checked here, use check_proof.
 */
inline pfcs::ProofTree proof_from_witness(const pfcs::System& defs, const std::string& relname,
                                          const std::vector<FieldElement>& args, const Valuation& witness,
                                          const Prime& p) {
    std::vector<BigInt> vals;
    for (const auto& a : args) vals.push_back(a.value());
    detail::WitnessReader reader(defs, witness, p);
    return pfcs::ProofTree{reader.node(pfcs::ground_call(relname, vals), Valuation{}, 0)};
}

/// Flat witness (flattened internal names) carried by a top-level proof.
inline Valuation witness_of(const pfcs::System& defs, const pfcs::ProofTree& tree) {
    const auto* node = std::get_if<pfcs::CallNode>(&tree.node);
    if (!node) throw UsageError("witness extraction needs a call node at the root");
    Valuation out;
    std::size_t calls = 0;
    detail::collect_witness(defs, *node, 0, calls, out);
    return out;
}

struct EquivalenceReport {
    enum class Status { Equivalent, NotEquivalent, Aborted };

    Status status = Status::Equivalent;
    /// First external tuple on which the two sides disagree.
    std::optional<Tuple> counterexample;
    bool counterexample_satisfies_pfcs = false;
    std::size_t pfcs_solutions = 0;
    std::size_t r1cs_solutions = 0;

    bool equivalent() const { return status == Status::Equivalent; }
};

/**
 * Exhaustively compares the PFCS relation with a flattened system over all
 * external tuples at p: the PFCS side via witness search, the R1CS side by
 * existential enumeration of its internal variables.
 */
inline EquivalenceReport flatten_equiv_report(const pfcs::System& defs, const std::string& relname,
                                              const FlattenResult& flat, const Prime& p,
                                              std::uint64_t budget = pfcs::default_budget) {
    EquivalenceReport report;
    try {
        pfcs::Solver solver(defs, p, budget);
        TupleSet lhs = pfcs::satisfying_tuples(solver, relname);
        R1CSSystem sys = flat.system;
        sys.prime = p;
        R1CSProjector projector(sys, flat.externals());
        pfkit::detail::SearchBudget r1cs_budget{budget};
        TupleSet rhs = projector.solutions(r1cs_budget);
        report.pfcs_solutions = lhs.size();
        report.r1cs_solutions = rhs.size();
        auto l = lhs.begin();
        auto r = rhs.begin();
        while (l != lhs.end() || r != rhs.end()) {
            if (r == rhs.end() || (l != lhs.end() && *l < *r)) {
                report.counterexample = *l;
                report.counterexample_satisfies_pfcs = true;
                break;
            }
            if (l == lhs.end() || *r < *l) {
                report.counterexample = *r;
                break;
            }
            ++l;
            ++r;
        }
        report.status = report.counterexample ? EquivalenceReport::Status::NotEquivalent
                                              : EquivalenceReport::Status::Equivalent;
    } catch (const BudgetExceeded&) {
        report.status = EquivalenceReport::Status::Aborted;
    }
    return report;
}

inline EquivalenceReport flatten_equiv_report(const pfcs::System& defs, const std::string& relname, const Prime& p,
                                              std::uint64_t budget = pfcs::default_budget) {
    return flatten_equiv_report(defs, relname, flatten(defs, relname, p), p, budget);
}

}  // namespace pfkit
