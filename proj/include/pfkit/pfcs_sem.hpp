#pragma once

/**
 * @file pfcs_sem.hpp
 * @brief Executable semantics of PFCS.
 *
 * An assignment satisfies an equality when both sides evaluate to the same
 * field element. It satisfies a call r(e1..en) when some extension of
 * {param_i -> value(e_i)} to the internal variables of r satisfies every
 * constraint of r's body. That existential is witnessed by a ProofTree,
 * checked by check_proof and found by Solver / sat_search.
 *
 * Witness search is exhaustive. Internal variables are tried in
 * first-occurrence order with values 0..p-1, so the first witness found is
 * the lexicographically least one. Each call searches its own internals in
 * its own scope; results are memoized per (relation, argument values).
 */

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pfkit/detail/backtrack.hpp"
#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"
#include "pfkit/pfcs.hpp"
#include "pfkit/r1cs.hpp"

namespace pfkit::pfcs {

/// PFCS-side name for a variable-to-element map.
using Assignment = Valuation;

inline constexpr std::uint64_t default_budget = 10'000'000;

inline FieldElement eval_expr(const Expr& e, const Assignment& rho, const Prime& p) {
    return std::visit(
        [&](const auto& n) -> FieldElement {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                const FieldElement& x = rho.lookup(n.name);
                if (!(x.modulus() == p)) throw UsageError("assignment is over a different prime");
                return x;
            } else if constexpr (std::is_same_v<T, Const>) {
                return FieldElement(n.value, p);
            } else if constexpr (std::is_same_v<T, Add>) {
                return add(eval_expr(n.lhs, rho, p), eval_expr(n.rhs, rho, p));
            } else {
                return mul(eval_expr(n.lhs, rho, p), eval_expr(n.rhs, rho, p));
            }
        },
        e.node());
}

struct ProofTree;

struct EqualityLeaf {
    Equal constraint;

    friend bool operator==(const EqualityLeaf&, const EqualityLeaf&) = default;
};

struct CallNode {
    Call constraint;
    Assignment extended;
    std::vector<ProofTree> subtrees;

    friend bool operator==(const CallNode&, const CallNode&);
};

struct ProofTree {
    std::variant<EqualityLeaf, CallNode> node;

    friend bool operator==(const ProofTree&, const ProofTree&) = default;
};

inline bool operator==(const CallNode& a, const CallNode& b) {
    return a.constraint == b.constraint && a.extended == b.extended && a.subtrees == b.subtrees;
}

struct ProofCheck {
    bool valid = true;
    std::string reason;

    explicit operator bool() const { return valid; }
    static ProofCheck fail(std::string why) { return ProofCheck{false, std::move(why)}; }
};

/// Checks that `tree` derives "rho satisfies c" in the context of defs.
inline ProofCheck check_proof(const System& defs, const Constraint& c, const Assignment& rho, const ProofTree& tree,
                              const Prime& p) {
    if (const auto* eq = std::get_if<Equal>(&c)) {
        const auto* leaf = std::get_if<EqualityLeaf>(&tree.node);
        if (!leaf) return ProofCheck::fail("equality constraint certified by a call node");
        if (!(leaf->constraint == *eq)) return ProofCheck::fail("leaf certifies a different equality");
        try {
            if (!(eval_expr(eq->lhs, rho, p) == eval_expr(eq->rhs, rho, p))) {
                return ProofCheck::fail("equality does not hold");
            }
        } catch (const UnboundVariable& ex) {
            return ProofCheck::fail(ex.what());
        }
        return {};
    }

    const auto& call = std::get<Call>(c);
    const auto* node = std::get_if<CallNode>(&tree.node);
    if (!node) return ProofCheck::fail("call '" + call.relation + "' certified by an equality leaf");
    if (!(node->constraint == call)) return ProofCheck::fail("node certifies a different call than '" + call.relation + "'");
    const Definition* def = defs.find(call.relation);
    if (!def) return ProofCheck::fail("unknown relation '" + call.relation + "'");
    if (def->params.size() != call.args.size()) {
        return ProofCheck::fail("arity mismatch calling '" + call.relation + "'");
    }
    for (const auto& [name, value] : node->extended) {
        if (!(value.modulus() == p)) return ProofCheck::fail("extended assignment of '" + name + "' is over another prime");
    }
    for (std::size_t i = 0; i < def->params.size(); ++i) {
        const std::string& param = def->params[i];
        if (!node->extended.contains(param)) return ProofCheck::fail("parameter '" + param + "' not assigned");
        try {
            if (!(node->extended.lookup(param) == eval_expr(call.args[i], rho, p))) {
                return ProofCheck::fail("parameter '" + param + "' of '" + call.relation +
                                        "' does not match its argument");
            }
        } catch (const UnboundVariable& ex) {
            return ProofCheck::fail(ex.what());
        }
    }
    if (node->subtrees.size() != def->body.size()) {
        return ProofCheck::fail("'" + call.relation + "' has " + std::to_string(def->body.size()) +
                                " body constraints but the node has " + std::to_string(node->subtrees.size()) +
                                " subtrees");
    }
    for (std::size_t i = 0; i < def->body.size(); ++i) {
        ProofCheck sub = check_proof(defs, def->body[i], node->extended, node->subtrees[i], p);
        if (!sub) return ProofCheck::fail(call.relation + "[" + std::to_string(i) + "]: " + sub.reason);
    }
    return {};
}

/// The call constraint a top-level query r(v1..vn) is checked against.
inline Call ground_call(const std::string& relname, const std::vector<BigInt>& args) {
    Call call{relname, {}};
    for (const auto& a : args) call.args.push_back(Expr::constant(a));
    return call;
}

/// Nominal size of the witness space: p^(internals of r) times that of
/// each call site in r's body, recursively.
inline BigInt search_space(const System& defs, const std::string& relname, const Prime& p) {
    const Definition& def = defs.get(relname);
    BigInt size = boost::multiprecision::pow(p.value(), static_cast<unsigned>(internal_vars(def).size()));
    for (const auto& c : def.body) {
        if (const auto* call = std::get_if<Call>(&c)) size *= search_space(defs, call->relation, p);
    }
    return size;
}

namespace detail {

using SlotFn = std::function<BigInt(const std::vector<BigInt>&)>;

// Compiles e over slot indices; the result is not reduced mod p.
inline SlotFn compile_expr(const Expr& e, const std::map<std::string, std::size_t>& slot_of) {
    return std::visit(
        [&](const auto& n) -> SlotFn {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                std::size_t s = slot_of.at(n.name);
                return [s](const std::vector<BigInt>& v) { return v[s]; };
            } else if constexpr (std::is_same_v<T, Const>) {
                BigInt k = n.value;
                return [k](const std::vector<BigInt>&) { return k; };
            } else if constexpr (std::is_same_v<T, Add>) {
                auto l = compile_expr(n.lhs, slot_of);
                auto r = compile_expr(n.rhs, slot_of);
                return [l, r](const std::vector<BigInt>& v) { return BigInt(l(v) + r(v)); };
            } else {
                auto l = compile_expr(n.lhs, slot_of);
                auto r = compile_expr(n.rhs, slot_of);
                return [l, r](const std::vector<BigInt>& v) { return BigInt(l(v) * r(v)); };
            }
        },
        e.node());
}

}  // namespace detail

/**
 * Witness search over one system at one prime, sharing a budget and a
 * memo table across queries. Not copyable; predicates refer back to it.
 */
class Solver {
public:
    Solver(const System& defs, Prime p, std::uint64_t budget = default_budget)
        : defs_(defs), prime_(std::move(p)), budget_{budget} {
        validate(defs_);
    }
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    const Prime& prime() const { return prime_; }
    const System& defs() const { return defs_; }
    pfkit::detail::SearchBudget& budget() { return budget_; }

    /// Least witness for relname(args) as a CallNode whose constraint is
    /// the ground call; nullopt if none exists. Throws BudgetExceeded.
    std::optional<CallNode> solve(const std::string& relname, const std::vector<BigInt>& args) {
        const auto* found = solve_cached(relname, reduce(args));
        if (!found) return std::nullopt;
        CallNode node = *found;
        node.constraint = ground_call(relname, args);
        return node;
    }

    bool satisfiable(const std::string& relname, const std::vector<BigInt>& args) {
        return solve_cached(relname, reduce(args)) != nullptr;
    }

    /// Pruning checks for body constraint i of `relname`, compiled over
    /// the relation's slot layout (params, then internals). Used by the
    /// verifier to enumerate external tuples.
    struct BodyCheck {
        std::vector<std::size_t> slots;  // variables the constraint mentions
        std::function<bool(const std::vector<BigInt>&)> holds;
    };
    std::vector<BodyCheck> body_checks(const std::string& relname) { return plan(relname).checks; }

private:
    struct Plan {
        const Definition* def = nullptr;
        std::vector<std::string> internals;
        std::vector<BodyCheck> checks;
        std::unique_ptr<pfkit::detail::Backtracker> search;
    };

    std::vector<BigInt> reduce(const std::vector<BigInt>& args) const {
        std::vector<BigInt> out;
        out.reserve(args.size());
        for (const auto& a : args) out.push_back(reduce_mod(a, prime_.value()));
        return out;
    }

    Plan& plan(const std::string& relname) {
        auto it = plans_.find(relname);
        if (it != plans_.end()) return it->second;

        Plan pl;
        pl.def = &defs_.get(relname);
        pl.internals = internal_vars(*pl.def);
        std::map<std::string, std::size_t> slot_of;
        for (const auto& v : pl.def->params) slot_of.emplace(v, slot_of.size());
        for (const auto& v : pl.internals) slot_of.emplace(v, slot_of.size());

        const BigInt p = prime_.value();
        for (const auto& c : pl.def->body) {
            BodyCheck check;
            for (const auto& v : vars_of(c)) check.slots.push_back(slot_of.at(v));
            if (const auto* eq = std::get_if<Equal>(&c)) {
                auto l = detail::compile_expr(eq->lhs, slot_of);
                auto r = detail::compile_expr(eq->rhs, slot_of);
                check.holds = [l, r, p](const std::vector<BigInt>& v) { return (l(v) - r(v)) % p == 0; };
            } else {
                const auto& call = std::get<Call>(c);
                const Definition& callee = defs_.get(call.relation);
                if (callee.params.size() != call.args.size()) {
                    throw UsageError("'" + pl.def->name + "' calls '" + call.relation + "' with " +
                                     std::to_string(call.args.size()) + " arguments, expected " +
                                     std::to_string(callee.params.size()));
                }
                std::vector<detail::SlotFn> args;
                for (const auto& a : call.args) args.push_back(detail::compile_expr(a, slot_of));
                std::string target = call.relation;
                check.holds = [this, args, target, p](const std::vector<BigInt>& v) {
                    std::vector<BigInt> vals;
                    vals.reserve(args.size());
                    for (const auto& f : args) vals.push_back(reduce_mod(f(v), p));
                    return solve_cached(target, vals) != nullptr;
                };
            }
            pl.checks.push_back(std::move(check));
        }

        const std::size_t nparams = pl.def->params.size();
        pl.search = std::make_unique<pfkit::detail::Backtracker>(
            nparams, std::vector<std::vector<BigInt>>(pl.internals.size(), pfkit::detail::full_range(p)));
        for (const auto& check : pl.checks) {
            std::optional<std::size_t> level;
            for (std::size_t s : check.slots) {
                if (s >= nparams) level = std::max(level.value_or(0), s - nparams);
            }
            pl.search->add_check(level, check.holds);
        }
        return plans_.emplace(relname, std::move(pl)).first->second;
    }

    // Memoized; the returned node's constraint is a placeholder.
    const CallNode* solve_cached(const std::string& relname, const std::vector<BigInt>& args) {
        auto key = std::make_pair(relname, args);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second ? &*it->second : nullptr;

        Plan& pl = plan(relname);
        if (args.size() != pl.def->params.size()) {
            throw UsageError("relation '" + relname + "' takes " + std::to_string(pl.def->params.size()) +
                             " arguments, got " + std::to_string(args.size()));
        }
        const std::size_t nparams = args.size();
        std::vector<BigInt> slots(nparams + pl.internals.size());
        std::copy(args.begin(), args.end(), slots.begin());

        std::optional<CallNode> result;
        pl.search->run(slots, budget_, [&](std::vector<BigInt>& s) {
            CallNode node;
            node.constraint = Call{relname, {}};
            for (std::size_t i = 0; i < nparams; ++i) node.extended.bind(pl.def->params[i], FieldElement(s[i], prime_));
            for (std::size_t i = 0; i < pl.internals.size(); ++i) {
                node.extended.bind(pl.internals[i], FieldElement(s[nparams + i], prime_));
            }
            for (const auto& c : pl.def->body) node.subtrees.push_back(subproof(c, node.extended));
            result = std::move(node);
            return true;
        });
        auto [it, _] = memo_.emplace(std::move(key), std::move(result));
        return it->second ? &*it->second : nullptr;
    }

    // Proof of a body constraint already known to hold under rho.
    ProofTree subproof(const Constraint& c, const Assignment& rho) {
        if (const auto* eq = std::get_if<Equal>(&c)) return ProofTree{EqualityLeaf{*eq}};
        const auto& call = std::get<Call>(c);
        std::vector<BigInt> vals;
        for (const auto& a : call.args) vals.push_back(eval_expr(a, rho, prime_).value());
        const CallNode* sub = solve_cached(call.relation, vals);
        if (!sub) throw Error("internal error: pruned call has no witness");
        CallNode node = *sub;
        node.constraint = call;
        return ProofTree{std::move(node)};
    }

    const System& defs_;
    Prime prime_;
    pfkit::detail::SearchBudget budget_;
    std::map<std::string, Plan> plans_;
    std::map<std::pair<std::string, std::vector<BigInt>>, std::optional<CallNode>> memo_;
};

/**
 * Projected relation of `relname`: every parameter tuple drawn from
 * `candidates` (one list per parameter; empty means the whole field) for
 * which the relation is satisfiable. Body constraints over parameters only
 * prune the enumeration before any witness search.
 */
inline TupleSet satisfying_tuples(Solver& solver, const std::string& relname,
                                  std::vector<std::vector<BigInt>> candidates = {}) {
    const Definition& def = solver.defs().get(relname);
    const std::size_t n = def.params.size();
    const auto full = pfkit::detail::full_range(solver.prime().value());
    if (candidates.empty()) candidates.resize(n);
    if (candidates.size() != n) throw UsageError("one candidate list per parameter expected");
    for (auto& c : candidates) {
        if (c.empty()) c = full;
    }
    pfkit::detail::Backtracker outer(0, std::move(candidates));
    for (auto& check : solver.body_checks(relname)) {
        std::optional<std::size_t> level;
        bool params_only = true;
        for (std::size_t s : check.slots) {
            if (s >= n) params_only = false;
            else level = std::max(level.value_or(0), s);
        }
        if (params_only) outer.add_check(level, check.holds);
    }
    TupleSet out;
    std::vector<BigInt> slots(n);
    outer.run(slots, solver.budget(), [&](std::vector<BigInt>& s) {
        if (solver.satisfiable(relname, s)) out.insert(s);
        return false;
    });
    return out;
}

class SatOutcome {
public:
    enum class Kind { Satisfied, Unsatisfiable, Aborted };

    static SatOutcome satisfied(ProofTree witness) {
        SatOutcome o(Kind::Satisfied);
        o.witness_ = std::move(witness);
        return o;
    }
    static SatOutcome unsatisfiable() { return SatOutcome(Kind::Unsatisfiable); }
    static SatOutcome aborted(BigInt space) {
        SatOutcome o(Kind::Aborted);
        o.space_ = std::move(space);
        return o;
    }

    Kind kind() const { return kind_; }
    bool is_satisfied() const { return kind_ == Kind::Satisfied; }
    bool is_unsatisfiable() const { return kind_ == Kind::Unsatisfiable; }
    bool is_aborted() const { return kind_ == Kind::Aborted; }
    const ProofTree& witness() const { return witness_.value(); }
    /// Nominal search-space size, set when aborted.
    const BigInt& search_space() const { return space_; }

private:
    explicit SatOutcome(Kind k) : kind_(k) {}
    Kind kind_;
    std::optional<ProofTree> witness_;
    BigInt space_ = 0;
};

/**
 * Decides whether relname(args) holds at p by exhaustive witness search.
 * Aborted means more than `budget` candidate assignments were needed;
 * it is not a claim of unsatisfiability.
 */
inline SatOutcome sat_search(const System& defs, const std::string& relname, const std::vector<FieldElement>& args,
                             const Prime& p, std::uint64_t budget = default_budget) {
    const Definition& def = defs.get(relname);
    if (def.params.size() != args.size()) {
        throw UsageError("relation '" + relname + "' takes " + std::to_string(def.params.size()) + " arguments, got " +
                         std::to_string(args.size()));
    }
    std::vector<BigInt> vals;
    for (const auto& a : args) {
        if (!(a.modulus() == p)) throw UsageError("argument is over a different prime");
        vals.push_back(a.value());
    }
    Solver solver(defs, p, budget);
    try {
        auto node = solver.solve(relname, vals);
        if (!node) return SatOutcome::unsatisfiable();
        return SatOutcome::satisfied(ProofTree{std::move(*node)});
    } catch (const BudgetExceeded&) {
        return SatOutcome::aborted(search_space(defs, relname, p));
    }
}

}  // namespace pfkit::pfcs
