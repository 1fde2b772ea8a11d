#pragma once

/**
 * @file verify.hpp
 * @brief Brute-force soundness, completeness and determinism checks.
 *
 * The semantics of a gadget is its projected relation: the parameter
 * tuples for which some assignment of the internal variables satisfies the
 * body. A specification is a predicate over the same tuples, guarded by a
 * domain predicate (the gadget's preconditions). With S the accepted
 * tuples and D the domain:
 *
 *   sound          every solution in D is in S
 *   complete       every tuple of S in D is a solution
 *   deterministic  no two solutions in D agree on the input positions
 *                  but differ elsewhere
 *
 * Solutions outside D count against nothing; they are tallied in the
 * report. Everything is decided by enumeration at a concrete prime.
 */

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pfkit/detail/backtrack.hpp"
#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"
#include "pfkit/gadgets.hpp"
#include "pfkit/pfcs_sem.hpp"

namespace pfkit::verify {

using ValueSets = std::vector<std::vector<BigInt>>;

struct SpecPredicate {
    std::string id;
    std::size_t arity = 0;
    /// Precondition; acceptance is consulted only where this holds.
    std::function<bool(const Tuple&, const Prime&)> domain = [](const Tuple&, const Prime&) { return true; };
    std::function<bool(const Tuple&, const Prime&)> accept;
    /// Per-position values covering every in-domain tuple (empty list for
    /// a position means the whole field). Lets large instances enumerate
    /// only the domain. Unset means the whole field everywhere.
    std::function<ValueSets(const Prime&)> domain_values;
    /// Per-position values covering every accepted in-domain tuple, used
    /// to enumerate S for completeness.
    std::function<ValueSets(const Prime&)> accept_values;
    /// Input positions used by the determinism check when none are given.
    std::vector<std::size_t> default_inputs;
    /// Message when p violates a hypothesis the spec relies on.
    std::function<std::optional<std::string>(const Prime&)> hypothesis;
    /// Whether the gadget is expected to be nondeterministic at p.
    std::function<bool(const Prime&)> known_nondeterministic;
};

using SpecFactory = std::function<SpecPredicate(std::size_t arity)>;

class SpecRegistry {
public:
    void add(const std::string& id, SpecFactory factory) { factories_.insert_or_assign(id, std::move(factory)); }

    bool contains(const std::string& id) const { return factories_.contains(strip(id)); }

    /// Accepts both "bitp" and "builtin:bitp".
    SpecPredicate make(const std::string& id, std::size_t arity) const {
        auto it = factories_.find(strip(id));
        if (it == factories_.end()) throw UsageError("unknown specification '" + id + "'");
        SpecPredicate spec = it->second(arity);
        if (spec.arity != arity) throw UsageError("specification '" + id + "' does not fit arity " + std::to_string(arity));
        return spec;
    }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& [id, f] : factories_) out.push_back(id);
        return out;
    }

    static const SpecRegistry& builtin();

private:
    static std::string strip(const std::string& id) {
        static const std::string prefix = "builtin:";
        return id.starts_with(prefix) ? id.substr(prefix.size()) : id;
    }

    std::map<std::string, SpecFactory> factories_;
};

namespace detail {

inline bool is_bit(const BigInt& v) { return v == 0 || v == 1; }

inline bool all_bits(const Tuple& t, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
        if (!is_bit(t[i])) return false;
    }
    return true;
}

// Little-endian value of bits t[from..to).
inline BigInt lebits(const Tuple& t, std::size_t from, std::size_t to) {
    BigInt v = 0;
    for (std::size_t i = to; i > from; --i) v = 2 * v + t[i - 1];
    return v;
}

inline std::vector<BigInt> bit_values() { return {0, 1}; }

inline void require_arity(const std::string& id, std::size_t got, std::size_t want) {
    if (got != want) {
        throw UsageError("specification '" + id + "' has arity " + std::to_string(want) + ", gadget has " +
                         std::to_string(got));
    }
}

inline SpecPredicate stub(std::string id, std::size_t arity) {
    SpecPredicate s;
    s.id = std::move(id);
    s.arity = arity;
    return s;
}

inline SpecRegistry make_builtin() {
    SpecRegistry reg;

    reg.add("bitp", [](std::size_t arity) {
        require_arity("bitp", arity, 1);
        SpecPredicate s = stub("bitp", 1);
        s.accept = [](const Tuple& t, const Prime&) { return is_bit(t[0]); };
        s.accept_values = [](const Prime&) { return ValueSets{bit_values()}; };
        return s;
    });

    reg.add("bit_listp", [](std::size_t arity) {
        SpecPredicate s = stub("bit_listp", arity);
        s.accept = [arity](const Tuple& t, const Prime&) { return all_bits(t, 0, arity); };
        s.accept_values = [arity](const Prime&) { return ValueSets(arity, bit_values()); };
        return s;
    });

    // (w, x, y, z), given bitp(w)
    reg.add("if_then_else", [](std::size_t arity) {
        require_arity("if_then_else", arity, 4);
        SpecPredicate s = stub("if_then_else", 4);
        s.domain = [](const Tuple& t, const Prime&) { return is_bit(t[0]); };
        s.accept = [](const Tuple& t, const Prime&) { return t[3] == (t[0] == 1 ? t[1] : t[2]); };
        s.domain_values = [](const Prime&) { return ValueSets{bit_values(), {}, {}, {}}; };
        s.accept_values = s.domain_values;
        s.default_inputs = {0, 1, 2};
        return s;
    });

    // (u, v, w)
    reg.add("equality_test", [](std::size_t arity) {
        require_arity("equality_test", arity, 3);
        SpecPredicate s = stub("equality_test", 3);
        s.accept = [](const Tuple& t, const Prime&) { return t[2] == (t[0] == t[1] ? 1 : 0); };
        s.accept_values = [](const Prime&) { return ValueSets{{}, {}, bit_values()}; };
        s.default_inputs = {0, 1};
        return s;
    });

    // (u, v, x, y, z)
    reg.add("if_equal_then_else", [](std::size_t arity) {
        require_arity("if_equal_then_else", arity, 5);
        SpecPredicate s = stub("if_equal_then_else", 5);
        s.accept = [](const Tuple& t, const Prime&) { return t[4] == (t[0] == t[1] ? t[2] : t[3]); };
        s.default_inputs = {0, 1, 2, 3};
        return s;
    });

    // (x_0..x_{n-1}, y_0..y_{n-1}, z_0..z_n), given bit-valued x and y
    reg.add("unsigned_add", [](std::size_t arity) {
        if (arity < 4 || (arity - 1) % 3 != 0) {
            throw UsageError("unsigned_add specification needs arity 3n+1 with n >= 1, got " + std::to_string(arity));
        }
        const std::size_t n = (arity - 1) / 3;
        SpecPredicate s = stub("unsigned_add", arity);
        s.domain = [n](const Tuple& t, const Prime&) { return all_bits(t, 0, 2 * n); };
        s.accept = [n, arity](const Tuple& t, const Prime&) {
            return all_bits(t, 2 * n, arity) &&
                   lebits(t, 2 * n, arity) == lebits(t, 0, n) + lebits(t, n, 2 * n);
        };
        s.domain_values = [n, arity](const Prime&) {
            ValueSets v(arity);
            for (std::size_t i = 0; i < 2 * n; ++i) v[i] = bit_values();
            return v;
        };
        s.accept_values = [arity](const Prime&) { return ValueSets(arity, bit_values()); };
        for (std::size_t i = 0; i < 2 * n; ++i) s.default_inputs.push_back(i);
        s.hypothesis = [n](const Prime& p) -> std::optional<std::string> {
            if (p.bits() >= n + 2) return std::nullopt;
            return "unsigned_add with n = " + std::to_string(n) + " needs a prime of at least " + std::to_string(n + 2) +
                   " bits; " + p.str() + " has " + std::to_string(p.bits());
        };
        return s;
    });

    // (x, y, z), given bit-valued x and y
    reg.add("nand", [](std::size_t arity) {
        require_arity("nand", arity, 3);
        SpecPredicate s = stub("nand", 3);
        s.domain = [](const Tuple& t, const Prime&) { return is_bit(t[0]) && is_bit(t[1]); };
        s.accept = [](const Tuple& t, const Prime&) { return t[2] == 1 - t[0] * t[1]; };
        s.domain_values = [](const Prime&) { return ValueSets{bit_values(), bit_values(), {}}; };
        s.accept_values = [](const Prime&) { return ValueSets{bit_values(), bit_values(), bit_values()}; };
        s.default_inputs = {0, 1};
        return s;
    });

    // (f, b_0..b_{n-1}): the b_i are the bits of f as an integer
    reg.add("bits_to_field", [](std::size_t arity) {
        if (arity < 2) throw UsageError("bits_to_field specification needs arity n+1 with n >= 1");
        const std::size_t n = arity - 1;
        SpecPredicate s = stub("bits_to_field", arity);
        s.accept = [arity](const Tuple& t, const Prime&) { return all_bits(t, 1, arity) && lebits(t, 1, arity) == t[0]; };
        s.accept_values = [arity](const Prime&) {
            ValueSets v(arity, bit_values());
            v[0].clear();
            return v;
        };
        s.default_inputs = {0};
        s.known_nondeterministic = [n](const Prime& p) { return (BigInt(1) << n) > p.value(); };
        return s;
    });

    return reg;
}

}  // namespace detail

inline const SpecRegistry& SpecRegistry::builtin() {
    static const SpecRegistry reg = detail::make_builtin();
    return reg;
}

struct SatisfactionSet {
    Prime prime;
    std::vector<std::string> order;
    TupleSet tuples;
};

enum class Enumeration { Auto, Full, Domain };

struct VerifyOptions {
    bool soundness = true;
    bool completeness = true;
    bool determinism = false;
    /// Input parameter names for determinism; empty means the spec default.
    std::vector<std::string> inputs;
    std::uint64_t budget = pfcs::default_budget;
    /// Auto enumerates the whole field when p^arity fits the budget and
    /// the spec's domain values otherwise.
    Enumeration enumeration = Enumeration::Auto;
};

struct VerdictReport {
    std::string relation;
    std::string spec_id;
    std::string prime;
    std::vector<std::string> order;

    std::optional<bool> sound;
    std::optional<Tuple> unsound_tuple;
    std::optional<bool> complete;
    std::optional<Tuple> missing_tuple;
    std::optional<bool> deterministic;
    std::vector<std::string> inputs;
    std::optional<std::pair<Tuple, Tuple>> collision;

    std::size_t solutions = 0;
    std::size_t out_of_domain = 0;
    std::optional<Tuple> first_out_of_domain;
    std::uint64_t enumerated = 0;
    bool domain_restricted = false;
    std::optional<std::string> hypothesis_violation;
    bool known_nondeterministic = false;

    /// All requested checks passed.
    bool passed() const { return sound.value_or(true) && complete.value_or(true) && deterministic.value_or(true); }
};

namespace detail {

inline ValueSets normalized(ValueSets sets, std::size_t arity) {
    if (sets.empty()) sets.resize(arity);
    if (sets.size() != arity) throw UsageError("value sets do not match the arity");
    return sets;
}

inline bool full_space_fits(const Prime& p, std::size_t arity, std::uint64_t budget) {
    return boost::multiprecision::pow(p.value(), static_cast<unsigned>(arity)) <= BigInt(budget);
}

}  // namespace detail

/// Exact projected relation at p, parameters ranging over `values` (one
/// list per parameter; empty means the whole field).
inline SatisfactionSet satisfaction_set(const gadgets::GadgetBundle& bundle, const Prime& p,
                                        std::uint64_t budget = pfcs::default_budget, ValueSets values = {}) {
    pfcs::Solver solver(bundle.defs, p, budget);
    SatisfactionSet out{p, bundle.definition().params, {}};
    out.tuples = pfcs::satisfying_tuples(solver, bundle.top, detail::normalized(std::move(values), bundle.arity()));
    return out;
}

/**
 * Runs the requested checks of `bundle` against `spec` at p. Throws
 * BudgetExceeded when the enumeration does not fit the budget.
 */
inline VerdictReport verify(const gadgets::GadgetBundle& bundle, const Prime& p, const SpecPredicate& spec,
                            const VerifyOptions& opts = {}) {
    const auto& params = bundle.definition().params;
    const std::size_t arity = params.size();
    if (spec.arity != arity) {
        throw UsageError("specification '" + spec.id + "' has arity " + std::to_string(spec.arity) + ", relation '" +
                         bundle.top + "' has " + std::to_string(arity));
    }

    VerdictReport report;
    report.relation = bundle.top;
    report.spec_id = spec.id;
    report.prime = p.str();
    report.order = params;
    if (spec.hypothesis) report.hypothesis_violation = spec.hypothesis(p);
    if (spec.known_nondeterministic) report.known_nondeterministic = spec.known_nondeterministic(p);

    bool restrict = false;
    switch (opts.enumeration) {
        case Enumeration::Full: break;
        case Enumeration::Domain: restrict = static_cast<bool>(spec.domain_values); break;
        case Enumeration::Auto:
            restrict = spec.domain_values && !detail::full_space_fits(p, arity, opts.budget);
            break;
    }
    report.domain_restricted = restrict;

    pfcs::Solver solver(bundle.defs, p, opts.budget);
    ValueSets values = restrict ? detail::normalized(spec.domain_values(p), arity) : ValueSets(arity);
    TupleSet solutions = pfcs::satisfying_tuples(solver, bundle.top, values);
    report.solutions = solutions.size();

    std::vector<const Tuple*> in_domain;
    for (const auto& t : solutions) {
        if (spec.domain(t, p)) {
            in_domain.push_back(&t);
        } else {
            if (!report.first_out_of_domain) report.first_out_of_domain = t;
            ++report.out_of_domain;
        }
    }

    if (opts.soundness) {
        report.sound = true;
        for (const Tuple* t : in_domain) {
            if (!spec.accept(*t, p)) {
                report.sound = false;
                report.unsound_tuple = *t;
                break;
            }
        }
    }

    if (opts.completeness) {
        report.complete = true;
        ValueSets accept_space = spec.accept_values   ? detail::normalized(spec.accept_values(p), arity)
                                 : spec.domain_values ? detail::normalized(spec.domain_values(p), arity)
                                                      : ValueSets(arity);
        for (auto& v : accept_space) {
            if (v.empty()) v = pfkit::detail::full_range(p.value());
        }
        pfkit::detail::Backtracker space(0, std::move(accept_space));
        std::vector<BigInt> slots(arity);
        space.run(slots, solver.budget(), [&](std::vector<BigInt>& t) {
            if (!spec.domain(t, p) || !spec.accept(t, p)) return false;
            if (solver.satisfiable(bundle.top, t)) return false;
            report.complete = false;
            report.missing_tuple = t;
            return true;
        });
    }

    if (opts.determinism) {
        std::vector<std::size_t> positions;
        if (opts.inputs.empty()) {
            positions = spec.default_inputs;
            if (positions.empty()) throw UsageError("specification '" + spec.id + "' names no default inputs");
        } else {
            for (const auto& name : opts.inputs) {
                auto it = std::find(params.begin(), params.end(), name);
                if (it == params.end()) throw UsageError("'" + name + "' is not a parameter of '" + bundle.top + "'");
                positions.push_back(static_cast<std::size_t>(it - params.begin()));
            }
        }
        for (std::size_t pos : positions) report.inputs.push_back(params.at(pos));
        report.deterministic = true;
        std::map<Tuple, const Tuple*> first_by_input;
        for (const Tuple* t : in_domain) {
            Tuple key;
            for (std::size_t pos : positions) key.push_back((*t)[pos]);
            auto [it, inserted] = first_by_input.emplace(std::move(key), t);
            if (!inserted) {
                report.deterministic = false;
                report.collision = std::make_pair(*it->second, *t);
                break;
            }
        }
    }

    report.enumerated = solver.budget().used;
    return report;
}

/// Registry lookup by the bundle's spec_id.
inline SpecPredicate spec_for(const gadgets::GadgetBundle& bundle, const SpecRegistry& registry = SpecRegistry::builtin()) {
    return registry.make(bundle.spec_id, bundle.arity());
}

inline VerdictReport check_soundness(const gadgets::GadgetBundle& bundle, const Prime& p,
                                     std::uint64_t budget = pfcs::default_budget) {
    VerifyOptions opts;
    opts.completeness = false;
    opts.budget = budget;
    return verify(bundle, p, spec_for(bundle), opts);
}

inline VerdictReport check_completeness(const gadgets::GadgetBundle& bundle, const Prime& p,
                                        std::uint64_t budget = pfcs::default_budget) {
    VerifyOptions opts;
    opts.soundness = false;
    opts.budget = budget;
    return verify(bundle, p, spec_for(bundle), opts);
}

inline VerdictReport check_deterministic(const gadgets::GadgetBundle& bundle, const Prime& p,
                                         const std::vector<std::string>& inputs,
                                         std::uint64_t budget = pfcs::default_budget) {
    VerifyOptions opts;
    opts.soundness = false;
    opts.completeness = false;
    opts.determinism = true;
    opts.inputs = inputs;
    opts.budget = budget;
    return verify(bundle, p, spec_for(bundle), opts);
}

}  // namespace pfkit::verify
