#pragma once

// Exhaustive enumeration of R1CS solutions, projected onto a chosen list
// of external variables. Remaining system variables are internal and
// existentially quantified.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pfkit/detail/backtrack.hpp"
#include "pfkit/r1cs.hpp"

namespace pfkit {

namespace detail {

struct SlotTerm {
    BigInt coeff;
    std::optional<std::size_t> slot;  // nullopt is One
};

struct CompiledConstraint {
    std::vector<SlotTerm> a, b, c;
    std::size_t last_slot = 0;
    bool has_vars = false;

    static BigInt eval(const std::vector<SlotTerm>& lc, const std::vector<BigInt>& slots) {
        BigInt acc = 0;
        for (const auto& t : lc) acc += t.slot ? t.coeff * slots[*t.slot] : t.coeff;
        return acc;
    }

    bool holds(const std::vector<BigInt>& slots, const BigInt& p) const {
        BigInt diff = eval(a, slots) * eval(b, slots) - eval(c, slots);
        return diff % p == 0;
    }
};

inline CompiledConstraint compile(const R1CSConstraint& k, const std::map<std::string, std::size_t>& slot_of,
                                  const Prime& p) {
    CompiledConstraint out;
    auto lower = [&](const LinearCombination& lc) {
        std::vector<SlotTerm> terms;
        for (const auto& m : canonicalize(lc, p)) {
            SlotTerm t{m.coeff, std::nullopt};
            if (!m.pvar.is_one()) {
                auto it = slot_of.find(m.pvar.name());
                if (it == slot_of.end()) throw UsageError("constraint mentions undeclared variable '" + m.pvar.name() + "'");
                t.slot = it->second;
                out.last_slot = out.has_vars ? std::max(out.last_slot, it->second) : it->second;
                out.has_vars = true;
            }
            terms.push_back(std::move(t));
        }
        return terms;
    };
    out.a = lower(k.a);
    out.b = lower(k.b);
    out.c = lower(k.c);
    return out;
}

}  // namespace detail

/**
 * Enumerates the projection of the solution set of `sys` onto `externals`.
 *
 * Externals range over `external_values` (per position; empty means the
 * whole field). Every other declared variable is internal and ranges over
 * the whole field. The result is the set of external tuples for which some
 * internal assignment satisfies every constraint.
 */
class R1CSProjector {
public:
    R1CSProjector(const R1CSSystem& sys, std::vector<std::string> externals,
                  std::vector<std::vector<BigInt>> external_values = {})
        : prime_(sys.prime), externals_(std::move(externals)) {
        std::map<std::string, std::size_t> slot_of;
        for (std::size_t i = 0; i < externals_.size(); ++i) {
            if (!slot_of.emplace(externals_[i], i).second) throw UsageError("duplicate external '" + externals_[i] + "'");
        }
        for (const auto& v : sys.variables) {
            if (!slot_of.contains(v)) {
                slot_of.emplace(v, externals_.size() + internals_.size());
                internals_.push_back(v);
            }
        }
        const auto full = detail::full_range(prime_.value());
        if (external_values.empty()) external_values.resize(externals_.size());
        if (external_values.size() != externals_.size()) throw UsageError("one value list per external expected");
        for (auto& vals : external_values) {
            if (vals.empty()) vals = full;
        }
        outer_ = detail::Backtracker(0, std::move(external_values));
        inner_ = detail::Backtracker(externals_.size(), std::vector<std::vector<BigInt>>(internals_.size(), full));

        for (const auto& k : sys.constraints) {
            auto compiled = detail::compile(k, slot_of, prime_);
            const BigInt p = prime_.value();
            auto pred = [compiled, p](const std::vector<BigInt>& slots) { return compiled.holds(slots, p); };
            if (!compiled.has_vars) {
                outer_.add_check(std::nullopt, pred);
            } else if (compiled.last_slot < externals_.size()) {
                outer_.add_check(compiled.last_slot, pred);
            } else {
                inner_.add_check(compiled.last_slot - externals_.size(), pred);
            }
        }
    }

    const std::vector<std::string>& internals() const { return internals_; }

    /// Projected solution set.
    TupleSet solutions(detail::SearchBudget& budget) const {
        TupleSet out;
        std::vector<BigInt> slots(externals_.size() + internals_.size());
        outer_.run(slots, budget, [&](std::vector<BigInt>& s) {
            bool found = inner_.run(s, budget, [](std::vector<BigInt>&) { return true; });
            if (found) out.emplace(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(externals_.size()));
            return false;
        });
        return out;
    }

    /// Lexicographically least internal completion of an external tuple.
    std::optional<Tuple> completion(const Tuple& external, detail::SearchBudget& budget) const {
        if (external.size() != externals_.size()) throw UsageError("external tuple has wrong arity");
        std::vector<std::vector<BigInt>> pinned_values;
        for (const auto& v : external) pinned_values.push_back({reduce_mod(v, prime_.value())});
        detail::Backtracker pinned = outer_;
        pinned.set_candidates(std::move(pinned_values));
        std::vector<BigInt> slots(externals_.size() + internals_.size());
        std::optional<Tuple> found;
        pinned.run(slots, budget, [&](std::vector<BigInt>& s) {
            inner_.run(s, budget, [&](std::vector<BigInt>& t) {
                found = Tuple(t.begin() + static_cast<std::ptrdiff_t>(externals_.size()), t.end());
                return true;
            });
            return true;
        });
        return found;
    }

private:
    Prime prime_;
    std::vector<std::string> externals_;
    std::vector<std::string> internals_;
    detail::Backtracker outer_{0, {}};
    detail::Backtracker inner_{0, {}};
};

}  // namespace pfkit
