#pragma once

// Depth-first enumeration with early constraint checking, shared by the
// R1CS and PFCS searches. Values are raw residues in [0, p) held in a slot
// vector; callers decide what a slot means.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"

namespace pfkit::detail {

/// Counts candidate assignments across one logical search.
struct SearchBudget {
    std::uint64_t limit;
    std::uint64_t used = 0;

    void charge() {
        if (++used > limit) {
            throw BudgetExceeded("search budget of " + std::to_string(limit) + " candidate assignments exhausted");
        }
    }
};

/// All residues 0..p-1, in increasing order.
inline std::vector<BigInt> full_range(const BigInt& p) {
    std::vector<BigInt> out;
    for (BigInt v = 0; v < p; ++v) out.push_back(v);
    return out;
}

class Backtracker {
public:
    using Predicate = std::function<bool(const std::vector<BigInt>&)>;

    /// Enumerates slots [first_slot, first_slot + candidates.size()) in
    /// order; candidates[i] lists the values tried for the i-th of them.
    Backtracker(std::size_t first_slot, std::vector<std::vector<BigInt>> candidates)
        : first_slot_(first_slot), candidates_(std::move(candidates)), checks_(candidates_.size()) {}

    /// Registers a predicate that becomes decidable once the slot at
    /// `level` is assigned; nullopt means decidable before any assignment.
    void add_check(std::optional<std::size_t> level, Predicate pred) {
        if (level) checks_.at(*level).push_back(std::move(pred));
        else upfront_.push_back(std::move(pred));
    }

    std::size_t depth() const { return candidates_.size(); }

    /// Replaces the candidate lists, keeping the registered checks.
    void set_candidates(std::vector<std::vector<BigInt>> candidates) {
        if (candidates.size() != candidates_.size()) throw UsageError("candidate list has wrong depth");
        candidates_ = std::move(candidates);
    }

    /// Calls visit(slots) on every full assignment passing all checks, in
    /// lexicographic order. visit returns true to stop. Returns true iff
    /// stopped early.
    template <class Visit>
    bool run(std::vector<BigInt>& slots, SearchBudget& budget, Visit&& visit) const {
        for (const auto& pred : upfront_) {
            if (!pred(slots)) return false;
        }
        return descend(0, slots, budget, visit);
    }

private:
    template <class Visit>
    bool descend(std::size_t level, std::vector<BigInt>& slots, SearchBudget& budget, Visit& visit) const {
        if (level == candidates_.size()) return visit(slots);
        const std::size_t slot = first_slot_ + level;
        for (const BigInt& value : candidates_[level]) {
            budget.charge();
            slots[slot] = value;
            bool ok = true;
            for (const auto& pred : checks_[level]) {
                if (!pred(slots)) {
                    ok = false;
                    break;
                }
            }
            if (ok && descend(level + 1, slots, budget, visit)) return true;
        }
        return false;
    }

    std::size_t first_slot_;
    std::vector<std::vector<BigInt>> candidates_;
    std::vector<std::vector<Predicate>> checks_;
    std::vector<Predicate> upfront_;
};

}  // namespace pfkit::detail
