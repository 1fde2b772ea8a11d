#pragma once

/**
 * @file simplify.hpp
 * @brief Variable elimination by batched substitution.
 *
 * A constraint whose a or b side is constant is linear. When such a
 * constraint has a variable with a nonzero coefficient it is solved for
 * the lexicographically least one, giving a Solution x := rhs with x not
 * in rhs. Each round picks, in constraint order, a set of solutions whose
 * variables are independent (no selected rhs mentions a selected
 * variable), removes their source constraints and substitutes them into
 * the rest. Rounds repeat until none applies.
 */

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pfkit/field.hpp"
#include "pfkit/r1cs.hpp"

namespace pfkit {

struct Solution {
    std::string variable;
    LinearCombination rhs;

    friend bool operator==(const Solution&, const Solution&) = default;
};

struct SimplifyReport {
    std::vector<Solution> eliminated;
    R1CSSystem residual;
    std::size_t rounds = 0;
};

/// k as the linear form L with k <=> L = 0, when a or b is constant.
inline std::optional<LinearCombination> linear_form(const R1CSConstraint& k, const Prime& p) {
    std::optional<BigInt> ka = constant_value(k.a, p);
    std::optional<BigInt> kb = constant_value(k.b, p);
    LinearCombination product;
    if (ka) product = scale(k.b, *ka);
    else if (kb) product = scale(k.a, *kb);
    else return std::nullopt;
    return canonicalize(concat(product, scale(k.c, -1)), p);
}

inline std::optional<Solution> solve_constraint(const R1CSConstraint& k, const Prime& p) {
    auto form = linear_form(k, p);
    if (!form) return std::nullopt;
    // canonical order puts One first, then variables by name
    auto it = std::find_if(form->begin(), form->end(), [](const Monomial& m) { return !m.pvar.is_one(); });
    if (it == form->end()) return std::nullopt;
    Solution sol{it->pvar.name(), {}};
    // coeff*x + rest = 0  =>  x = -(1/coeff) * rest
    FieldElement factor = neg(inv(FieldElement(it->coeff, p)));
    LinearCombination rest;
    for (const auto& m : *form) {
        if (&m != &*it) rest.push_back(m);
    }
    sol.rhs = canonicalize(scale(rest, factor.value()), p);
    return sol;
}

/// Replaces `sol.variable` in lc by sol.rhs.
inline LinearCombination substitute(const LinearCombination& lc, const Solution& sol) {
    LinearCombination out;
    for (const auto& m : lc) {
        if (!m.pvar.is_one() && m.pvar.name() == sol.variable) {
            for (const auto& r : sol.rhs) out.push_back(Monomial{m.coeff * r.coeff, r.pvar});
        } else {
            out.push_back(m);
        }
    }
    return out;
}

namespace detail {

// A constraint with three constant sides that holds carries no information.
inline bool trivially_true(const R1CSConstraint& k, const Prime& p) {
    auto a = constant_value(k.a, p), b = constant_value(k.b, p), c = constant_value(k.c, p);
    return a && b && c && reduce_mod(*a * *b - *c, p.value()) == 0;
}

}  // namespace detail

inline std::pair<R1CSSystem, std::vector<Solution>> substitution_round(const R1CSSystem& sys) {
    const Prime& p = sys.prime;
    std::vector<Solution> chosen;
    std::vector<bool> used(sys.constraints.size(), false);
    std::set<std::string> selected;
    std::set<std::string> mentioned;  // variables in selected right-hand sides

    for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
        auto sol = solve_constraint(sys.constraints[i], p);
        if (!sol) continue;
        if (selected.contains(sol->variable) || mentioned.contains(sol->variable)) continue;
        auto rhs_vars = variables_of(sol->rhs);
        if (std::any_of(rhs_vars.begin(), rhs_vars.end(), [&](const std::string& v) { return selected.contains(v); })) {
            continue;
        }
        selected.insert(sol->variable);
        mentioned.insert(rhs_vars.begin(), rhs_vars.end());
        used[i] = true;
        chosen.push_back(std::move(*sol));
    }
    if (chosen.empty()) return {sys, {}};

    R1CSSystem out{p, {}, {}};
    for (const auto& v : sys.variables) {
        if (!selected.contains(v)) out.variables.push_back(v);
    }
    for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
        if (used[i]) continue;
        R1CSConstraint k = sys.constraints[i];
        for (const auto& sol : chosen) {
            k.a = substitute(k.a, sol);
            k.b = substitute(k.b, sol);
            k.c = substitute(k.c, sol);
        }
        k = canonicalize(k, p);
        if (!detail::trivially_true(k, p)) out.constraints.push_back(std::move(k));
    }
    return {std::move(out), std::move(chosen)};
}

inline SimplifyReport simplify_system(const R1CSSystem& sys, std::size_t max_rounds) {
    SimplifyReport report{{}, canonicalize(sys), 0};
    while (report.rounds < max_rounds) {
        auto [next, solutions] = substitution_round(report.residual);
        if (solutions.empty()) break;
        ++report.rounds;
        report.residual = std::move(next);
        for (auto& s : solutions) report.eliminated.push_back(std::move(s));
    }
    return report;
}

/// Extends a valuation of the residual variables with the eliminated ones,
/// applying solutions from last to first.
inline Valuation recover(const SimplifyReport& report, Valuation v) {
    for (auto it = report.eliminated.rbegin(); it != report.eliminated.rend(); ++it) {
        v.bind(it->variable, eval_lincomb(it->rhs, v, report.residual.prime));
    }
    return v;
}

}  // namespace pfkit
