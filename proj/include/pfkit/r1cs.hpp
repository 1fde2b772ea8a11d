#pragma once

/**
 * @file r1cs.hpp
 * @brief Sparse rank-1 constraint systems and their satisfaction semantics.
 *
 * A constraint (a)(b) = (c) relates three linear combinations. Each
 * monomial pairs an integer coefficient with a pseudo-variable, which is
 * either a named variable or the constant One. Coefficients are kept as
 * plain integers and reduced modulo p only when evaluated, so one
 * syntactic system can be read at several primes.
 */

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"

namespace pfkit {

class PseudoVar {
public:
    static PseudoVar one() { return PseudoVar(); }
    static PseudoVar var(std::string name) {
        if (name.empty()) throw UsageError("variable names must be non-empty");
        PseudoVar pv;
        pv.name_ = std::move(name);
        return pv;
    }

    bool is_one() const noexcept { return !name_.has_value(); }
    const std::string& name() const {
        if (!name_) throw UsageError("the constant One has no name");
        return *name_;
    }
    std::string str() const { return name_ ? *name_ : std::string("1"); }

    // One sorts before every variable; variables sort by name.
    friend std::strong_ordering operator<=>(const PseudoVar& a, const PseudoVar& b) {
        if (a.is_one() || b.is_one()) return b.is_one() <=> a.is_one();
        return *a.name_ <=> *b.name_;
    }
    friend bool operator==(const PseudoVar&, const PseudoVar&) = default;

private:
    PseudoVar() = default;
    std::optional<std::string> name_;
};

struct Monomial {
    BigInt coeff;
    PseudoVar pvar;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// May be empty, which denotes 0. Duplicate pseudo-variables are summed.
using LinearCombination = std::vector<Monomial>;

struct R1CSConstraint {
    LinearCombination a;
    LinearCombination b;
    LinearCombination c;

    friend bool operator==(const R1CSConstraint&, const R1CSConstraint&) = default;
};

struct R1CSSystem {
    Prime prime;
    std::vector<std::string> variables;
    std::vector<R1CSConstraint> constraints;

    friend bool operator==(const R1CSSystem&, const R1CSSystem&) = default;
};

/// Finite map from variable names to elements of one field.
class Valuation {
public:
    using Map = std::map<std::string, FieldElement>;

    Valuation() = default;

    void bind(const std::string& name, FieldElement value) {
        if (!map_.empty() && !(map_.begin()->second.modulus() == value.modulus())) {
            throw UsageError("valuation mixes moduli");
        }
        map_.insert_or_assign(name, std::move(value));
    }

    const FieldElement& lookup(const std::string& name) const {
        auto it = map_.find(name);
        if (it == map_.end()) throw UnboundVariable(name);
        return it->second;
    }

    bool contains(const std::string& name) const { return map_.contains(name); }
    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }
    Map::const_iterator begin() const { return map_.begin(); }
    Map::const_iterator end() const { return map_.end(); }

    friend bool operator==(const Valuation&, const Valuation&) = default;

private:
    Map map_;
};

inline LinearCombination constant_lc(const BigInt& k) { return {Monomial{k, PseudoVar::one()}}; }
inline LinearCombination var_lc(const std::string& name) { return {Monomial{1, PseudoVar::var(name)}}; }

/// Names of the variables in lc, first-occurrence order, no repeats.
inline std::vector<std::string> variables_of(const LinearCombination& lc) {
    std::vector<std::string> out;
    for (const auto& m : lc) {
        if (!m.pvar.is_one() && std::find(out.begin(), out.end(), m.pvar.name()) == out.end()) {
            out.push_back(m.pvar.name());
        }
    }
    return out;
}

inline std::vector<std::string> variables_of(const R1CSConstraint& k) {
    std::vector<std::string> out;
    for (const auto* lc : {&k.a, &k.b, &k.c}) {
        for (auto& v : variables_of(*lc)) {
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
        }
    }
    return out;
}

inline bool well_formed(const R1CSSystem& sys) {
    std::set<std::string> declared;
    for (const auto& v : sys.variables) {
        if (v.empty() || !declared.insert(v).second) return false;
    }
    for (const auto& k : sys.constraints) {
        for (const auto& v : variables_of(k)) {
            if (!declared.contains(v)) return false;
        }
    }
    return true;
}

inline FieldElement eval_lincomb(const LinearCombination& lc, const Valuation& v, const Prime& p) {
    BigInt acc = 0;
    for (const auto& m : lc) {
        if (m.pvar.is_one()) {
            acc += m.coeff;
        } else {
            const FieldElement& x = v.lookup(m.pvar.name());
            if (!(x.modulus() == p)) throw UsageError("valuation is over a different prime");
            acc += m.coeff * x.value();
        }
    }
    return FieldElement(acc, p);
}

inline bool constraint_holds(const R1CSConstraint& k, const Valuation& v, const Prime& p) {
    return mul(eval_lincomb(k.a, v, p), eval_lincomb(k.b, v, p)) == eval_lincomb(k.c, v, p);
}

inline bool system_holds(const R1CSSystem& sys, const Valuation& v) {
    for (const auto& name : sys.variables) {
        if (!v.contains(name)) throw UnboundVariable(name);
    }
    return std::all_of(sys.constraints.begin(), sys.constraints.end(),
                       [&](const R1CSConstraint& k) { return constraint_holds(k, v, sys.prime); });
}

/// Reduces coefficients into [0, p), merges duplicate pseudo-variables,
/// drops zero monomials and sorts (One first, then by name).
inline LinearCombination canonicalize(const LinearCombination& lc, const Prime& p) {
    std::map<PseudoVar, BigInt> merged;
    for (const auto& m : lc) merged[m.pvar] += m.coeff;
    LinearCombination out;
    for (auto& [pv, coeff] : merged) {
        BigInt r = reduce_mod(coeff, p.value());
        if (r != 0) out.push_back(Monomial{std::move(r), pv});
    }
    return out;
}

inline R1CSConstraint canonicalize(const R1CSConstraint& k, const Prime& p) {
    return R1CSConstraint{canonicalize(k.a, p), canonicalize(k.b, p), canonicalize(k.c, p)};
}

inline R1CSSystem canonicalize(const R1CSSystem& sys) {
    R1CSSystem out{sys.prime, sys.variables, {}};
    out.constraints.reserve(sys.constraints.size());
    for (const auto& k : sys.constraints) out.constraints.push_back(canonicalize(k, sys.prime));
    return out;
}

/// Constant value of lc if it mentions no variable with a nonzero
/// coefficient mod p.
inline std::optional<BigInt> constant_value(const LinearCombination& lc, const Prime& p) {
    BigInt acc = 0;
    for (const auto& m : canonicalize(lc, p)) {
        if (!m.pvar.is_one()) return std::nullopt;
        acc += m.coeff;
    }
    return reduce_mod(acc, p.value());
}

inline LinearCombination scale(const LinearCombination& lc, const BigInt& k) {
    LinearCombination out = lc;
    for (auto& m : out) m.coeff *= k;
    return out;
}

inline LinearCombination concat(LinearCombination x, const LinearCombination& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

}  // namespace pfkit
