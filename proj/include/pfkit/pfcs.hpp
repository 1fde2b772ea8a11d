#pragma once

/**
 * @file pfcs.hpp
 * @brief Abstract syntax of prime field constraint systems (PFCS).
 *
 * A PFCS system is an ordered list of named relations. Each relation has
 * parameters and a body of constraints; a constraint is either an equality
 * between two expressions or a call of an earlier relation. Expressions are
 * built from variables, integer constants, + and *.
 */

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/field.hpp"

namespace pfkit::pfcs {

class Expr;

struct Var {
    std::string name;
};
struct Const {
    BigInt value;
};
struct Add;
struct Mul;

/// Immutable expression tree with shared subtrees.
class Expr {
public:
    using Node = std::variant<Var, Const, Add, Mul>;

    static Expr var(std::string name);
    static Expr constant(BigInt value);
    static Expr add(Expr lhs, Expr rhs);
    static Expr mul(Expr lhs, Expr rhs);

    const Node& node() const;
    bool is_var() const;
    bool is_const() const;
    bool is_add() const;
    bool is_mul() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Add {
    Expr lhs;
    Expr rhs;
};
struct Mul {
    Expr lhs;
    Expr rhs;
};

inline Expr Expr::var(std::string name) { return Expr(std::make_shared<const Node>(Var{std::move(name)})); }
inline Expr Expr::constant(BigInt value) { return Expr(std::make_shared<const Node>(Const{std::move(value)})); }
inline Expr Expr::add(Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(Add{std::move(lhs), std::move(rhs)}));
}
inline Expr Expr::mul(Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(Mul{std::move(lhs), std::move(rhs)}));
}
inline const Expr::Node& Expr::node() const { return *node_; }
inline bool Expr::is_var() const { return std::holds_alternative<Var>(*node_); }
inline bool Expr::is_const() const { return std::holds_alternative<Const>(*node_); }
inline bool Expr::is_add() const { return std::holds_alternative<Add>(*node_); }
inline bool Expr::is_mul() const { return std::holds_alternative<Mul>(*node_); }

inline bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->index() != b.node_->index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(*b.node_);
            if constexpr (std::is_same_v<T, Var>) return x.name == y.name;
            else if constexpr (std::is_same_v<T, Const>) return x.value == y.value;
            else return x.lhs == y.lhs && x.rhs == y.rhs;
        },
        *a.node_);
}

// Short builders for constructing gadgets in code.
inline Expr var(std::string name) { return Expr::var(std::move(name)); }
inline Expr cst(BigInt value) { return Expr::constant(std::move(value)); }
inline Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::mul(std::move(a), std::move(b)); }

struct Equal {
    Expr lhs;
    Expr rhs;

    friend bool operator==(const Equal&, const Equal&) = default;
};

struct Call {
    std::string relation;
    std::vector<Expr> args;

    friend bool operator==(const Call&, const Call&) = default;
};

using Constraint = std::variant<Equal, Call>;

struct Definition {
    std::string name;
    std::vector<std::string> params;
    std::vector<Constraint> body;

    friend bool operator==(const Definition&, const Definition&) = default;
};

struct System {
    std::vector<Definition> definitions;

    const Definition* find(const std::string& name) const {
        auto it = std::find_if(definitions.begin(), definitions.end(),
                               [&](const Definition& d) { return d.name == name; });
        return it == definitions.end() ? nullptr : &*it;
    }

    const Definition& get(const std::string& name) const {
        const Definition* d = find(name);
        if (!d) throw UsageError("unknown relation '" + name + "'");
        return *d;
    }

    friend bool operator==(const System&, const System&) = default;
};

/// Appends the variables of e not yet in out, in first-occurrence order.
inline void collect_vars(const Expr& e, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
            } else if constexpr (std::is_same_v<T, Add> || std::is_same_v<T, Mul>) {
                collect_vars(n.lhs, out);
                collect_vars(n.rhs, out);
            }
        },
        e.node());
}

inline void collect_vars(const Constraint& c, std::vector<std::string>& out) {
    if (const auto* eq = std::get_if<Equal>(&c)) {
        collect_vars(eq->lhs, out);
        collect_vars(eq->rhs, out);
    } else {
        for (const auto& a : std::get<Call>(c).args) collect_vars(a, out);
    }
}

inline std::vector<std::string> vars_of(const Constraint& c) {
    std::vector<std::string> out;
    collect_vars(c, out);
    return out;
}

/// Body variables that are not parameters, in first-occurrence order.
inline std::vector<std::string> internal_vars(const Definition& def) {
    std::vector<std::string> all;
    for (const auto& c : def.body) collect_vars(c, all);
    std::vector<std::string> out;
    for (auto& v : all) {
        if (std::find(def.params.begin(), def.params.end(), v) == def.params.end()) out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<std::string> internal_vars(const System& defs, const std::string& relname) {
    return internal_vars(defs.get(relname));
}

/// Load-time checks: distinct definition names, distinct parameters, and
/// every call naming a relation defined earlier. Arity is checked when
/// constraints are evaluated. Throws UsageError.
inline void validate(const System& sys) {
    std::set<std::string> seen;
    for (const auto& def : sys.definitions) {
        std::set<std::string> params;
        for (const auto& p : def.params) {
            if (!params.insert(p).second) {
                throw UsageError("duplicate parameter '" + p + "' in relation '" + def.name + "'");
            }
        }
        for (const auto& c : def.body) {
            if (const auto* call = std::get_if<Call>(&c); call && !seen.contains(call->relation)) {
                throw UsageError("relation '" + def.name + "' calls '" + call->relation +
                                 "', which is not defined before it");
            }
        }
        if (!seen.insert(def.name).second) throw UsageError("duplicate relation '" + def.name + "'");
    }
}

}  // namespace pfkit::pfcs
