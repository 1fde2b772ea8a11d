#pragma once

/**
 * @file pfcs_parser.hpp
 * @brief Concrete syntax for PFCS: recursive-descent parser and printer.
 *
 *   system     ::= relation*
 *   relation   ::= name "(" [name ("," name)*] ")" "{" constraints "}"
 *   constraints::= [constraint (sep constraint)*] [sep]
 *   constraint ::= expr "==" expr | name "(" [expr ("," expr)*] ")"
 *   expr       ::= term ("+" term)*
 *   term       ::= factor ("*" factor)*
 *   factor     ::= name | integer | "(" expr ")"
 *
 * Names are a letter followed by letters, digits and underscores. Integers
 * are decimal with an optional leading '-' glued to the digits. `sep` is a
 * ';' or a line break. `//` starts a comment that runs to end of line.
 */

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/errors.hpp"
#include "pfkit/pfcs.hpp"

namespace pfkit::pfcs {

namespace detail {

enum class Tok { Name, Integer, LParen, RParen, LBrace, RBrace, Comma, Semi, Plus, Star, EqEq, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
    bool newline_before;
};

inline const char* describe(Tok t) {
    switch (t) {
        case Tok::Name: return "name";
        case Tok::Integer: return "integer";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Plus: return "'+'";
        case Tok::Star: return "'*'";
        case Tok::EqEq: return "'=='";
        case Tok::End: return "end of input";
    }
    return "?";
}

// Token kind, plus the spelling for names and integers.
inline std::string found(const Token& t) {
    std::string s = describe(t.kind);
    if (t.kind == Tok::Name || t.kind == Tok::Integer) s += " '" + t.text + "'";
    return s;
}

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    bool newline = false;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            newline = true;
            advance(1);
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token tok{Tok::End, {}, line, col, newline};
        newline = false;
        std::size_t len = 1;
        if (is_alpha(c)) {
            while (i + len < src.size() && (is_alpha(src[i + len]) || is_digit(src[i + len]) || src[i + len] == '_')) ++len;
            tok.kind = Tok::Name;
        } else if (is_digit(c) || (c == '-' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            while (i + len < src.size() && is_digit(src[i + len])) ++len;
            tok.kind = Tok::Integer;
        } else if (c == '=' && i + 1 < src.size() && src[i + 1] == '=') {
            tok.kind = Tok::EqEq;
            len = 2;
        } else {
            switch (c) {
                case '(': tok.kind = Tok::LParen; break;
                case ')': tok.kind = Tok::RParen; break;
                case '{': tok.kind = Tok::LBrace; break;
                case '}': tok.kind = Tok::RBrace; break;
                case ',': tok.kind = Tok::Comma; break;
                case ';': tok.kind = Tok::Semi; break;
                case '+': tok.kind = Tok::Plus; break;
                case '*': tok.kind = Tok::Star; break;
                default: {
                    std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                            ? "byte " + std::to_string(static_cast<unsigned char>(c))
                                            : std::string("'") + c + "'";
                    throw ParseError("unexpected character " + shown, line, col);
                }
            }
        }
        tok.text = std::string(src.substr(i, len));
        out.push_back(std::move(tok));
        advance(len);
    }
    out.push_back(Token{Tok::End, {}, line, col, newline});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    System system() {
        System sys;
        while (peek().kind != Tok::End) {
            const Token& start = peek();
            Definition def = definition();
            check_definition(sys, def, start);
            sys.definitions.push_back(std::move(def));
        }
        return sys;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& what, const Token& at) const {
        throw ParseError(what, at.line, at.column);
    }

    const Token& expect(Tok kind, const char* context) {
        const Token& t = peek();
        if (t.kind != kind) {
            fail(std::string("expected ") + describe(kind) + " " + context + ", found " + found(t),
                 t);
        }
        ++pos_;
        return t;
    }

    Definition definition() {
        Definition def;
        def.name = expect(Tok::Name, "at start of relation").text;
        expect(Tok::LParen, "after relation name");
        if (peek().kind != Tok::RParen) {
            for (;;) {
                def.params.push_back(expect(Tok::Name, "in parameter list").text);
                if (peek().kind != Tok::Comma) break;
                ++pos_;
            }
        }
        expect(Tok::RParen, "after parameters");
        expect(Tok::LBrace, "before relation body");
        bool need_sep = false;
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::Semi) {
                ++pos_;
                need_sep = false;
                continue;
            }
            if (peek().kind == Tok::End) fail("unterminated relation body", peek());
            if (need_sep && !peek().newline_before) fail("expected ';' or line break between constraints", peek());
            def.body.push_back(constraint());
            need_sep = true;
        }
        ++pos_;
        return def;
    }

    Constraint constraint() {
        if (peek().kind == Tok::Name && peek(1).kind == Tok::LParen) {
            Call call;
            call.relation = peek().text;
            pos_ += 2;
            if (peek().kind != Tok::RParen) {
                for (;;) {
                    call.args.push_back(expr());
                    if (peek().kind != Tok::Comma) break;
                    ++pos_;
                }
            }
            expect(Tok::RParen, "after call arguments");
            return call;
        }
        Expr lhs = expr();
        expect(Tok::EqEq, "in equality constraint");
        Expr rhs = expr();
        return Equal{std::move(lhs), std::move(rhs)};
    }

    Expr expr() {
        Expr e = term();
        while (peek().kind == Tok::Plus) {
            ++pos_;
            e = Expr::add(std::move(e), term());
        }
        return e;
    }

    Expr term() {
        Expr e = factor();
        while (peek().kind == Tok::Star) {
            ++pos_;
            e = Expr::mul(std::move(e), factor());
        }
        return e;
    }

    Expr factor() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Name: ++pos_; return Expr::var(t.text);
            case Tok::Integer: ++pos_; return Expr::constant(parse_decimal(t.text));
            case Tok::LParen: {
                ++pos_;
                Expr e = expr();
                expect(Tok::RParen, "to close parenthesized expression");
                return e;
            }
            default:
                fail(std::string("expected expression, found ") + found(t),
                     t);
        }
    }

    void check_definition(const System& sys, const Definition& def, const Token& at) const {
        if (sys.find(def.name)) fail("duplicate relation '" + def.name + "'", at);
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (def.params[i] == def.params[j]) fail("duplicate parameter '" + def.params[i] + "'", at);
            }
        }
        for (const auto& c : def.body) {
            const auto* call = std::get_if<Call>(&c);
            if (!call) continue;
            if (call->relation == def.name) fail("relation '" + def.name + "' calls itself", at);
            if (!sys.find(call->relation)) {
                fail("call of '" + call->relation + "' before its definition", at);
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

enum class Ctx { Top, AddRight, MulOperand };

inline void print_expr(std::ostream& os, const Expr& e, Ctx ctx) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                os << n.name;
            } else if constexpr (std::is_same_v<T, Const>) {
                os << n.value;
            } else if constexpr (std::is_same_v<T, Add>) {
                bool parens = ctx != Ctx::Top;
                if (parens) os << '(';
                print_expr(os, n.lhs, Ctx::Top);
                os << " + ";
                print_expr(os, n.rhs, Ctx::AddRight);
                if (parens) os << ')';
            } else {
                bool parens = ctx == Ctx::MulOperand;
                if (parens) os << '(';
                print_expr(os, n.lhs, Ctx::AddRight);
                os << " * ";
                print_expr(os, n.rhs, Ctx::MulOperand);
                if (parens) os << ')';
            }
        },
        e.node());
}

}  // namespace detail

/// Parses a whole PFCS file. Throws ParseError with a 1-based position.
inline System parse_system(std::string_view text) {
    detail::Parser parser(detail::lex(text));
    return parser.system();
}

/// Minimal parenthesization: `*` binds tighter than `+`, both left-assoc.
inline std::string print_expr(const Expr& e) {
    std::ostringstream os;
    detail::print_expr(os, e, detail::Ctx::Top);
    return os.str();
}

inline std::string print_constraint(const Constraint& c) {
    if (const auto* eq = std::get_if<Equal>(&c)) return print_expr(eq->lhs) + " == " + print_expr(eq->rhs);
    const auto& call = std::get<Call>(c);
    std::string out = call.relation + "(";
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(call.args[i]);
    }
    return out + ")";
}

inline std::string print_definition(const Definition& def) {
    std::string out = def.name + "(";
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        if (i) out += ", ";
        out += def.params[i];
    }
    out += ") {\n";
    for (const auto& c : def.body) out += "  " + print_constraint(c) + "\n";
    return out + "}\n";
}

inline std::string print_system(const System& sys) {
    std::string out;
    for (std::size_t i = 0; i < sys.definitions.size(); ++i) {
        if (i) out += "\n";
        out += print_definition(sys.definitions[i]);
    }
    return out;
}

}  // namespace pfkit::pfcs
