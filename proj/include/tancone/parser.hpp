#ifndef TANCONE_PARSER_HPP
#define TANCONE_PARSER_HPP

#include "tancone/puiseux.hpp"
#include "tancone/semialg.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tancone {

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

/// Variable table shared between the polynomial and formula parsers.
/// Names are declared by a "vars x,y,z;" header or by first use.
struct VariableTable {
    std::vector<std::string> names;
    bool frozen = false; // once frozen, unknown names are errors

    int index_of(const std::string& name, size_t pos) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return (int)i;
        if (frozen) throw ParseError("unknown variable '" + name + "'", pos);
        names.push_back(name);
        return (int)names.size() - 1;
    }
};

namespace detail {

class Cursor {
public:
    explicit Cursor(const std::string& text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && (std::isspace((unsigned char)text_[pos_]) != 0)) ++pos_;
    }
    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(const std::string& tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(const std::string& tok) {
        if (!accept(tok)) throw ParseError("expected '" + tok + "'", pos_);
    }
    size_t pos() const { return pos_; }
    void set_pos(size_t p) { pos_ = p; }

    std::optional<std::string> ident() {
        skip_ws();
        size_t p = pos_;
        if (p >= text_.size() || !(std::isalpha((unsigned char)text_[p]) || text_[p] == '_')) return std::nullopt;
        size_t q = p;
        while (q < text_.size() && (std::isalnum((unsigned char)text_[q]) || text_[q] == '_')) ++q;
        pos_ = q;
        return text_.substr(p, q - p);
    }

    std::optional<Integer> integer() {
        skip_ws();
        size_t p = pos_;
        size_t q = p;
        while (q < text_.size() && std::isdigit((unsigned char)text_[q])) ++q;
        if (q == p) return std::nullopt;
        pos_ = q;
        return Integer(text_.substr(p, q - p));
    }

    /// integer or integer/integer
    std::optional<Rational> rational() {
        auto num = integer();
        if (!num) return std::nullopt;
        size_t save = pos_;
        if (accept("/")) {
            auto den = integer();
            if (den && *den != 0) return Rational(*num, *den);
            set_pos(save);
        }
        return Rational(*num);
    }

    /// signed rational, possibly parenthesized: used for exponents
    Rational signed_rational() {
        bool paren = accept("(");
        bool neg = accept("-");
        auto r = rational();
        if (!r) throw ParseError("expected rational number", pos_);
        if (paren) expect(")");
        return neg ? Rational(-*r) : *r;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
};

class PolyParser {
public:
    PolyParser(Cursor& cur, VariableTable& vars, int nvars_hint)
        : cur_(cur), vars_(vars), nvars_(nvars_hint) {}

    Polynomial parse_expr() {
        Polynomial acc = parse_term();
        while (true) {
            if (cur_.accept("+")) {
                acc = resize(acc) + resize(parse_term());
            } else if (peek_minus()) {
                cur_.expect("-");
                acc = resize(acc) - resize(parse_term());
            } else {
                return resize(acc);
            }
        }
    }

private:
    bool peek_minus() { return cur_.peek() == '-'; }

    Polynomial parse_term() {
        Polynomial acc = parse_unary();
        while (cur_.accept("*")) acc = resize(acc) * resize(parse_unary());
        return acc;
    }

    Polynomial parse_unary() {
        if (cur_.accept("-")) return Rational(-1) * parse_unary();
        return parse_power();
    }

    Polynomial parse_power() {
        Polynomial base = parse_atom();
        if (cur_.accept("^")) {
            auto e = cur_.integer();
            if (!e) throw ParseError("expected natural exponent", cur_.pos());
            Polynomial acc = Polynomial::constant(width(), 1);
            Polynomial b = resize(base);
            for (Integer k = 0; k < *e; ++k) acc = acc * b;
            return acc;
        }
        return base;
    }

    Polynomial parse_atom() {
        if (cur_.accept("(")) {
            Polynomial e = parse_expr();
            cur_.expect(")");
            return e;
        }
        if (auto r = cur_.rational()) return Polynomial::constant(width(), *r);
        size_t p = cur_.pos();
        if (auto name = cur_.ident()) {
            int idx = vars_.index_of(*name, p);
            grow((int)vars_.names.size());
            return Polynomial::variable(width(), idx);
        }
        throw ParseError("expected polynomial atom", cur_.pos());
    }

    int width() const { return std::max(nvars_, (int)vars_.names.size()); }
    void grow(int n) { nvars_ = std::max(nvars_, n); }

    Polynomial resize(const Polynomial& f) const {
        if (f.nvars() == width()) return f;
        Polynomial r(width());
        for (const auto& [m, c] : f.terms()) {
            Monomial mm(width(), 0);
            std::copy(m.begin(), m.end(), mm.begin());
            r.add_term(mm, c);
        }
        return r;
    }

    Cursor& cur_;
    VariableTable& vars_;
    int nvars_;
};

} // namespace detail

inline Polynomial parse_polynomial(const std::string& text, VariableTable& vars) {
    detail::Cursor cur(text);
    detail::PolyParser pp(cur, vars, (int)std::max<size_t>(1, vars.names.size()));
    Polynomial f = pp.parse_expr();
    if (!cur.eof()) throw ParseError("trailing input after polynomial", cur.pos());
    return f;
}

namespace detail {

class FormulaParser {
public:
    FormulaParser(Cursor& cur, VariableTable& vars) : cur_(cur), vars_(vars) {}

    Formula parse_expr() {
        Formula acc = parse_term();
        while (cur_.accept("||")) acc = Formula::make_or({acc, parse_term()});
        return acc;
    }

private:
    Formula parse_term() {
        Formula acc = parse_atomneg();
        while (cur_.accept("&&")) acc = Formula::make_and({acc, parse_atomneg()});
        return acc;
    }

    Formula parse_atomneg() {
        if (cur_.accept("!")) return Formula::make_not(parse_atomneg());
        if (cur_.peek() == '(') {
            // "(x+1)*x > 0" vs "(x > 0 && y > 0)": try an atom first, fall back
            size_t save = cur_.pos();
            try {
                return parse_atom();
            } catch (const ParseError&) {
                cur_.set_pos(save);
            }
            cur_.expect("(");
            Formula f = parse_expr();
            cur_.expect(")");
            return f;
        }
        return parse_atom();
    }

    Formula parse_atom() {
        PolyParser pp(cur_, vars_, (int)std::max<size_t>(1, vars_.names.size()));
        Polynomial lhs = pp.parse_expr();
        Relation rel;
        if (cur_.accept("<=")) rel = Relation::Le;
        else if (cur_.accept(">=")) rel = Relation::Ge;
        else if (cur_.accept("!=")) rel = Relation::Ne;
        else if (cur_.accept("<")) rel = Relation::Lt;
        else if (cur_.accept(">")) rel = Relation::Gt;
        else if (cur_.accept("=")) rel = Relation::Eq;
        else throw ParseError("expected relation", cur_.pos());
        PolyParser pr(cur_, vars_, (int)std::max<size_t>(1, vars_.names.size()));
        Polynomial rhs = pr.parse_expr();
        return Formula::make_atom(Atom{widen(lhs) - widen(rhs), rel});
    }

    Polynomial widen(const Polynomial& f) const {
        int n = (int)std::max<size_t>(1, vars_.names.size());
        if (f.nvars() == n) return f;
        Polynomial r(n);
        for (const auto& [m, c] : f.terms()) {
            Monomial mm(n, 0);
            std::copy(m.begin(), m.end(), mm.begin());
            r.add_term(mm, c);
        }
        return r;
    }

    Cursor& cur_;
    VariableTable& vars_;
};

} // namespace detail

/// Widen all atoms of a formula to the final ambient dimension.
inline Formula widen_formula(const Formula& f, int n) {
    switch (f.kind) {
        case Formula::Kind::AtomNode: {
            const Polynomial& p = f.atom.poly;
            if (p.nvars() == n) return f;
            Polynomial r(n);
            for (const auto& [m, c] : p.terms()) {
                Monomial mm(n, 0);
                std::copy(m.begin(), m.end(), mm.begin());
                r.add_term(mm, c);
            }
            return Formula::make_atom(Atom{r, f.atom.rel});
        }
        default: {
            Formula g = f;
            for (auto& c : g.children) c = widen_formula(c, n);
            return g;
        }
    }
}

/// Parse a set definition, optionally preceded by a "vars x,y,z;" header.
inline SemialgebraicSet parse_set(const std::string& text, VariableTable* shared_vars = nullptr) {
    detail::Cursor cur(text);
    VariableTable local;
    VariableTable& vars = shared_vars ? *shared_vars : local;
    {
        size_t save = cur.pos();
        if (auto kw = cur.ident(); kw && *kw == "vars") {
            do {
                auto name = cur.ident();
                if (!name) throw ParseError("expected variable name", cur.pos());
                vars.index_of(*name, cur.pos());
            } while (cur.accept(","));
            cur.expect(";");
            vars.frozen = true;
        } else {
            cur.set_pos(save);
        }
    }
    detail::FormulaParser fp(cur, vars);
    Formula f = fp.parse_expr();
    if (!cur.eof()) throw ParseError("trailing input after formula", cur.pos());
    SemialgebraicSet X;
    X.ambient_dim = (int)vars.names.size();
    X.formula = widen_formula(f, X.ambient_dim);
    X.var_names = vars.names;
    return X;
}

// ---- printing ------------------------------------------------------------

inline std::string print_polynomial(const Polynomial& f, const std::vector<std::string>& names) {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // map iteration order is the canonical term order
    for (const auto& [m, c] : f.terms()) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool printed_coeff = false;
        if (a != 1 || total_degree(m) == 0) {
            os << rat_str(a);
            printed_coeff = true;
        }
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (printed_coeff) os << "*";
            os << (i < names.size() ? names[i] : ("x" + std::to_string(i + 1)));
            if (m[i] > 1) os << "^" << m[i];
            printed_coeff = true;
        }
    }
    return os.str();
}

inline std::string print_formula(const Formula& f, const std::vector<std::string>& names) {
    switch (f.kind) {
        case Formula::Kind::AtomNode:
            return print_polynomial(f.atom.poly, names) + " " + relation_text(f.atom.rel) + " 0";
        case Formula::Kind::Not:
            return "!(" + print_formula(f.children[0], names) + ")";
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::string sep = f.kind == Formula::Kind::And ? " && " : " || ";
            std::string out;
            for (size_t i = 0; i < f.children.size(); ++i) {
                if (i) out += sep;
                const Formula& c = f.children[i];
                bool paren = c.kind == Formula::Kind::And || c.kind == Formula::Kind::Or;
                out += paren ? "(" + print_formula(c, names) + ")" : print_formula(c, names);
            }
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

inline std::string print_set(const SemialgebraicSet& X) { return print_formula(X.formula, X.var_names); }

// ---- Puiseux series literals ----------------------------------------------
// e.g. "3*t^(1/2) + t - 2*t^(5/2) + O(t^8)"

inline PuiseuxSeries parse_series(const std::string& text) {
    detail::Cursor cur(text);
    std::vector<std::pair<Rational, Rational>> terms;
    Trunc tr = Trunc::exact();
    bool first = true;
    while (!cur.eof()) {
        int sgn = 1;
        if (cur.accept("+")) {
        } else if (cur.accept("-")) {
            sgn = -1;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between series terms", cur.pos());
        }
        first = false;
        // truncation marker
        {
            size_t save = cur.pos();
            if (auto id = cur.ident(); id && *id == "O") {
                cur.expect("(");
                if (auto id2 = cur.ident(); !id2 || *id2 != "t")
                    throw ParseError("expected t in truncation marker", cur.pos());
                Rational e = cur.accept("^") ? cur.signed_rational() : Rational(1);
                cur.expect(")");
                tr = min(tr, Trunc::at(e));
                continue;
            }
            cur.set_pos(save);
        }
        Rational coeff = 1;
        bool have_coeff = false;
        if (auto r = cur.rational()) {
            coeff = *r;
            have_coeff = true;
        }
        Rational expn = 0;
        bool have_t = false;
        size_t save = cur.pos();
        if (have_coeff && !cur.accept("*")) cur.set_pos(save);
        if (auto id = cur.ident()) {
            if (*id != "t") throw ParseError("unexpected symbol in series literal", cur.pos());
            have_t = true;
            expn = cur.accept("^") ? cur.signed_rational() : Rational(1);
        }
        if (!have_coeff && !have_t) throw ParseError("expected series term", cur.pos());
        terms.push_back({expn, sgn * coeff});
    }
    return PuiseuxSeries::from_terms(std::move(terms), tr);
}

inline std::string print_series(const PuiseuxSeries& s) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : s.terms()) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        if (e == 0) {
            os << rat_str(a);
        } else {
            if (a != 1) os << rat_str(a) << "*";
            os << "t";
            if (e != 1) {
                if (denominator(e) == 1 && e > 0) os << "^" << rat_str(e);
                else os << "^(" << rat_str(e) << ")";
            }
        }
    }
    if (first) os << "0";
    if (s.trunc().finite) {
        if (!first) os << " + ";
        os << "O(t^";
        const Rational& o = s.trunc().order;
        if (denominator(o) == 1 && o > 0) os << rat_str(o);
        else os << "(" << rat_str(o) << ")";
        os << ")";
    }
    return os.str();
}

inline std::string print_point(const PuiseuxPoint& p) {
    std::string out = "(";
    for (int i = 0; i < p.dim(); ++i) {
        if (i) out += ", ";
        out += print_series(p.coords[i]);
    }
    return out + ")";
}

} // namespace tancone

#endif
