#ifndef TANCONE_SEMIALG_HPP
#define TANCONE_SEMIALG_HPP

#include "tancone/polynomial.hpp"
#include "tancone/puiseux.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tancone {

enum class Relation { Lt, Le, Eq, Ge, Gt, Ne };

inline Relation negate_relation(Relation r) {
    switch (r) {
        case Relation::Lt: return Relation::Ge;
        case Relation::Le: return Relation::Gt;
        case Relation::Eq: return Relation::Ne;
        case Relation::Ge: return Relation::Lt;
        case Relation::Gt: return Relation::Le;
        case Relation::Ne: return Relation::Eq;
    }
    throw std::logic_error("unreachable");
}

inline const char* relation_text(Relation r) {
    switch (r) {
        case Relation::Lt: return "<";
        case Relation::Le: return "<=";
        case Relation::Eq: return "=";
        case Relation::Ge: return ">=";
        case Relation::Gt: return ">";
        case Relation::Ne: return "!=";
    }
    throw std::logic_error("unreachable");
}

/// Sign condition "poly rel 0".
struct Atom {
    Polynomial poly;
    Relation rel;

    friend bool operator==(const Atom& a, const Atom& b) { return a.rel == b.rel && a.poly == b.poly; }
};

/// Boolean formula AST over polynomial sign conditions.
struct Formula {
    enum class Kind { AtomNode, And, Or, Not };
    Kind kind = Kind::AtomNode;
    Atom atom{Polynomial(1), Relation::Eq};
    std::vector<Formula> children;

    static Formula make_atom(Atom a) {
        Formula f;
        f.kind = Kind::AtomNode;
        f.atom = std::move(a);
        return f;
    }
    static Formula make_and(std::vector<Formula> cs) {
        Formula f;
        f.kind = Kind::And;
        f.children = std::move(cs);
        return f;
    }
    static Formula make_or(std::vector<Formula> cs) {
        Formula f;
        f.kind = Kind::Or;
        f.children = std::move(cs);
        return f;
    }
    static Formula make_not(Formula c) {
        Formula f;
        f.kind = Kind::Not;
        f.children.push_back(std::move(c));
        return f;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == Kind::AtomNode) return a.atom == b.atom;
        return a.children == b.children;
    }
};

/// X subset of R^n as a formula plus ambient dimension; variable names kept
/// for printing and reports.
struct SemialgebraicSet {
    Formula formula;
    int ambient_dim = 1;
    std::vector<std::string> var_names;
};

/// Not pushed inward by relation flipping; And/Or preserved.
inline Formula normalize_nnf(const Formula& f, bool negated = false) {
    switch (f.kind) {
        case Formula::Kind::AtomNode: {
            Atom a = f.atom;
            if (negated) a.rel = negate_relation(a.rel);
            return Formula::make_atom(std::move(a));
        }
        case Formula::Kind::Not:
            return normalize_nnf(f.children[0], !negated);
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            bool is_and = (f.kind == Formula::Kind::And) != negated;
            std::vector<Formula> cs;
            for (const auto& c : f.children) cs.push_back(normalize_nnf(c, negated));
            return is_and ? Formula::make_and(std::move(cs)) : Formula::make_or(std::move(cs));
        }
    }
    throw std::logic_error("unreachable");
}

/// Disjunctive normal form as a list of conjunctions of atoms.
/// Throws if the expansion exceeds the guard size.
inline std::vector<std::vector<Atom>> to_dnf(const Formula& formula, size_t guard = 4096) {
    Formula nnf = normalize_nnf(formula);
    std::function<std::vector<std::vector<Atom>>(const Formula&)> go =
        [&](const Formula& f) -> std::vector<std::vector<Atom>> {
        switch (f.kind) {
            case Formula::Kind::AtomNode: return {{f.atom}};
            case Formula::Kind::Or: {
                std::vector<std::vector<Atom>> out;
                for (const auto& c : f.children) {
                    auto sub = go(c);
                    out.insert(out.end(), sub.begin(), sub.end());
                    if (out.size() > guard) throw std::runtime_error("formula too large for DNF expansion");
                }
                return out;
            }
            case Formula::Kind::And: {
                std::vector<std::vector<Atom>> out{{}};
                for (const auto& c : f.children) {
                    auto sub = go(c);
                    std::vector<std::vector<Atom>> next;
                    for (const auto& left : out)
                        for (const auto& right : sub) {
                            auto conj = left;
                            conj.insert(conj.end(), right.begin(), right.end());
                            next.push_back(std::move(conj));
                            if (next.size() > guard) throw std::runtime_error("formula too large for DNF expansion");
                        }
                    out = std::move(next);
                }
                return out;
            }
            case Formula::Kind::Not: throw std::logic_error("Not survived NNF");
        }
        throw std::logic_error("unreachable");
    };
    return go(nnf);
}

inline bool relation_holds(Relation rel, int s) {
    switch (rel) {
        case Relation::Lt: return s < 0;
        case Relation::Le: return s <= 0;
        case Relation::Eq: return s == 0;
        case Relation::Ge: return s >= 0;
        case Relation::Gt: return s > 0;
        case Relation::Ne: return s != 0;
    }
    throw std::logic_error("unreachable");
}

/// Exact membership at a rational point.
inline bool eval_real(const SemialgebraicSet& X, const std::vector<Rational>& x) {
    if ((int)x.size() != X.ambient_dim) throw std::invalid_argument("point dimension mismatch");
    std::function<bool(const Formula&)> go = [&](const Formula& f) -> bool {
        switch (f.kind) {
            case Formula::Kind::AtomNode: return relation_holds(f.atom.rel, sign(f.atom.poly.eval(x)));
            case Formula::Kind::And:
                for (const auto& c : f.children)
                    if (!go(c)) return false;
                return true;
            case Formula::Kind::Or:
                for (const auto& c : f.children)
                    if (go(c)) return true;
                return false;
            case Formula::Kind::Not: return !go(f.children[0]);
        }
        throw std::logic_error("unreachable");
    };
    return go(X.formula);
}

/// Scale-aware tolerance for floating equality: 1e-9 * (1 + |coeffs|_1 * max(1,|x|)^deg).
inline double float_eq_tolerance(const Polynomial& f, const std::vector<double>& x) {
    double coeff_norm = 0;
    for (const auto& [m, c] : f.terms()) coeff_norm += std::abs(to_double(c));
    double xn = 0;
    for (double v : x) xn += v * v;
    xn = std::max(1.0, std::sqrt(xn));
    long deg = f.degree().value_or(0);
    return 1e-9 * (1 + coeff_norm * std::pow(xn, (double)deg));
}

inline bool atom_holds_double(const Atom& a, const std::vector<double>& x) {
    double v = a.poly.eval_double(x);
    double tol = float_eq_tolerance(a.poly, x);
    switch (a.rel) {
        case Relation::Lt: return v < 0;
        case Relation::Le: return v <= tol;
        case Relation::Eq: return std::abs(v) <= tol;
        case Relation::Ge: return v >= -tol;
        case Relation::Gt: return v > 0;
        case Relation::Ne: return std::abs(v) > tol;
    }
    throw std::logic_error("unreachable");
}

/// Floating membership with the configurable equality tolerance.
inline bool eval_real(const SemialgebraicSet& X, const std::vector<double>& x) {
    if ((int)x.size() != X.ambient_dim) throw std::invalid_argument("point dimension mismatch");
    std::function<bool(const Formula&)> go = [&](const Formula& f) -> bool {
        switch (f.kind) {
            case Formula::Kind::AtomNode: return atom_holds_double(f.atom, x);
            case Formula::Kind::And:
                for (const auto& c : f.children)
                    if (!go(c)) return false;
                return true;
            case Formula::Kind::Or:
                for (const auto& c : f.children)
                    if (go(c)) return true;
                return false;
            case Formula::Kind::Not: return !go(f.children[0]);
        }
        throw std::logic_error("unreachable");
    };
    return go(X.formula);
}

/// Three-valued sign of a composed series for t -> 0+: the sign of the
/// leading coefficient, indeterminate when zero up to truncation.
inline Trool atom_holds_puiseux(const Atom& a, const PuiseuxPoint& x) {
    PuiseuxSeries s = eval_poly(a.poly, x);
    if (!s.no_visible_terms()) {
        return relation_holds(a.rel, sign(s.leading_coefficient())) ? Trool::True : Trool::False;
    }
    if (s.is_exact_zero()) return relation_holds(a.rel, 0) ? Trool::True : Trool::False;
    return Trool::Indet; // zero only up to truncation
}

/// Membership of a Puiseux point in *X, by three-valued transfer of the
/// defining formula.
inline Trool eval_puiseux(const SemialgebraicSet& X, const PuiseuxPoint& x) {
    if (x.dim() != X.ambient_dim) throw std::invalid_argument("point dimension mismatch");
    std::function<Trool(const Formula&)> go = [&](const Formula& f) -> Trool {
        switch (f.kind) {
            case Formula::Kind::AtomNode: return atom_holds_puiseux(f.atom, x);
            case Formula::Kind::And: {
                Trool acc = Trool::True;
                for (const auto& c : f.children) acc = trool_and(acc, go(c));
                return acc;
            }
            case Formula::Kind::Or: {
                Trool acc = Trool::False;
                for (const auto& c : f.children) acc = trool_or(acc, go(c));
                return acc;
            }
            case Formula::Kind::Not: return trool_not(go(f.children[0]));
        }
        throw std::logic_error("unreachable");
    };
    return go(X.formula);
}

} // namespace tancone

#endif
