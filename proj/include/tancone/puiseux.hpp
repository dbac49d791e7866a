#ifndef TANCONE_PUISEUX_HPP
#define TANCONE_PUISEUX_HPP

#include "tancone/polynomial.hpp"
#include "tancone/rational.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tancone {

enum class Trool { True, False, Indet };

inline Trool trool_and(Trool a, Trool b) {
    if (a == Trool::False || b == Trool::False) return Trool::False;
    if (a == Trool::Indet || b == Trool::Indet) return Trool::Indet;
    return Trool::True;
}
inline Trool trool_or(Trool a, Trool b) {
    if (a == Trool::True || b == Trool::True) return Trool::True;
    if (a == Trool::Indet || b == Trool::Indet) return Trool::Indet;
    return Trool::False;
}
inline Trool trool_not(Trool a) {
    if (a == Trool::Indet) return Trool::Indet;
    return a == Trool::True ? Trool::False : Trool::True;
}

/// Raised when a verdict would depend on coefficients beyond the tracked
/// truncation order.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncation order: behavior at exponents >= order is unknown. The
/// non-finite state marks a series known exactly at every order.
struct Trunc {
    bool finite = false;
    Rational order;

    static Trunc exact() { return Trunc{}; }
    static Trunc at(const Rational& o) { return Trunc{true, o}; }

    friend Trunc min(const Trunc& a, const Trunc& b) {
        if (!a.finite) return b;
        if (!b.finite) return a;
        return Trunc::at(rat_min(a.order, b.order));
    }
    Trunc shifted(const Rational& d) const { return finite ? Trunc::at(order + d) : exact(); }
    bool covers(const Rational& e) const { return !finite || e < order; }
    friend bool operator==(const Trunc& a, const Trunc& b) {
        return a.finite == b.finite && (!a.finite || a.order == b.order);
    }
};

constexpr long kDefaultTruncationOrder = 8;

/// Truncated Puiseux series in one parameter t over the rationals.
/// Terms are (exponent, coefficient), strictly increasing exponents, no zero
/// coefficients, every exponent below the truncation order.
class PuiseuxSeries {
public:
    PuiseuxSeries() = default;
    explicit PuiseuxSeries(Trunc tr) : trunc_(tr) {}

    static PuiseuxSeries zero(Trunc tr = Trunc::exact()) { return PuiseuxSeries(tr); }

    static PuiseuxSeries constant(const Rational& c, Trunc tr = Trunc::exact()) {
        PuiseuxSeries s(tr);
        if (c != 0 && tr.covers(0)) s.terms_.push_back({Rational(0), c});
        return s;
    }

    /// c * t^e
    static PuiseuxSeries term(const Rational& c, const Rational& e, Trunc tr = Trunc::exact()) {
        PuiseuxSeries s(tr);
        if (c != 0 && tr.covers(e)) s.terms_.push_back({e, c});
        return s;
    }

    static PuiseuxSeries t() { return term(1, 1); }

    static PuiseuxSeries from_terms(std::vector<std::pair<Rational, Rational>> ts, Trunc tr) {
        std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        PuiseuxSeries s(tr);
        for (auto& [e, c] : ts) {
            if (c == 0 || !tr.covers(e)) continue;
            if (!s.terms_.empty() && s.terms_.back().first == e) {
                s.terms_.back().second += c;
                if (s.terms_.back().second == 0) s.terms_.pop_back();
            } else {
                s.terms_.push_back({e, c});
            }
        }
        return s;
    }

    const std::vector<std::pair<Rational, Rational>>& terms() const { return terms_; }
    const Trunc& trunc() const { return trunc_; }
    bool no_visible_terms() const { return terms_.empty(); }
    bool is_exact_zero() const { return terms_.empty() && !trunc_.finite; }

    const Rational& leading_exponent() const {
        if (terms_.empty()) throw std::domain_error("leading exponent of zero series");
        return terms_.front().first;
    }
    const Rational& leading_coefficient() const {
        if (terms_.empty()) throw std::domain_error("leading coefficient of zero series");
        return terms_.front().second;
    }

    /// Coefficient at exponent e; raises TruncationError past the tracked order.
    Rational coefficient(const Rational& e) const {
        if (!trunc_.covers(e)) throw TruncationError("coefficient beyond truncation order");
        for (const auto& [exp, c] : terms_) {
            if (exp == e) return c;
            if (exp > e) break;
        }
        return 0;
    }

    /// Retruncate to a (possibly tighter) order.
    PuiseuxSeries truncated(Trunc tr) const {
        Trunc m = min(trunc_, tr);
        PuiseuxSeries s(m);
        for (const auto& te : terms_)
            if (m.covers(te.first)) s.terms_.push_back(te);
        return s;
    }

    friend bool operator==(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        return a.terms_ == b.terms_ && a.trunc_ == b.trunc_;
    }

private:
    std::vector<std::pair<Rational, Rational>> terms_;
    Trunc trunc_ = Trunc::exact();
    friend PuiseuxSeries ps_add(const PuiseuxSeries&, const PuiseuxSeries&);
    friend PuiseuxSeries ps_mul(const PuiseuxSeries&, const PuiseuxSeries&);
    friend PuiseuxSeries ps_scale(const Rational&, const PuiseuxSeries&);
    friend PuiseuxSeries ps_shift(const PuiseuxSeries&, const Rational&);
};

/// Lower bound on the valuation: leading exponent if visible, else the
/// truncation order (infinite for an exact zero).
inline std::optional<Rational> valuation_lower_bound(const PuiseuxSeries& a) {
    if (!a.no_visible_terms()) return a.leading_exponent();
    if (a.trunc().finite) return a.trunc().order;
    return std::nullopt; // exact zero: valuation infinity
}

inline PuiseuxSeries ps_add(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    Trunc tr = min(a.trunc(), b.trunc());
    PuiseuxSeries r(tr);
    size_t i = 0, j = 0;
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    while (i < ta.size() || j < tb.size()) {
        std::pair<Rational, Rational> next;
        if (j == tb.size() || (i < ta.size() && ta[i].first < tb[j].first)) {
            next = ta[i++];
        } else if (i == ta.size() || tb[j].first < ta[i].first) {
            next = tb[j++];
        } else {
            next = {ta[i].first, ta[i].second + tb[j].second};
            ++i;
            ++j;
        }
        if (next.second != 0 && tr.covers(next.first)) r.terms_.push_back(next);
    }
    return r;
}

inline PuiseuxSeries ps_scale(const Rational& c, const PuiseuxSeries& a) {
    PuiseuxSeries r(a.trunc());
    if (c == 0) return PuiseuxSeries::zero(); // exact zero regardless of truncation
    for (const auto& [e, k] : a.terms()) r.terms_.push_back({e, c * k});
    return r;
}

/// a * t^d
inline PuiseuxSeries ps_shift(const PuiseuxSeries& a, const Rational& d) {
    PuiseuxSeries r(a.trunc().shifted(d));
    for (const auto& [e, c] : a.terms()) r.terms_.push_back({e + d, c});
    return r;
}

inline PuiseuxSeries ps_sub(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    return ps_add(a, ps_scale(-1, b));
}

inline PuiseuxSeries ps_mul(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return PuiseuxSeries::zero();
    // Result is guaranteed up to min(trunc_a + v(b), trunc_b + v(a)).
    auto va = valuation_lower_bound(a), vb = valuation_lower_bound(b);
    Trunc tr = Trunc::exact();
    if (a.trunc().finite) tr = min(tr, Trunc::at(a.trunc().order + (vb ? *vb : a.trunc().order)));
    if (b.trunc().finite) tr = min(tr, Trunc::at(b.trunc().order + (va ? *va : b.trunc().order)));
    std::vector<std::pair<Rational, Rational>> cross;
    cross.reserve(a.terms().size() * b.terms().size());
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) cross.push_back({ea + eb, ca * cb});
    return PuiseuxSeries::from_terms(std::move(cross), tr);
}

inline PuiseuxSeries ps_pow(const PuiseuxSeries& a, unsigned e) {
    PuiseuxSeries acc = PuiseuxSeries::constant(1);
    for (unsigned k = 0; k < e; ++k) acc = ps_mul(acc, a);
    return acc;
}

/// Division by geometric-series inversion / long division. The divisor must
/// have a visible term; exact inputs with a non-terminating quotient are
/// truncated at relative order kDefaultTruncationOrder.
inline PuiseuxSeries ps_div(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    if (b.no_visible_terms()) throw TruncationError("indeterminate divisor: zero up to truncation");
    const Rational vb = b.leading_exponent();
    const Rational& lb = b.leading_coefficient();

    Trunc tr = Trunc::exact();
    if (a.trunc().finite) tr = min(tr, Trunc::at(a.trunc().order - vb));
    if (b.trunc().finite) {
        auto va = valuation_lower_bound(a);
        Rational va_val = va ? *va : (a.trunc().finite ? a.trunc().order : Rational(0));
        if (!va && !a.trunc().finite) return PuiseuxSeries::zero(); // 0 / b
        tr = min(tr, Trunc::at(b.trunc().order - 2 * vb + va_val));
    }
    if (a.is_exact_zero()) return PuiseuxSeries::zero();

    // cap for the exact/exact non-terminating case
    Rational cap;
    bool have_cap = tr.finite;
    if (tr.finite) {
        cap = tr.order;
    } else if (!a.no_visible_terms()) {
        cap = a.leading_exponent() - vb + kDefaultTruncationOrder;
    } else {
        cap = Rational(kDefaultTruncationOrder) - vb;
    }

    PuiseuxSeries q = PuiseuxSeries::zero(tr);
    PuiseuxSeries r = a;
    bool terminated = false;
    while (true) {
        if (r.no_visible_terms()) {
            terminated = r.is_exact_zero();
            break;
        }
        Rational e = r.leading_exponent() - vb;
        if (e >= cap) break;
        PuiseuxSeries term = PuiseuxSeries::term(r.leading_coefficient() / lb, e);
        q = ps_add(q, term.truncated(tr));
        r = ps_sub(r, ps_mul(term, b));
    }
    if (!terminated && !tr.finite) q = q.truncated(Trunc::at(cap));
    return q;
}

enum class PsOp { Add, Sub, Mul, Div };

inline PuiseuxSeries ps_arith(PsOp op, const PuiseuxSeries& a, const PuiseuxSeries& b) {
    switch (op) {
        case PsOp::Add: return ps_add(a, b);
        case PsOp::Sub: return ps_sub(a, b);
        case PsOp::Mul: return ps_mul(a, b);
        case PsOp::Div: return ps_div(a, b);
    }
    throw std::logic_error("unreachable");
}

/// Element of the value group Gamma extended with infinity. The `certain`
/// flag is false when "infinity" only means "zero as far as computed".
struct ValuationValue {
    bool infinite = false;
    Rational value;
    bool certain = true;

    static ValuationValue finite(const Rational& v) { return {false, v, true}; }
    static ValuationValue infinity(bool certain) { return {true, Rational(0), certain}; }

    friend bool operator==(const ValuationValue& a, const ValuationValue& b) {
        if (a.infinite != b.infinite) return false;
        return a.infinite || a.value == b.value;
    }
};

inline ValuationValue valuation(const PuiseuxSeries& a) {
    if (!a.no_visible_terms()) return ValuationValue::finite(a.leading_exponent());
    return ValuationValue::infinity(!a.trunc().finite);
}

/// Tuple of Puiseux series; element of R^n.
struct PuiseuxPoint {
    std::vector<PuiseuxSeries> coords;

    PuiseuxPoint() = default;
    explicit PuiseuxPoint(std::vector<PuiseuxSeries> cs) : coords(std::move(cs)) {}

    static PuiseuxPoint constant(const std::vector<Rational>& x) {
        PuiseuxPoint p;
        for (const auto& c : x) p.coords.push_back(PuiseuxSeries::constant(c));
        return p;
    }

    int dim() const { return (int)coords.size(); }
    Trunc common_trunc() const {
        Trunc tr = Trunc::exact();
        for (const auto& c : coords) tr = min(tr, c.trunc());
        return tr;
    }
    friend bool operator==(const PuiseuxPoint& a, const PuiseuxPoint& b) { return a.coords == b.coords; }
};

inline PuiseuxPoint pp_sub(const PuiseuxPoint& a, const PuiseuxPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("point dimension mismatch");
    PuiseuxPoint r;
    for (int i = 0; i < a.dim(); ++i) r.coords.push_back(ps_sub(a.coords[i], b.coords[i]));
    return r;
}

inline ValuationValue vhat(const PuiseuxPoint& x) {
    bool any_finite = false, all_certain = true;
    Rational best;
    for (const auto& c : x.coords) {
        ValuationValue v = valuation(c);
        if (v.infinite) {
            all_certain = all_certain && v.certain;
        } else if (!any_finite || v.value < best) {
            any_finite = true;
            best = v.value;
        }
    }
    if (!any_finite) return ValuationValue::infinity(all_certain);
    // a finite minimum is certain: hidden terms sit above each truncation order,
    // but a coordinate that is zero up to truncation could still undercut it
    for (const auto& c : x.coords) {
        if (c.no_visible_terms() && c.trunc().finite && c.trunc().order < best)
            throw TruncationError("vhat indeterminate: hidden coordinate could carry the minimum");
    }
    return ValuationValue::finite(best);
}

inline Rational residue(const PuiseuxSeries& a) {
    for (const auto& [e, c] : a.terms())
        if (e < 0) throw std::domain_error("not in valuation ring: negative valuation");
    if (!a.trunc().covers(0)) throw TruncationError("residue beyond truncation order");
    return a.coefficient(0);
}

/// rv-hat class: valuation plus the residues of x / t^gamma.
struct RvClass {
    ValuationValue gamma;
    std::vector<Rational> leading_residue;

    friend bool operator==(const RvClass& a, const RvClass& b) {
        return a.gamma == b.gamma && a.leading_residue == b.leading_residue;
    }
};

inline RvClass rvhat(const PuiseuxPoint& x) {
    ValuationValue g = vhat(x); // throws TruncationError when undecidable
    RvClass cls;
    cls.gamma = g;
    if (g.infinite) {
        if (!g.certain) throw TruncationError("rvhat indeterminate: point is zero only up to truncation");
        cls.leading_residue.assign(x.coords.size(), Rational(0));
        return cls;
    }
    for (const auto& c : x.coords) {
        if (!c.trunc().covers(g.value))
            throw TruncationError("rvhat indeterminate: leading coefficient beyond truncation");
        cls.leading_residue.push_back(c.coefficient(g.value));
    }
    return cls;
}

/// Projective direction over the residue field, canonical representative with
/// first nonzero coordinate 1.
struct Direction {
    std::vector<Rational> coords;

    static Direction canonical(std::vector<Rational> v) {
        Rational scale = 0;
        for (const auto& c : v)
            if (c != 0) {
                scale = c;
                break;
            }
        if (scale == 0) throw std::domain_error("direction of zero vector");
        for (auto& c : v) c /= scale;
        return Direction{std::move(v)};
    }

    friend bool operator==(const Direction& a, const Direction& b) { return a.coords == b.coords; }
    friend bool operator<(const Direction& a, const Direction& b) { return a.coords < b.coords; }
};

inline Direction direction(const PuiseuxPoint& x) {
    RvClass cls = rvhat(x);
    if (cls.gamma.infinite) throw std::domain_error("direction of zero point");
    return Direction::canonical(cls.leading_residue);
}

/// Valuative ball B(center, > radius) or B(center, >= radius).
struct Ball {
    PuiseuxPoint center;
    Rational radius;
    bool open = true; // open: vhat(x - a) > radius; closed: >=
};

inline Trool ball_contains(const Ball& B, const PuiseuxPoint& x) {
    if (B.center.dim() != x.dim()) throw std::invalid_argument("ball/point dimension mismatch");
    PuiseuxPoint d = pp_sub(x, B.center);
    try {
        ValuationValue w = vhat(d);
        if (w.infinite) {
            if (w.certain) return Trool::True;
            return Trool::Indet; // handled below via bounds, defensive
        }
        bool in = B.open ? (w.value > B.radius) : (w.value >= B.radius);
        return in ? Trool::True : Trool::False;
    } catch (const TruncationError&) {
        // all coordinates have valuation >= min truncation order; that lower
        // bound may already decide membership
        Trunc tr = d.common_trunc();
        if (tr.finite) {
            bool in = B.open ? (tr.order > B.radius) : (tr.order >= B.radius);
            if (in) return Trool::True;
        }
        return Trool::Indet;
    }
}

/// Limit as t -> 0+ of a bounded Puiseux curve: the tuple of residues.
inline std::vector<Rational> ps_limit(const PuiseuxPoint& curve) {
    std::vector<Rational> out;
    for (const auto& c : curve.coords) out.push_back(residue(c)); // throws on negative valuation
    return out;
}

/// Evaluate an exact polynomial at a Puiseux point (series composition).
inline PuiseuxSeries eval_poly(const Polynomial& f, const PuiseuxPoint& x) {
    if (f.nvars() != x.dim()) throw std::invalid_argument("polynomial/point dimension mismatch");
    std::vector<std::vector<PuiseuxSeries>> pows(f.nvars());
    PuiseuxSeries acc = PuiseuxSeries::zero();
    for (const auto& [m, c] : f.terms()) {
        PuiseuxSeries t = PuiseuxSeries::constant(c);
        for (int i = 0; i < f.nvars(); ++i) {
            if (m[i] == 0) continue;
            auto& cache = pows[i];
            if (cache.empty()) cache.push_back(PuiseuxSeries::constant(1));
            while (cache.size() <= m[i]) cache.push_back(ps_mul(cache.back(), x.coords[i]));
            t = ps_mul(t, cache[m[i]]);
        }
        acc = ps_add(acc, t);
    }
    return acc;
}

/// A point transformer for risometry checks: either a symbolic polynomial map
/// (evaluated exactly) or a black-box function on points.
using PointMap = std::variant<std::vector<Polynomial>, std::function<PuiseuxPoint(const PuiseuxPoint&)>>;

inline PuiseuxPoint apply_map(const PointMap& map, const PuiseuxPoint& x) {
    if (std::holds_alternative<std::vector<Polynomial>>(map)) {
        PuiseuxPoint r;
        for (const auto& f : std::get<std::vector<Polynomial>>(map)) r.coords.push_back(eval_poly(f, x));
        return r;
    }
    return std::get<std::function<PuiseuxPoint(const PuiseuxPoint&)>>(map)(x);
}

struct RisometryReport {
    int pass = 0;
    int fail = 0;
    int indeterminate = 0;
    int isometry_fail = 0;
    bool precision_loss = false;
    std::vector<std::string> notes;

    bool all_pass() const { return fail == 0 && indeterminate == 0 && isometry_fail == 0; }
};

/// Sample-based check of the risometry condition
/// rvhat(phi(x) - phi(y)) == rvhat(x - y), with the implied isometry check
/// vhat(phi(x)-phi(y)) == vhat(x-y) asserted alongside.
inline RisometryReport risometry_check(const PointMap& map,
                                       const std::vector<std::pair<PuiseuxPoint, PuiseuxPoint>>& sample_pairs) {
    RisometryReport rep;
    for (const auto& [x, y] : sample_pairs) {
        PuiseuxPoint fx = apply_map(map, x);
        PuiseuxPoint fy = apply_map(map, y);
        Trunc in_tr = min(x.common_trunc(), y.common_trunc());
        Trunc out_tr = min(fx.common_trunc(), fy.common_trunc());
        if (out_tr.finite && (!in_tr.finite || out_tr.order < in_tr.order)) {
            rep.precision_loss = true;
        }
        try {
            PuiseuxPoint din = pp_sub(x, y), dout = pp_sub(fx, fy);
            RvClass a = rvhat(dout), b = rvhat(din);
            if (a == b) {
                ++rep.pass;
            } else {
                ++rep.fail;
            }
            if (!(vhat(dout) == vhat(din))) ++rep.isometry_fail;
        } catch (const TruncationError& e) {
            ++rep.indeterminate;
            if (rep.notes.size() < 8) rep.notes.push_back(e.what());
        }
    }
    return rep;
}

} // namespace tancone

#endif
