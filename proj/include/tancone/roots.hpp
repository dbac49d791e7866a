#ifndef TANCONE_ROOTS_HPP
#define TANCONE_ROOTS_HPP

#include "tancone/rational.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tancone {

// Dense univariate polynomial over Q, coefficient of degree i at index i.
// Trailing zero coefficients are trimmed so degree is size()-1.
using UPoly = std::vector<Rational>;

inline void up_trim(UPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline long up_degree(const UPoly& p) { return (long)p.size() - 1; } // -1 for zero

inline Rational up_eval(const UPoly& p, const Rational& x) {
    Rational acc = 0;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline UPoly up_derivative(const UPoly& p) {
    UPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * (long)i);
    return d;
}

inline UPoly up_neg(UPoly p) {
    for (auto& c : p) c = -c;
    return p;
}

// Remainder of exact division a mod b over Q.
inline UPoly up_rem(UPoly a, const UPoly& b) {
    if (b.empty()) throw std::domain_error("division by zero polynomial");
    while (up_degree(a) >= up_degree(b)) {
        Rational q = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= q * b[i];
        a.pop_back();
        up_trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline UPoly up_gcd(UPoly a, UPoly b) {
    up_trim(a);
    up_trim(b);
    while (!b.empty()) {
        UPoly r = up_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rational lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

inline UPoly up_square_free(const UPoly& p) {
    if (up_degree(p) < 1) return p;
    UPoly g = up_gcd(p, up_derivative(p));
    if (up_degree(g) < 1) return p;
    // exact quotient p / g
    UPoly a = p, q(p.size() - g.size() + 1, Rational(0));
    while (up_degree(a) >= up_degree(g)) {
        Rational c = a.back() / g.back();
        size_t shift = a.size() - g.size();
        q[shift] = c;
        for (size_t i = 0; i < g.size(); ++i) a[i + shift] -= c * g[i];
        a.pop_back();
        up_trim(a);
        if (a.empty()) break;
    }
    up_trim(q);
    return q;
}

inline std::vector<UPoly> sturm_chain(const UPoly& p) {
    std::vector<UPoly> chain;
    UPoly a = p;
    up_trim(a);
    if (a.empty()) return chain;
    chain.push_back(a);
    UPoly b = up_derivative(a);
    up_trim(b);
    while (!b.empty()) {
        chain.push_back(b);
        UPoly r = up_neg(up_rem(chain[chain.size() - 2], b));
        b = std::move(r);
    }
    return chain;
}

inline int sturm_variations_at(const std::vector<UPoly>& chain, const Rational& x) {
    int var = 0, prev = 0;
    for (const auto& q : chain) {
        int s = sign(up_eval(q, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

/// Number of distinct real roots of p in the half-open interval (a, b].
inline int sturm_count(const std::vector<UPoly>& chain, const Rational& a, const Rational& b) {
    if (chain.empty()) return 0;
    return sturm_variations_at(chain, a) - sturm_variations_at(chain, b);
}

inline int count_real_roots_in(const UPoly& p, const Rational& a, const Rational& b) {
    UPoly sf = up_square_free(p);
    auto chain = sturm_chain(sf);
    return sturm_count(chain, a, b);
}

/// Cauchy bound: all real roots lie in (-B, B).
inline Rational up_root_bound(const UPoly& p) {
    if (up_degree(p) < 1) return 1;
    Rational m = 0;
    for (size_t i = 0; i + 1 < p.size(); ++i) m = rat_max(m, rat_abs(p[i]));
    return 1 + m / rat_abs(p.back());
}

/// A real algebraic number: square-free polynomial plus isolating interval
/// (lo, hi] containing exactly one root. Rational roots use the fast path.
struct AlgebraicReal {
    bool is_rational = true;
    Rational value;  // when rational
    UPoly sqfree;    // when not
    Rational lo, hi; // isolating interval, lo < root <= hi
    std::vector<UPoly> chain;

    static AlgebraicReal from_rational(const Rational& r) {
        AlgebraicReal a;
        a.value = r;
        return a;
    }

    void refine() {
        if (is_rational) return;
        Rational mid = (lo + hi) / 2;
        if (up_eval(sqfree, mid) == 0) {
            is_rational = true;
            value = mid;
            return;
        }
        if (sturm_count(chain, lo, mid) == 1)
            hi = mid;
        else
            lo = mid;
    }

    void refine_below(const Rational& width) {
        while (!is_rational && hi - lo > width) refine();
    }

    double approx() {
        if (is_rational) return to_double(value);
        refine_below(Rational(1, 1000000000));
        return to_double((lo + hi) / 2);
    }

    int sign_of() {
        if (is_rational) return sign(value);
        while (!is_rational && lo < 0 && hi > 0) refine();
        if (is_rational) return sign(value);
        return hi <= 0 ? -1 : 1;
    }

    friend bool operator==(const AlgebraicReal& a, const AlgebraicReal& b) {
        if (a.is_rational && b.is_rational) return a.value == b.value;
        AlgebraicReal x = a, y = b;
        x.refine_below(Rational(1, 1) / 1024);
        y.refine_below(Rational(1, 1) / 1024);
        if (x.is_rational && y.is_rational) return x.value == y.value;
        // same square-free polynomial and overlapping isolating intervals
        if (!x.is_rational && !y.is_rational && x.sqfree == y.sqfree)
            return x.lo < y.hi && y.lo < x.hi && sturm_count(x.chain, rat_max(x.lo, y.lo), rat_min(x.hi, y.hi)) == 1;
        return false;
    }
};

/// Isolate all distinct real roots of p, in ascending order.
inline std::vector<AlgebraicReal> isolate_real_roots(const UPoly& p_in) {
    UPoly p = p_in;
    up_trim(p);
    std::vector<AlgebraicReal> roots;
    if (up_degree(p) < 1) return roots;

    UPoly sf = up_square_free(p);
    std::vector<Rational> exact;
    // peel off the root at 0 so the rational-root trial below (which divides
    // by the constant term) stays applicable
    if (!sf.empty() && sf.front() == 0) {
        exact.push_back(0);
        while (!sf.empty() && sf.front() == 0) sf.erase(sf.begin());
    }
    if (up_degree(sf) < 1) {
        for (const auto& e : exact) roots.push_back(AlgebraicReal::from_rational(e));
        return roots;
    }
    auto chain = sturm_chain(sf);
    Rational bound = up_root_bound(sf);

    struct Seg { Rational a, b; int count; };
    std::vector<Seg> work{{-bound, bound, sturm_count(chain, -bound, bound)}};
    std::vector<std::pair<Rational, Rational>> isolated; // (lo, hi]
    while (!work.empty()) {
        Seg s = work.back();
        work.pop_back();
        if (s.count == 0) continue;
        if (s.count == 1 && up_eval(sf, s.b) == 0) {
            exact.push_back(s.b);
            continue;
        }
        if (s.count == 1) {
            isolated.emplace_back(s.a, s.b);
            continue;
        }
        Rational mid = (s.a + s.b) / 2;
        if (up_eval(sf, mid) == 0) {
            exact.push_back(mid);
            // shrink a tiny cell around the exact root so neighbours split off
            Rational w = (s.b - s.a) / 1024;
            work.push_back({s.a, mid - w, sturm_count(chain, s.a, mid - w)});
            work.push_back({mid + w, s.b, sturm_count(chain, mid + w, s.b)});
        } else {
            int left = sturm_count(chain, s.a, mid);
            work.push_back({s.a, mid, left});
            work.push_back({mid, s.b, s.count - left});
        }
    }
    std::sort(isolated.begin(), isolated.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    for (const auto& e : exact) roots.push_back(AlgebraicReal::from_rational(e));

    for (auto& [a, b] : isolated) {
        AlgebraicReal r;
        {
            r.is_rational = false;
            r.sqfree = sf;
            r.chain = chain;
            r.lo = a;
            r.hi = b;
            // trial: rational root p/q from integer-cleared polynomial
            r.refine_below((b - a) / 64);
            if (!r.is_rational) {
                Integer den = 1;
                for (const auto& c : sf) den = boost::multiprecision::lcm(den, denominator(c));
                std::vector<Integer> ip;
                for (const auto& c : sf) ip.push_back(numerator(c * Rational(den)));
                // divisors of the trailing/leading coefficients, bounded search
                Integer a0 = ip.front(), an = ip.back();
                if (a0 != 0) {
                    auto divisors = [](Integer v) {
                        std::vector<Integer> ds;
                        if (v < 0) v = -v;
                        for (Integer d = 1; d * d <= v && d < 100000; ++d)
                            if (v % d == 0) {
                                ds.push_back(d);
                                ds.push_back(v / d);
                            }
                        return ds;
                    };
                    for (const Integer& pn : divisors(a0)) {
                        for (const Integer& qn : divisors(an)) {
                            for (int sgn : {1, -1}) {
                                Rational cand = Rational(sgn * pn, qn);
                                if (cand > r.lo && cand <= r.hi && up_eval(sf, cand) == 0) {
                                    r.is_rational = true;
                                    r.value = cand;
                                }
                                if (r.is_rational) break;
                            }
                            if (r.is_rational) break;
                        }
                        if (r.is_rational) break;
                    }
                }
            }
        }
        roots.push_back(std::move(r));
    }
    std::sort(roots.begin(), roots.end(), [](const AlgebraicReal& x, const AlgebraicReal& y) {
        Rational mx = x.is_rational ? x.value : (x.lo + x.hi) / 2;
        Rational my = y.is_rational ? y.value : (y.lo + y.hi) / 2;
        return mx < my;
    });
    return roots;
}

/// Rational roots only (exact), ascending.
inline std::vector<Rational> rational_roots(const UPoly& p) {
    std::vector<Rational> out;
    for (auto& r : isolate_real_roots(p))
        if (r.is_rational) out.push_back(r.value);
    return out;
}

} // namespace tancone

#endif
