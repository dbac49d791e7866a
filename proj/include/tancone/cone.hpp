#ifndef TANCONE_CONE_HPP
#define TANCONE_CONE_HPP

#include "tancone/roots.hpp"
#include "tancone/sampling.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tancone {

// ---- query / verdict --------------------------------------------------------

struct ConeQuery {
    SemialgebraicSet X;
    std::vector<Rational> p;
    std::vector<Rational> y; // all-zero queries the apex
};

enum class ConeStatus { Supported, Unsupported, Indeterminate };

inline const char* status_text(ConeStatus s) {
    switch (s) {
        case ConeStatus::Supported: return "supported";
        case ConeStatus::Unsupported: return "unsupported";
        case ConeStatus::Indeterminate: return "indeterminate";
    }
    return "?";
}

struct NumericWitness {
    double eps = 0;
    double a = 0;      // scaling with ||a(x-p) - y|| small
    double defect = 0;
    double r = 0;      // deformation parameter when issued by the slice engine
    std::vector<double> x;
};

struct ConeVerdict {
    ConeStatus status = ConeStatus::Indeterminate;
    std::string engine;
    bool certified = false; // exact engines: certified either way
    std::string reason;
    std::vector<NumericWitness> witnesses;
    std::optional<PuiseuxPoint> curve; // oracle witness x(t) = p + t y + ...
};

struct EngineConfig {
    std::vector<double> schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    long budget = 10000;
    uint64_t seed = 0;
    int max_corrections = 3;
    std::vector<Rational> extra_exponents; // appended to the derived candidate exponents
};

inline SemialgebraicSet translate_set(const SemialgebraicSet& X, const std::vector<Rational>& p) {
    std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
        if (f.kind == Formula::Kind::AtomNode)
            return Formula::make_atom(Atom{f.atom.poly.translate(p), f.atom.rel});
        Formula g = f;
        for (auto& c : g.children) c = go(c);
        return g;
    };
    return SemialgebraicSet{go(X.formula), X.ambient_dim, X.var_names};
}

// ---- numeric engine ---------------------------------------------------------

/// Equality tolerance relative to the magnitudes of the monomials at x. Used
/// by the cone engines instead of the absolute-floor formula: acceptance must
/// tighten as samples approach the basepoint, or every direction would look
/// supported at small scales.
inline double relative_eq_tolerance(const Polynomial& f, const std::vector<double>& x) {
    double s = 0;
    for (const auto& [m, c] : f.terms()) {
        double t = std::abs(to_double(c));
        for (int i = 0; i < (int)x.size(); ++i)
            for (uint32_t k = 0; k < m[i]; ++k) t *= std::abs(x[i]);
        s += t;
    }
    return 1e-9 * s;
}

inline bool atom_holds_cone(const Atom& a, const std::vector<double>& x) {
    double v = a.poly.eval_double(x);
    double tol = relative_eq_tolerance(a.poly, x);
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

inline bool eval_cone_grade(const Formula& f, const std::vector<double>& x) {
    switch (f.kind) {
        case Formula::Kind::AtomNode: return atom_holds_cone(f.atom, x);
        case Formula::Kind::And:
            for (const auto& c : f.children)
                if (!eval_cone_grade(c, x)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& c : f.children)
                if (eval_cone_grade(c, x)) return true;
            return false;
        case Formula::Kind::Not: return !eval_cone_grade(f.children[0], x);
    }
    throw std::logic_error("unreachable");
}

/// An atom that is a constant polynomial with a false sign condition makes its
/// conjunction empty; used to discard syntactically empty disjuncts (e.g. the
/// canonical empty set "1 = 0").
inline bool disjunct_syntactically_empty(const Formula& d) {
    bool empty = false;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        if (g.kind == Formula::Kind::AtomNode) {
            const Polynomial& f = g.atom.poly;
            if (f.is_zero()) {
                if (!relation_holds(g.atom.rel, 0)) empty = true;
            } else if (f.degree() == std::optional<long>(0L)) {
                if (!relation_holds(g.atom.rel, sign(f.terms().begin()->second))) empty = true;
            }
        } else if (g.kind == Formula::Kind::And) {
            for (const auto& c : g.children) walk(c);
        }
    };
    walk(d);
    return empty;
}

/// Accepted sample points of X near p, bucketed per epsilon; shared across
/// scan directions so unsupported cells stay cheap.
namespace detail_cone {

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(to_double(c));
    return out;
}

/// Random unit-ish vector (components in [-1,1]); callers only need coverage.
inline std::vector<double> jitter_vector(Rng& rng, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = rng.symmetric();
    return g;
}

struct Disjunct {
    Formula formula;
    std::vector<Polynomial> eqs;
    std::vector<std::vector<Polynomial>> grads; // per equality, cached for projection
    uint64_t stream_tag = 0;
};

inline std::vector<Disjunct> scan_disjuncts(const SemialgebraicSet& X) {
    std::vector<Disjunct> out;
    for (auto& d : top_disjuncts(X.formula)) {
        if (disjunct_syntactically_empty(d)) continue;
        Disjunct e;
        e.eqs = active_equalities(d);
        for (const auto& f : e.eqs) e.grads.push_back(f.gradient());
        e.stream_tag = fnv1a(print_formula(d, X.var_names));
        e.formula = std::move(d);
        out.push_back(std::move(e));
    }
    return out;
}

inline bool project_and_accept(const Disjunct& d, const std::vector<double>& p, double eps,
                               std::vector<double>& x) {
    if (!d.eqs.empty()) {
        // Newton projection whose convergence target is the relative tolerance
        // recomputed at the current iterate: the tolerance is much tighter at
        // the projected point than at the raw candidate (monomial magnitudes
        // shrink on the variety), so a target frozen at the start point would
        // accept residuals the acceptance test then rejects
        const int n = (int)x.size(), m = (int)d.eqs.size();
        Eigen::VectorXd F(m);
        Eigen::MatrixXd J(m, n);
        double prev = std::numeric_limits<double>::infinity();
        bool converged = false;
        for (int it = 0; it < 40 && !converged; ++it) {
            double res = 0, tol = 0;
            for (int i = 0; i < m; ++i) {
                F(i) = d.eqs[i].eval_double(x);
                res = std::max(res, std::abs(F(i)));
                tol = std::max(tol, relative_eq_tolerance(d.eqs[i], x));
            }
            if (res <= tol) {
                converged = true;
                break;
            }
            if (!(res < prev * 1.5)) return false; // diverging
            prev = std::min(prev, res);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < n; ++k) J(i, k) = d.grads[i][k].eval_double(x);
            Eigen::VectorXd step =
                J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).setThreshold(1e-12).solve(F);
            if (!step.allFinite()) return false;
            double damp = 1.0;
            for (int tries = 0;; ++tries) {
                std::vector<double> cand = x;
                for (int k = 0; k < n; ++k) cand[k] -= damp * step(k);
                double cres = 0;
                for (int i = 0; i < m; ++i)
                    cres = std::max(cres, std::abs(d.eqs[i].eval_double(cand)));
                if (cres < res) {
                    x = std::move(cand);
                    break;
                }
                damp *= 0.5;
                if (tries == 5) return false;
            }
        }
        if (!converged) return false;
    }
    double nd = 0;
    for (size_t i = 0; i < x.size(); ++i) nd += (x[i] - p[i]) * (x[i] - p[i]);
    nd = std::sqrt(nd);
    if (!(nd > 0) || nd >= eps) return false;
    return eval_cone_grade(d.formula, x);
}

} // namespace detail_cone

struct NumericPool {
    std::vector<double> schedule;
    std::vector<std::vector<std::vector<double>>> per_eps; // basepoint-at-origin coordinates
    std::vector<detail_cone::Disjunct> disjuncts; // of the translated set, shared across queries
    bool prepared = false;
};

/// Pool points are stored in coordinates translated so the basepoint is the
/// origin (tolerances must be relative to the sample scale, which only works
/// when the constant term of every defining polynomial vanishes at 0).
inline NumericPool build_numeric_pool(const SemialgebraicSet& X, const std::vector<Rational>& p,
                                      const EngineConfig& cfg) {
    using namespace detail_cone;
    NumericPool pool;
    pool.schedule = cfg.schedule;
    pool.per_eps.resize(cfg.schedule.size());
    SemialgebraicSet X0 = translate_set(X, p);
    std::vector<double> pd(X.ambient_dim, 0.0);
    const int n = X.ambient_dim;
    pool.disjuncts = scan_disjuncts(X0);
    pool.prepared = true;
    const auto& disjuncts = pool.disjuncts;
    if (disjuncts.empty()) return pool;

    long per = std::max<long>(200, cfg.budget / (long)(cfg.schedule.size() * disjuncts.size()));
    const size_t cap = 1200;
    for (size_t ei = 0; ei < cfg.schedule.size(); ++ei) {
        double eps = cfg.schedule[ei];
        for (const auto& d : disjuncts) {
            Rng rng(mix_seed(mix_seed(cfg.seed, d.stream_tag), 0xB00C + ei));
            for (long it = 0; it < per && pool.per_eps[ei].size() < cap; ++it) {
                std::vector<double> x(n);
                if (it % 2 == 0) {
                    // box rejection at scale eps
                    for (int i = 0; i < n; ++i) x[i] = pd[i] + eps * rng.symmetric();
                } else {
                    // log-uniform radial scale: cone membership needs samples
                    // at depths far below eps
                    double s = eps * std::pow(10.0, -18.0 * rng.uniform());
                    auto g = jitter_vector(rng, n);
                    for (int i = 0; i < n; ++i) x[i] = pd[i] + s * g[i];
                }
                if (project_and_accept(d, pd, eps, x)) pool.per_eps[ei].push_back(std::move(x));
            }
        }
    }
    return pool;
}

/// Witness search per the alternative cone definition: for every eps in the
/// schedule find x in X with ||x-p|| < eps and a > 0 with ||a(x-p) - y|| < eps.
/// Negative verdicts are budget-relative, never certificates.
inline ConeVerdict cone_membership_numeric(const ConeQuery& q, const EngineConfig& cfg,
                                           const NumericPool* shared = nullptr) {
    using namespace detail_cone;
    ConeVerdict v;
    v.engine = "numeric";
    const int n = q.X.ambient_dim;
    // work in coordinates with p at the origin so the relative equality
    // tolerance shrinks with the sample scale; a prepared shared pool already
    // carries the translated disjuncts (scans query thousands of directions)
    std::vector<double> p_abs = to_doubles(q.p);
    std::vector<double> pd(n, 0.0);
    std::vector<double> yd = to_doubles(q.y);
    double yn = norm2(yd);

    NumericPool local;
    const NumericPool* pool = shared;
    if (!pool || !pool->prepared) {
        EngineConfig pc = cfg;
        pc.budget = std::max<long>(cfg.budget, 4000);
        local = build_numeric_pool(q.X, q.p, pc);
        pool = &local;
    }
    const auto& disjuncts = pool->disjuncts;
    if (disjuncts.empty()) {
        v.status = ConeStatus::Unsupported;
        v.reason = "defining formula is syntactically empty";
        return v;
    }

    std::vector<double> yhat(n, 0.0);
    if (yn > 0)
        for (int i = 0; i < n; ++i) yhat[i] = yd[i] / yn;

    auto defect_of = [&](const std::vector<double>& x, double& a_out) -> double {
        std::vector<double> d(n);
        double dd = 0, dy = 0;
        for (int i = 0; i < n; ++i) {
            d[i] = x[i] - pd[i];
            dd += d[i] * d[i];
            dy += d[i] * yhat[i];
        }
        if (!(dd > 0)) return std::numeric_limits<double>::infinity();
        double a = dy / dd;
        if (yn == 0) a = 1e-3; // apex query: any shrinking scaling works
        if (a <= 0) return std::numeric_limits<double>::infinity();
        double def = 0;
        for (int i = 0; i < n; ++i) {
            double e = a * d[i] - yhat[i];
            def += e * e;
        }
        a_out = a;
        return std::sqrt(def);
    };

    bool any_point_seen = false;
    for (size_t ei = 0; ei < cfg.schedule.size(); ++ei) {
        double eps = cfg.schedule[ei];
        bool found = false;
        NumericWitness w;
        double best = std::numeric_limits<double>::infinity();
        if (ei < pool->per_eps.size()) {
            for (const auto& x : pool->per_eps[ei]) {
                any_point_seen = true;
                double a = 0;
                double def = defect_of(x, a);
                best = std::min(best, def);
                if (def < eps) {
                    w = NumericWitness{eps, a, def, 0.0, x};
                    found = true;
                    break;
                }
            }
        }
        // directed phase: only worth running when the pool shows the direction
        // is at least coarsely approached (gate keeps scans over thousands of
        // hopeless directions fast); always run when the pool is empty
        bool promising = best < 0.25 || !any_point_seen;
        if (!found && promising) {
            long per = std::max<long>(50, std::min<long>(600, cfg.budget / 16));
            for (const auto& d : disjuncts) {
                Rng rng(mix_seed(mix_seed(cfg.seed, d.stream_tag), 0xD1A + ei));
                for (long it = 0; it < per && !found; ++it) {
                    double s = eps * std::pow(10.0, -18.0 * rng.uniform());
                    double r = std::pow(10.0, -12.0 * rng.uniform());
                    auto g = jitter_vector(rng, n);
                    std::vector<double> x(n);
                    for (int i = 0; i < n; ++i) x[i] = pd[i] + s * (yhat[i] + r * g[i]);
                    if (!project_and_accept(d, pd, eps, x)) continue;
                    any_point_seen = true;
                    double a = 0;
                    double def = defect_of(x, a);
                    if (def < eps) {
                        w = NumericWitness{eps, a, def, 0.0, x};
                        found = true;
                    }
                }
                if (found) break;
            }
        }
        if (!found) {
            v.status = ConeStatus::Unsupported;
            v.reason = any_point_seen ? "no witness within budget at eps=" + std::to_string(eps)
                                      : "no points of X found near p";
            return v;
        }
        v.witnesses.push_back(std::move(w));
    }
    v.status = ConeStatus::Supported;
    for (auto& w : v.witnesses)
        for (int i = 0; i < n; ++i) w.x[i] += p_abs[i]; // report in original coordinates
    return v;
}

// ---- Puiseux curve oracle ---------------------------------------------------

namespace detail_cone {

/// All partial-derivative data of f along a curve: alpha > 0 multi-indices
/// with the Taylor coefficient polynomial evaluated on the curve.
struct CurveJet {
    std::vector<std::pair<Monomial, PuiseuxSeries>> terms; // (alpha, d_alpha(t))
};

inline void enumerate_multi_indices(const Polynomial& f, std::vector<Monomial>& out) {
    // bound per-variable orders by the degrees appearing in f
    int n = f.nvars();
    std::vector<uint32_t> maxdeg(n, 0);
    for (const auto& [m, c] : f.terms())
        for (int i = 0; i < n; ++i) maxdeg[i] = std::max(maxdeg[i], m[i]);
    Monomial cur(n, 0);
    long deg = f.degree().value_or(0);
    std::function<void(int, long)> rec = [&](int i, long total) {
        if (i == n) {
            if (total > 0) out.push_back(cur);
            return;
        }
        for (uint32_t k = 0; k <= maxdeg[i] && total + k <= deg; ++k) {
            cur[i] = k;
            rec(i + 1, total + k);
        }
        cur[i] = 0;
    };
    rec(0, 0);
}

inline Polynomial taylor_multi(const Polynomial& f, const Monomial& alpha) {
    Polynomial d = f;
    for (int i = 0; i < f.nvars(); ++i)
        for (uint32_t k = 0; k < alpha[i]; ++k) d = d.derivative(i);
    Rational fact = 1;
    for (int i = 0; i < f.nvars(); ++i)
        for (uint32_t k = 2; k <= alpha[i]; ++k) fact *= k;
    return Rational(1) / fact * d;
}

inline CurveJet curve_jet(const Polynomial& f, const PuiseuxPoint& curve) {
    CurveJet jet;
    std::vector<Monomial> idx;
    enumerate_multi_indices(f, idx);
    for (const auto& alpha : idx) {
        Polynomial d = taylor_multi(f, alpha);
        if (d.is_zero()) continue;
        PuiseuxSeries s = eval_poly(d, curve);
        jet.terms.push_back({alpha, std::move(s)});
    }
    return jet;
}

/// Leading-term obstruction at the bare curve t*y: the sign of f along every
/// curve t*y + (corrections with exponents > 1) equals the sign of f's leading
/// coefficient on t*y. Sound; may decline (returns 0 when not certified).
///
/// Case A: every alpha-contribution enters strictly above the leading exponent.
/// Case B: contributions that can reach the leading exponent all have even
/// multi-indices and the same sign as the leading coefficient, so nothing can
/// cancel for t > 0.
inline int certified_sign_along_corrections(const Polynomial& f, const PuiseuxPoint& bare) {
    PuiseuxSeries s = eval_poly(f, bare);
    if (s.no_visible_terms()) return 0; // vanishing leading data: nothing to certify
    Rational gamma = s.leading_exponent();
    int L = sign(s.leading_coefficient());
    CurveJet jet = curve_jet(f, bare);
    for (const auto& [alpha, d] : jet.terms) {
        if (d.no_visible_terms()) {
            if (d.trunc().finite) return 0; // should not happen on exact curves
            continue;                        // exactly zero coefficient
        }
        Rational m = d.leading_exponent() + (long)total_degree(alpha);
        if (m >= gamma) continue; // contribution valuation strictly above gamma
        bool all_even = true;
        for (uint32_t k : alpha)
            if (k % 2 != 0) all_even = false;
        if (!all_even) return 0;
        if (sign(d.leading_coefficient()) != L) return 0;
    }
    return L;
}

struct CorrectionSearch {
    const Formula* disjunct = nullptr;
    int max_corrections = 3;
    std::vector<Rational> extra_exponents;
    std::optional<PuiseuxPoint> found;

    bool verify(const SemialgebraicSet& part, const PuiseuxPoint& curve) {
        return eval_puiseux(part, curve) == Trool::True;
    }

    /// Newton-Puiseux step on a single equality along the current curve.
    /// prev_exp: the exponent of the last correction (new ones must be larger).
    void search(const SemialgebraicSet& part, const Polynomial& eq, PuiseuxPoint curve,
                int depth, const Rational& prev_exp) {
        if (found) return;
        PuiseuxSeries r = eval_poly(eq, curve);
        if (r.is_exact_zero()) {
            if (verify(part, curve)) found = curve;
            return;
        }
        if (depth >= max_corrections || r.no_visible_terms()) return;
        const Rational gamma = r.leading_exponent();
        const Rational L = r.leading_coefficient();
        const int n = curve.dim();

        // candidate correction exponents per coordinate, from the valuations
        // of the directional Taylor coefficients
        struct Cand { Rational e; int coord; };
        std::vector<Cand> cands;
        std::vector<std::vector<PuiseuxSeries>> dks(n); // dks[i][k-1]
        for (int i = 0; i < n; ++i) {
            long di = eq.degree_in(i);
            for (long k = 1; k <= di; ++k) {
                Polynomial tk = taylor_coefficient(eq, i, (unsigned)k);
                PuiseuxSeries dk = tk.is_zero() ? PuiseuxSeries::zero() : eval_poly(tk, curve);
                dks[i].push_back(dk);
                if (dk.no_visible_terms()) continue;
                Rational e = (gamma - dk.leading_exponent()) / k;
                if (e > 1 && e > prev_exp) cands.push_back({e, i});
            }
        }
        for (const Rational& e : extra_exponents)
            if (e > 1 && e > prev_exp)
                for (int i = 0; i < n; ++i) cands.push_back({e, i});
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.e != b.e) return a.e < b.e;
            return a.coord < b.coord;
        });
        cands.erase(std::unique(cands.begin(), cands.end(),
                                [](const Cand& a, const Cand& b) {
                                    return a.e == b.e && a.coord == b.coord;
                                }),
                    cands.end());

        for (const auto& cand : cands) {
            // leading-coefficient equation for a correction w * t^e in
            // coordinate `coord`: sum of lc(d_k) w^k over k hitting gamma,
            // plus the residual's leading coefficient
            UPoly pw{L};
            for (size_t k = 1; k <= dks[cand.coord].size(); ++k) {
                const PuiseuxSeries& dk = dks[cand.coord][k - 1];
                Rational c = 0;
                if (!dk.no_visible_terms() && dk.leading_exponent() + cand.e * (long)k == gamma)
                    c = dk.leading_coefficient();
                pw.push_back(c);
            }
            up_trim(pw);
            if (up_degree(pw) < 1) continue;
            std::vector<Rational> roots = rational_roots(pw);
            // prefer positive corrections so reported witnesses look like the
            // textbook branches
            std::sort(roots.begin(), roots.end(), [](const Rational& a, const Rational& b) {
                if ((a > 0) != (b > 0)) return a > 0;
                return rat_abs(a) < rat_abs(b);
            });
            for (const Rational& w : roots) {
                if (w == 0) continue;
                PuiseuxPoint next = curve;
                next.coords[cand.coord] =
                    ps_add(next.coords[cand.coord], PuiseuxSeries::term(w, cand.e));
                search(part, eq, std::move(next), depth + 1, cand.e);
                if (found) return;
            }
        }
    }
};

} // namespace detail_cone

/// Exact curve oracle: supported verdicts carry a witness curve
/// x(t) = p + t y + corrections that lies in X identically; unsupported
/// verdicts are certified by a leading-term obstruction valid for every
/// correction with exponents > 1. This is the only engine whose negatives are
/// proofs.
inline ConeVerdict cone_membership_puiseux(const ConeQuery& q, const EngineConfig& cfg = {}) {
    using namespace detail_cone;
    ConeVerdict v;
    v.engine = "puiseux";
    SemialgebraicSet X0 = translate_set(q.X, q.p);
    const int n = X0.ambient_dim;

    bool y_zero = true;
    for (const auto& c : q.y)
        if (c != 0) y_zero = false;
    if (y_zero) {
        std::vector<Rational> zero(n, Rational(0));
        if (eval_real(X0, zero)) {
            v.status = ConeStatus::Supported;
            v.certified = true;
            v.reason = "apex: p lies in X";
        } else {
            v.status = ConeStatus::Indeterminate;
            v.reason = "apex membership depends on closure; not decided by this engine";
        }
        return v;
    }

    PuiseuxPoint bare;
    for (int i = 0; i < n; ++i) bare.coords.push_back(PuiseuxSeries::term(q.y[i], 1));

    auto disjuncts = top_disjuncts(X0.formula);
    bool all_certified_empty = true;
    bool any_nonempty = false;
    for (const auto& d : disjuncts) {
        if (disjunct_syntactically_empty(d)) continue;
        any_nonempty = true;
        SemialgebraicSet part{d, n, X0.var_names};

        // 1) bare curve may already work
        if (eval_puiseux(part, bare) == Trool::True) {
            v.status = ConeStatus::Supported;
            v.certified = true;
            v.curve = bare;
            break;
        }

        // 2) correction search on the (single) violated equality
        std::vector<Polynomial> eqs = active_equalities(d);
        std::vector<const Polynomial*> violated;
        for (const auto& f : eqs)
            if (!eval_poly(f, bare).is_exact_zero()) violated.push_back(&f);
        if (violated.size() == 1) {
            CorrectionSearch cs;
            cs.max_corrections = cfg.max_corrections;
            cs.extra_exponents = cfg.extra_exponents;
            cs.search(part, *violated[0], bare, 0, Rational(1));
            if (cs.found) {
                v.status = ConeStatus::Supported;
                v.certified = true;
                v.curve = *cs.found;
                break;
            }
        }

        // 3) certified obstruction: some atom of the conjunct is violated
        // along every admissible curve
        bool disjunct_refuted = false;
        std::vector<Atom> atoms;
        std::function<void(const Formula&)> collect = [&](const Formula& g) {
            if (g.kind == Formula::Kind::AtomNode) atoms.push_back(g.atom);
            else if (g.kind == Formula::Kind::And)
                for (const auto& c : g.children) collect(c);
            // nested Or: not unconditionally required, cannot refute through it
        };
        collect(d);
        for (const auto& a : atoms) {
            if (a.poly.is_zero()) continue;
            int s = certified_sign_along_corrections(a.poly, bare);
            if (s != 0 && !relation_holds(a.rel, s)) {
                disjunct_refuted = true;
                break;
            }
        }
        if (!disjunct_refuted) all_certified_empty = false;
    }

    if (v.status == ConeStatus::Supported) {
        // report the witness in original coordinates
        PuiseuxPoint w = *v.curve;
        for (int i = 0; i < n; ++i)
            w.coords[i] = ps_add(PuiseuxSeries::constant(q.p[i]), w.coords[i]);
        v.curve = w;
        v.reason = "witness curve lies in X identically";
        return v;
    }
    if (!any_nonempty) {
        v.status = ConeStatus::Unsupported;
        v.certified = true;
        v.reason = "defining formula is syntactically empty";
        return v;
    }
    if (all_certified_empty) {
        v.status = ConeStatus::Unsupported;
        v.certified = true;
        v.reason = "leading-term obstruction holds for every correction with exponents > 1";
        return v;
    }
    v.status = ConeStatus::Indeterminate;
    v.reason = "curve search exhausted without a certificate";
    return v;
}

// ---- initial form over-approximation ----------------------------------------

/// Zero set of the lowest-degree homogeneous part; contains the cone of V(f)
/// at p but may be strictly larger (containment only).
inline SemialgebraicSet initial_form_cone(const Polynomial& f, const std::vector<Rational>& p) {
    if (f.is_zero()) throw std::domain_error("initial form cone of the zero polynomial");
    Polynomial g = f.translate(p);
    if (g.is_zero()) throw std::domain_error("translated polynomial vanished");
    if (g.eval(std::vector<Rational>(f.nvars(), Rational(0))) != 0)
        throw std::domain_error("basepoint is not on the hypersurface");
    SemialgebraicSet X;
    X.ambient_dim = f.nvars();
    X.formula = Formula::make_atom(Atom{g.initial_form(), Relation::Eq});
    for (int i = 0; i < f.nvars(); ++i) X.var_names.push_back("x" + std::to_string(i + 1));
    return X;
}

// ---- deformation slice ------------------------------------------------------

/// Membership of (y, 0) in closure(D(X)) with D(X) = {(x, r) : r x in X},
/// translated so p = 0. Numeric-confidence verdicts only.
inline ConeVerdict deformation_slice_check(const ConeQuery& q, const EngineConfig& cfg) {
    using namespace detail_cone;
    ConeVerdict v;
    v.engine = "deformation";
    SemialgebraicSet X0 = translate_set(q.X, q.p);
    const int n = X0.ambient_dim;
    std::vector<double> yd = to_doubles(q.y);
    auto disjuncts = scan_disjuncts(X0);
    if (disjuncts.empty()) {
        v.status = ConeStatus::Unsupported;
        v.reason = "defining formula is syntactically empty";
        return v;
    }
    std::vector<double> zero(n, 0.0);
    for (size_t ei = 0; ei < cfg.schedule.size(); ++ei) {
        double eps = cfg.schedule[ei];
        bool found = false;
        long per = std::max<long>(100, cfg.budget / (long)(4 * disjuncts.size()));
        for (const auto& d : disjuncts) {
            Rng rng(mix_seed(mix_seed(cfg.seed, d.stream_tag), 0xDEF0 + ei));
            for (long it = 0; it < per && !found; ++it) {
                double r = eps * std::pow(10.0, -12.0 * rng.uniform());
                double u = eps * rng.uniform();
                auto g = jitter_vector(rng, n);
                std::vector<double> x(n);
                for (int i = 0; i < n; ++i) x[i] = yd[i] + u * g[i];
                std::vector<double> z(n);
                for (int i = 0; i < n; ++i) z[i] = r * x[i];
                if (!d.eqs.empty()) {
                    double tol = 0;
                    for (const auto& f : d.eqs) tol = std::max(tol, relative_eq_tolerance(f, z));
                    if (!newton_project(d.eqs, z, std::max(tol * 0.5, 1e-300))) continue;
                    for (int i = 0; i < n; ++i) x[i] = z[i] / r;
                    double dist = 0;
                    for (int i = 0; i < n; ++i) dist += (x[i] - yd[i]) * (x[i] - yd[i]);
                    if (std::sqrt(dist) >= eps) continue;
                }
                if (!eval_cone_grade(d.formula, z)) continue;
                NumericWitness w;
                w.eps = eps;
                w.r = r;
                w.x = x;
                v.witnesses.push_back(std::move(w));
                found = true;
            }
            if (found) break;
        }
        if (!found) {
            v.status = ConeStatus::Unsupported;
            v.reason = "no deformation witness within budget at eps=" + std::to_string(eps);
            return v;
        }
    }
    v.status = ConeStatus::Supported;
    return v;
}

// ---- exact plane-curve cone -------------------------------------------------

struct PlaneRay {
    bool vertical = false; // direction (0, 1); otherwise (1, slope)
    AlgebraicReal slope;
    bool plus = false;  // ray with positive major coordinate
    bool minus = false;
    bool indeterminate_side = false;
};

struct RaySet {
    std::vector<PlaneRay> rays; // only rays with at least one side present
    int dropped_indeterminate = 0;
};

namespace detail_cone {

/// Substitute x_major = s into g, producing a univariate polynomial in the
/// other variable.
inline UPoly substitute_major(const Polynomial& g, int major, const Rational& s) {
    int minor = 1 - major;
    UPoly out((size_t)g.degree_in(minor) + 1, Rational(0));
    for (const auto& [m, c] : g.terms()) out[m[minor]] += c * rat_pow(s, m[major]);
    up_trim(out);
    return out;
}

/// Newton-polygon slope candidates for branches minor ~ c * major^e with
/// e >= 1 (pass as written) resp. e > 1 (swapped pass). Returns the slopes of
/// tangent candidates: for e == 1 the nonzero real roots of the edge
/// polynomial; a flag for the axis direction when an e > 1 edge or an exact
/// axis factor exists.
struct PassResult {
    std::vector<AlgebraicReal> unit_slopes; // e == 1 candidates (c != 0)
    bool axis_candidate = false;            // tangent along the major axis
};

inline PassResult newton_pass(const Polynomial& g, int major) {
    int minor = 1 - major;
    PassResult res;
    std::vector<std::pair<long, long>> pts; // (i, j) = (major exp, minor exp)
    uint32_t min_j = UINT32_MAX;
    for (const auto& [m, c] : g.terms()) {
        pts.push_back({(long)m[major], (long)m[minor]});
        min_j = std::min(min_j, m[minor]);
    }
    if (min_j > 0) res.axis_candidate = true; // minor variable divides g: the major axis is a branch

    // candidate edge inverse-slopes e = (i2-i1)/(j1-j2)
    std::set<Rational> es;
    for (size_t a = 0; a < pts.size(); ++a)
        for (size_t b = 0; b < pts.size(); ++b) {
            if (pts[a].second <= pts[b].second) continue;
            Rational e = Rational(pts[b].first - pts[a].first, pts[a].second - pts[b].second);
            if (e >= 1) es.insert(e);
        }
    for (const Rational& e : es) {
        // points minimizing i + e*j
        Rational mu;
        bool first = true;
        for (const auto& [i, j] : pts) {
            Rational w = Rational(i) + e * j;
            if (first || w < mu) {
                mu = w;
                first = false;
            }
        }
        std::vector<std::pair<long, Rational>> edge; // (j, coeff)
        long jmin = LONG_MAX, jmax = LONG_MIN;
        for (const auto& [m, c] : g.terms()) {
            Rational w = Rational((long)m[major]) + e * (long)m[minor];
            if (w == mu) {
                edge.push_back({(long)m[minor], c});
                jmin = std::min(jmin, (long)m[minor]);
                jmax = std::max(jmax, (long)m[minor]);
            }
        }
        if (jmax <= jmin) continue; // vertex, not an edge
        UPoly phi((size_t)(jmax - jmin) + 1, Rational(0));
        for (const auto& [j, c] : edge) phi[(size_t)(j - jmin)] += c;
        up_trim(phi);
        auto roots = isolate_real_roots(phi);
        bool has_nonzero_real_root = false;
        for (auto& r : roots)
            if (!(r.is_rational && r.value == 0)) has_nonzero_real_root = true;
        if (e > 1) {
            if (has_nonzero_real_root) res.axis_candidate = true;
        } else { // e == 1: genuine slopes
            for (auto& r : roots) {
                if (r.is_rational && r.value == 0) continue;
                res.unit_slopes.push_back(std::move(r));
            }
        }
    }
    return res;
}

} // namespace detail_cone

/// Exact tangent cone of the plane curve V(f) at p, as a finite ray set.
/// Directions come from the Newton polygon; ray sides are certified by exact
/// Sturm root counting in shrinking windows, cross-checked numerically.
inline RaySet plane_curve_cone(const Polynomial& f, const std::vector<Rational>& p) {
    using namespace detail_cone;
    if (f.nvars() != 2) throw std::invalid_argument("plane_curve_cone needs a bivariate polynomial");
    if (f.is_zero()) throw std::domain_error("zero polynomial");
    Polynomial g = f.translate(p);
    if (g.is_zero()) throw std::domain_error("translated polynomial vanished");
    if (g.eval({Rational(0), Rational(0)}) != 0)
        throw std::domain_error("basepoint is not on the curve");

    PassResult px = newton_pass(g, 0); // branches y ~ c x^e
    PassResult py = newton_pass(g, 1); // branches x ~ c y^e (vertical tangents)

    struct Candidate {
        bool vertical;
        AlgebraicReal slope; // 0 for axis candidates
    };
    std::vector<Candidate> cands;
    if (px.axis_candidate) cands.push_back({false, AlgebraicReal::from_rational(0)});
    for (auto& s : px.unit_slopes) {
        bool dup = false;
        for (auto& c : cands)
            if (!c.vertical && c.slope == s) dup = true;
        if (!dup) cands.push_back({false, std::move(s)});
    }
    if (py.axis_candidate) cands.push_back({true, AlgebraicReal::from_rational(0)});
    // e == 1 slopes of the swapped pass are reciprocals of pass-1 slopes;
    // nothing new to add

    // separation width between candidate slope values (and from 0)
    double theta = 1.0;
    std::vector<double> approx;
    for (auto& c : cands)
        if (!c.vertical) approx.push_back(c.slope.approx());
    for (size_t i = 0; i < approx.size(); ++i) {
        for (size_t j = i + 1; j < approx.size(); ++j)
            theta = std::min(theta, std::abs(approx[i] - approx[j]) / 4.0);
        if (approx[i] != 0.0) theta = std::min(theta, std::abs(approx[i]) / 4.0);
    }
    if (!(theta > 0)) theta = 1e-6;
    Rational th(std::max<long>(1, (long)(theta * 1048576.0)), 1048576);

    RaySet out;
    const int levels = 12;
    for (auto& cand : cands) {
        int major = cand.vertical ? 1 : 0;
        cand.slope.refine_below(th / 4096);
        PlaneRay ray;
        ray.vertical = cand.vertical;
        ray.slope = cand.slope;
        for (int side = 0; side < 2; ++side) {
            int sigma = side == 0 ? 1 : -1;
            int present = 0, absent = 0;
            for (int k = 8; k < 8 + levels; ++k) {
                Rational s = Rational(sigma) / rat_pow(Rational(2), k);
                UPoly slice = substitute_major(g, major, s);
                if (up_degree(slice) < 0) continue; // identically zero slice: curve contains the line
                // window around slope * s of half-width |s| * theta
                Rational lo_c = cand.slope.is_rational ? cand.slope.value : cand.slope.lo;
                Rational hi_c = cand.slope.is_rational ? cand.slope.value : cand.slope.hi;
                Rational c1 = lo_c * s, c2 = hi_c * s;
                Rational wlo = rat_min(c1, c2) - rat_abs(s) * th;
                Rational whi = rat_max(c1, c2) + rat_abs(s) * th;
                int cnt = count_real_roots_in(slice, wlo, whi);
                if (cnt > 0) ++present;
                else ++absent;
            }
            bool has = present == levels;
            bool not_has = absent == levels;
            if (has) (sigma > 0 ? ray.plus : ray.minus) = true;
            else if (!not_has) ray.indeterminate_side = true;
        }
        if (ray.plus || ray.minus) out.rays.push_back(std::move(ray));
        else if (ray.indeterminate_side) ++out.dropped_indeterminate;
    }
    // deterministic order: non-vertical by slope, vertical last
    std::sort(out.rays.begin(), out.rays.end(), [](PlaneRay& a, PlaneRay& b) {
        if (a.vertical != b.vertical) return !a.vertical;
        if (a.vertical) return false;
        return a.slope.approx() < b.slope.approx();
    });
    return out;
}

/// Does the ray set contain the ray through rational direction y?
inline ConeStatus rayset_contains(RaySet& rs, const std::vector<Rational>& y) {
    if (y.size() != 2) throw std::invalid_argument("ray set queries are 2-dimensional");
    if (y[0] == 0 && y[1] == 0) return ConeStatus::Supported; // apex
    for (auto& r : rs.rays) {
        bool match;
        bool plus_side;
        if (y[0] == 0) {
            match = r.vertical;
            plus_side = y[1] > 0;
        } else {
            if (r.vertical) continue;
            AlgebraicReal q = AlgebraicReal::from_rational(y[1] / y[0]);
            match = (r.slope == q);
            plus_side = y[0] > 0;
        }
        if (!match) continue;
        if (plus_side ? r.plus : r.minus) return ConeStatus::Supported;
        if (r.indeterminate_side) return ConeStatus::Indeterminate;
        return ConeStatus::Unsupported;
    }
    return ConeStatus::Unsupported;
}

// ---- grid scan --------------------------------------------------------------

/// Integer lattice points on the boundary of the cube [-res, res]^n, one per
/// exact ray (primitive vector, sign preserved).
inline std::vector<std::vector<Rational>> grid_directions(int n, int res) {
    if (res < 1) throw std::invalid_argument("grid resolution must be >= 1");
    std::set<std::vector<Rational>> dirs;
    std::vector<long> cur(n, -res);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            long mx = 0;
            for (long c : cur) mx = std::max(mx, std::labs(c));
            if (mx != res) return;
            Integer g = 0;
            for (long c : cur) g = boost::multiprecision::gcd(g, Integer(std::labs(c)));
            std::vector<Rational> d;
            for (long c : cur) d.push_back(Rational(Integer(c), g));
            dirs.insert(std::move(d));
            return;
        }
        for (long c = -res; c <= res; ++c) {
            cur[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return std::vector<std::vector<Rational>>(dirs.begin(), dirs.end());
}

struct ScanCell {
    std::vector<Rational> y;
    std::map<std::string, ConeVerdict> verdicts;
    ConeStatus consensus = ConeStatus::Indeterminate;
    bool conflict = false;
};

struct ScanResult {
    std::vector<ScanCell> cells;
    int supported = 0;
    int conflicts = 0;
    int indeterminate = 0;
};

inline std::vector<std::string> default_engines() { return {"numeric", "puiseux"}; }

/// Run the selected engines on every grid direction. A conflict is one engine
/// supported while another is certified-unsupported.
inline ScanResult cone_scan(const SemialgebraicSet& X, const std::vector<Rational>& p, int resolution,
                            const std::vector<std::string>& engines, const EngineConfig& cfg) {
    ScanResult res;
    auto dirs = grid_directions(X.ambient_dim, resolution);

    bool use_numeric = false, use_puiseux = false, use_plane = false, use_initial = false,
         use_deformation = false;
    for (const auto& e : engines) {
        if (e == "numeric") use_numeric = true;
        else if (e == "puiseux") use_puiseux = true;
        else if (e == "plane-curve") use_plane = true;
        else if (e == "initial-form") use_initial = true;
        else if (e == "deformation") use_deformation = true;
        else throw std::invalid_argument("unknown engine: " + e);
    }

    NumericPool pool;
    if (use_numeric) pool = build_numeric_pool(X, p, cfg);

    // exact engines that need the defining polynomial of a hypersurface
    const Polynomial* hypersurface = nullptr;
    if (X.formula.kind == Formula::Kind::AtomNode && X.formula.atom.rel == Relation::Eq &&
        !X.formula.atom.poly.is_zero())
        hypersurface = &X.formula.atom.poly;
    std::optional<RaySet> rays;
    if (use_plane && hypersurface && X.ambient_dim == 2) rays = plane_curve_cone(*hypersurface, p);
    std::optional<Polynomial> initial;
    if (use_initial && hypersurface) {
        Polynomial g = hypersurface->translate(p);
        if (!g.is_zero()) initial = g.initial_form();
    }

    for (const auto& y : dirs) {
        ScanCell cell;
        cell.y = y;
        ConeQuery q{X, p, y};
        if (use_puiseux) cell.verdicts["puiseux"] = cone_membership_puiseux(q, cfg);
        if (use_numeric) cell.verdicts["numeric"] = cone_membership_numeric(q, cfg, &pool);
        if (use_deformation) cell.verdicts["deformation"] = deformation_slice_check(q, cfg);
        if (rays) {
            ConeVerdict v;
            v.engine = "plane-curve";
            v.status = rayset_contains(*rays, y);
            v.certified = v.status != ConeStatus::Indeterminate;
            cell.verdicts["plane-curve"] = v;
        }
        if (initial) {
            ConeVerdict v;
            v.engine = "initial-form";
            v.status = initial->eval(y) == 0 ? ConeStatus::Supported : ConeStatus::Unsupported;
            v.certified = true;
            v.reason = "over-approximation: zero set of the initial form";
            cell.verdicts["initial-form"] = v;
        }

        bool any_supported = false, any_cert_unsupported = false, any_indet = false;
        for (const auto& [name, verdict] : cell.verdicts) {
            if (name == "initial-form") continue; // containment only, never a consensus voter
            if (verdict.status == ConeStatus::Supported) any_supported = true;
            if (verdict.status == ConeStatus::Unsupported && verdict.certified)
                any_cert_unsupported = true;
            if (verdict.status == ConeStatus::Indeterminate) any_indet = true;
        }
        cell.conflict = any_supported && any_cert_unsupported;
        if (cell.conflict) cell.consensus = ConeStatus::Indeterminate;
        else if (any_supported) cell.consensus = ConeStatus::Supported;
        else if (any_indet) cell.consensus = ConeStatus::Indeterminate;
        else cell.consensus = ConeStatus::Unsupported;

        if (cell.conflict) ++res.conflicts;
        if (cell.consensus == ConeStatus::Supported) ++res.supported;
        if (cell.consensus == ConeStatus::Indeterminate) ++res.indeterminate;
        res.cells.push_back(std::move(cell));
    }
    return res;
}

} // namespace tancone

#endif
