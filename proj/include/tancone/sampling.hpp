#ifndef TANCONE_SAMPLING_HPP
#define TANCONE_SAMPLING_HPP

#include "tancone/parser.hpp"
#include "tancone/semialg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace tancone {

// ---- deterministic random streams ------------------------------------------
// splitmix64: identical output on every platform, unlike the distributions in
// <random>, which matters for byte-identical reports.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// uniform in [0, 1)
    double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }
    /// uniform in [-1, 1)
    double symmetric() { return 2.0 * uniform() - 1.0; }
};

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    Rng r(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    return r.next();
}

// ---- formula plumbing -------------------------------------------------------

/// Top-level disjuncts of the NNF formula; a point is in X iff it is in some
/// disjunct, and each disjunct carries its own equational constraints for
/// Newton projection.
inline std::vector<Formula> top_disjuncts(const Formula& f) {
    Formula nnf = normalize_nnf(f);
    if (nnf.kind != Formula::Kind::Or) return {nnf};
    std::vector<Formula> out;
    std::function<void(const Formula&)> flatten = [&](const Formula& g) {
        if (g.kind == Formula::Kind::Or) {
            for (const auto& c : g.children) flatten(c);
        } else {
            out.push_back(g);
        }
    };
    flatten(nnf);
    return out;
}

/// Equality atoms reachable through top-level conjunctions of an NNF disjunct
/// (nested disjunctions are not descended into: their equalities are not
/// unconditionally active).
inline std::vector<Polynomial> active_equalities(const Formula& f) {
    std::vector<Polynomial> eqs;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        if (g.kind == Formula::Kind::AtomNode) {
            if (g.atom.rel == Relation::Eq && !g.atom.poly.is_zero()) eqs.push_back(g.atom.poly);
        } else if (g.kind == Formula::Kind::And) {
            for (const auto& c : g.children) walk(c);
        }
    };
    walk(f);
    return eqs;
}

// ---- Newton projection ------------------------------------------------------

/// Project x onto the common zero set of eqs by damped Gauss-Newton steps.
/// Returns false when the iteration fails to reduce the residual to the
/// requested tolerance.
inline bool newton_project(const std::vector<Polynomial>& eqs, std::vector<double>& x,
                           double target_residual, int max_iters = 30) {
    if (eqs.empty()) return true;
    const int n = (int)x.size();
    const int m = (int)eqs.size();
    std::vector<std::vector<Polynomial>> grads;
    grads.reserve(m);
    for (const auto& f : eqs) grads.push_back(f.gradient());

    Eigen::VectorXd F(m);
    Eigen::MatrixXd J(m, n);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iters; ++it) {
        double res = 0;
        for (int i = 0; i < m; ++i) {
            F(i) = eqs[i].eval_double(x);
            res = std::max(res, std::abs(F(i)));
        }
        if (res <= target_residual) return true;
        if (!(res < prev * 1.5)) return false; // diverging
        prev = std::min(prev, res);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < n; ++k) J(i, k) = grads[i][k].eval_double(x);
        Eigen::VectorXd step =
            J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).setThreshold(1e-12).solve(F);
        if (!step.allFinite()) return false;
        double damp = 1.0;
        for (int tries = 0; tries < 6; ++tries) {
            std::vector<double> cand = x;
            for (int k = 0; k < n; ++k) cand[k] -= damp * step(k);
            double cres = 0;
            for (int i = 0; i < m; ++i) cres = std::max(cres, std::abs(eqs[i].eval_double(cand)));
            if (cres < res || cres <= target_residual) {
                x = cand;
                break;
            }
            damp *= 0.5;
            if (tries == 5) return false;
        }
    }
    double res = 0;
    for (int i = 0; i < m; ++i) res = std::max(res, std::abs(eqs[i].eval_double(x)));
    return res <= target_residual;
}

// ---- sample_near ------------------------------------------------------------

struct SampleResult {
    std::vector<std::vector<double>> points;
    bool starved = false;
};

inline double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

/// Up to `count` points of X within radius of p, deterministic per seed.
/// Rejection in the box, with Newton projection onto each disjunct's equality
/// constraints. The starved flag is set when the acceptance rate collapses.
inline SampleResult sample_near(const SemialgebraicSet& X, const std::vector<double>& p,
                                double radius, int count, uint64_t seed) {
    SampleResult out;
    if ((int)p.size() != X.ambient_dim) throw std::invalid_argument("point dimension mismatch");
    const int n = X.ambient_dim;
    std::vector<Formula> disjuncts = top_disjuncts(X.formula);

    long budget_per_disjunct = std::max<long>(64, 4096 / (long)disjuncts.size());
    // bucket per disjunct, then interleave: components early in the formula
    // must not crowd out the rest of the sample
    std::vector<std::vector<std::vector<double>>> buckets(disjuncts.size());
    for (size_t di = 0; di < disjuncts.size(); ++di) {
        const Formula& d = disjuncts[di];
        SemialgebraicSet part{d, n, X.var_names};
        std::vector<Polynomial> eqs = active_equalities(d);
        Rng rng(mix_seed(seed, fnv1a(print_formula(d, X.var_names))));
        for (long it = 0; it < budget_per_disjunct && (int)buckets[di].size() < count; ++it) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = p[i] + radius * rng.symmetric();
            if (!eqs.empty()) {
                double tol = 0;
                for (const auto& f : eqs) tol = std::max(tol, float_eq_tolerance(f, x));
                if (!newton_project(eqs, x, tol * 0.5)) continue;
            }
            std::vector<double> diff(n);
            for (int i = 0; i < n; ++i) diff[i] = x[i] - p[i];
            if (norm2(diff) >= radius) continue;
            if (!eval_real(part, x)) continue;
            buckets[di].push_back(std::move(x));
        }
    }
    for (size_t round = 0; (int)out.points.size() < count; ++round) {
        bool any = false;
        for (auto& b : buckets) {
            if (round < b.size() && (int)out.points.size() < count) {
                out.points.push_back(b[round]);
                any = true;
            }
        }
        if (!any) break;
    }
    out.starved = (int)out.points.size() < count &&
                  (double)out.points.size() < 0.01 * (double)(budget_per_disjunct * (long)disjuncts.size());
    return out;
}

// ---- local dimension --------------------------------------------------------

struct DimensionEstimate {
    int dim = -1; // -1: unknown
    std::string confidence; // "smooth-model" | "heuristic" | "unknown"
};

/// Numerical rank of the Jacobian of eqs at x with a scale-aware threshold.
inline int jacobian_rank(const std::vector<Polynomial>& eqs, const std::vector<double>& x) {
    if (eqs.empty()) return 0;
    const int n = (int)x.size();
    Eigen::MatrixXd J((int)eqs.size(), n);
    for (int i = 0; i < (int)eqs.size(); ++i) {
        auto g = eqs[i].gradient();
        for (int k = 0; k < n; ++k) J(i, k) = g[k].eval_double(x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double thresh = std::max(1e-8, 1e-6 * smax);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thresh) ++r;
    return r;
}

/// Estimate of dim X near p: for equational disjuncts, n minus the Jacobian
/// rank at accepted samples; maximum over samples and disjuncts.
inline DimensionEstimate local_dimension_estimate(const SemialgebraicSet& X,
                                                  const std::vector<double>& p, uint64_t seed) {
    const int n = X.ambient_dim;
    DimensionEstimate est;
    est.confidence = "unknown";

    // the basepoint itself may be an isolated point of X
    bool p_in = eval_real(X, p);

    int best = -1;
    bool all_smooth = true;
    for (double radius : {0.25, 0.05, 0.01}) {
        SampleResult s = sample_near(X, p, radius, 40, mix_seed(seed, (uint64_t)(radius * 1e6)));
        if (s.points.empty()) continue;
        std::vector<Formula> disjuncts = top_disjuncts(X.formula);
        for (const auto& x : s.points) {
            // attribute the sample to the first disjunct containing it
            for (const auto& d : disjuncts) {
                SemialgebraicSet part{d, n, X.var_names};
                if (!eval_real(part, x)) continue;
                std::vector<Polynomial> eqs = active_equalities(d);
                int r = jacobian_rank(eqs, x);
                if (!eqs.empty() && r == 0) {
                    all_smooth = false; // singular sample, skip
                } else {
                    best = std::max(best, n - r);
                }
                break;
            }
        }
    }
    if (best < 0) {
        if (p_in) {
            // no nearby samples besides p: isolated point
            est.dim = 0;
            est.confidence = "heuristic";
        }
        return est;
    }
    est.dim = best;
    est.confidence = all_smooth ? "smooth-model" : "heuristic";
    return est;
}

} // namespace tancone

#endif
