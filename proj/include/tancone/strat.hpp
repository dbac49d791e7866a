#ifndef TANCONE_STRAT_HPP
#define TANCONE_STRAT_HPP

#include "tancone/cone.hpp"

#include <Eigen/Dense>

#include <memory>

namespace tancone {

// ---- stratifications ----------------------------------------------------------

/// Ordered strata S_0..S_n; the index doubles as the declared dimension bound
/// dim(S_{<=d}) <= d.
struct Stratification {
    std::vector<SemialgebraicSet> strata;
    int ambient_dim = 0;

    /// union of the strata with index <= d
    SemialgebraicSet prefix(int d) const {
        if (d < 0 || d >= (int)strata.size()) throw std::out_of_range("stratum index");
        std::vector<Formula> parts;
        for (int i = 0; i <= d; ++i) parts.push_back(strata[i].formula);
        SemialgebraicSet out;
        out.ambient_dim = ambient_dim;
        out.var_names = strata.empty() ? std::vector<std::string>{} : strata[0].var_names;
        out.formula = parts.size() == 1 ? parts[0] : Formula::make_or(parts);
        return out;
    }
};

// ---- dimension bookkeeping ------------------------------------------------------

/// Global dimension estimate of a set: the max of local estimates at sampled
/// points (plus the origin-shifted basepoint when it lies in the set).
/// Returns -1 for "no points found" (empty as far as sampling can tell).
inline int set_dimension_estimate(const SemialgebraicSet& X, const std::vector<Rational>& around,
                                  uint64_t seed, bool* known = nullptr) {
    std::vector<double> c;
    for (const auto& q : around) c.push_back(to_double(q));
    if (known) *known = true;
    int best = -1;
    if (eval_real(X, around)) {
        auto d = local_dimension_estimate(X, c, seed);
        best = std::max(best, d.dim);
    }
    auto s = sample_near(X, c, 2.0, 24, mix_seed(seed, 0x51ED));
    int used = 0;
    for (const auto& pt : s.points) {
        if (used >= 6) break;
        auto d = local_dimension_estimate(X, pt, mix_seed(seed, used));
        if (d.dim >= 0) {
            best = std::max(best, d.dim);
            ++used;
        }
    }
    if (best < 0 && !s.points.empty() && known) *known = false; // points found, estimates starved
    return best;
}

struct DimensionReport {
    struct Entry {
        int d = 0;
        int prefix_dim = -1;  // estimated dim(S_{<=d}); -1 = no points found
        int stratum_dim = -1; // estimated dim(S_d)
        bool known = true;
        bool bound_holds = true;     // prefix_dim <= d
        bool index_mismatch = false; // S_d nonempty but dim(S_d) < d
    };
    std::vector<Entry> entries;
    bool all_bounds_hold = true;
};

inline DimensionReport dimension_condition_check(const Stratification& S,
                                                 const std::vector<Rational>& around,
                                                 uint64_t seed) {
    DimensionReport rep;
    for (int d = 0; d < (int)S.strata.size(); ++d) {
        DimensionReport::Entry e;
        e.d = d;
        bool known = true;
        e.prefix_dim = set_dimension_estimate(S.prefix(d), around, mix_seed(seed, 2 * d), &known);
        e.stratum_dim =
            set_dimension_estimate(S.strata[d], around, mix_seed(seed, 2 * d + 1), &known);
        e.known = known;
        e.bound_holds = e.prefix_dim <= d;
        e.index_mismatch = e.stratum_dim >= 0 && e.stratum_dim < d;
        if (!e.bound_holds) rep.all_bounds_hold = false;
        rep.entries.push_back(e);
    }
    return rep;
}

// ---- induced cone strata --------------------------------------------------------

/// The cone strata at p: a direction belongs to stratum i when i is the first
/// index with the direction in the cone of the prefix S_{<=i} (set-difference
/// definition; prefixes are monotone so "first supported" is exact).
struct InducedScan;

struct InducedConeStrata {
    Stratification S;
    std::vector<Rational> p;
    EngineConfig cfg;
    std::vector<SemialgebraicSet> prefixes; // built once (classify runs per grid cell)
    mutable std::map<int, std::shared_ptr<const InducedScan>> scan_cache;

    static constexpr int kIndeterminate = -2;
    static constexpr int kNone = -1;

    void build_prefixes() {
        prefixes.clear();
        for (int i = 0; i < (int)S.strata.size(); ++i) prefixes.push_back(S.prefix(i));
    }

    /// index of the stratum whose cone contains direction y; exact engine
    /// first, numeric fallback only when the oracle declines
    int classify(const std::vector<Rational>& y) const {
        for (int i = 0; i < (int)S.strata.size(); ++i) {
            ConeQuery q{prefixes[i], p, y};
            ConeVerdict v = cone_membership_puiseux(q, cfg);
            if (v.status == ConeStatus::Indeterminate) v = cone_membership_numeric(q, cfg);
            if (v.status == ConeStatus::Supported) return i;
            if (v.status == ConeStatus::Indeterminate) return kIndeterminate;
        }
        return kNone;
    }

    /// exact description of C_{p,<=i} when the prefix formula is a positive
    /// combination of linear polynomials vanishing at p: such a set is
    /// invariant under positive scaling around p, so its cone is its closure
    /// (strict atoms relaxed)
    std::optional<SemialgebraicSet> exact_prefix_description(int i) const {
        SemialgebraicSet pre = translate_set(S.prefix(i), p);
        bool linear = true;
        std::function<Formula(const Formula&)> close = [&](const Formula& f) -> Formula {
            if (f.kind == Formula::Kind::AtomNode) {
                const Polynomial& g = f.atom.poly;
                if (g.degree().value_or(0) > 1 || g.eval(std::vector<Rational>(pre.ambient_dim, 0)) != 0)
                    linear = false;
                Atom a = f.atom;
                if (a.rel == Relation::Lt) a.rel = Relation::Le;
                if (a.rel == Relation::Gt) a.rel = Relation::Ge;
                if (a.rel == Relation::Ne) linear = false; // closure would be everything
                return Formula::make_atom(a);
            }
            if (f.kind == Formula::Kind::Not) {
                linear = false;
                return f;
            }
            Formula g = f;
            for (auto& c : g.children) c = close(c);
            return g;
        };
        Formula closed = close(normalize_nnf(pre.formula));
        if (!linear) return std::nullopt;
        return SemialgebraicSet{closed, pre.ambient_dim, pre.var_names};
    }
};

/// Scan a direction grid through the induced strata oracle.
struct InducedScan {
    std::vector<std::vector<Rational>> directions;
    std::vector<int> stratum_of; // parallel to directions
    std::vector<int> counts;     // per stratum index
    int indeterminate = 0;
};

inline InducedConeStrata induced_cone_strata(const Stratification& S, const std::vector<Rational>& p,
                                             const EngineConfig& cfg) {
    InducedConeStrata ics{S, p, cfg, {}};
    ics.build_prefixes();
    return ics;
}

inline const InducedScan& induced_strata_scan(const InducedConeStrata& ics, int resolution) {
    auto it = ics.scan_cache.find(resolution);
    if (it != ics.scan_cache.end()) return *it->second;
    auto scan = std::make_shared<InducedScan>();
    scan->directions = grid_directions(ics.S.ambient_dim, resolution);
    scan->counts.assign(ics.S.strata.size(), 0);
    for (const auto& y : scan->directions) {
        int i = ics.classify(y);
        scan->stratum_of.push_back(i);
        if (i >= 0) ++scan->counts[i];
        if (i == InducedConeStrata::kIndeterminate) ++scan->indeterminate;
    }
    ics.scan_cache[resolution] = scan;
    return *scan;
}

/// Dimension of an induced cone stratum from grid counts at two resolutions:
/// the direction set of a k-dimensional cone meets the res-R grid in O(R^(k-1))
/// cells, so the growth exponent recovers k - 1. Heuristic (tagged as such).
inline int induced_stratum_dimension(const InducedConeStrata& ics, int index, int resolution) {
    const InducedScan& a = induced_strata_scan(ics, resolution);
    const InducedScan& b = induced_strata_scan(ics, 2 * resolution);
    int na = a.counts[index], nb = b.counts[index];
    if (na == 0 && nb == 0) return 0; // at most the apex
    if (nb <= std::max(2 * ics.S.ambient_dim, na)) return 1; // isolated rays
    double growth = std::log2((double)nb / (double)na);
    return 1 + (int)std::lround(growth);
}

// ---- tangent spaces and Whitney conditions ---------------------------------------

namespace detail_strat {

/// Sample points of X in the annulus 0 < ||x - y|| < radius. The set is
/// translated exactly (doubles are rationals) so equality acceptance uses the
/// scale-relative tolerance; the generic sampler's absolute tolerance would
/// accept off-variety points once the radius drops below ~1e-5.
inline std::vector<std::vector<double>> sample_annulus(const SemialgebraicSet& X,
                                                       const std::vector<double>& y, double radius,
                                                       int count, uint64_t seed) {
    const int n = X.ambient_dim;
    std::vector<Rational> yr;
    for (double c : y) yr.push_back(Rational(c));
    SemialgebraicSet X0 = translate_set(X, yr);
    auto disjuncts = detail_cone::scan_disjuncts(X0);
    std::vector<double> origin(n, 0.0);
    std::vector<std::vector<double>> out;
    for (const auto& d : disjuncts) {
        Rng rng(mix_seed(seed, d.stream_tag));
        for (int it = 0; it < 220 && (int)out.size() < count; ++it) {
            std::vector<double> u(n);
            double s = radius * (0.3 + 0.69 * rng.uniform());
            auto g = detail_cone::jitter_vector(rng, n);
            double gn = norm2(g);
            if (!(gn > 0)) continue;
            for (int i = 0; i < n; ++i) u[i] = s * g[i] / gn;
            if (!detail_cone::project_and_accept(d, origin, radius, u)) continue;
            for (int i = 0; i < n; ++i) u[i] += y[i];
            out.push_back(std::move(u));
        }
        if ((int)out.size() >= count) break;
    }
    return out;
}

inline const Formula* containing_disjunct(const SemialgebraicSet& X, const std::vector<double>& x,
                                          std::vector<Formula>& storage) {
    storage = top_disjuncts(X.formula);
    for (const auto& d : storage)
        if (eval_cone_grade(d, x)) return &d;
    return nullptr;
}

} // namespace detail_strat

/// Orthonormal basis of the estimated tangent plane: kernel of the Jacobian of
/// the active equality polynomials at x. Throws "singular sample" when the
/// Jacobian vanishes although equalities are present.
inline std::vector<std::vector<double>> tangent_space(const SemialgebraicSet& X,
                                                      const std::vector<double>& x) {
    const int n = X.ambient_dim;
    std::vector<Formula> storage;
    const Formula* d = detail_strat::containing_disjunct(X, x, storage);
    std::vector<Polynomial> eqs = d ? active_equalities(*d) : active_equalities(X.formula);
    std::vector<std::vector<double>> basis;
    if (eqs.empty()) {
        for (int i = 0; i < n; ++i) {
            std::vector<double> e(n, 0.0);
            e[i] = 1.0;
            basis.push_back(std::move(e));
        }
        return basis;
    }
    Eigen::MatrixXd J((int)eqs.size(), n);
    for (int r = 0; r < (int)eqs.size(); ++r)
        for (int c = 0; c < n; ++c) J(r, c) = eqs[r].derivative(c).eval_double(x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    // relative rank threshold: the Jacobian of a smooth point near a
    // singularity is tiny but full-rank, and must not be flagged singular
    double thresh = 1e-8 * smax;
    if (smax == 0.0) thresh = std::numeric_limits<double>::infinity();
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thresh) ++rank;
    if (rank == 0) throw std::runtime_error("singular sample");
    for (int c = rank; c < n; ++c) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = svd.matrixV()(i, c);
        basis.push_back(std::move(v));
    }
    return basis;
}

struct WhitneyReport {
    int i = -1, j = -1;
    bool structural_failure = false;
    bool vacuous = false;
    int sequences = 0;
    int singular_skipped = 0;
    double max_defect_a = 0;
    double max_defect_b = 0;
    std::string verdict; // "no violation found" | "violation" | "indeterminate"
    std::string diagnostic;
    std::vector<double> witness; // flattened (y, x) of a violating sequence tail
};

namespace detail_strat {

/// component of u orthogonal to span(basis), for unit u
inline double plane_defect(const std::vector<std::vector<double>>& basis,
                           const std::vector<double>& u) {
    std::vector<double> r = u;
    for (const auto& b : basis) {
        double dot = 0, bb = 0;
        for (size_t i = 0; i < u.size(); ++i) {
            dot += r[i] * b[i];
            bb += b[i] * b[i];
        }
        if (bb == 0) continue;
        for (size_t i = 0; i < u.size(); ++i) r[i] -= dot / bb * b[i];
    }
    return norm2(r);
}

} // namespace detail_strat

/// Sampled Whitney (a)/(b) check for the pair (S_i, S_j), i < j, near p.
/// Sequences shrink geometrically with ratio 1/2 over 12 levels; a violation
/// is reported only when the defect stays above the threshold at the finest
/// levels. Absence of sequences (y not in the closure of S_j) is a vacuous
/// pass for that y.
inline WhitneyReport whitney_check(const Stratification& S, int i, int j,
                                   const std::vector<Rational>& p, uint64_t seed, int count = 6,
                                   double threshold = 1e-3) {
    if (i >= j) throw std::invalid_argument("whitney_check needs i < j");
    WhitneyReport rep;
    rep.i = i;
    rep.j = j;
    const SemialgebraicSet& Si = S.strata[i];
    const SemialgebraicSet& Sj = S.strata[j];
    const int n = S.ambient_dim;
    std::vector<double> pd;
    for (const auto& c : p) pd.push_back(to_double(c));

    // base points y in S_i near p
    std::vector<std::vector<double>> ys;
    if (eval_real(Si, p)) ys.push_back(pd);
    auto ysamp = sample_near(Si, pd, 0.25, count, mix_seed(seed, 0x717));
    for (auto& q : ysamp.points) {
        if ((int)ys.size() >= count) break;
        ys.push_back(q);
    }
    if (ys.empty()) {
        rep.vacuous = true;
        rep.verdict = "no violation found";
        rep.diagnostic = "S_i has no sampled points near p: vacuous";
        return rep;
    }

    const int levels = 12;
    bool any_sequence = false;
    bool violation = false;
    for (const auto& y : ys) {
        std::vector<std::vector<double>> ty;
        try {
            ty = tangent_space(Si, y);
        } catch (const std::runtime_error&) {
            ++rep.singular_skipped;
            continue;
        }
        // a point stratum has tangent space {0}: represent with no basis vectors
        if (local_dimension_estimate(Si, y, mix_seed(seed, 0xD)).dim == 0) ty.clear();
        std::vector<double> defects_a, defects_b;
        int misses = 0;
        for (int k = 8; k < 8 + levels; ++k) {
            double r = std::pow(0.5, k);
            auto xs = detail_strat::sample_annulus(Sj, y, r, 1, mix_seed(seed, (uint64_t)k * 131 + 7));
            if (xs.empty()) {
                // a genuine limit sequence has points at every scale: two
                // consecutive empty levels mean y is not approached from S_j
                if (++misses >= 2 && defects_a.empty()) break;
                continue;
            }
            const std::vector<double>* xbest = &xs[0];
            std::vector<std::vector<double>> tx;
            try {
                tx = tangent_space(Sj, *xbest);
            } catch (const std::runtime_error&) {
                ++rep.singular_skipped;
                continue;
            }
            double da = 0;
            for (const auto& u : ty) da = std::max(da, detail_strat::plane_defect(tx, u));
            std::vector<double> sec(n);
            double sn = 0;
            for (int c = 0; c < n; ++c) {
                sec[c] = (*xbest)[c] - y[c];
                sn += sec[c] * sec[c];
            }
            sn = std::sqrt(sn);
            for (int c = 0; c < n; ++c) sec[c] /= sn;
            double db = detail_strat::plane_defect(tx, sec);
            defects_a.push_back(da);
            defects_b.push_back(db);
        }
        if (defects_a.size() < 3) continue; // starved sequence: vacuous for this y
        any_sequence = true;
        ++rep.sequences;
        size_t m = defects_a.size();
        rep.max_defect_a = std::max(rep.max_defect_a, defects_a[m - 1]);
        rep.max_defect_b = std::max(rep.max_defect_b, defects_b[m - 1]);
        // violation only when the defect persists at the finest levels
        bool persist = true;
        for (size_t t = m - 3; t < m; ++t)
            if (std::max(defects_a[t], defects_b[t]) <= threshold) persist = false;
        if (persist) {
            violation = true;
            rep.witness = y;
        }
    }
    if (!any_sequence) {
        rep.vacuous = true;
        rep.verdict = "no violation found";
        rep.diagnostic = "no sequences in S_j approach the sampled base points: vacuous";
        return rep;
    }
    rep.verdict = violation ? "violation" : "no violation found";
    return rep;
}

/// Structural pre-check on induced cone strata: a nonempty stratum at index d
/// whose estimated dimension is below d already rules out a Whitney
/// stratification with these indices (the index convention carries the
/// dimension), before any sampling.
inline WhitneyReport induced_whitney_structural_check(const InducedConeStrata& ics,
                                                      int resolution = 8) {
    WhitneyReport rep;
    const InducedScan& scan = induced_strata_scan(ics, resolution);
    for (int d = 0; d < (int)scan.counts.size(); ++d) {
        if (scan.counts[d] == 0) continue;
        int dim = induced_stratum_dimension(ics, d, resolution);
        if (dim < d) {
            rep.structural_failure = true;
            rep.i = rep.j = d;
            rep.verdict = "violation";
            rep.diagnostic = "stratum at index " + std::to_string(d) + " has estimated dimension " +
                             std::to_string(dim) +
                             ": it is impossible for the induced cone strata to form a Whitney "
                             "stratification with these indices";
            return rep;
        }
    }
    rep.verdict = "no violation found";
    return rep;
}

// ---- cone-risometry lift ----------------------------------------------------------

struct LiftReport {
    bool ok = false;
    std::string error;
    std::vector<Polynomial> psi; // the constructed limit map (linear part of phi)
    RisometryReport risometry;
    int directions_checked = 0;
    int directions_mapped = 0;
    bool cone_transport_ok = false;
};

/// Limit map of a polynomial risometry: the t^0 coefficient of phi(t x)/t,
/// which is exactly the linear part of phi. A constant term would contribute
/// t^(-1): rejected ("not a lift candidate").
inline std::vector<Polynomial> lift_limit_map(const std::vector<Polynomial>& phi) {
    std::vector<Polynomial> psi;
    for (const auto& f : phi) {
        Polynomial lin = Polynomial::zero(f.nvars());
        for (const auto& [m, c] : f.terms()) {
            uint32_t d = total_degree(m);
            if (d == 0) throw std::domain_error("not a lift candidate");
            if (d == 1) lin.add_term(m, c);
        }
        psi.push_back(std::move(lin));
    }
    return psi;
}

inline LiftReport cone_risometry_lift(const std::vector<Polynomial>& phi, const SemialgebraicSet& X,
                                      const SemialgebraicSet& Y,
                                      const std::vector<std::vector<Rational>>& sample_directions,
                                      const EngineConfig& cfg, int pair_count = 250) {
    LiftReport rep;
    try {
        rep.psi = lift_limit_map(phi);
    } catch (const std::domain_error& e) {
        rep.error = e.what();
        return rep;
    }
    const int n = X.ambient_dim;

    // (1) rv-preservation of psi on random pairs embedded at scales t^1..t^4
    Rng rng(mix_seed(cfg.seed, 0x11F7));
    std::vector<std::pair<PuiseuxPoint, PuiseuxPoint>> pairs;
    for (int k = 1; k <= 4 && (int)pairs.size() < pair_count; ++k) {
        for (int it = 0; it < pair_count / 4 + 1; ++it) {
            auto rand_point = [&]() {
                PuiseuxPoint q;
                for (int i = 0; i < n; ++i) {
                    Rational c((long)(rng.next() % 19) - 9, 1 + (long)(rng.next() % 4));
                    q.coords.push_back(c == 0 ? PuiseuxSeries::zero() : PuiseuxSeries::term(c, k));
                }
                return q;
            };
            PuiseuxPoint a = rand_point(), b = rand_point();
            bool dist = false;
            for (int i = 0; i < n; ++i)
                if (!(a.coords[i] == b.coords[i])) dist = true;
            if (dist) pairs.push_back({a, b});
        }
    }
    rep.risometry = risometry_check(PointMap{rep.psi}, pairs);

    // (2) psi transports sampled cone directions of X into the cone of Y
    rep.cone_transport_ok = true;
    for (const auto& y : sample_directions) {
        ConeVerdict vx = cone_membership_puiseux(ConeQuery{X, std::vector<Rational>(n, 0), y}, cfg);
        if (vx.status != ConeStatus::Supported) continue;
        ++rep.directions_checked;
        std::vector<Rational> img;
        for (const auto& f : rep.psi) img.push_back(f.eval(y));
        ConeVerdict vy =
            cone_membership_puiseux(ConeQuery{Y, std::vector<Rational>(n, 0), img}, cfg);
        if (vy.status == ConeStatus::Supported) ++rep.directions_mapped;
        else rep.cone_transport_ok = false;
    }
    rep.ok = rep.risometry.all_pass() && rep.cone_transport_ok;
    return rep;
}

// ---- cones agree under risometry ----------------------------------------------------

struct EqualConesReport {
    bool agree = true;
    int cells = 0;
    int indeterminate_excluded = 0;
    std::vector<std::vector<Rational>> counterexamples; // certified disagreements
};

/// Scan both cones on a grid and compare: a certified disagreement refutes the
/// asserted risometry between X and Y (equal-cones proposition, contrapositive).
inline EqualConesReport risometry_implies_equal_cones_check(const SemialgebraicSet& X,
                                                            const SemialgebraicSet& Y,
                                                            const std::vector<Rational>& p,
                                                            int resolution, const EngineConfig& cfg) {
    EqualConesReport rep;
    auto engines = default_engines();
    ScanResult sx = cone_scan(X, p, resolution, engines, cfg);
    ScanResult sy = cone_scan(Y, p, resolution, engines, cfg);
    rep.cells = (int)sx.cells.size();
    for (size_t k = 0; k < sx.cells.size(); ++k) {
        ConeStatus a = sx.cells[k].consensus, b = sy.cells[k].consensus;
        if (a == ConeStatus::Indeterminate || b == ConeStatus::Indeterminate) {
            ++rep.indeterminate_excluded;
            continue;
        }
        if (a != b) {
            rep.agree = false;
            rep.counterexamples.push_back(sx.cells[k].y);
        }
    }
    return rep;
}

} // namespace tancone

#endif
