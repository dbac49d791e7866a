#ifndef TANCONE_SCRIPT_HPP
#define TANCONE_SCRIPT_HPP

#include "tancone/parser.hpp"
#include "tancone/strat.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace tancone {

using ordered_json = nlohmann::ordered_json;

struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Options shared by every command in a script run; recorded in the report
/// header so a report is reproducible from its own contents.
struct ScriptOptions {
    EngineConfig cfg;
    int grid = 8;          // default scan resolution
    int trunc = 16;        // truncation order for printed witness series
    bool strict = false;   // stop at the first failing command
    std::vector<std::string> engines = default_engines();
};

struct Report {
    ordered_json commands = ordered_json::array();
    bool any_violation = false;
    bool any_indeterminate = false;
    bool any_error = false;
    ScriptOptions opts;

    /// 0 all determinate-pass, 2 violations, 3 indeterminates, errors count
    /// as violations (something asserted did not check out)
    int exit_code() const {
        if (any_violation || any_error) return 2;
        if (any_indeterminate) return 3;
        return 0;
    }

    ordered_json to_json() const {
        ordered_json j;
        j["schema"] = 1;
        j["seed"] = opts.cfg.seed;
        j["eps_schedule"] = opts.cfg.schedule;
        j["trunc"] = opts.trunc;
        j["commands"] = commands;
        return j;
    }
};

namespace detail_script {

/// fixed 12-significant-digit float for byte-stable serialization
inline double jnum(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline ordered_json rational_list(const std::vector<Rational>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& c : v) a.push_back(rat_str(c));
    return a;
}

inline ordered_json double_list(const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double c : v) a.push_back(jnum(c));
    return a;
}

/// exact curves print in full; internally truncated series are cut for display
inline std::string curve_literal(const PuiseuxPoint& c, int trunc) {
    PuiseuxPoint t = c;
    for (auto& s : t.coords)
        if (s.trunc().finite) s = s.truncated(Trunc::at(Rational(trunc)));
    return print_point(t);
}

inline ordered_json verdict_json(const ConeVerdict& v, int trunc) {
    ordered_json j;
    j["engine"] = v.engine;
    j["status"] = status_text(v.status);
    j["certified"] = v.certified;
    j["reason"] = v.reason;
    if (v.curve) j["curve"] = curve_literal(*v.curve, trunc);
    if (!v.witnesses.empty()) {
        ordered_json ws = ordered_json::array();
        for (const auto& w : v.witnesses) {
            ordered_json e;
            e["eps"] = jnum(w.eps);
            e["a"] = jnum(w.a);
            e["defect"] = jnum(w.defect);
            if (w.r != 0) e["r"] = jnum(w.r);
            e["x"] = double_list(w.x);
            ws.push_back(e);
        }
        j["witnesses"] = ws;
    }
    return j;
}

inline ordered_json rayset_json(RaySet& rs) {
    ordered_json j;
    ordered_json rays = ordered_json::array();
    for (auto& r : rs.rays) {
        ordered_json e;
        if (r.vertical) {
            e["direction"] = "(0, 1)";
        } else if (r.slope.is_rational) {
            e["direction"] = "(1, " + rat_str(r.slope.value) + ")";
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "(1, %.12g)", r.slope.approx());
            e["direction"] = buf;
            e["slope_minpoly_degree"] = (int)r.slope.sqfree.size() - 1;
        }
        e["plus"] = r.plus;
        e["minus"] = r.minus;
        rays.push_back(e);
    }
    j["rays"] = rays;
    j["dropped_indeterminate"] = rs.dropped_indeterminate;
    return j;
}

inline ordered_json scan_json(const ScanResult& res, int max_listed = 64) {
    ordered_json j;
    j["cells"] = (int)res.cells.size();
    j["supported"] = res.supported;
    j["conflicts"] = res.conflicts;
    j["indeterminate"] = res.indeterminate;
    std::map<std::string, std::map<std::string, int>> per_engine;
    ordered_json sup = ordered_json::array(), con = ordered_json::array();
    for (const auto& c : res.cells) {
        for (const auto& [name, v] : c.verdicts) per_engine[name][status_text(v.status)]++;
        if (c.consensus == ConeStatus::Supported && (int)sup.size() < max_listed)
            sup.push_back(rational_list(c.y));
        if (c.conflict && (int)con.size() < max_listed) con.push_back(rational_list(c.y));
    }
    ordered_json eng;
    for (const auto& [name, counts] : per_engine) {
        ordered_json e;
        for (const auto& [s, n] : counts) e[s] = n;
        eng[name] = e;
    }
    j["engines"] = eng;
    j["supported_directions"] = sup;
    if (!con.empty()) j["conflict_directions"] = con;
    return j;
}

inline ordered_json whitney_json(const WhitneyReport& rep) {
    ordered_json j;
    j["i"] = rep.i;
    j["j"] = rep.j;
    j["verdict"] = rep.verdict;
    j["structural_failure"] = rep.structural_failure;
    j["vacuous"] = rep.vacuous;
    j["sequences"] = rep.sequences;
    j["max_defect_a"] = jnum(rep.max_defect_a);
    j["max_defect_b"] = jnum(rep.max_defect_b);
    if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
    if (!rep.witness.empty()) j["witness"] = double_list(rep.witness);
    return j;
}

} // namespace detail_script

// ---- script parsing ---------------------------------------------------------

/// One parsed statement: either a declaration (recorded into the environment
/// as a side effect of run) or a command with named arguments.
struct ScriptEnv {
    VariableTable vars;
    std::map<std::string, SemialgebraicSet> sets;
    std::map<std::string, Stratification> strats;
    std::map<std::string, std::vector<Rational>> points;
};

namespace detail_script {

/// command words contain '-': read [A-Za-z][A-Za-z0-9_-]*
inline std::optional<std::string> command_word(detail::Cursor& cur) {
    cur.skip_ws();
    size_t save = cur.pos();
    auto id = cur.ident();
    if (!id) return std::nullopt;
    std::string w = *id;
    while (cur.accept("-")) {
        auto tail = cur.ident();
        if (!tail) {
            cur.set_pos(save);
            return std::nullopt;
        }
        w += "-" + *tail;
    }
    return w;
}

inline Rational signed_rat(detail::Cursor& cur) {
    bool neg = cur.accept("-");
    auto r = cur.rational();
    if (!r) throw ScriptError("expected a rational number at offset " + std::to_string(cur.pos()));
    return neg ? Rational(-*r) : *r;
}

inline std::vector<Rational> point_literal(detail::Cursor& cur) {
    cur.expect("(");
    std::vector<Rational> p;
    do p.push_back(signed_rat(cur));
    while (cur.accept(","));
    cur.expect(")");
    return p;
}

/// point argument: a literal "(a, b)" or a declared point name
inline std::vector<Rational> point_arg(detail::Cursor& cur, const ScriptEnv& env) {
    if (cur.peek() == '(') return point_literal(cur);
    auto id = cur.ident();
    if (id) {
        auto it = env.points.find(*id);
        if (it == env.points.end()) throw ScriptError("unknown point '" + *id + "'");
        return it->second;
    }
    throw ScriptError("expected a point at offset " + std::to_string(cur.pos()));
}

inline long int_arg(detail::Cursor& cur) {
    bool neg = cur.accept("-");
    auto n = cur.integer();
    if (!n) throw ScriptError("expected an integer at offset " + std::to_string(cur.pos()));
    long v = n->convert_to<long>();
    return neg ? -v : v;
}

/// formula text runs to the next ';' or '}' at this level
inline std::string formula_text(const std::string& text, size_t& pos) {
    size_t start = pos;
    int depth = 0;
    while (pos < text.size()) {
        char c = text[pos];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && (c == ';' || c == '}')) break;
        ++pos;
    }
    return text.substr(start, pos - start);
}

} // namespace detail_script

inline std::string repro_example_script(const std::string& which);

/// Execute a script: declarations build the environment, commands append
/// result records to the report. Throws ScriptError on parse/name problems;
/// runtime failures of individual commands are recorded and (unless strict)
/// execution continues.
inline Report run_script(const std::string& text, const ScriptOptions& opts = {}) {
    using namespace detail_script;
    Report rep;
    rep.opts = opts;
    ScriptEnv env;
    detail::Cursor cur(text);

    auto record = [&](ordered_json j, const std::string& status) {
        j["status"] = status;
        rep.commands.push_back(std::move(j));
        if (status == "violation") rep.any_violation = true;
        if (status == "indeterminate") rep.any_indeterminate = true;
        if (status == "error") rep.any_error = true;
    };

    while (!cur.eof()) {
        auto word = command_word(cur);
        if (!word) throw ScriptError("expected a statement at offset " + std::to_string(cur.pos()));
        const std::string& kw = *word;

        try {
            if (kw == "vars") {
                do {
                    auto name = cur.ident();
                    if (!name) throw ScriptError("expected variable name");
                    env.vars.index_of(*name, cur.pos());
                } while (cur.accept(","));
                env.vars.frozen = true;
                cur.expect(";");
            } else if (kw == "set") {
                auto name = cur.ident();
                if (!name) throw ScriptError("expected set name");
                cur.expect("=");
                size_t pos = cur.pos();
                std::string body = formula_text(text, pos);
                cur.set_pos(pos);
                cur.expect(";");
                env.sets[*name] = parse_set(body, &env.vars);
            } else if (kw == "point") {
                auto name = cur.ident();
                if (!name) throw ScriptError("expected point name");
                cur.expect("=");
                env.points[*name] = point_literal(cur);
                cur.expect(";");
            } else if (kw == "strat") {
                auto name = cur.ident();
                if (!name) throw ScriptError("expected stratification name");
                cur.expect("{");
                Stratification S;
                int expected = 0;
                while (!cur.accept("}")) {
                    auto label = cur.ident();
                    if (!label || label->size() < 2 || (*label)[0] != 'S')
                        throw ScriptError("expected stratum label S<index>");
                    if (std::stoi(label->substr(1)) != expected)
                        throw ScriptError("stratum labels must be S0, S1, ... in order");
                    ++expected;
                    cur.expect(":");
                    size_t pos = cur.pos();
                    std::string body = formula_text(text, pos);
                    cur.set_pos(pos);
                    cur.expect(";");
                    S.strata.push_back(parse_set(body, &env.vars));
                }
                S.ambient_dim = (int)env.vars.names.size();
                for (auto& s : S.strata) {
                    s.ambient_dim = S.ambient_dim;
                    s.formula = widen_formula(s.formula, S.ambient_dim);
                    s.var_names = env.vars.names;
                }
                env.strats[*name] = std::move(S);
            } else if (kw == "cone") {
                auto name = cur.ident();
                if (!name || !env.sets.count(*name)) throw ScriptError("unknown set in 'cone'");
                std::vector<Rational> p, y;
                std::string engine = "auto";
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "y") y = point_arg(cur, env);
                    else if (*key == "engine") engine = *cur.ident();
                    else throw ScriptError("unknown argument '" + *key + "' in 'cone'");
                }
                if (p.empty() || y.empty()) throw ScriptError("'cone' needs p= and y=");
                ConeQuery q{env.sets[*name], p, y};
                ConeVerdict v;
                if (engine == "numeric") v = cone_membership_numeric(q, opts.cfg);
                else if (engine == "puiseux") v = cone_membership_puiseux(q, opts.cfg);
                else if (engine == "deformation") v = deformation_slice_check(q, opts.cfg);
                else if (engine == "auto") {
                    v = cone_membership_puiseux(q, opts.cfg);
                    if (v.status == ConeStatus::Indeterminate) v = cone_membership_numeric(q, opts.cfg);
                } else throw ScriptError("unknown engine '" + engine + "'");
                ordered_json j;
                j["kind"] = "cone";
                j["set"] = *name;
                j["p"] = rational_list(p);
                j["y"] = rational_list(y);
                j["verdict"] = verdict_json(v, opts.trunc);
                record(std::move(j),
                       v.status == ConeStatus::Indeterminate ? "indeterminate" : "pass");
            } else if (kw == "cone-exact") {
                auto name = cur.ident();
                if (!name || !env.sets.count(*name)) throw ScriptError("unknown set in 'cone-exact'");
                std::vector<Rational> p;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key || *key != "p") throw ScriptError("'cone-exact' takes p=");
                    cur.expect("=");
                    p = point_arg(cur, env);
                }
                const SemialgebraicSet& X = env.sets[*name];
                if (X.ambient_dim != 2 || X.formula.kind != Formula::Kind::AtomNode ||
                    X.formula.atom.rel != Relation::Eq)
                    throw ScriptError("'cone-exact' needs a plane curve given by one equation");
                RaySet rs = plane_curve_cone(X.formula.atom.poly, p);
                ordered_json j;
                j["kind"] = "cone-exact";
                j["set"] = *name;
                j["p"] = rational_list(p);
                j["rays"] = rayset_json(rs);
                record(std::move(j), rs.dropped_indeterminate ? "indeterminate" : "pass");
            } else if (kw == "cone-scan") {
                auto name = cur.ident();
                if (!name || !env.sets.count(*name)) throw ScriptError("unknown set in 'cone-scan'");
                std::vector<Rational> p;
                int grid = opts.grid;
                std::vector<std::string> engines = opts.engines;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "grid") grid = (int)int_arg(cur);
                    else if (*key == "engines") {
                        engines.clear();
                        do engines.push_back(*command_word(cur));
                        while (cur.accept(","));
                    } else throw ScriptError("unknown argument '" + *key + "' in 'cone-scan'");
                }
                if (p.empty()) throw ScriptError("'cone-scan' needs p=");
                ScanResult res = cone_scan(env.sets[*name], p, grid, engines, opts.cfg);
                ordered_json j;
                j["kind"] = "cone-scan";
                j["set"] = *name;
                j["p"] = rational_list(p);
                j["grid"] = grid;
                j["scan"] = scan_json(res);
                record(std::move(j), res.conflicts ? "violation"
                                     : res.indeterminate ? "indeterminate"
                                                         : "pass");
            } else if (kw == "induced-strata") {
                auto name = cur.ident();
                if (!name || !env.strats.count(*name))
                    throw ScriptError("unknown stratification in 'induced-strata'");
                std::vector<Rational> p;
                int grid = opts.grid;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "grid") grid = (int)int_arg(cur);
                    else throw ScriptError("unknown argument '" + *key + "'");
                }
                if (p.empty()) throw ScriptError("'induced-strata' needs p=");
                auto ics = induced_cone_strata(env.strats[*name], p, opts.cfg);
                const InducedScan& scan = induced_strata_scan(ics, grid);
                ordered_json j;
                j["kind"] = "induced-strata";
                j["strat"] = *name;
                j["p"] = rational_list(p);
                j["grid"] = grid;
                ordered_json strata = ordered_json::array();
                for (int d = 0; d < (int)ics.S.strata.size(); ++d) {
                    ordered_json e;
                    e["index"] = d;
                    e["directions"] = scan.counts[d];
                    e["dimension"] = induced_stratum_dimension(ics, d, grid);
                    if (auto desc = ics.exact_prefix_description(d))
                        e["prefix_cone"] = print_set(*desc);
                    strata.push_back(e);
                }
                j["strata"] = strata;
                j["indeterminate_directions"] = scan.indeterminate;
                WhitneyReport st = induced_whitney_structural_check(ics, grid);
                j["structural_check"] = st.verdict;
                if (!st.diagnostic.empty()) j["diagnostic"] = st.diagnostic;
                record(std::move(j), st.structural_failure     ? "violation"
                                     : scan.indeterminate != 0 ? "indeterminate"
                                                               : "pass");
            } else if (kw == "whitney") {
                auto name = cur.ident();
                if (!name || !env.strats.count(*name))
                    throw ScriptError("unknown stratification in 'whitney'");
                std::vector<Rational> p;
                int i = -1, jx = -1;
                uint64_t seed = opts.cfg.seed;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "i") i = (int)int_arg(cur);
                    else if (*key == "j") jx = (int)int_arg(cur);
                    else if (*key == "seed") seed = (uint64_t)int_arg(cur);
                    else throw ScriptError("unknown argument '" + *key + "'");
                }
                if (p.empty()) throw ScriptError("'whitney' needs p=");
                const Stratification& S = env.strats[*name];
                std::vector<std::pair<int, int>> pairs;
                if (i >= 0 && jx >= 0) pairs.push_back({i, jx});
                else
                    for (int a = 0; a < (int)S.strata.size(); ++a)
                        for (int b = a + 1; b < (int)S.strata.size(); ++b) pairs.push_back({a, b});
                ordered_json j;
                j["kind"] = "whitney";
                j["strat"] = *name;
                j["p"] = rational_list(p);
                j["seed"] = seed;
                ordered_json checks = ordered_json::array();
                bool viol = false, indet = false;
                for (auto [a, b] : pairs) {
                    WhitneyReport r = whitney_check(S, a, b, p, seed);
                    if (r.verdict == "violation") viol = true;
                    if (r.verdict == "indeterminate") indet = true;
                    checks.push_back(whitney_json(r));
                }
                j["pairs"] = checks;
                record(std::move(j), viol ? "violation" : indet ? "indeterminate" : "pass");
            } else if (kw == "dims") {
                auto name = cur.ident();
                if (!name || !env.strats.count(*name))
                    throw ScriptError("unknown stratification in 'dims'");
                std::vector<Rational> p;
                uint64_t seed = opts.cfg.seed;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "seed") seed = (uint64_t)int_arg(cur);
                    else throw ScriptError("unknown argument '" + *key + "'");
                }
                const Stratification& S = env.strats[*name];
                if (p.empty()) p.assign(S.ambient_dim, Rational(0));
                DimensionReport r = dimension_condition_check(S, p, seed);
                ordered_json j;
                j["kind"] = "dims";
                j["strat"] = *name;
                ordered_json entries = ordered_json::array();
                bool mismatch = false;
                for (const auto& e : r.entries) {
                    ordered_json je;
                    je["index"] = e.d;
                    je["prefix_dim"] = e.prefix_dim;
                    je["stratum_dim"] = e.stratum_dim;
                    je["bound_holds"] = e.bound_holds;
                    je["index_mismatch"] = e.index_mismatch;
                    if (e.index_mismatch) mismatch = true;
                    entries.push_back(je);
                }
                j["entries"] = entries;
                j["all_bounds_hold"] = r.all_bounds_hold;
                record(std::move(j), (!r.all_bounds_hold || mismatch) ? "violation" : "pass");
            } else if (kw == "risometry") {
                auto xn = cur.ident();
                auto yn = cur.ident();
                if (!xn || !yn || !env.sets.count(*xn) || !env.sets.count(*yn))
                    throw ScriptError("'risometry' needs two declared sets");
                std::vector<Rational> p;
                int grid = opts.grid;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "p") p = point_arg(cur, env);
                    else if (*key == "grid") grid = (int)int_arg(cur);
                    else throw ScriptError("unknown argument '" + *key + "'");
                }
                if (p.empty()) throw ScriptError("'risometry' needs p=");
                EqualConesReport r =
                    risometry_implies_equal_cones_check(env.sets[*xn], env.sets[*yn], p, grid, opts.cfg);
                ordered_json j;
                j["kind"] = "risometry";
                j["X"] = *xn;
                j["Y"] = *yn;
                j["p"] = rational_list(p);
                j["grid"] = grid;
                j["cones_agree"] = r.agree;
                j["cells"] = r.cells;
                j["indeterminate_excluded"] = r.indeterminate_excluded;
                ordered_json cex = ordered_json::array();
                for (const auto& y : r.counterexamples) cex.push_back(rational_list(y));
                if (!cex.empty()) j["counterexamples"] = cex;
                record(std::move(j), r.agree ? "pass" : "violation");
            } else if (kw == "lift") {
                auto xn = cur.ident();
                auto yn = cur.ident();
                if (!xn || !yn || !env.sets.count(*xn) || !env.sets.count(*yn))
                    throw ScriptError("'lift' needs two declared sets");
                std::vector<Polynomial> phi;
                int grid = 2;
                while (!cur.accept(";")) {
                    auto key = cur.ident();
                    if (!key) throw ScriptError("expected argument");
                    cur.expect("=");
                    if (*key == "map") {
                        cur.expect("(");
                        size_t pos = cur.pos();
                        // component polynomials separated by ',' at paren depth 0
                        while (true) {
                            size_t start = pos;
                            int depth = 0;
                            while (pos < text.size()) {
                                char c = text[pos];
                                if (c == '(') ++depth;
                                if (c == ')' && depth == 0) break;
                                if (c == ')') --depth;
                                if (c == ',' && depth == 0) break;
                                ++pos;
                            }
                            phi.push_back(parse_polynomial(text.substr(start, pos - start), env.vars));
                            if (pos < text.size() && text[pos] == ',') ++pos;
                            else break;
                        }
                        cur.set_pos(pos);
                        cur.expect(")");
                    } else if (*key == "grid") grid = (int)int_arg(cur);
                    else throw ScriptError("unknown argument '" + *key + "'");
                }
                if (phi.empty()) throw ScriptError("'lift' needs map=(...)");
                int n = env.sets[*xn].ambient_dim;
                for (auto& f : phi)
                    if (f.nvars() != n) {
                        Polynomial r(n);
                        for (const auto& [m, c] : f.terms()) {
                            Monomial mm(n, 0);
                            std::copy(m.begin(), m.end(), mm.begin());
                            r.add_term(mm, c);
                        }
                        f = r;
                    }
                auto dirs = grid_directions(n, grid);
                LiftReport r = cone_risometry_lift(phi, env.sets[*xn], env.sets[*yn], dirs, opts.cfg);
                ordered_json j;
                j["kind"] = "lift";
                j["X"] = *xn;
                j["Y"] = *yn;
                j["ok"] = r.ok;
                if (!r.error.empty()) j["error"] = r.error;
                ordered_json psi = ordered_json::array();
                for (const auto& f : r.psi) psi.push_back(print_polynomial(f, env.vars.names));
                j["psi"] = psi;
                j["rv_pairs_pass"] = r.risometry.pass;
                j["rv_pairs_fail"] = r.risometry.fail;
                j["rv_pairs_indeterminate"] = r.risometry.indeterminate;
                j["directions_checked"] = r.directions_checked;
                j["directions_mapped"] = r.directions_mapped;
                j["cone_transport_ok"] = r.cone_transport_ok;
                record(std::move(j), r.ok                                ? "pass"
                                     : r.risometry.indeterminate != 0    ? "indeterminate"
                                                                         : "violation");
            } else if (kw == "repro-example") {
                auto which = cur.ident();
                if (!which) throw ScriptError("'repro-example' needs cusp or surface3d");
                cur.expect(";");
                Report sub = run_script(repro_example_script(*which), opts);
                ordered_json j;
                j["kind"] = "repro-example";
                j["which"] = *which;
                j["commands"] = sub.commands;
                record(std::move(j), sub.any_violation        ? "violation"
                                     : sub.any_indeterminate ? "indeterminate"
                                                             : "pass");
            } else {
                throw ScriptError("unknown statement '" + kw + "'");
            }
        } catch (const ScriptError&) {
            throw; // malformed script: caller's problem, not a command result
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& ex) {
            ordered_json j;
            j["kind"] = kw;
            j["error"] = ex.what();
            record(std::move(j), "error");
            // commands execute after their arguments (and the ';') are fully
            // consumed, so the cursor already sits at the next statement
            if (opts.strict) break;
        }
        if (opts.strict && (rep.any_violation || rep.any_error)) break;
    }
    return rep;
}

/// Canned scripts reproducing the worked examples end-to-end.
inline std::string repro_example_script(const std::string& which) {
    if (which == "cusp")
        return "vars x, y;\n"
               "set C = y^2 - x^3 = 0;\n"
               "point O = (0, 0);\n"
               "cone-exact C p=O;\n"
               "cone C p=O y=(1, 0);\n"
               "cone C p=O y=(0, 1);\n"
               "cone C p=O y=(-1, 0);\n";
    if (which == "surface3d")
        return "vars x, y, z;\n"
               "set X = x^3 - y^2 - z^2 = 0;\n"
               "point O = (0, 0, 0);\n"
               "cone X p=O y=(1, 0, 0);\n"
               "cone X p=O y=(-1, 0, 0);\n"
               "cone X p=O y=(0, 1, 0);\n"
               "strat W {\n"
               "  S0: x = 0 && y = 0 && z = 0;\n"
               "  S1: 1 = 0;\n"
               "  S2: x^3 - y^2 - z^2 = 0 && !(x = 0 && y = 0 && z = 0);\n"
               "  S3: !(x^3 - y^2 - z^2 = 0);\n"
               "}\n"
               "induced-strata W p=O grid=4;\n"
               "strat T {\n"
               "  S0: x = 0 && y = 0 && z = 0;\n"
               "  S1: x > 0 && y = 0 && z = 0;\n"
               "  S2: x^3 - y^2 - z^2 = 0 && !(y = 0 && z = 0);\n"
               "  S3: !(x^3 - y^2 - z^2 = 0) && !(x > 0 && y = 0 && z = 0);\n"
               "}\n"
               "induced-strata T p=O grid=4;\n";
    throw ScriptError("unknown example '" + which + "' (expected cusp or surface3d)");
}

inline Report repro_example(const std::string& which, const ScriptOptions& opts = {}) {
    return run_script(repro_example_script(which), opts);
}

/// Serialize with a trailing newline; two-space indentation, stable key order.
inline void emit_json(const Report& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << rep.to_json().dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string report_text(const Report& rep) {
    std::ostringstream os;
    for (const auto& c : rep.commands) {
        os << c.value("kind", "?");
        if (c.contains("set")) os << " " << c["set"].get<std::string>();
        if (c.contains("strat")) os << " " << c["strat"].get<std::string>();
        if (c.contains("which")) os << " " << c["which"].get<std::string>();
        os << ": " << c.value("status", "?");
        if (c.contains("verdict"))
            os << " (" << c["verdict"].value("status", "?") << " via "
               << c["verdict"].value("engine", "?") << ")";
        if (c.contains("diagnostic")) os << "\n  " << c["diagnostic"].get<std::string>();
        if (c.contains("error")) os << "\n  " << c["error"].get<std::string>();
        os << "\n";
    }
    return os.str();
}

} // namespace tancone

#endif
