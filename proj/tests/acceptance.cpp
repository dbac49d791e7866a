// Acceptance gate: one line per criterion, exit nonzero when any fails.

#include "tancone/sampling.hpp"
#include "tancone/script.hpp"
#include "tancone/strat.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace tancone;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void line(int id, const char* title, bool pass, double secs, const std::string& detail = "") {
    ++failures, failures -= pass;
    std::printf("%s  criterion %2d  %-38s  %6.2fs%s%s\n", pass ? "PASS" : "FAIL", id, title, secs,
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
}

std::vector<Rational> rv(std::initializer_list<int> v) {
    return std::vector<Rational>(v.begin(), v.end());
}

bool is_dir(const std::vector<Rational>& y, std::initializer_list<int> want) {
    return y == rv(want);
}

// 1. cusp: exact one-ray cone, certified puiseux verdicts, pinned witness
void criterion1() {
    Timer t;
    VariableTable vt;
    auto C = parse_set("vars x, y; y^2 - x^3 = 0", &vt);
    RaySet rs = plane_curve_cone(C.formula.atom.poly, rv({0, 0}));
    bool ok = rs.rays.size() == 1 && !rs.rays[0].vertical && rs.rays[0].slope.is_rational &&
              rs.rays[0].slope.value == 0 && rs.rays[0].plus && !rs.rays[0].minus &&
              rs.dropped_indeterminate == 0;

    EngineConfig cfg;
    auto v1 = cone_membership_puiseux(ConeQuery{C, rv({0, 0}), rv({1, 0})}, cfg);
    ok = ok && v1.status == ConeStatus::Supported && v1.certified && v1.curve &&
         print_point(*v1.curve) == "(t, t^(3/2))";
    for (auto y : {rv({-1, 0}), rv({0, 1})}) {
        auto v = cone_membership_puiseux(ConeQuery{C, rv({0, 0}), y}, cfg);
        ok = ok && v.status == ConeStatus::Unsupported && v.certified;
    }
    line(1, "cusp cone, exact + certified", ok && t.seconds() < 1.0, t.seconds());
}

// 2. surface scan at resolution 16: engines agree, exactly +x supported
void criterion2() {
    Timer t;
    auto X = parse_set("vars x, y, z; x^3 - y^2 - z^2 = 0");
    EngineConfig cfg;
    auto res = cone_scan(X, rv({0, 0, 0}), 16, {"numeric", "puiseux"}, cfg);
    bool ok = res.conflicts == 0 && res.indeterminate == 0 && res.supported == 1;
    for (const auto& c : res.cells) {
        bool agree = true;
        const ConeVerdict* first = nullptr;
        for (const auto& [name, v] : c.verdicts) {
            if (!first) first = &v;
            else if (v.status != first->status) agree = false;
        }
        ok = ok && agree;
        if (c.consensus == ConeStatus::Supported) ok = ok && is_dir(c.y, {1, 0, 0});
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "%zu cells", res.cells.size());
    line(2, "surface scan res 16, engines agree", ok && t.seconds() < 30.0, t.seconds(), detail);
}

Stratification surface_strat(bool whitney_convention) {
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 3;
    if (whitney_convention) {
        S.strata.push_back(parse_set("vars x, y, z; x = 0 && y = 0 && z = 0", &vt));
        S.strata.push_back(parse_set("vars x, y, z; 1 = 0", &vt));
        S.strata.push_back(
            parse_set("vars x, y, z; x^3 - y^2 - z^2 = 0 && !(x = 0 && y = 0 && z = 0)", &vt));
        S.strata.push_back(parse_set("vars x, y, z; !(x^3 - y^2 - z^2 = 0)", &vt));
    } else {
        S.strata.push_back(parse_set("vars x, y, z; x = 0 && y = 0 && z = 0", &vt));
        S.strata.push_back(parse_set("vars x, y, z; x > 0 && y = 0 && z = 0", &vt));
        S.strata.push_back(
            parse_set("vars x, y, z; x^3 - y^2 - z^2 = 0 && !(y = 0 && z = 0)", &vt));
        S.strata.push_back(parse_set(
            "vars x, y, z; !(x^3 - y^2 - z^2 = 0) && !(x > 0 && y = 0 && z = 0)", &vt));
    }
    return S;
}

// 3. induced strata of the first stratification + structural diagnostic
void criterion3() {
    Timer t;
    EngineConfig cfg;
    auto ics = induced_cone_strata(surface_strat(true), rv({0, 0, 0}), cfg);
    const InducedScan& scan = induced_strata_scan(ics, 2); // 26 directions
    bool ok = scan.indeterminate == 0;
    for (size_t k = 0; k < scan.directions.size(); ++k) {
        int want = is_dir(scan.directions[k], {1, 0, 0}) ? 2 : 3;
        ok = ok && scan.stratum_of[k] == want;
    }
    WhitneyReport st = induced_whitney_structural_check(ics, 4);
    ok = ok && st.structural_failure &&
         st.diagnostic.find("index 2") != std::string::npos &&
         st.diagnostic.find("dimension 1") != std::string::npos;
    line(3, "induced strata #1 + impossibility", ok && t.seconds() < 30.0, t.seconds());
}

// 4. second stratification: C_{0,1} = +x ray, C_{0,2} empty, whitney clean
void criterion4() {
    Timer t;
    EngineConfig cfg;
    auto S = surface_strat(false);
    auto ics = induced_cone_strata(S, rv({0, 0, 0}), cfg);
    const InducedScan& scan = induced_strata_scan(ics, 2);
    bool ok = scan.indeterminate == 0 && scan.counts[2] == 0;
    for (size_t k = 0; k < scan.directions.size(); ++k) {
        int want = is_dir(scan.directions[k], {1, 0, 0}) ? 1 : 3;
        ok = ok && scan.stratum_of[k] == want;
    }
    double worst = 0;
    for (int i = 0; i < 4 && ok; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (uint64_t seed : {11ull, 12ull, 13ull}) {
                auto rep = whitney_check(S, i, j, rv({0, 0, 0}), seed);
                ok = ok && rep.verdict == "no violation found";
                worst = std::max({worst, rep.max_defect_a, rep.max_defect_b});
            }
    char detail[64];
    std::snprintf(detail, sizeof detail, "max defect %.1e", worst);
    line(4, "induced strata #2 + whitney clean", ok && worst < 1e-3 && t.seconds() < 60.0,
         t.seconds(), detail);
}

// 5. cone calculus on random inequality pairs: monotone under union,
//    union exact, intersection contained
void criterion5() {
    Timer t;
    Rng rng(20260826);
    EngineConfig cfg;
    auto engines = default_engines();
    int violations = 0, checked = 0;

    auto random_halfset = [&](VariableTable& vt) {
        std::string names[2] = {"x", "y"};
        std::ostringstream os;
        bool some = false;
        for (int dx = 0; dx <= 3; ++dx)
            for (int dy = 0; dx + dy <= 3; ++dy) {
                if (dx == 0 && dy == 0) continue; // boundary through the origin
                long c = (long)(rng.next() % 7) - 3;
                if (c == 0 || rng.next() % 3) continue;
                if (some) os << " + ";
                os << c;
                if (dx) os << "*x^" << dx;
                if (dy) os << "*y^" << dy;
                some = true;
            }
        if (!some) os << "x";
        os << (rng.next() % 2 ? " >= 0" : " > 0");
        return parse_set("vars x, y; " + os.str(), &vt);
    };

    auto p0 = rv({0, 0});
    for (int it = 0; it < 50; ++it) {
        VariableTable vt;
        auto X = random_halfset(vt);
        auto Y = random_halfset(vt);
        SemialgebraicSet U{Formula::make_or({X.formula, Y.formula}), 2, X.var_names};
        SemialgebraicSet I{Formula::make_and({X.formula, Y.formula}), 2, X.var_names};
        auto sx = cone_scan(X, p0, 2, engines, cfg);
        auto sy = cone_scan(Y, p0, 2, engines, cfg);
        auto su = cone_scan(U, p0, 2, engines, cfg);
        auto si = cone_scan(I, p0, 2, engines, cfg);
        for (size_t k = 0; k < sx.cells.size(); ++k) {
            ConeStatus a = sx.cells[k].consensus, b = sy.cells[k].consensus;
            ConeStatus u = su.cells[k].consensus, i = si.cells[k].consensus;
            auto det = [](ConeStatus s) { return s != ConeStatus::Indeterminate; };
            // monotonicity: X subset of U implies cone(X) subset of cone(U)
            if (det(a) && det(u)) {
                ++checked;
                if (a == ConeStatus::Supported && u != ConeStatus::Supported) ++violations;
            }
            // union equality
            if (det(a) && det(b) && det(u)) {
                ++checked;
                bool lhs = u == ConeStatus::Supported;
                bool rhs = a == ConeStatus::Supported || b == ConeStatus::Supported;
                if (lhs != rhs) ++violations;
            }
            // intersection containment
            if (det(a) && det(b) && det(i)) {
                ++checked;
                if (i == ConeStatus::Supported &&
                    (a != ConeStatus::Supported || b != ConeStatus::Supported))
                    ++violations;
            }
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "%d checks, %d violations", checked, violations);
    line(5, "cone calculus on 50 random pairs", violations == 0 && checked > 500 &&
         t.seconds() < 120.0, t.seconds(), detail);
}

// 6. numeric engine vs exact branch analysis on the plane-curve corpus
void criterion6() {
    Timer t;
    const char* corpus[] = {"y^2 - x^3 = 0", "y^2 - x^2 - x^3 = 0", "y - x^2 = 0",
                            "y^2 - x^4 = 0"};
    EngineConfig cfg;
    bool ok = true;
    int total_disagreements = 0;
    std::string flagged;
    for (const char* text : corpus) {
        auto X = parse_set(std::string("vars x, y; ") + text);
        RaySet rs = plane_curve_cone(X.formula.atom.poly, rv({0, 0}));
        auto pool = build_numeric_pool(X, rv({0, 0}), cfg);
        int disagreements = 0;
        for (const auto& y : grid_directions(2, 8)) {
            auto num = cone_membership_numeric(ConeQuery{X, rv({0, 0}), y}, cfg, &pool);
            ConeStatus exact = rayset_contains(rs, y);
            if (exact == ConeStatus::Indeterminate) continue;
            if (num.status != exact) {
                ++disagreements;
                flagged += " [" + std::string(text) + " @ (" + rat_str(y[0]) + "," +
                           rat_str(y[1]) + ")]";
            }
        }
        total_disagreements += disagreements;
        ok = ok && disagreements <= 2;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d flagged%s", total_disagreements,
                  flagged.substr(0, 60).c_str());
    line(6, "numeric vs exact on curve corpus", ok && t.seconds() < 120.0, t.seconds(), detail);
}

// 7. valued-field axioms on random truncated series
void criterion7() {
    Timer t;
    Rng rng(0xAC5);
    int fails = 0;
    auto random_series = [&]() {
        PuiseuxSeries s = PuiseuxSeries::zero();
        int terms = 1 + (int)(rng.next() % 3);
        for (int k = 0; k < terms; ++k) {
            Rational c((long)(rng.next() % 9) - 4, 1 + (long)(rng.next() % 3));
            Rational e((long)(rng.next() % 12), 1 + (long)(rng.next() % 3));
            if (c != 0) s = ps_add(s, PuiseuxSeries::term(c, e));
        }
        return s;
    };
    for (int it = 0; it < 100000; ++it) {
        PuiseuxSeries a = random_series(), b = random_series();
        ValuationValue va = valuation(a), vb = valuation(b);
        // v(ab) = v(a) + v(b)
        ValuationValue vab = valuation(ps_mul(a, b));
        if (va.infinite || vb.infinite) {
            if (!vab.infinite) ++fails;
        } else if (vab.infinite || vab.value != va.value + vb.value) {
            ++fails;
        }
        // ultrametric: v(a+b) >= min(v(a), v(b)), equality when v(a) != v(b)
        ValuationValue vs = valuation(ps_add(a, b));
        if (!va.infinite || !vb.infinite) {
            Rational m = va.infinite ? vb.value : vb.infinite ? va.value : rat_min(va.value, vb.value);
            if (!vs.infinite && vs.value < m) ++fails;
            if (!(va == vb) && (vs.infinite || vs.value != m)) ++fails;
        }
        // rvhat(x) = rvhat(y) iff vhat(x - y) > vhat(x), or x = y = 0
        PuiseuxPoint x{{a, random_series()}}, y{{b, random_series()}};
        RvClass rx = rvhat(x), ry = rvhat(y);
        ValuationValue vx = vhat(x), vd = vhat(pp_sub(x, y));
        bool same = rx == ry;
        bool high;
        if (vx.infinite) high = vd.infinite; // x = 0: same class iff y = 0
        else high = vd.infinite || vd.value > vx.value;
        if (same != high) ++fails;
    }
    char detail[48];
    std::snprintf(detail, sizeof detail, "%d failures / 300k checks", fails);
    line(7, "valued-field axioms", fails == 0 && t.seconds() < 30.0, t.seconds(), detail);
}

// 8. lift demo: psi = identity, risometry on 1000 pairs, cone transported
void criterion8() {
    Timer t;
    VariableTable vt;
    auto X = parse_set("vars x, y; y = 0", &vt);
    auto Y = parse_set("vars x, y; y - x^2 = 0", &vt);
    std::vector<Polynomial> phi = {parse_polynomial("x", vt), parse_polynomial("y + x^2", vt)};
    EngineConfig cfg;
    auto rep = cone_risometry_lift(phi, X, Y, grid_directions(2, 4), cfg, 1000);
    bool identity = rep.psi.size() == 2 && print_polynomial(rep.psi[0], vt.names) == "x" &&
                    print_polynomial(rep.psi[1], vt.names) == "y";
    bool ok = rep.ok && identity && rep.risometry.pass >= 1000 && rep.risometry.fail == 0 &&
              rep.risometry.indeterminate == 0 && rep.cone_transport_ok &&
              rep.directions_checked == 2 && rep.directions_mapped == 2;
    char detail[48];
    std::snprintf(detail, sizeof detail, "%d rv pairs", rep.risometry.pass);
    line(8, "lift demo, psi = identity", ok && t.seconds() < 10.0, t.seconds(), detail);
}

// 9. unequal cones refute a risometry between the cusp and the line
void criterion9() {
    Timer t;
    VariableTable vt;
    auto C = parse_set("vars x, y; y^2 - x^3 = 0", &vt);
    auto L = parse_set("vars x, y; y = 0", &vt);
    EngineConfig cfg;
    auto rep = risometry_implies_equal_cones_check(C, L, rv({0, 0}), 4, cfg);
    bool found = false;
    for (const auto& y : rep.counterexamples)
        if (is_dir(y, {-1, 0})) found = true;
    line(9, "equal-cones contrapositive", !rep.agree && found && t.seconds() < 5.0, t.seconds());
}

// 10. byte-identical JSON across repeated runs of the acceptance scripts
void criterion10() {
    Timer t;
    ScriptOptions opts;
    opts.cfg.seed = 7;
    std::string numeric_script = "vars x, y;\n"
                                 "set C = y^2 - x^3 = 0;\n"
                                 "cone C p=(0,0) y=(1,0) engine=numeric;\n"
                                 "cone-scan C p=(0,0) grid=8;\n"
                                 "risometry C C p=(0,0) grid=4;\n";
    bool ok = run_script(numeric_script, opts).to_json().dump(2) ==
              run_script(numeric_script, opts).to_json().dump(2);
    ok = ok && repro_example("cusp", opts).to_json().dump(2) ==
                   repro_example("cusp", opts).to_json().dump(2);
    line(10, "deterministic JSON reports", ok, t.seconds());
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%s (%d/10)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                10 - failures);
    return failures == 0 ? 0 : 1;
}
