#include "doctest.h"

#include "tancone/parser.hpp"
#include "tancone/strat.hpp"

using namespace tancone;

namespace {

std::vector<Rational> rv(std::initializer_list<int> v) {
    return std::vector<Rational>(v.begin(), v.end());
}

// the worked 3d surface x^3 = y^2 + z^2 with its two stratifications
SemialgebraicSet surface() { return parse_set("vars x, y, z; x^3 - y^2 - z^2 = 0"); }

Stratification first_stratification() {
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 3;
    S.strata.push_back(parse_set("vars x, y, z; x = 0 && y = 0 && z = 0", &vt));
    S.strata.push_back(parse_set("vars x, y, z; 1 = 0", &vt));
    S.strata.push_back(
        parse_set("vars x, y, z; x^3 - y^2 - z^2 = 0 && !(x = 0 && y = 0 && z = 0)", &vt));
    S.strata.push_back(parse_set("vars x, y, z; !(x^3 - y^2 - z^2 = 0)", &vt));
    return S;
}

Stratification second_stratification() {
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 3;
    S.strata.push_back(parse_set("vars x, y, z; x = 0 && y = 0 && z = 0", &vt));
    S.strata.push_back(parse_set("vars x, y, z; x > 0 && y = 0 && z = 0", &vt));
    S.strata.push_back(parse_set(
        "vars x, y, z; x^3 - y^2 - z^2 = 0 && !(y = 0 && z = 0)", &vt));
    S.strata.push_back(parse_set(
        "vars x, y, z; !(x^3 - y^2 - z^2 = 0) && !(x > 0 && y = 0 && z = 0)", &vt));
    return S;
}

} // namespace

TEST_CASE("prefix unions") {
    auto S = first_stratification();
    CHECK(S.prefix(0).formula == S.strata[0].formula);
    auto pre2 = S.prefix(2);
    // the surface and the origin both satisfy the prefix at level 2
    CHECK(eval_real(pre2, rv({0, 0, 0})));
    CHECK(eval_real(pre2, rv({1, 1, 0})));
    CHECK(!eval_real(pre2, rv({2, 1, 1})));
}

TEST_CASE("induced cone strata: first stratification of the surface") {
    auto S = first_stratification();
    EngineConfig cfg;
    cfg.seed = 21;
    auto ics = induced_cone_strata(S, rv({0, 0, 0}), cfg);

    // C_{0,2} = positive x-axis, C_{0,3} = everything else (as directions)
    CHECK(ics.classify(rv({1, 0, 0})) == 2);
    CHECK(ics.classify(rv({-1, 0, 0})) == 3);
    CHECK(ics.classify(rv({0, 1, 0})) == 3);
    CHECK(ics.classify(rv({1, 1, 1})) == 3);

    auto scan = induced_strata_scan(ics, 4);
    CHECK(scan.indeterminate == 0);
    CHECK(scan.counts[0] == 0); // apex direction never on the grid
    CHECK(scan.counts[1] == 0);
    CHECK(scan.counts[2] == 1);
    CHECK(scan.counts[2] + scan.counts[3] == (int)scan.directions.size());

    // exact description of the prefix at level 0: the origin (linear equalities)
    auto d0 = ics.exact_prefix_description(0);
    REQUIRE(d0.has_value());
    CHECK(eval_real(*d0, rv({0, 0, 0})));
    CHECK(!eval_real(*d0, rv({1, 0, 0})));
    CHECK(!ics.exact_prefix_description(2).has_value()); // cubic: no linear closure
}

TEST_CASE("induced cone strata: second stratification moves the axis to index 1") {
    auto S = second_stratification();
    EngineConfig cfg;
    cfg.seed = 22;
    auto ics = induced_cone_strata(S, rv({0, 0, 0}), cfg);
    CHECK(ics.classify(rv({1, 0, 0})) == 1);
    CHECK(ics.classify(rv({-1, 0, 0})) == 3);
    CHECK(ics.classify(rv({0, 0, 1})) == 3);

    auto scan = induced_strata_scan(ics, 4);
    CHECK(scan.counts[1] == 1);
    CHECK(scan.counts[2] == 0); // C_{0,2} is empty
    CHECK(scan.indeterminate == 0);

    // closure of the half-line prefix: x >= 0 on the axis
    auto d1 = ics.exact_prefix_description(1);
    REQUIRE(d1.has_value());
    CHECK(eval_real(*d1, rv({1, 0, 0})));
    CHECK(eval_real(*d1, rv({0, 0, 0})));
    CHECK(!eval_real(*d1, rv({-1, 0, 0})));
}

TEST_CASE("full space as the last stratum") {
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 2;
    S.strata.push_back(parse_set("vars x, y; 1 = 0", &vt));
    S.strata.push_back(parse_set("vars x, y; 1 = 0", &vt));
    S.strata.push_back(parse_set("vars x, y; 0 = 0", &vt));
    EngineConfig cfg;
    auto ics = induced_cone_strata(S, rv({0, 0}), cfg);
    for (auto y : {rv({1, 0}), rv({0, -1}), rv({3, 2})}) CHECK(ics.classify(y) == 2);
}

TEST_CASE("dimension condition check on the first stratification") {
    auto S = first_stratification();
    auto rep = dimension_condition_check(S, rv({0, 0, 0}), 17);
    REQUIRE(rep.entries.size() == 4);
    CHECK(rep.all_bounds_hold);
    CHECK(rep.entries[0].prefix_dim == 0);
    CHECK(rep.entries[1].prefix_dim == 0);
    CHECK(rep.entries[2].prefix_dim == 2);
    CHECK(rep.entries[3].prefix_dim == 3);
}

TEST_CASE("dimension violation flagged for a mislabeled line") {
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 2;
    S.strata.push_back(parse_set("vars x, y; y = 0", &vt)); // a line declared as index 0
    S.strata.push_back(parse_set("vars x, y; !(y = 0)", &vt));
    auto rep = dimension_condition_check(S, rv({0, 0}), 17);
    CHECK(!rep.all_bounds_hold);
    CHECK(!rep.entries[0].bound_holds);
}

TEST_CASE("induced stratum dimension estimates") {
    auto S = first_stratification();
    EngineConfig cfg;
    cfg.seed = 23;
    auto ics = induced_cone_strata(S, rv({0, 0, 0}), cfg);
    CHECK(induced_stratum_dimension(ics, 2, 4) == 1); // the positive x-axis
    CHECK(induced_stratum_dimension(ics, 3, 4) == 3); // full-dimensional remainder
}

TEST_CASE("structural whitney failure on the first stratification's induced strata") {
    auto S = first_stratification();
    EngineConfig cfg;
    cfg.seed = 24;
    auto ics = induced_cone_strata(S, rv({0, 0, 0}), cfg);
    auto rep = induced_whitney_structural_check(ics, 4);
    CHECK(rep.structural_failure);
    CHECK(rep.verdict == "violation");
    CHECK(rep.diagnostic.find("index 2") != std::string::npos);
    CHECK(rep.diagnostic.find("dimension 1") != std::string::npos);

    auto S2 = second_stratification();
    auto ics2 = induced_cone_strata(S2, rv({0, 0, 0}), cfg);
    auto rep2 = induced_whitney_structural_check(ics2, 4);
    CHECK(!rep2.structural_failure);
}

TEST_CASE("tangent spaces") {
    auto X = surface();
    auto basis = tangent_space(X, {1.0, 1.0, 0.0});
    REQUIRE(basis.size() == 2);
    // plane orthogonal to the gradient (3, -2, 0)
    for (const auto& b : basis) CHECK(std::abs(3 * b[0] - 2 * b[1]) < 1e-8);

    auto circ = parse_set("vars x, y; x^2 + y^2 - 1 = 0");
    auto cb = tangent_space(circ, {1.0, 0.0});
    REQUIRE(cb.size() == 1);
    CHECK(std::abs(cb[0][0]) < 1e-9);
    CHECK(std::abs(std::abs(cb[0][1]) - 1.0) < 1e-9);

    auto cusp = parse_set("vars x, y; y^2 - x^3 = 0");
    CHECK_THROWS_WITH_AS(tangent_space(cusp, {0.0, 0.0}), "singular sample", std::runtime_error);

    auto open_set = parse_set("vars x, y; x > 0");
    CHECK(tangent_space(open_set, {1.0, 0.0}).size() == 2);
}

TEST_CASE("whitney check on the surface pairs") {
    auto S = second_stratification();
    std::vector<std::pair<int, int>> pairs = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        for (auto [i, j] : pairs) {
            auto rep = whitney_check(S, i, j, rv({0, 0, 0}), seed);
            CHECK(rep.verdict == "no violation found");
            if (!rep.vacuous) {
                CHECK(rep.max_defect_a < 1e-3);
                CHECK(rep.max_defect_b < 1e-3);
            }
        }
    }
}

TEST_CASE("whitney check flags a genuine condition-(a) violation") {
    // pair (x-axis, double cone z^2 = x^2 + y^2): along any sequence to the
    // origin the limit tangent plane has normal (x, y, -z) with x generically
    // nonzero, so it cannot contain the x-axis
    VariableTable vt;
    Stratification S;
    S.ambient_dim = 3;
    S.strata.push_back(parse_set("vars x, y, z; y = 0 && z = 0", &vt));
    S.strata.push_back(
        parse_set("vars x, y, z; z^2 - x^2 - y^2 = 0 && !(x = 0 && y = 0 && z = 0)", &vt));
    int violations = 0;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        auto rep = whitney_check(S, 0, 1, rv({0, 0, 0}), seed);
        if (rep.verdict == "violation") {
            ++violations;
            CHECK(rep.max_defect_a > 1e-3);
        }
    }
    CHECK(violations >= 2);
}

TEST_CASE("lift limit map") {
    VariableTable vt;
    auto X = parse_set("vars x, y; y = 0", &vt);
    auto Y = parse_set("vars x, y; y - x^2 = 0", &vt);
    // phi(x, y) = (x, y + x^2)
    std::vector<Polynomial> phi = {Polynomial::variable(2, 0),
                                   Polynomial::variable(2, 1) +
                                       Polynomial::variable(2, 0) * Polynomial::variable(2, 0)};
    auto psi = lift_limit_map(phi);
    CHECK(psi[0] == Polynomial::variable(2, 0));
    CHECK(psi[1] == Polynomial::variable(2, 1));

    // constant term: rejected
    std::vector<Polynomial> bad = {Polynomial::variable(2, 0) + Polynomial::constant(2, 1),
                                   Polynomial::variable(2, 1)};
    CHECK_THROWS_AS(lift_limit_map(bad), std::domain_error);
}

TEST_CASE("cone risometry lift report") {
    VariableTable vt;
    auto X = parse_set("vars x, y; y = 0", &vt);
    auto Y = parse_set("vars x, y; y - x^2 = 0", &vt);
    std::vector<Polynomial> phi = {Polynomial::variable(2, 0),
                                   Polynomial::variable(2, 1) +
                                       Polynomial::variable(2, 0) * Polynomial::variable(2, 0)};
    EngineConfig cfg;
    cfg.seed = 31;
    std::vector<std::vector<Rational>> dirs = {rv({1, 0}), rv({-1, 0}), rv({2, 0})};
    auto rep = cone_risometry_lift(phi, X, Y, dirs, cfg);
    CHECK(rep.ok);
    CHECK(rep.risometry.all_pass());
    CHECK(rep.directions_checked == 3);
    CHECK(rep.directions_mapped == 3);
    // psi fixes 0
    for (const auto& f : rep.psi) CHECK(f.eval(rv({0, 0})) == 0);
}

TEST_CASE("equal cones check and its contrapositive") {
    VariableTable vt;
    auto line = parse_set("vars x, y; y = 0", &vt);
    auto par = parse_set("vars x, y; y - x^2 = 0", &vt);
    auto cusp = parse_set("vars x, y; y^2 - x^3 = 0", &vt);
    EngineConfig cfg;
    cfg.seed = 33;

    auto same = risometry_implies_equal_cones_check(line, par, rv({0, 0}), 4, cfg);
    CHECK(same.agree);
    CHECK(same.counterexamples.empty());

    auto ident = risometry_implies_equal_cones_check(cusp, cusp, rv({0, 0}), 4, cfg);
    CHECK(ident.agree);

    auto differ = risometry_implies_equal_cones_check(cusp, line, rv({0, 0}), 4, cfg);
    CHECK(!differ.agree);
    bool neg_x = false;
    for (const auto& y : differ.counterexamples)
        if (y == rv({-1, 0})) neg_x = true;
    CHECK(neg_x);
}
