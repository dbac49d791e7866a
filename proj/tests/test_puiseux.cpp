#include "doctest.h"

#include "tancone/parser.hpp"
#include "tancone/puiseux.hpp"

#include <random>

using namespace tancone;

namespace {

PuiseuxSeries random_series(std::mt19937_64& rng, bool allow_zero = true) {
    std::uniform_int_distribution<int> nterms(allow_zero ? 0 : 1, 4);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> num(-4, 8);
    std::uniform_int_distribution<int> den(1, 4);
    std::vector<std::pair<Rational, Rational>> ts;
    int k = nterms(rng);
    for (int i = 0; i < k; ++i) {
        int c = coeff(rng);
        if (c == 0) c = 1;
        ts.push_back({Rational(num(rng), den(rng)), Rational(c)});
    }
    return PuiseuxSeries::from_terms(std::move(ts), Trunc::exact());
}

} // namespace

TEST_CASE("series arithmetic examples") {
    PuiseuxSeries t = PuiseuxSeries::t();
    CHECK(ps_add(t, ps_scale(-1, t)).is_exact_zero());
    PuiseuxSeries half = PuiseuxSeries::term(1, Rational(1, 2));
    CHECK(ps_mul(half, half) == t);
    CHECK(ps_div(ps_mul(t, t), t) == t);
    CHECK_THROWS_AS(ps_div(t, PuiseuxSeries::zero(Trunc::at(5))), TruncationError);
}

TEST_CASE("valuation") {
    PuiseuxSeries a = parse_series("3*t^(1/2) + t");
    CHECK(valuation(a) == ValuationValue::finite(Rational(1, 2)));
    CHECK(valuation(PuiseuxSeries::zero()).infinite);
    CHECK(valuation(PuiseuxSeries::zero()).certain);
    CHECK_FALSE(valuation(PuiseuxSeries::zero(Trunc::at(8))).certain);
    PuiseuxSeries t = PuiseuxSeries::t();
    PuiseuxSeries b = parse_series("2*t^3");
    CHECK(valuation(ps_mul(t, b)) == ValuationValue::finite(4));
}

TEST_CASE("vhat") {
    PuiseuxPoint p{{parse_series("t"), parse_series("t^2")}};
    CHECK(vhat(p) == ValuationValue::finite(1));
    PuiseuxPoint q{{PuiseuxSeries::zero(), parse_series("t^(3/2)")}};
    CHECK(vhat(q) == ValuationValue::finite(Rational(3, 2)));
    PuiseuxPoint z{{PuiseuxSeries::zero(), PuiseuxSeries::zero()}};
    CHECK(vhat(z).infinite);
}

TEST_CASE("residue") {
    CHECK(residue(parse_series("2 + t")) == 2);
    CHECK(residue(parse_series("t^(1/2)")) == 0);
    CHECK_THROWS_AS(residue(parse_series("t^(-1)")), std::domain_error);
}

TEST_CASE("rvhat") {
    PuiseuxPoint p{{parse_series("t"), parse_series("t^2")}};
    RvClass c = rvhat(p);
    CHECK(c.gamma == ValuationValue::finite(1));
    CHECK(c.leading_residue == std::vector<Rational>{1, 0});
    PuiseuxPoint q{{parse_series("t + t^3"), parse_series("t^2 - t^4")}};
    CHECK(rvhat(q) == c);
    PuiseuxPoint z{{PuiseuxSeries::zero(), PuiseuxSeries::zero()}};
    CHECK(rvhat(z).gamma.infinite);
    PuiseuxPoint hidden{{PuiseuxSeries::zero(Trunc::at(2)), PuiseuxSeries::zero(Trunc::at(2))}};
    CHECK_THROWS_AS(rvhat(hidden), TruncationError);
}

TEST_CASE("direction") {
    PuiseuxPoint p{{parse_series("t"), parse_series("t^2")}};
    CHECK(direction(p) == Direction::canonical({1, 0}));
    PuiseuxPoint q{{parse_series("2*t"), parse_series("3*t")}};
    CHECK(direction(q) == Direction::canonical({1, Rational(3, 2)}));
    PuiseuxPoint r{{parse_series("t^2"), parse_series("5*t^2")}};
    CHECK(direction(r) == Direction::canonical({1, 5}));
}

TEST_CASE("ball membership") {
    PuiseuxPoint zero{{PuiseuxSeries::zero(), PuiseuxSeries::zero()}};
    Ball b{zero, 0, true};
    CHECK(ball_contains(b, PuiseuxPoint{{parse_series("t"), parse_series("t^2")}}) == Trool::True);
    CHECK(ball_contains(b, PuiseuxPoint{{parse_series("1 + t"), PuiseuxSeries::zero()}}) == Trool::False);
    Ball c{zero, 1, false};
    CHECK(ball_contains(c, PuiseuxPoint{{parse_series("t"), parse_series("t")}}) == Trool::True);
}

TEST_CASE("ps_limit") {
    PuiseuxPoint p{{parse_series("t"), parse_series("1 + t^2")}};
    CHECK(ps_limit(p) == std::vector<Rational>{0, 1});
    PuiseuxPoint q{{parse_series("t^(1/2)"), parse_series("t^(3/2)")}};
    CHECK(ps_limit(q) == std::vector<Rational>{0, 0});
    PuiseuxPoint bad{{parse_series("t^(-1)"), PuiseuxSeries::zero()}};
    CHECK_THROWS_AS(ps_limit(bad), std::domain_error);
}

TEST_CASE("valuation homomorphism and ultrametric, randomized") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 500; ++it) {
        PuiseuxSeries a = random_series(rng), b = random_series(rng);
        ValuationValue va = valuation(a), vb = valuation(b);
        ValuationValue vab = valuation(ps_mul(a, b));
        if (va.infinite || vb.infinite) {
            CHECK(vab.infinite);
        } else {
            CHECK(vab == ValuationValue::finite(va.value + vb.value));
        }
        ValuationValue vs = valuation(ps_add(a, b));
        if (!va.infinite && !vb.infinite) {
            Rational m = rat_min(va.value, vb.value);
            if (!vs.infinite) CHECK(vs.value >= m);
            if (va.value != vb.value) CHECK(vs == ValuationValue::finite(m));
        }
    }
}

TEST_CASE("rvhat equivalence characterization, randomized") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 300; ++it) {
        PuiseuxPoint x{{random_series(rng), random_series(rng)}};
        PuiseuxPoint y{{random_series(rng), random_series(rng)}};
        RvClass rx = rvhat(x), ry = rvhat(y);
        ValuationValue vx = vhat(x);
        ValuationValue vd = vhat(pp_sub(x, y));
        bool both_zero = vx.infinite && vhat(y).infinite;
        bool vgt = vd.infinite || (!vx.infinite && vd.value > vx.value);
        CHECK((rx == ry) == (both_zero || vgt));
    }
}

TEST_CASE("direction invariances") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 100; ++it) {
        PuiseuxSeries a = random_series(rng, false);
        PuiseuxSeries b = random_series(rng);
        if (a.no_visible_terms()) continue; // coincident exponents may cancel
        PuiseuxPoint x{{a, b}};
        // unit with positive leading coefficient at valuation 0
        PuiseuxSeries u = ps_add(PuiseuxSeries::constant(2), ps_shift(random_series(rng), 9));
        PuiseuxPoint ux{{ps_mul(u, a), ps_mul(u, b)}};
        CHECK(direction(ux) == direction(x));
        PuiseuxPoint nx{{ps_scale(-3, a), ps_scale(-3, b)}};
        CHECK(direction(nx) == direction(x)); // subspace semantics
    }
}

TEST_CASE("ps_limit commutes with addition") {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 100; ++it) {
        PuiseuxSeries a = random_series(rng), b = random_series(rng);
        bool bounded = (a.no_visible_terms() || a.leading_exponent() >= 0) &&
                       (b.no_visible_terms() || b.leading_exponent() >= 0);
        if (!bounded) continue;
        CHECK(residue(ps_add(a, b)) == residue(a) + residue(b));
    }
}

TEST_CASE("risometry_check") {
    std::vector<std::pair<PuiseuxPoint, PuiseuxPoint>> pairs;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto mk = [&]() {
            // points in B(0,>0): shift every exponent strictly above 0
            PuiseuxSeries a = ps_shift(random_series(rng), 5);
            PuiseuxSeries b = ps_shift(random_series(rng), 5);
            return PuiseuxPoint{{a, b}};
        };
        pairs.push_back({mk(), mk()});
    }
    // identity passes
    std::vector<Polynomial> id{Polynomial::variable(2, 0), Polynomial::variable(2, 1)};
    CHECK(risometry_check(PointMap(id), pairs).all_pass());

    // (x, y + x^2) on B(0,>0)^2 passes
    Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    std::vector<Polynomial> shear{x, y + x * x};
    CHECK(risometry_check(PointMap(shear), pairs).all_pass());

    // coordinate swap fails on ((t,0),(0,0))
    std::vector<Polynomial> swap{y, x};
    std::vector<std::pair<PuiseuxPoint, PuiseuxPoint>> one{
        {PuiseuxPoint{{parse_series("t"), PuiseuxSeries::zero()}},
         PuiseuxPoint{{PuiseuxSeries::zero(), PuiseuxSeries::zero()}}}};
    RisometryReport rep = risometry_check(PointMap(swap), one);
    CHECK(rep.fail == 1);
}

TEST_CASE("isometry implied on passing samples") {
    std::mt19937_64 rng(13);
    std::vector<std::pair<PuiseuxPoint, PuiseuxPoint>> pairs;
    for (int i = 0; i < 30; ++i) {
        PuiseuxSeries a = ps_shift(random_series(rng), 5);
        PuiseuxSeries b = ps_shift(random_series(rng), 5);
        PuiseuxSeries c = ps_shift(random_series(rng), 5);
        PuiseuxSeries d = ps_shift(random_series(rng), 5);
        pairs.push_back({PuiseuxPoint{{a, b}}, PuiseuxPoint{{c, d}}});
    }
    Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    std::vector<Polynomial> shear{x, y + x * x};
    RisometryReport rep = risometry_check(PointMap(shear), pairs);
    CHECK(rep.all_pass());
    CHECK(rep.isometry_fail == 0);
}

TEST_CASE("series literal round trip") {
    for (const char* s : {"3*t^(1/2) + t - 2*t^(5/2)", "1 + t", "t^(-1)", "0"}) {
        PuiseuxSeries a = parse_series(s);
        CHECK(parse_series(print_series(a)) == a);
    }
    PuiseuxSeries tr = parse_series("t + O(t^8)");
    CHECK(tr.trunc().finite);
    CHECK(tr.trunc().order == 8);
    CHECK(parse_series(print_series(tr)) == tr);
}

TEST_CASE("division bookkeeping") {
    // (1+t) / (1-t) = 1 + 2t + 2t^2 + ... truncated at the default order
    PuiseuxSeries q = ps_div(parse_series("1 + t"), parse_series("1 - t"));
    CHECK(q.trunc().finite);
    CHECK(q.coefficient(0) == 1);
    CHECK(q.coefficient(1) == 2);
    CHECK(q.coefficient(2) == 2);
    // terminating quotient of exact inputs stays exact
    PuiseuxSeries p = ps_div(parse_series("t^2 - 1"), parse_series("t - 1"));
    CHECK(p == parse_series("1 + t"));
}
