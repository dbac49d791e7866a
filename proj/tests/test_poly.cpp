#include "doctest.h"

#include "tancone/parser.hpp"
#include "tancone/polynomial.hpp"

#include <random>

using namespace tancone;

namespace {

VariableTable xy_vars() {
    VariableTable v;
    v.names = {"x", "y"};
    v.frozen = true;
    return v;
}

Polynomial parse2(const std::string& s) {
    VariableTable v = xy_vars();
    return parse_polynomial(s, v);
}

Polynomial random_poly(std::mt19937_64& rng, int nvars, int max_deg, int max_terms) {
    std::uniform_int_distribution<int> coeff(-6, 6);
    std::uniform_int_distribution<int> expd(0, max_deg);
    std::uniform_int_distribution<int> nterms(0, max_terms);
    Polynomial f(nvars);
    int k = nterms(rng);
    for (int i = 0; i < k; ++i) {
        Monomial m(nvars);
        for (int j = 0; j < nvars; ++j) m[j] = expd(rng);
        f.add_term(m, coeff(rng));
    }
    return f;
}

} // namespace

TEST_CASE("poly_arith examples") {
    Polynomial x = Polynomial::variable(2, 0);
    Polynomial y = Polynomial::variable(2, 1);
    CHECK((x + Rational(-1) * x).is_zero());
    CHECK((x + y) * (x - y) == x * x - y * y);
    Polynomial cusp = x * x * x - y * y;
    CHECK(cusp * Polynomial::constant(2, 1) == cusp);
    CHECK_THROWS_AS(poly_arith(PolyOp::Add, x, Polynomial::variable(3, 0)), std::invalid_argument);
}

TEST_CASE("translate") {
    Polynomial f = parse2("x^2 + y^2 - 1");
    CHECK(f.translate({1, 0}) == parse2("x^2 + 2*x + y^2"));
    Polynomial cusp = parse2("x^3 - y^2");
    CHECK(cusp.translate({0, 0}) == cusp);
    CHECK_THROWS_AS(f.translate({1}), std::invalid_argument);
}

TEST_CASE("initial_form") {
    CHECK(parse2("x^3 - y^2").initial_form() == parse2("-y^2"));
    CHECK(parse2("x^2 + 2*x + y^2").initial_form() == parse2("2*x"));
    VariableTable v3;
    v3.names = {"x", "y", "z"};
    v3.frozen = true;
    CHECK(parse_polynomial("x^3 - y^2 - z^2", v3).initial_form() ==
          parse_polynomial("-y^2 - z^2", v3));
    CHECK_THROWS_AS(Polynomial::zero(2).initial_form(), std::domain_error);
}

TEST_CASE("gradient") {
    Polynomial cusp = parse2("x^3 - y^2");
    auto g = cusp.gradient();
    CHECK(g[0] == parse2("3*x^2"));
    CHECK(g[1] == parse2("-2*y"));
    auto gc = Polynomial::constant(2, 5).gradient();
    CHECK(gc[0].is_zero());
    CHECK(gc[1].is_zero());
}

TEST_CASE("eval_rational") {
    Polynomial cusp = parse2("x^3 - y^2");
    CHECK(cusp.eval({1, 1}) == 0);
    CHECK(cusp.eval({1, 0}) == 1);
    VariableTable v3;
    v3.names = {"x", "y", "z"};
    CHECK(parse_polynomial("x^3 - y^2 - z^2", v3).eval({1, 1, 0}) == 0);
    CHECK_THROWS_AS(cusp.eval({1}), std::invalid_argument);
}

TEST_CASE("degree sentinel") {
    CHECK(!Polynomial::zero(2).degree().has_value());
    CHECK(parse2("x^3 - y^2").degree() == 3);
    CHECK(Polynomial::constant(2, 7).degree() == 0);
}

TEST_CASE("ring axioms on randomized inputs") {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 60; ++it) {
        Polynomial f = random_poly(rng, 2, 3, 5);
        Polynomial g = random_poly(rng, 2, 3, 5);
        Polynomial h = random_poly(rng, 2, 3, 5);
        CHECK(f + g == g + f);
        CHECK(f * g == g * f);
        CHECK((f + g) + h == f + (g + h));
        CHECK((f * g) * h == f * (g * h));
        CHECK(f * (g + h) == f * g + f * h);
        std::uniform_int_distribution<int> c(-4, 4);
        std::vector<Rational> p{Rational(c(rng)), Rational(c(rng), 3)};
        std::vector<Rational> mp{-p[0], -p[1]};
        CHECK(f.translate(p).translate(mp) == f);
    }
}

TEST_CASE("initial form degree properties") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 40; ++it) {
        Polynomial f = random_poly(rng, 2, 4, 6);
        if (f.is_zero()) continue;
        Polynomial in = f.initial_form();
        CHECK(*in.degree() <= *f.degree());
        Polynomial rest = f - in;
        if (!rest.is_zero()) {
            auto min_deg = [](const Polynomial& p) {
                uint32_t d = UINT32_MAX;
                for (const auto& [m, c] : p.terms()) d = std::min(d, total_degree(m));
                return d;
            };
            CHECK(min_deg(rest) > min_deg(f));
        }
    }
}

TEST_CASE("Leibniz rule on randomized pairs") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 40; ++it) {
        Polynomial f = random_poly(rng, 2, 3, 4);
        Polynomial g = random_poly(rng, 2, 3, 4);
        for (int v = 0; v < 2; ++v)
            CHECK((f * g).derivative(v) == f.derivative(v) * g + f * g.derivative(v));
    }
}

TEST_CASE("polynomial parse/print round trip") {
    for (const char* s : {"x^3 - y^2", "x^2 + 2*x + y^2", "-x*y + 1/2", "0"}) {
        VariableTable v = xy_vars();
        Polynomial f = parse_polynomial(s, v);
        VariableTable v2 = xy_vars();
        CHECK(parse_polynomial(print_polynomial(f, v.names), v2) == f);
    }
}
