#include <doctest.h>

#include <cmath>
#include <random>

#include "ellab/expr.hpp"
#include "ellab/nonlin.hpp"

using namespace ellab;

TEST_CASE("parse: single power node") {
    ExprPtr e = parse_expr("u^3");
    CHECK(e->kind == NodeKind::Power);
    CHECK(e->exponent == 3.0);
    CHECK(e->kids[0]->kind == NodeKind::Variable);
    CHECK(eval(e, 2.0) == 8.0);
}

TEST_CASE("parse: benchmark nonlinearity with bound parameters") {
    ExprPtr e = parse_expr("(K + min(1, u^(p-1))) * u^p", {{"K", 0.2}, {"p", 2.5}});
    CHECK(eval(e, 1.0) == doctest::Approx(1.2).epsilon(1e-15));
    // below the kink the min picks u^{p-1}
    CHECK(eval(e, 0.5) ==
          doctest::Approx((0.2 + std::pow(0.5, 1.5)) * std::pow(0.5, 2.5)).epsilon(1e-15));
}

TEST_CASE("parse: sum of two products") {
    ExprPtr e = parse_expr("u^2.5 * log(2+u)^0.3 + 0.5*u^3");
    REQUIRE(e->kind == NodeKind::Sum);
    CHECK(e->kids.size() == 2);
    double s = 1.7;
    CHECK(eval(e, s) == doctest::Approx(std::pow(s, 2.5) * std::pow(std::log(2 + s), 0.3) +
                                        0.5 * s * s * s));
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(parse_expr("u +"), ParseError);
    try {
        parse_expr("u + )");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS(parse_expr("u^p"), ParseError);  // unbound parameter
    CHECK_THROWS_AS(parse_expr("u^p", {{"p", std::nan("")}}), ParseError);  // non-finite
}

TEST_CASE("eval: log argument domain error") {
    ExprPtr e = parse_expr("log(u - 1)");
    CHECK(eval(e, 2.0) == 0.0);
    CHECK_THROWS_AS(eval(e, 0.5), EvalDomainError);
    // not finite on (0, S]: rejected at ScalarNonlin construction
    CHECK_THROWS_AS(ScalarNonlin::make(e), std::invalid_argument);
}

TEST_CASE("eval: continuity at zero") {
    ScalarNonlin f = ScalarNonlin::parse("u^2 * log(2+u)");
    CHECK(f(0.0) == 0.0);
    ScalarNonlin g = ScalarNonlin::parse("log(2+u)");
    CHECK(g(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("derivative: smooth examples") {
    ScalarNonlin f = ScalarNonlin::parse("u^3");
    CHECK(f.value_and_derivative(2.0).der == doctest::Approx(12.0).epsilon(1e-14));
    ScalarNonlin g = ScalarNonlin::parse("u^2 * log(2+u)");
    // g'(1) = 2 log 3 + 1/3
    CHECK(g.value_and_derivative(1.0).der ==
          doctest::Approx(2.0 * std::log(3.0) + 1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("derivative: one-sided values at a kink") {
    ScalarNonlin f = ScalarNonlin::parse("min(1, u) * u");
    CHECK(f.value_and_derivative(1.0, Side::Left).der == doctest::Approx(2.0));
    CHECK(f.value_and_derivative(1.0, Side::Right).der == doctest::Approx(1.0));
    // symbolic derivative agrees through the Select node
    ScalarNonlin d = f.derivative();
    CHECK(d(0.5) == doctest::Approx(1.0));  // (u^2)' = 2u below the kink
    CHECK(d(2.0) == doctest::Approx(1.0));  // (u)' above
}

TEST_CASE("kink location") {
    ScalarNonlin f = ScalarNonlin::parse("(0.2 + min(1, u^1.5)) * u^2.5");
    REQUIRE(f.kinks().size() == 1);
    CHECK(f.kinks()[0] == doctest::Approx(1.0).epsilon(1e-9));
}

namespace {

// random power-log expressions for the round-trip property
ExprPtr random_expr(std::mt19937& rng, int depth) {
    std::uniform_real_distribution<double> coef(0.1, 3.0);
    std::uniform_real_distribution<double> expn(0.2, 3.0);
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
    switch (pick(rng)) {
        case 0:
            return mk_power(mk_var(Var::u), expn(rng));
        case 1:
            return mk_const(coef(rng));
        case 2:
            return mk_sum({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 3:
            return mk_product({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 4:
            return mk_log(mk_sum({mk_const(1.0 + coef(rng)), mk_var(Var::u)}), expn(rng));
        default:
            return mk_min(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("printer round-trip: parse(print(e)) evaluates identically") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> pts(1e-3, 1e3);
    for (int trial = 0; trial < 25; ++trial) {
        ExprPtr e = random_expr(rng, 3);
        ExprPtr back = parse_expr(print_expr(e));
        for (int i = 0; i < 100; ++i) {
            double s = pts(rng);
            CHECK(eval(back, s) == doctest::Approx(eval(e, s)).epsilon(1e-15));
        }
    }
}

TEST_CASE("substitution builds two-variable expressions") {
    ExprPtr k = parse_expr("u^2");
    ExprPtr kv = substitute(k, Var::u, mk_var(Var::v));
    CHECK(eval(kv, 7.0, 3.0) == 9.0);
    CHECK(uses_var(kv, Var::v));
    CHECK(!uses_var(kv, Var::u));
}

TEST_CASE("structural index at the ends") {
    ExprPtr e = parse_expr("u^2.5 * log(2+u)^0.3");
    CHECK(*structural_index(e, End::Infinity) == doctest::Approx(2.5));
    CHECK(*structural_index(e, End::Zero) == doctest::Approx(2.5));  // log const at 0
    ExprPtr k1 = parse_expr("u^2 * log(1+u)");  // K = 1: converts to a power at 0
    CHECK(*structural_index(k1, End::Zero) == doctest::Approx(3.0));
    CHECK(*structural_index(k1, End::Infinity) == doctest::Approx(2.0));
    ExprPtr bench = parse_expr("(0.2 + min(1, u^1.5)) * u^2.5");
    CHECK(*structural_index(bench, End::Infinity) == doctest::Approx(2.5));
    // at 0 the constant K dominates the min branch: f ~ K u^p
    CHECK(*structural_index(bench, End::Zero) == doctest::Approx(2.5));
}
