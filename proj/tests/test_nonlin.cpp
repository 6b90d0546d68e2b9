#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "ellab/nonlin.hpp"
#include "ellab/numerics.hpp"
#include "ellab/presets.hpp"

using namespace ellab;

namespace {

// brute-force trapezoid refinement, independent of the quadrature path
double trapezoid_oracle(const std::function<double(double)>& g, double a, double b,
                        double tol) {
    int n = 64;
    double prev = 0.0;
    for (int iter = 0; iter < 22; ++iter) {
        double h = (b - a) / n;
        double s = 0.5 * (g(a) + g(b));
        for (int i = 1; i < n; ++i) s += g(a + i * h);
        s *= h;
        if (iter > 3 && std::abs(s - prev) <= tol * std::abs(s)) return s;
        prev = s;
        n *= 2;
    }
    return prev;
}

}  // namespace

TEST_CASE("weighted_primitive: pure power closed forms") {
    double p = 2.5, q = 1.3, s = 2.7;
    ScalarNonlin f = ScalarNonlin::parse("u^2.5");
    CHECK(weighted_primitive(f, q - 1.0, s) ==
          doctest::Approx(std::pow(s, p + q) / (p + q)).epsilon(1e-14));
    // w = -kappa with kappa = 2 (n = 4): s^{p+1-kappa}/(p+1-kappa)
    double kappa = 2.0;
    CHECK(weighted_primitive(f, -kappa, s) ==
          doctest::Approx(std::pow(s, p + 1 - kappa) / (p + 1 - kappa)).epsilon(1e-14));
}

TEST_CASE("weighted_primitive: quadrature vs dense trapezoid oracle") {
    ScalarNonlin f = ScalarNonlin::parse("u^2 * log(2+u)");
    double got = weighted_primitive(f, 0.0, 1.0);
    double want = trapezoid_oracle([&](double s) { return f(s); }, 0.0, 1.0, 1e-11);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("weighted_primitive: divergence at the origin returns +inf") {
    ScalarNonlin f = ScalarNonlin::parse("u^0.5");
    CHECK(std::isinf(weighted_primitive(f, -2.0, 1.0)));
    // n = 3 benchmark for the vacuous Gidas-Spruck case: sigma^-3 * u^2
    ScalarNonlin g = ScalarNonlin::parse("u^2");
    CHECK(std::isinf(weighted_primitive(g, -3.0, 1.0)));
}

TEST_CASE("primitive consistency: derivative of the primitive is the integrand") {
    ScalarNonlin f = ScalarNonlin::parse("u^1.7 * log(3+u)^0.4");
    double w = -0.8;
    for (double s : {0.3, 1.0, 4.2, 17.0}) {
        double h = 1e-5 * std::max(1.0, s);
        double dnum = (weighted_primitive(f, w, s + h) - weighted_primitive(f, w, s - h)) /
                      (2 * h);
        CHECK(dnum == doctest::Approx(std::pow(s, w) * f(s)).epsilon(1e-6));
    }
}

TEST_CASE("derivative consistency on a geometric grid away from kinks") {
    for (const char* text : {"u^3", "u^2 * log(2+u)", "(0.7 + min(1, u^1.5)) * u^2.5"}) {
        ScalarNonlin f = ScalarNonlin::parse(text);
        auto grid = log_grid(1e-4, 1e4, 50);
        for (double s : grid) {
            bool near_kink = false;
            for (double k : f.kinks())
                if (std::abs(s - k) < 1e-3 * std::max(1.0, k)) near_kink = true;
            if (near_kink) continue;
            double h = 1e-6 * std::max(1.0, s);
            double dnum = (f(s + h) - f(s - h)) / (2 * h);
            double dsym = f.value_and_derivative(s).der;
            CHECK(dsym == doctest::Approx(dnum).epsilon(1e-6));
        }
    }
}

TEST_CASE("regvar: power-log indices and pure-power limits") {
    ScalarNonlin f = ScalarNonlin::parse("u^2.5 * log(2+u)^0.3");
    RegVarProfile p = regvar_profile(f);
    CHECK(p.structural);
    CHECK(p.index_infinity == doctest::Approx(2.5));
    // f_inf = s^{2.5}
    CHECK(eval(p.limit_infinity[0], 3.0) == doctest::Approx(std::pow(3.0, 2.5)));
}

TEST_CASE("regvar: homogeneity of the limits") {
    ScalarNonlin f = ScalarNonlin::parse("u^2.2 * log(1.5+u)^0.7 + 0.3*u^2.2");
    RegVarProfile prof = regvar_profile(f);
    for (double mu : {0.5, 2.0, 10.0}) {
        for (double s : {0.2, 1.0, 3.7}) {
            double lhs = eval(prof.limit_infinity[0], mu * s);
            double rhs = std::pow(mu, prof.index_infinity) * eval(prof.limit_infinity[0], s);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("regvar: index at zero of the log-gradient family with K = 1") {
    // g(s) = s^{(p0+1)/2} log^a(1+s): the system components have index p0 + 2a at 0
    double p0 = 2.0, a = 0.4;
    SystemNonlin S =
        preset_system("log-gradient", {{"p", p0}, {"a", a}, {"K", 1.0}, {"sigma", 1.0},
                                       {"lambda", 0.5}});
    RegVarProfile prof = regvar_profile(S);
    CHECK(prof.index_zero == doctest::Approx(p0 + 2 * a).epsilon(1e-9));
    CHECK(prof.index_infinity == doctest::Approx(p0).epsilon(1e-9));
}

TEST_CASE("regvar: two-power gradient system limits match the normalized gradients") {
    double p = 2.2, q = 3.4, lambda = 0.3, mu = 0.2, b = 0.7;
    SystemNonlin S = preset_system(
        "cubic-quintic", {{"p", p}, {"q", q}, {"lambda", lambda}, {"mu", mu}, {"b", b}});
    RegVarProfile prof = regvar_profile(S);
    REQUIRE(prof.limit_zero.size() == 2);
    REQUIRE(prof.limit_infinity.size() == 2);
    CHECK(prof.index_zero == doctest::Approx(p).epsilon(1e-9));
    CHECK(prof.index_infinity == doctest::Approx(q).epsilon(1e-9));

    // independent construction of c1^{-1} grad H1 and c2^{-1} grad H2
    auto two_power = [](double e, double cross) {
        return mk_sum({mk_power(mk_var(Var::u), e + 1.0), mk_power(mk_var(Var::v), e + 1.0),
                       mk_product({mk_const(2.0 * cross),
                                   mk_power(mk_product({mk_var(Var::u), mk_var(Var::v)}),
                                            0.5 * (e + 1.0))})});
    };
    ExprPtr H1 = mk_product({mk_const(1.0 / (p + 1.0)), two_power(p, lambda)});
    ExprPtr H2 = mk_product({mk_const(b / (q + 1.0)), two_power(q, mu)});
    SystemNonlin G1 = SystemNonlin::gradient(H1);
    SystemNonlin G2 = SystemNonlin::gradient(H2);
    double c1 = f_plus(G1, 1.0);
    double c2 = f_plus(G2, 1.0);
    for (double a2 : {0.2, 0.9, 1.0})
        for (double b2 : {0.0, 0.5, 1.0}) {
            CHECK(eval(prof.limit_zero[0], a2, b2) ==
                  doctest::Approx(G1.component(0, a2, b2) / c1).epsilon(1e-9));
            CHECK(eval(prof.limit_zero[1], a2, b2) ==
                  doctest::Approx(G1.component(1, a2, b2) / c1).epsilon(1e-9));
            CHECK(eval(prof.limit_infinity[0], a2, b2) ==
                  doctest::Approx(G2.component(0, a2, b2) / c2).epsilon(1e-9));
            CHECK(eval(prof.limit_infinity[1], a2, b2) ==
                  doctest::Approx(G2.component(1, a2, b2) / c2).epsilon(1e-9));
        }
}

TEST_CASE("f_plus: symmetric pure power and scalar cases") {
    SystemNonlin S = SystemNonlin::generic(
        {parse_expr("v^2.5"), parse_expr("u^2.5")});
    CHECK(f_plus(S, 2.0) == doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-12));
    ScalarNonlin f = ScalarNonlin::parse("u^3");
    CHECK(f_plus(SystemNonlin::scalar(f), 3.0) == doctest::Approx(27.0));
}

TEST_CASE("f_plus: t^-p f+(t) stabilizes to c1 as t -> 0 for the two-power system") {
    double p = 2.2, q = 3.4;
    SystemNonlin S = preset_system(
        "cubic-quintic", {{"p", p}, {"q", q}, {"lambda", 0.3}, {"mu", 0.2}, {"b", 0.7}});
    RegVarProfile prof = regvar_profile(S);
    // c1 from the structural normalization: f0 = c1^{-1} grad H1
    double c1 = 0.0;
    {
        auto two_power = [](double e, double cross) {
            return mk_sum(
                {mk_power(mk_var(Var::u), e + 1.0), mk_power(mk_var(Var::v), e + 1.0),
                 mk_product({mk_const(2.0 * cross),
                             mk_power(mk_product({mk_var(Var::u), mk_var(Var::v)}),
                                      0.5 * (e + 1.0))})});
        };
        c1 = f_plus(SystemNonlin::gradient(
                        mk_product({mk_const(1.0 / (p + 1.0)), two_power(p, 0.3)})),
                    1.0);
    }
    (void)prof;
    double r3 = f_plus(S, 1e-3) / std::pow(1e-3, p);
    double r4 = f_plus(S, 1e-4) / std::pow(1e-4, p);
    double r5 = f_plus(S, 1e-5) / std::pow(1e-5, p);
    CHECK(std::abs(r4 - c1) < std::abs(r3 - c1));
    CHECK(std::abs(r5 - c1) < std::abs(r4 - c1));
    CHECK(r5 == doctest::Approx(c1).epsilon(1e-2));
}

TEST_CASE("f_plus dominance over random boundary points") {
    SystemNonlin S = preset_system(
        "cubic-quintic", {{"p", 2.0}, {"q", 3.0}, {"lambda", 0.4}, {"mu", 0.1}, {"b", 1.3}});
    std::mt19937 rng(911);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double lambda : {0.3, 1.0, 7.5}) {
        double fp = f_plus(S, lambda);
        for (int i = 0; i < 1000; ++i) {
            double t = unif(rng) * lambda;
            bool edge_u = unif(rng) < 0.5;
            double a = edge_u ? lambda : t;
            double b = edge_u ? t : lambda;
            CHECK(S.norm_at(a, b) <= fp * (1.0 + 1e-8));
        }
    }
}

TEST_CASE("theta: defining relation and reference values") {
    CHECK(theta(1.0) == 1.0);
    // independent oracle: bisection on e^{s-1} = 2 s over (1, 4)
    double lo = 1.0, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (std::exp(mid - 1.0) < 2.0 * mid ? lo : hi) = mid;
    }
    CHECK(theta(2.0) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-14));
    CHECK(theta(2.0) == doctest::Approx(2.67835).epsilon(1e-5));
    for (double K : {1.5, 10.0, 250.0}) {
        double th = theta(K);
        CHECK(std::abs(std::exp(th - 1.0) / th - K) <= 1e-12 * K);
        CHECK(th >= 1.0);
    }
    CHECK_THROWS_AS(theta(0.9), std::domain_error);
}

TEST_CASE("phi_K minimum ties to theta") {
    auto [s1, v1] = phi_K_min(1.0);
    CHECK(s1 == 0.0);
    CHECK(v1 == 1.0);
    for (double K : {2.0, 5.0, 10.0}) {
        auto [sK, val] = phi_K_min(K);
        double th = theta(K);
        CHECK(std::abs(val - th) <= 1e-8);
        CHECK(std::abs(sK - K * (th - 1.0)) <= 1e-6);
        // at the minimizer: phi_K(s_K) = 1 + s_K / K
        CHECK(phi_K(K, sK) == doctest::Approx(1.0 + sK / K).epsilon(1e-9));
    }
    auto [s2, v2] = phi_K_min(2.0);
    CHECK(v2 == doctest::Approx(2.67835).epsilon(1e-5));
    CHECK(s2 == doctest::Approx(3.3567).epsilon(1e-4));
    CHECK_THROWS_AS(phi_K_min(0.5), std::domain_error);
}

TEST_CASE("gradient system: components are the potential's partials") {
    SystemNonlin S = SystemNonlin::gradient(
        parse_expr("u^3 + v^3 + 0.5 * u^1.5 * v^1.5"));
    CHECK(S.m() == 2);
    double a = 1.3, b = 0.8;
    Vec2 f = S.eval(a, b);
    CHECK(f[0] == doctest::Approx(3 * a * a + 0.75 * std::sqrt(a) * std::pow(b, 1.5)));
    CHECK(f[1] == doctest::Approx(3 * b * b + 0.75 * std::pow(a, 1.5) * std::sqrt(b)));
}

TEST_CASE("proportional system reproduces the template structure exactly") {
    ScalarNonlin k = ScalarNonlin::parse("u^0.5");
    ScalarNonlin g = ScalarNonlin::parse("u^2");
    SystemNonlin S = SystemNonlin::proportional(parse_expr("1 + 0*u"), k, g, 0.7);
    for (double a : {0.3, 1.0, 2.4})
        for (double b : {0.1, 1.0, 3.3}) {
            Vec2 f = S.eval(a, b);
            CHECK(f[0] ==
                  doctest::Approx(std::sqrt(a) * (b * b - 0.7 * a * a)).epsilon(1e-14));
            CHECK(f[1] ==
                  doctest::Approx(std::sqrt(b) * (a * a - 0.7 * b * b)).epsilon(1e-14));
        }
}

TEST_CASE("lane-emden system evaluation") {
    SystemNonlin S = SystemNonlin::lane_emden(ScalarNonlin::parse("u^2"),
                                              ScalarNonlin::parse("u^3"));
    Vec2 f = S.eval(2.0, 3.0);
    CHECK(f[0] == 9.0);  // f1(v) = v^2
    CHECK(f[1] == 8.0);  // f2(u) = u^3
}

TEST_CASE("concurrent evaluation of a shared nonlinearity") {
    ScalarNonlin f = ScalarNonlin::parse("(0.7 + min(1, u^1.5)) * u^2.5");
    std::vector<std::thread> pool;
    std::array<double, 8> sums{};
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&f, &sums, t] {
            double acc = 0.0;
            for (int i = 1; i <= 4000; ++i) {
                double s = 1e-3 * i * (t + 1);
                acc += f(s) + f.value_and_derivative(s).der;
            }
            sums[t] = acc;
        });
    for (auto& th : pool) th.join();
    // deterministic per-thread results: recompute thread 3's sum serially
    double acc = 0.0;
    for (int i = 1; i <= 4000; ++i) {
        double s = 1e-3 * i * 4;
        acc += f(s) + f.value_and_derivative(s).der;
    }
    CHECK(sums[3] == acc);
}

TEST_CASE("log-gradient family: component positivity and convexity facts") {
    // for sigma a > 0 and lambda in (0, 1]:
    //   f1 + f2 >= 2 (1 - lambda)(g'(u) g(u) + g'(v) g(v)) >= 0,
    //   u f1 + v f2 >= 0,  g' > 0,  g'' >= 0
    for (int sigma : {1, -1}) {
        double p = 2.0, a = sigma > 0 ? 0.4 : 0.4, K = 1.5, lambda = 0.8;
        SystemNonlin S = preset_system("log-gradient", {{"p", p},
                                                        {"a", a},
                                                        {"K", K},
                                                        {"sigma", double(sigma)},
                                                        {"lambda", lambda}});
        ExprPtr g = logpow_g(p, a, K, sigma);
        ExprPtr dg = deriv(g, Var::u);
        ExprPtr d2g = deriv(dg, Var::u);
        for (double uu : log_grid(1e-4, 1e4, 25)) {
            CHECK(eval(dg, uu) > 0.0);
            CHECK(eval(d2g, uu) >= -1e-12 * std::abs(eval(d2g, uu)));
            for (double vv : log_grid(1e-3, 1e3, 9)) {
                Vec2 f = S.eval(uu, vv);
                double lower = 2.0 * (1.0 - lambda) *
                               (eval(dg, uu) * eval(g, uu) + eval(dg, vv) * eval(g, vv));
                CHECK(f[0] + f[1] >= lower * (1.0 - 1e-12) - 1e-300);
                CHECK(uu * f[0] + vv * f[1] >= -1e-12);
            }
        }
    }
}

TEST_CASE("log-gradient family: s g'/g = b + a h_sigma with |h_sigma| <= 1/theta(K)") {
    for (int sigma : {1, -1}) {
        double p = 2.4, a = 0.3, K = 2.0;
        ExprPtr g = logpow_g(p, a, K, sigma);
        double b = 0.5 * (p + 1.0);
        double bound = 1.0 / theta(K);
        for (double s : log_grid(1e-5, 1e5, 60)) {
            ValDer vd = eval_d(g, s, 0.0, Var::u);
            double h_sigma = (s * vd.der / vd.val - b) / (sigma > 0 ? a : -a);
            // h_sigma(s) = sigma / phi_K(s^sigma)
            double expect = sigma / phi_K(K, std::pow(s, sigma));
            CHECK(h_sigma == doctest::Approx(expect).epsilon(1e-9));
            CHECK(std::abs(h_sigma) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("f_plus growth envelope around the regular-variation indices") {
    SystemNonlin S = preset_system(
        "cubic-quintic", {{"p", 2.2}, {"q", 3.4}, {"lambda", 0.3}, {"mu", 0.2}, {"b", 0.7}});
    RegVarProfile prof = regvar_profile(S);
    double theta_win = 0.25;
    for (double lam : {1e3, 1e5, 1e7}) {
        double fp = f_plus(S, lam);
        CHECK(fp >= std::pow(lam, prof.index_infinity - theta_win));
        CHECK(fp <= std::pow(lam, prof.index_infinity + theta_win));
    }
    for (double lam : {1e-3, 1e-5, 1e-7}) {
        double fp = f_plus(S, lam);
        CHECK(fp >= std::pow(lam, prof.index_zero + theta_win));
        CHECK(fp <= std::pow(lam, prof.index_zero - theta_win));
    }
}
