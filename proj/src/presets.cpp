#include "ellab/presets.hpp"

#include <stdexcept>

namespace ellab {

namespace {

double need(const ParamMap& p, const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw std::invalid_argument("preset parameter missing: " + name);
    return it->second;
}

double get_or(const ParamMap& p, const std::string& name, double fallback) {
    auto it = p.find(name);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

ExprPtr logpow_g(double p, double a, double K, int sigma) {
    ExprPtr arg = mk_sum({mk_const(K), mk_power(mk_var(Var::u), sigma)});
    return mk_product(
        {mk_power(mk_var(Var::u), 0.5 * (p + 1.0)), mk_log(arg, sigma > 0 ? a : -a)});
}

SystemNonlin preset_system(const std::string& name, const ParamMap& params) {
    if (name == "log-gradient") {
        double p = need(params, "p");
        double a = need(params, "a");
        double K = get_or(params, "K", 1.0);
        int sigma = static_cast<int>(get_or(params, "sigma", 1.0));
        double lambda = need(params, "lambda");
        ExprPtr gu = logpow_g(p, a, K, sigma);
        ExprPtr gv = substitute(gu, Var::u, mk_var(Var::v));
        ExprPtr F = mk_sum({mk_power(gu, 2.0), mk_power(gv, 2.0),
                            mk_product({mk_const(-2.0 * lambda), gu, gv})});
        return SystemNonlin::gradient(F);
    }
    if (name == "cubic-quintic") {
        double p = need(params, "p");
        double q = need(params, "q");
        double lambda = need(params, "lambda");
        double mu = need(params, "mu");
        double b = need(params, "b");
        auto two_power = [](double e, double cross) {
            return mk_sum({mk_power(mk_var(Var::u), e + 1.0),
                           mk_power(mk_var(Var::v), e + 1.0),
                           mk_product({mk_const(2.0 * cross),
                                       mk_power(mk_product({mk_var(Var::u), mk_var(Var::v)}),
                                                0.5 * (e + 1.0))})});
        };
        ExprPtr H1 = mk_product({mk_const(1.0 / (p + 1.0)), two_power(p, lambda)});
        ExprPtr H2 = mk_product({mk_const(b / (q + 1.0)), two_power(q, mu)});
        return SystemNonlin::gradient(mk_sum({H1, H2}));
    }
    if (name == "power-product") {
        double p = need(params, "p");
        double q = need(params, "q");
        double r = need(params, "r");
        double b = need(params, "b");
        double lambda = need(params, "lambda");
        ScalarNonlin k = ScalarNonlin::make(
            mk_sum({mk_power(mk_var(Var::u), r),
                    mk_product({mk_const(b), mk_power(mk_var(Var::u), q)})}));
        ScalarNonlin g = ScalarNonlin::make(mk_power(mk_var(Var::u), p));
        return SystemNonlin::proportional(mk_const(1.0), k, g, lambda);
    }
    if (name == "log-proportional") {
        double p = need(params, "p");
        double r = need(params, "r");
        double a = need(params, "a");
        double b = need(params, "b");
        double d = need(params, "d");
        double K = need(params, "K");
        double lambda = need(params, "lambda");
        auto logf = [K](double e) {
            return mk_log(mk_sum({mk_const(K), mk_var(Var::u)}), e);
        };
        ScalarNonlin k =
            ScalarNonlin::make(mk_product({mk_power(mk_var(Var::u), r), logf(a)}));
        ScalarNonlin g =
            ScalarNonlin::make(mk_product({mk_power(mk_var(Var::u), p), logf(b)}));
        ExprPtr phi = mk_log(
            mk_sum({mk_const(K), mk_var(Var::u), mk_var(Var::v)}), -d);
        return SystemNonlin::proportional(phi, k, g, lambda);
    }
    throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace ellab
