#ifndef ELLAB_PRESETS_HPP
#define ELLAB_PRESETS_HPP

#include <string>

#include "ellab/nonlin.hpp"

namespace ellab {

// Named nonlinearity families used across checkers and demos.
//
//   log-gradient     gradient of g^2(u) + g^2(v) - 2 lambda g(u) g(v) with
//                    g(s) = s^{(p+1)/2} log^{sigma a}(K + s^sigma)
//                    params: p, a, K, sigma (+-1), lambda
//   cubic-quintic    gradient of H1 + H2 (two-power Schrodinger type)
//                    params: p, q, lambda, mu, b
//   power-product    proportional with k = u^r + b u^q, g = u^p, phi = 1
//                    params: p, q, r, b, lambda
//   log-proportional proportional with k = u^r log^a(K+u), g = u^p log^b(K+u),
//                    phi = log^-d(K+u+v); params: p, r, a, b, d, K, lambda
SystemNonlin preset_system(const std::string& name, const ParamMap& params);

// g(s) = s^{(p+1)/2} log^{sigma a}(K + s^sigma) as an expression in u.
ExprPtr logpow_g(double p, double a, double K, int sigma);

}  // namespace ellab

#endif
