#ifndef ELLAB_CRITERIA_HPP
#define ELLAB_CRITERIA_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellab/nonlin.hpp"

namespace ellab {

enum class Geometry { WholeSpace, HalfSpace };

struct Exponents {
    int n = 3;
    Geometry geometry = Geometry::WholeSpace;
    double p_S = 0.0;        // Sobolev exponent, +inf for n <= 2
    double p_star = 0.0;     // p*
    double p_star_star = 0.0;  // p**: p* (whole space) or n/(n-2) (half-space)
    double kappa = 0.0;      // n/(n-2)
};

Exponents exponents(int n, Geometry geometry = Geometry::WholeSpace);

enum class Verdict { Yes, No, Indeterminate };

struct CheckVerdict {
    std::string theorem;
    Verdict holds = Verdict::Indeterminate;
    double margin = 0.0;  // signed distance to the condition boundary
    std::vector<double> witness;  // point(s) where the condition binds or fails
    // scan metadata and per-condition diagnostics
    std::map<std::string, double> details;
    std::vector<std::string> notes;
};

const char* verdict_name(Verdict v);

// Theorem B: s^{-p_S} f(s) nonincreasing and nonconstant.
CheckVerdict check_theorem_B(const ScalarNonlin& f, int n);

// Pure-power Liouville range: f = u^p with 1 < p < p_S.
CheckVerdict check_theorem_A(const ScalarNonlin& f, int n);

// Modified integral-Bernstein criterion: Q = sup f / (s^{kappa-1} phi) < kappa,
// phi(s) = weighted primitive with weight -kappa.
CheckVerdict check_gs_modified(const ScalarNonlin& f, int n);

// General integral-Bernstein criterion with explicit parameters.
struct GsGeneralParams {
    double q = 0.0;
    double k = 0.0;
    double m1 = 1.0, m2 = 1.0;
    double gamma1 = 2.0, gamma2 = 2.0;
};
CheckVerdict check_gs_general(const ScalarNonlin& f, int n, const GsGeneralParams& prm);

// Feasibility search over the general-criterion parameters.
CheckVerdict search_gs_params(const ScalarNonlin& f, int n);

// Scalar reduction of the variational condition: sup s f / F < p_S + 1.
CheckVerdict check_thm1_scalar(const ScalarNonlin& f, int n);

// Gradient-system growth/positivity conditions on [0, M]^m.
CheckVerdict check_thm1_conditions(const SystemNonlin& F, int n, Geometry geometry,
                                   double M, double p, double q);

struct Cor0Params {
    double a0 = 0.0;
    // lambda_0 as a function of rho = |a| / a0
    std::vector<double> rho_grid;
    std::vector<double> lambda0;
};
Cor0Params cor0_params(double p0, double K, int sigma, int n, Geometry geometry);
double cor0_lambda0(double rho);

// Proportional-system hypotheses.
CheckVerdict check_proportional(const SystemNonlin& S, double eps, Geometry geometry,
                                int n, double M = 100.0);

struct LaneEmdenRegion {
    double alpha = 0.0, beta = 0.0;
    bool subcritical_hyperbola = false;  // 1/(p+1) + 1/(q+1) > (n-2)/n
    bool critical_pair = false;          // (p, q) = (p_S, p_S)
    bool nonexistence_sufficient = false;
};
LaneEmdenRegion lane_emden_region(double p, double q, int n);

struct BenchmarkThresholds {
    double K0, K1, K2, K3;
};
BenchmarkThresholds benchmark_thresholds(int n, double p);

// The benchmark nonlinearity f(u) = (K + min(1, u^{p-1})) u^p.
ScalarNonlin benchmark_nonlin(double p, double K);

}  // namespace ellab

#endif
