#ifndef ELLAB_RADIAL_HPP
#define ELLAB_RADIAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "ellab/nonlin.hpp"

namespace ellab {

enum class Provenance { Shooting, ClosedForm, FiniteDifference };

// Sampled radial trajectory with values and derivatives per component.
struct RadialProfile {
    int n = 3;
    int m = 1;
    Provenance provenance = Provenance::Shooting;
    std::vector<double> r;
    std::vector<std::vector<double>> u;   // u[i][j]: component i at r[j]
    std::vector<std::vector<double>> du;

    // cubic Hermite interpolation between grid nodes
    double value(int i, double rr) const;
    double derivative(int i, double rr) const;
};

struct ShootOutcome {
    enum class Tag { FirstZero, PositiveOnHorizon, BlowUp, Inconclusive };
    Tag tag = Tag::Inconclusive;
    double first_zero = 0.0;
    double horizon = 0.0;
    double terminal_value = 0.0;
    double terminal_derivative = 0.0;
    double blowup_radius = 0.0;
    std::string reason;
};

const char* outcome_name(ShootOutcome::Tag t);

struct ShootOptions {
    double r_max = 1e3;
    double tol = 1e-8;                 // local error per unit step
    double blowup_factor = 1e8;        // blow-up when u > factor * s0
    double zero_tol_factor = 1e-12;    // |u(R)| <= factor * s0 after bisection
};

// Integrate -(r^{n-1} u')' = r^{n-1} f(u), u(0) = s0, u'(0) = 0, with f
// extended by 0 for negative arguments.
std::pair<RadialProfile, ShootOutcome> shoot(const ScalarNonlin& f, int n, double s0,
                                             const ShootOptions& opt = {});

// Closed-form radial candidate with analytic derivatives.
struct ClosedFormProfile {
    std::string name;
    std::function<double(double)> u;
    std::function<double(double)> du;
    std::function<double(double)> d2u;
};

// u(r) = (1 + lambda r^2)^{-1/(p-1)} with lambda = (p-1)^2 / (4p).
ClosedFormProfile benchmark_explicit_solution(double p);
double benchmark_lambda(double p);
// critical bubble (1 + r^2/(n(n-2)))^{-(n-2)/2} solving -Lap u = u^{p_S}
ClosedFormProfile critical_bubble(int n);
ClosedFormProfile zero_profile();
// u(r) = B (xi^2 + r^2)^{-1/(p-1)} family helper
ClosedFormProfile bubble_family(double B, double xi, double m_exponent,
                                const std::string& name);

struct ResidualReport {
    double max_residual = 0.0;
    double argmax = 0.0;
};

// max over the grid of | -u'' - (n-1) u'/r - f(u) | (at r = 0: |-n u'' - f(u)|).
ResidualReport verify_closed_form(const ClosedFormProfile& cand, const ScalarNonlin& f,
                                  int n, double r_lo, double r_hi, int grid_n = 2001);

// psi(s) = s f(s) - (p_S + 1) H(s), H = primitive of f.
double pohozaev_psi(const ScalarNonlin& f, int n, double s);
// largest s0 such that psi >= 0 on (0, s0]; 0 if psi < 0 immediately.
double pohozaev_positive_range(const ScalarNonlin& f, int n);

struct PohozaevResidual {
    double volume_term = 0.0;
    double boundary_term = 0.0;
    double residual = 0.0;  // |LHS - RHS| / max(|LHS|, |RHS|, 1e-30)
};

// Rellich-Pohozaev identity residual on B_R for a radial solution.
PohozaevResidual rellich_pohozaev_residual(const RadialProfile& prof,
                                           const ScalarNonlin& f, double R,
                                           int quad_intervals = 256);
PohozaevResidual rellich_pohozaev_residual(const RadialProfile& prof,
                                           const SystemNonlin& S, double R,
                                           int quad_intervals = 256);
PohozaevResidual rellich_pohozaev_residual(const ClosedFormProfile& prof,
                                           const ScalarNonlin& f, int n, double R,
                                           int quad_intervals = 256);

struct UkFamily {
    double p, q, xi, M;
    ClosedFormProfile profile;
    ScalarNonlin f;  // u^p + u^q
};

// Explicit bounded radial solutions of -Lap u = u^{p_k} + u^{q_k}.
UkFamily uk_family(int n, int k);

}  // namespace ellab

#endif
