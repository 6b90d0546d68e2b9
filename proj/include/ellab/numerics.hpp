#ifndef ELLAB_NUMERICS_HPP
#define ELLAB_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace ellab {

// Log-spaced grid with n points on [lo, hi] (inclusive).
std::vector<double> log_grid(double lo, double hi, int n);

// Bracketed bisection for f(x) = 0 with f(a), f(b) of opposite sign.
double bisect(const std::function<double(double)>& f, double a, double b,
              int iterations = 200);

// Newton iteration with bisection safeguard on a bracket [a, b] where f is
// monotone and f(a) <= 0 <= f(b) (or reversed).
double newton_safeguarded(const std::function<double(double)>& f,
                          const std::function<double(double)>& df, double a, double b,
                          double x0, double rel_tol = 1e-15, int max_iter = 100);

// Golden-section minimization of f on [a, b]; returns (argmin, min value).
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a,
                                     double b, double rel_tol = 3e-9, int max_iter = 200);

// Same, evaluated in long double (tighter argmin floor on flat minima).
std::pair<long double, long double> golden_min_ld(
    const std::function<long double(long double)>& f, long double a, long double b,
    long double rel_tol = 1e-10L, int max_iter = 300);

// Golden-section maximization; returns (argmax, max value).
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a,
                                     double b, double rel_tol = 3e-9, int max_iter = 200);

// Adaptive Gauss-Kronrod quadrature of f on [a, b], target relative tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-9);

// Composite Simpson with n intervals (n made even internally).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Least-squares fit y ~ X beta (column-major small problems); returns beta.
std::vector<double> lstsq(const std::vector<std::vector<double>>& columns,
                          const std::vector<double>& y);

// Slope of the least-squares line through (x_i, y_i).
double lstsq_slope(const std::vector<double>& x, const std::vector<double>& y);

// Result of a grid sup/inf scan with local refinement.
struct ScanResult {
    double arg = 0.0;
    double value = 0.0;
    bool at_grid_boundary = false;
};

// Sup of f over a log grid on [lo, hi] with golden-section refinement around
// the grid argmax. `exclude` lists points whose 1e-9-relative neighborhoods
// are skipped but whose adjacent one-sided values may be supplied separately.
ScanResult scan_sup(const std::function<double(double)>& f, double lo, double hi,
                    int n = 2048, const std::vector<double>& exclude = {});
ScanResult scan_inf(const std::function<double(double)>& f, double lo, double hi,
                    int n = 2048, const std::vector<double>& exclude = {});

// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

}  // namespace ellab

#endif
