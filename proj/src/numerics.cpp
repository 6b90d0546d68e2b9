#include "ellab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ellab {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

double bisect(const std::function<double(double)>& f, double a, double b, int iterations) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int i = 0; i < iterations; ++i) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

double newton_safeguarded(const std::function<double(double)>& f,
                          const std::function<double(double)>& df, double a, double b,
                          double x0, double rel_tol, int max_iter) {
    double fa = f(a);
    bool increasing = fa <= 0.0;
    double x = std::clamp(x0, a, b);
    for (int i = 0; i < max_iter; ++i) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == increasing)
            a = x;
        else
            b = x;
        double d = df(x);
        double step = d != 0.0 ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);  // fall back to bisection
        if (std::abs(xn - x) <= rel_tol * std::max(1.0, std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

namespace {

template <typename Real, typename Fn>
std::pair<Real, Real> golden_impl(const Fn& f, Real a, Real b, Real rel_tol, int max_iter,
                                  bool maximize) {
    const Real invphi = (std::sqrt(Real(5)) - 1) / 2;
    const Real invphi2 = (3 - std::sqrt(Real(5))) / 2;
    Real h = b - a;
    Real c = a + invphi2 * h;
    Real d = a + invphi * h;
    Real fc = f(c), fd = f(d);
    if (maximize) {
        fc = -fc;
        fd = -fd;
    }
    for (int i = 0; i < max_iter && h > rel_tol * (std::abs(a) + std::abs(b) + Real(1)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            h = b - a;
            c = a + invphi2 * h;
            fc = f(c);
            if (maximize) fc = -fc;
        } else {
            a = c;
            c = d;
            fc = fd;
            h = b - a;
            d = a + invphi * h;
            fd = f(d);
            if (maximize) fd = -fd;
        }
    }
    Real xm = (fc < fd) ? c : d;
    Real fm = std::min(fc, fd);
    return {xm, maximize ? -fm : fm};
}

}  // namespace

std::pair<double, double> golden_min(const std::function<double(double)>& f, double a,
                                     double b, double rel_tol, int max_iter) {
    return golden_impl<double>(f, a, b, rel_tol, max_iter, false);
}

std::pair<long double, long double> golden_min_ld(
    const std::function<long double(long double)>& f, long double a, long double b,
    long double rel_tol, int max_iter) {
    return golden_impl<long double>(f, a, b, rel_tol, max_iter, false);
}

std::pair<double, double> golden_max(const std::function<double(double)>& f, double a,
                                     double b, double rel_tol, int max_iter) {
    return golden_impl<double>(f, a, b, rel_tol, max_iter, true);
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1]
constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kGkWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double value;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double fc = f(mid);
    double kron = kGkWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double lo = f(mid - half * kGkNodes[i]);
        double hi = f(mid + half * kGkNodes[i]);
        kron += kGkWeights[i] * (lo + hi);
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (lo + hi);
    }
    return {kron * half, std::abs(kron - gauss) * std::abs(half)};
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int depth) {
    Panel p = gk15(f, a, b);
    double mid = 0.5 * (a + b);
    // the second condition is the round-off floor of the panel estimate
    if (p.error <= abs_tol ||
        p.error <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value) ||
        depth <= 0 || mid <= a || mid >= b)
        return p.value;
    return adaptive_gk(f, a, mid, 0.5 * abs_tol, depth - 1) +
           adaptive_gk(f, mid, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    Panel first = gk15(f, a, b);
    double scale = std::max(std::abs(first.value), 1e-300);
    double abs_tol = std::max(rel_tol * scale,
                              std::numeric_limits<double>::epsilon() * scale);
    if (first.error <= abs_tol) return sign * first.value;
    return sign * (adaptive_gk(f, a, 0.5 * (a + b), 0.5 * abs_tol, 52) +
                   adaptive_gk(f, 0.5 * (a + b), b, 0.5 * abs_tol, 52));
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

std::vector<double> lstsq(const std::vector<std::vector<double>>& columns,
                          const std::vector<double>& y) {
    const std::size_t m = columns.size();
    const std::size_t n = y.size();
    // normal equations; m is tiny (<= 3) here
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < n; ++k) A[i][j] += columns[i][k] * columns[j][k];
        for (std::size_t k = 0; k < n; ++k) A[i][m] += columns[i][k] * y[k];
    }
    // gaussian elimination with partial pivoting
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || A[col][col] == 0.0) continue;
            double fac = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= m; ++c) A[r][c] -= fac * A[col][c];
        }
    }
    std::vector<double> beta(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        beta[i] = A[i][i] != 0.0 ? A[i][m] / A[i][i] : 0.0;
    return beta;
}

double lstsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> ones(x.size(), 1.0);
    auto beta = lstsq({ones, x}, y);
    return beta[1];
}

namespace {

ScanResult scan_extremum(const std::function<double(double)>& f, double lo, double hi,
                         int n, const std::vector<double>& exclude, bool sup) {
    auto excluded = [&](double s) {
        for (double k : exclude)
            if (std::abs(s - k) <= 1e-9 * std::max(1.0, std::abs(k))) return true;
        return false;
    };
    auto g = [&](double s) {
        double val = f(s);
        return sup ? val : -val;
    };
    std::vector<double> grid = log_grid(lo, hi, n);
    double best = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i = 0; i < n; ++i) {
        if (excluded(grid[i])) continue;
        double val = g(grid[i]);
        if (std::isfinite(val) && val > best) {
            best = val;
            best_i = i;
        }
    }
    ScanResult res;
    if (best_i < 0) {
        res.value = sup ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
        return res;
    }
    double a = grid[std::max(0, best_i - 1)];
    double b = grid[std::min(n - 1, best_i + 1)];
    auto [xm, fm] = golden_impl<double>(g, a, b, 3e-10, 200, true);
    (void)fm;
    double refined = g(xm);
    if (refined > best && !excluded(xm)) {
        res.arg = xm;
        res.value = sup ? refined : -refined;
    } else {
        res.arg = grid[best_i];
        res.value = sup ? best : -best;
    }
    res.at_grid_boundary = best_i == 0 || best_i == n - 1;
    return res;
}

}  // namespace

ScanResult scan_sup(const std::function<double(double)>& f, double lo, double hi, int n,
                    const std::vector<double>& exclude) {
    return scan_extremum(f, lo, hi, n, exclude, true);
}

ScanResult scan_inf(const std::function<double(double)>& f, double lo, double hi, int n,
                    const std::vector<double>& exclude) {
    return scan_extremum(f, lo, hi, n, exclude, false);
}

double sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace ellab
