#include "ellab/rescaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellab/criteria.hpp"
#include "ellab/radial.hpp"

namespace ellab {

namespace {

bool decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

ConvergenceTable uniform_convergence_check(const ScalarNonlin& f, double p,
                                           End direction, std::vector<double> lambdas,
                                           double S, int grid_n) {
    ConvergenceTable t;
    t.direction = direction;
    t.S = S;
    for (double lam : lambdas) {
        double flam = f(lam);
        if (!(flam != 0.0)) throw std::domain_error("f(lambda) = 0 in convergence check");
        double e = 0.0;
        for (int i = 0; i <= grid_n; ++i) {
            double s = S * i / grid_n;
            e = std::max(e, std::abs(f(lam * s) / flam - std::pow(s, p)));
        }
        t.lambda.push_back(lam);
        t.error.push_back(e);
    }
    t.monotone_decreasing = decreasing(t.error);
    return t;
}

ConvergenceTable uniform_convergence_check(const SystemNonlin& f,
                                           const std::vector<ExprPtr>& limit,
                                           End direction, std::vector<double> lambdas,
                                           double S, int grid_n) {
    if (static_cast<int>(limit.size()) != f.m())
        throw std::domain_error("limit component count mismatch");
    ConvergenceTable t;
    t.direction = direction;
    t.S = S;
    for (double lam : lambdas) {
        double norm = f_plus(f, lam);
        if (!(norm > 0.0)) throw std::domain_error("f+(lambda) = 0 in convergence check");
        double e = 0.0;
        for (int i = 0; i <= grid_n; ++i) {
            for (int j = 0; j <= (f.m() == 2 ? grid_n : 0); ++j) {
                double a = S * i / grid_n;
                double b = S * j / grid_n;
                for (int c = 0; c < f.m(); ++c) {
                    double got = f.component(c, lam * a, lam * b) / norm;
                    double want = eval(limit[c], a, b);
                    e = std::max(e, std::abs(got - want));
                }
            }
        }
        t.lambda.push_back(lam);
        t.error.push_back(e);
    }
    t.monotone_decreasing = decreasing(t.error);
    return t;
}

// ---------------------------------------------------------------------------
// discrete doubling
// ---------------------------------------------------------------------------

namespace {

double pt_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

DoublingResult doubling_point(const DiscreteField& F, double k) {
    const std::size_t n = F.points.size();
    if (F.dist.size() != n || F.M.size() != n)
        throw std::invalid_argument("field arrays must have equal length");
    for (std::size_t i = 0; i < n; ++i)
        if (!(F.dist[i] > 0.0) || !(F.M[i] > 0.0) || !std::isfinite(F.dist[i]) ||
            !std::isfinite(F.M[i]))
            throw std::invalid_argument("dist and M must be finite and positive");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");

    DoublingResult res;
    int start = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (F.M[i] > 2.0 * k / F.dist[i]) {
            if (start < 0 || F.M[i] > F.M[start]) start = static_cast<int>(i);
        }
    }
    if (start < 0) {
        res.slack.resize(n);
        for (std::size_t i = 0; i < n; ++i) res.slack[i] = 2.0 * k / F.dist[i] - F.M[i];
        return res;
    }
    res.start = start;

    int x = start;
    for (;;) {
        double radius = k / F.M[x];
        int next = -1;
        for (std::size_t z = 0; z < n; ++z) {
            if (pt_dist(F.points[z], F.points[x]) <= radius && F.M[z] > 2.0 * F.M[x]) {
                if (next < 0 || F.M[z] > F.M[next]) next = static_cast<int>(z);
            }
        }
        if (next < 0) break;
        x = next;
        ++res.jumps;
        if (res.jumps > 200)
            throw std::runtime_error("doubling iteration failed to terminate");
    }

    // the jump iteration ends at a point with the doubling property; (b) is
    // guaranteed when dist is 1-Lipschitz against the point metric
    if (!(F.M[x] > 2.0 * k / F.dist[x]))
        throw std::runtime_error(
            "doubling selection violated M(x) > 2k/dist(x); field dist values are "
            "not 1-Lipschitz-consistent with the point coordinates");
    res.found = true;
    res.index = x;
    return res;
}

// ---------------------------------------------------------------------------
// critical limit of the u_k family
// ---------------------------------------------------------------------------

std::vector<CriticalLimitRow> critical_limit_check(int n, const std::vector<int>& ks,
                                                   double y_max, int grid_n) {
    Exponents ex = exponents(n);
    std::vector<CriticalLimitRow> rows;
    for (int k : ks) {
        UkFamily fam = uk_family(n, k);
        CriticalLimitRow row;
        row.k = k;
        row.p = fam.p;
        row.q = fam.q;
        row.M = fam.M;
        double m = 1.0 / (fam.p - 1.0);
        double sigma = std::pow(fam.M, 0.5 * (1.0 - fam.q));
        double tau = (sigma / fam.xi) * (sigma / fam.xi);
        auto vk = [&](double y) { return std::pow(1.0 + tau * y * y, -m); };
        row.v0 = vk(0.0);
        // -Lap v_k = M^{1-p} v^p + v^q exactly, so the residual against
        // v^{p_S} is M^{1-p} v^p + v^q - v^{p_S}
        double c_small = std::pow(fam.M, 1.0 - fam.p);
        double dev = 0.0, res = 0.0;
        // fit (1 + c y^2)^{-1/2}-type bubble through v_k at y = 1
        double c_fit = (std::pow(vk(1.0), -2.0 / (n - 2.0)) - 1.0);
        for (int i = 0; i <= grid_n; ++i) {
            double y = y_max * i / grid_n;
            double v = vk(y);
            res = std::max(res, std::abs(c_small * std::pow(v, fam.p) +
                                         std::pow(v, fam.q) - std::pow(v, ex.p_S)));
            double bubble = std::pow(1.0 + c_fit * y * y, -0.5 * (n - 2.0));
            dev = std::max(dev, std::abs(v - bubble));
        }
        row.residual_max = res;
        row.bubble_deviation = dev;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ellab
