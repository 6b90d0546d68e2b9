#include "ellab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellab/criteria.hpp"
#include "ellab/numerics.hpp"

namespace ellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hermite(double ra, double ua, double wa, double rb, double ub, double wb,
               double r) {
    double h = rb - ra;
    double t = (r - ra) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ua + (t3 - 2 * t2 + t) * h * wa +
           (-2 * t3 + 3 * t2) * ub + (t3 - t2) * h * wb;
}

double hermite_deriv(double ra, double ua, double wa, double rb, double ub, double wb,
                     double r) {
    double h = rb - ra;
    double t = (r - ra) / h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * ua + (3 * t2 - 4 * t + 1) * h * wa +
            (-6 * t2 + 6 * t) * ub + (3 * t2 - 2 * t) * h * wb) /
           h;
}

}  // namespace

double RadialProfile::value(int i, double rr) const {
    const auto& rs = r;
    if (rr <= rs.front()) return u[i].front();
    if (rr >= rs.back()) return u[i].back();
    auto it = std::upper_bound(rs.begin(), rs.end(), rr);
    std::size_t j = static_cast<std::size_t>(it - rs.begin());
    return hermite(rs[j - 1], u[i][j - 1], du[i][j - 1], rs[j], u[i][j], du[i][j], rr);
}

double RadialProfile::derivative(int i, double rr) const {
    const auto& rs = r;
    if (rr <= rs.front()) return du[i].front();
    if (rr >= rs.back()) return du[i].back();
    auto it = std::upper_bound(rs.begin(), rs.end(), rr);
    std::size_t j = static_cast<std::size_t>(it - rs.begin());
    return hermite_deriv(rs[j - 1], u[i][j - 1], du[i][j - 1], rs[j], u[i][j], du[i][j],
                         rr);
}

const char* outcome_name(ShootOutcome::Tag t) {
    switch (t) {
        case ShootOutcome::Tag::FirstZero: return "FirstZero";
        case ShootOutcome::Tag::PositiveOnHorizon: return "PositiveOnHorizon";
        case ShootOutcome::Tag::BlowUp: return "BlowUp";
        default: return "Inconclusive";
    }
}

// ---------------------------------------------------------------------------
// shooting: Dormand-Prince 5(4) with error-per-unit-step control
// ---------------------------------------------------------------------------

namespace {

struct State {
    double u, w;
};

// Butcher tableau of DP5(4)
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

}  // namespace

std::pair<RadialProfile, ShootOutcome> shoot(const ScalarNonlin& f, int n, double s0,
                                             const ShootOptions& opt) {
    if (!(s0 > 0.0) || !(opt.r_max > 0.0) || !(opt.tol > 0.0))
        throw std::domain_error("shoot: s0, r_max and tol must be positive");

    auto fext = [&](double u) { return u > 0.0 ? f(u) : 0.0; };
    auto rhs = [&](double r, const State& y) {
        return State{y.w, -fext(y.u) - (n - 1) * y.w / r};
    };

    RadialProfile prof;
    prof.n = n;
    prof.m = 1;
    prof.provenance = Provenance::Shooting;
    ShootOutcome out;
    out.horizon = opt.r_max;

    // series start: u(r) = s0 - f(s0) r^2 / (2n) + O(r^4)
    const double r0 = std::min(1e-4, 0.1 * opt.r_max);
    double fs0 = f(s0);
    prof.r = {0.0, r0};
    prof.u = {{s0, s0 - fs0 * r0 * r0 / (2.0 * n)}};
    prof.du = {{0.0, -fs0 * r0 / n}};

    double r = r0;
    State y{prof.u[0].back(), prof.du[0].back()};
    State k1 = rhs(r, y);
    double h = std::min(1e-3, 0.1 * opt.r_max);
    bool nonmonotone = false;
    const double blowup = opt.blowup_factor * s0;
    const long max_steps = 20'000'000;

    for (long step = 0; step < max_steps && r < opt.r_max; ++step) {
        h = std::min(h, opt.r_max - r);
        State k2 = rhs(r + C2 * h, {y.u + h * A21 * k1.u, y.w + h * A21 * k1.w});
        State k3 = rhs(r + C3 * h, {y.u + h * (A31 * k1.u + A32 * k2.u),
                                    y.w + h * (A31 * k1.w + A32 * k2.w)});
        State k4 = rhs(r + C4 * h, {y.u + h * (A41 * k1.u + A42 * k2.u + A43 * k3.u),
                                    y.w + h * (A41 * k1.w + A42 * k2.w + A43 * k3.w)});
        State k5 = rhs(r + C5 * h,
                       {y.u + h * (A51 * k1.u + A52 * k2.u + A53 * k3.u + A54 * k4.u),
                        y.w + h * (A51 * k1.w + A52 * k2.w + A53 * k3.w + A54 * k4.w)});
        State k6 = rhs(
            r + h, {y.u + h * (A61 * k1.u + A62 * k2.u + A63 * k3.u + A64 * k4.u + A65 * k5.u),
                    y.w + h * (A61 * k1.w + A62 * k2.w + A63 * k3.w + A64 * k4.w +
                               A65 * k5.w)});
        State y5{y.u + h * (B1 * k1.u + B3 * k3.u + B4 * k4.u + B5 * k5.u + B6 * k6.u),
                 y.w + h * (B1 * k1.w + B3 * k3.w + B4 * k4.w + B5 * k5.w + B6 * k6.w)};
        State k7 = rhs(r + h, y5);
        double eu = h * (E1 * k1.u + E3 * k3.u + E4 * k4.u + E5 * k5.u + E6 * k6.u +
                         E7 * k7.u);
        double ew = h * (E1 * k1.w + E3 * k3.w + E4 * k4.w + E5 * k5.w + E6 * k6.w +
                         E7 * k7.w);
        double scale_u = std::max(s0, std::abs(y.u));
        double scale_w = std::max(s0, std::abs(y.w));
        double err = std::max(std::abs(eu) / scale_u, std::abs(ew) / scale_w);

        if (err <= opt.tol * h) {
            double r_new = r + h;
            // zero crossing within the step: bisect on the step length of the
            // one-step fifth-order flow from (r, y)
            if (y.u > 0.0 && y5.u <= 0.0) {
                auto flow = [&](double hh) {
                    State s2 = rhs(r + C2 * hh, {y.u + hh * A21 * k1.u, y.w + hh * A21 * k1.w});
                    State s3 = rhs(r + C3 * hh, {y.u + hh * (A31 * k1.u + A32 * s2.u),
                                                 y.w + hh * (A31 * k1.w + A32 * s2.w)});
                    State s4 =
                        rhs(r + C4 * hh, {y.u + hh * (A41 * k1.u + A42 * s2.u + A43 * s3.u),
                                          y.w + hh * (A41 * k1.w + A42 * s2.w + A43 * s3.w)});
                    State s5 = rhs(r + C5 * hh,
                                   {y.u + hh * (A51 * k1.u + A52 * s2.u + A53 * s3.u +
                                                A54 * s4.u),
                                    y.w + hh * (A51 * k1.w + A52 * s2.w + A53 * s3.w +
                                                A54 * s4.w)});
                    State s6 = rhs(r + hh, {y.u + hh * (A61 * k1.u + A62 * s2.u +
                                                        A63 * s3.u + A64 * s4.u +
                                                        A65 * s5.u),
                                            y.w + hh * (A61 * k1.w + A62 * s2.w +
                                                        A63 * s3.w + A64 * s4.w +
                                                        A65 * s5.w)});
                    return State{y.u + hh * (B1 * k1.u + B3 * s3.u + B4 * s4.u +
                                             B5 * s5.u + B6 * s6.u),
                                 y.w + hh * (B1 * k1.w + B3 * s3.w + B4 * s4.w +
                                             B5 * s5.w + B6 * s6.w)};
                };
                double target = opt.zero_tol_factor * s0;
                double lo = 0.0, hi = h;
                double hz = h;  // step length that produced yz
                State yz = y5;
                for (int it = 0; it < 200 && std::abs(yz.u) > target; ++it) {
                    double mid = 0.5 * (lo + hi);
                    yz = flow(mid);
                    hz = mid;
                    if (yz.u > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                    if (hi - lo <= 1e-16 * h) break;
                }
                double R = r + hz;
                prof.r.push_back(R);
                prof.u[0].push_back(yz.u);
                prof.du[0].push_back(yz.w);
                out.tag = ShootOutcome::Tag::FirstZero;
                out.first_zero = R;
                out.terminal_value = yz.u;
                out.terminal_derivative = yz.w;
                return {prof, out};
            }
            r = r_new;
            y = y5;
            k1 = k7;  // FSAL
            prof.r.push_back(r);
            prof.u[0].push_back(y.u);
            prof.du[0].push_back(y.w);
            if (y.w > 1e-9 * s0) nonmonotone = true;
            if (y.u > blowup) {
                out.tag = ShootOutcome::Tag::BlowUp;
                out.blowup_radius = r;
                out.terminal_value = y.u;
                out.terminal_derivative = y.w;
                return {prof, out};
            }
        }
        double grow = err > 0.0 ? 0.9 * std::pow(opt.tol * h / err, 0.25) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (!(h > 1e-14 * std::max(1.0, r))) {
            out.tag = ShootOutcome::Tag::Inconclusive;
            out.reason = "step size underflow at r = " + std::to_string(r);
            out.terminal_value = y.u;
            out.terminal_derivative = y.w;
            return {prof, out};
        }
    }

    out.terminal_value = y.u;
    out.terminal_derivative = y.w;
    if (r >= opt.r_max) {
        if (nonmonotone && f.positive()) {
            out.tag = ShootOutcome::Tag::Inconclusive;
            out.reason = "u' changed sign although f >= 0; integration suspect";
        } else {
            out.tag = ShootOutcome::Tag::PositiveOnHorizon;
        }
    } else {
        out.tag = ShootOutcome::Tag::Inconclusive;
        out.reason = "step limit reached";
    }
    return {prof, out};
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

ClosedFormProfile bubble_family(double B, double xi, double m_exponent,
                                const std::string& name) {
    double m = m_exponent;
    double x2 = xi * xi;
    ClosedFormProfile p;
    p.name = name;
    p.u = [B, m, x2](double r) { return B * std::pow(x2 + r * r, -m); };
    p.du = [B, m, x2](double r) { return -2.0 * m * B * r * std::pow(x2 + r * r, -m - 1.0); };
    p.d2u = [B, m, x2](double r) {
        double rho = x2 + r * r;
        return -2.0 * m * B * std::pow(rho, -m - 1.0) +
               4.0 * m * (m + 1.0) * B * r * r * std::pow(rho, -m - 2.0);
    };
    return p;
}

double benchmark_lambda(double p) { return (p - 1.0) * (p - 1.0) / (4.0 * p); }

ClosedFormProfile benchmark_explicit_solution(double p) {
    double lam = benchmark_lambda(p);
    double m = 1.0 / (p - 1.0);
    // (1 + lam r^2)^{-m} = lam^{-m} (1/lam + r^2)^{-m}
    return bubble_family(std::pow(lam, -m), std::sqrt(1.0 / lam), m,
                         "benchmark-explicit");
}

ClosedFormProfile critical_bubble(int n) {
    double c = 1.0 / (n * (n - 2.0));
    double m = (n - 2.0) / 2.0;
    return bubble_family(std::pow(c, -m), std::sqrt(1.0 / c), m, "critical-bubble");
}

ClosedFormProfile zero_profile() {
    ClosedFormProfile p;
    p.name = "zero";
    p.u = [](double) { return 0.0; };
    p.du = [](double) { return 0.0; };
    p.d2u = [](double) { return 0.0; };
    return p;
}

ResidualReport verify_closed_form(const ClosedFormProfile& cand, const ScalarNonlin& f,
                                  int n, double r_lo, double r_hi, int grid_n) {
    ResidualReport rep;
    for (int i = 0; i < grid_n; ++i) {
        double r = r_lo + (r_hi - r_lo) * i / (grid_n - 1);
        double res;
        if (r == 0.0) {
            res = std::abs(-n * cand.d2u(0.0) - f(cand.u(0.0)));
        } else {
            res = std::abs(-cand.d2u(r) - (n - 1) * cand.du(r) / r - f(cand.u(r)));
        }
        if (res > rep.max_residual) {
            rep.max_residual = res;
            rep.argmax = r;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Pohozaev functionals
// ---------------------------------------------------------------------------

double pohozaev_psi(const ScalarNonlin& f, int n, double s) {
    Exponents ex = exponents(n);
    double H = weighted_primitive(f, 0.0, s);
    return s * f(s) - (ex.p_S + 1.0) * H;
}

double pohozaev_positive_range(const ScalarNonlin& f, int n) {
    Exponents ex = exponents(n);
    auto grid = log_grid(1e-8, 1e8, 600);
    std::vector<double> H = weighted_primitive_table(f, 0.0, grid);
    auto psi_at = [&](std::size_t i) {
        return grid[i] * f(grid[i]) - (ex.p_S + 1.0) * H[i];
    };
    if (psi_at(0) < 0.0) return 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (psi_at(i) < 0.0) {
            // refine between grid points with an incremental primitive
            double a = grid[i - 1], b = grid[i];
            double Ha = H[i - 1];
            auto psi = [&](double s) {
                double Hs = Ha + integrate([&](double t) { return f(t); }, a, s, 1e-11);
                return s * f(s) - (ex.p_S + 1.0) * Hs;
            };
            return bisect(psi, a, b, 100);
        }
    }
    return grid.back();  // psi >= 0 on the whole scan range
}

namespace {

// ODE-consistent quintic reconstruction of a sampled profile: u and u' from
// the nodes, u'' from the equation itself. Keeps the interpolation error well
// below the integrator's node error so the volume quadrature is the knob.
class QuinticProfile {
  public:
    QuinticProfile(const RadialProfile& prof, const Vec2& diffusion,
                   const std::function<Vec2(double, double)>& force)
        : prof_(prof) {
        const std::size_t n = prof.r.size();
        acc_.assign(prof.m, std::vector<double>(n, 0.0));
        for (std::size_t j = 0; j < n; ++j) {
            double a = prof.u[0][j];
            double b = prof.m == 2 ? prof.u[1][j] : 0.0;
            Vec2 fv = force(a, b);
            for (int i = 0; i < prof.m; ++i) {
                double r = prof.r[j];
                double w = prof.du[i][j];
                if (r == 0.0)
                    acc_[i][j] = -fv[i] / (diffusion[i] * prof.n);
                else
                    acc_[i][j] = -fv[i] / diffusion[i] - (prof.n - 1) * w / r;
            }
        }
    }

    double value(int i, double rr) const {
        const auto& rs = prof_.r;
        if (rr <= rs.front()) return prof_.u[i].front();
        if (rr >= rs.back()) return prof_.u[i].back();
        auto it = std::upper_bound(rs.begin(), rs.end(), rr);
        std::size_t j = static_cast<std::size_t>(it - rs.begin());
        double h = rs[j] - rs[j - 1];
        double t = (rr - rs[j - 1]) / h;
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        double H3 = 10 * t3 - 15 * t4 + 6 * t5;
        double H4 = -4 * t3 + 7 * t4 - 3 * t5;
        double H5 = 0.5 * t3 - t4 + 0.5 * t5;
        return prof_.u[i][j - 1] * H0 + h * prof_.du[i][j - 1] * H1 +
               h * h * acc_[i][j - 1] * H2 + prof_.u[i][j] * H3 +
               h * prof_.du[i][j] * H4 + h * h * acc_[i][j] * H5;
    }

  private:
    const RadialProfile& prof_;
    std::vector<std::vector<double>> acc_;
};

PohozaevResidual rp_residual_impl(
    int n, int m, const Vec2& diffusion, double R, int quad_intervals,
    const std::function<double(int, double)>& uval,
    const std::function<double(int, double)>& uder,
    const std::function<double(double, double)>& potential,
    const std::function<Vec2(double, double)>& force) {
    double area = sphere_area(n);
    auto integrand = [&](double r) {
        double a = uval(0, r);
        double b = m == 2 ? uval(1, r) : 0.0;
        Vec2 fv = force(a, b);
        double dot = a * fv[0] + (m == 2 ? b * fv[1] : 0.0);
        return std::pow(r, n - 1) * (2.0 * n * potential(a, b) - (n - 2.0) * dot);
    };
    auto integrand_abs = [&](double r) {
        double a = uval(0, r);
        double b = m == 2 ? uval(1, r) : 0.0;
        Vec2 fv = force(a, b);
        double dot = std::abs(a * fv[0]) + (m == 2 ? std::abs(b * fv[1]) : 0.0);
        return std::pow(r, n - 1) *
               (2.0 * n * std::abs(potential(a, b)) + (n - 2.0) * dot);
    };
    PohozaevResidual out;
    out.volume_term = area * simpson(integrand, 0.0, R, quad_intervals);
    double vol_scale = area * simpson(integrand_abs, 0.0, R, quad_intervals);
    double aR = uval(0, R);
    double bR = m == 2 ? uval(1, R) : 0.0;
    double bdry = 2.0 * potential(aR, bR);
    double bdry_scale = 2.0 * std::abs(potential(aR, bR));
    for (int i = 0; i < m; ++i) {
        double ui = uval(i, R), wi = uder(i, R);
        bdry += diffusion[i] * (wi * wi + (n - 2.0) / R * ui * wi);
        bdry_scale += diffusion[i] * (wi * wi + (n - 2.0) / R * std::abs(ui * wi));
    }
    out.boundary_term = area * std::pow(R, n) * bdry;
    // relative to the magnitude of the terms entering the identity, so the
    // vacuous critical case (both sides 0) reports round-off, not 0/0
    double scale = std::max({std::abs(out.volume_term), std::abs(out.boundary_term),
                             vol_scale, area * std::pow(R, n) * bdry_scale, 1e-30});
    out.residual = std::abs(out.volume_term - out.boundary_term) / scale;
    return out;
}

PohozaevResidual rp_profile_residual(const RadialProfile& prof, const Vec2& diffusion,
                                     int m, double R, int quad_intervals,
                                     const std::function<double(double, double)>& F,
                                     const std::function<Vec2(double, double)>& force) {
    QuinticProfile q(prof, diffusion, force);
    return rp_residual_impl(
        prof.n, m, diffusion, R, quad_intervals,
        [&](int i, double r) { return q.value(i, r); },
        [&](int i, double r) { return prof.derivative(i, r); }, F, force);
}

}  // namespace

PohozaevResidual rellich_pohozaev_residual(const RadialProfile& prof,
                                           const ScalarNonlin& f, double R,
                                           int quad_intervals) {
    auto F = [&](double a, double) { return weighted_primitive(f, 0.0, a); };
    auto force = [&](double a, double) { return Vec2{a > 0.0 ? f(a) : 0.0, 0.0}; };
    return rp_profile_residual(prof, {1.0, 1.0}, 1, R, quad_intervals, F, force);
}

PohozaevResidual rellich_pohozaev_residual(const RadialProfile& prof,
                                           const SystemNonlin& S, double R,
                                           int quad_intervals) {
    if (S.kind() != SystemKind::Gradient && !(S.kind() == SystemKind::Generic && S.m() == 1))
        throw std::domain_error(
            "Rellich-Pohozaev residual needs a gradient system (potential missing)");
    std::function<double(double, double)> F;
    std::function<Vec2(double, double)> force;
    if (S.kind() == SystemKind::Gradient) {
        F = [&](double a, double b) { return S.potential_value(a, b); };
        force = [&](double a, double b) { return S.eval(a, b); };
    } else {
        ScalarNonlin f = ScalarNonlin::make(S.components()[0]);
        F = [f](double a, double) { return weighted_primitive(f, 0.0, a); };
        force = [f](double a, double) { return Vec2{a > 0.0 ? f(a) : 0.0, 0.0}; };
    }
    return rp_profile_residual(prof, S.diffusion, S.m(), R, quad_intervals, F, force);
}

PohozaevResidual rellich_pohozaev_residual(const ClosedFormProfile& prof,
                                           const ScalarNonlin& f, int n, double R,
                                           int quad_intervals) {
    auto F = [&](double a, double) { return weighted_primitive(f, 0.0, a); };
    auto force = [&](double a, double) { return Vec2{a > 0.0 ? f(a) : 0.0, 0.0}; };
    return rp_residual_impl(
        n, 1, {1.0, 1.0}, R, quad_intervals, [&](int, double r) { return prof.u(r); },
        [&](int, double r) { return prof.du(r); }, F, force);
}

// ---------------------------------------------------------------------------
// the u_k family
// ---------------------------------------------------------------------------

UkFamily uk_family(int n, int k) {
    if (n < 3 || k < 1) throw std::domain_error("uk_family requires n >= 3 and k >= 1");
    UkFamily fam;
    double kappa = double(n) / (n - 2);
    fam.p = kappa + 1.0 / k;
    fam.q = 2.0 * fam.p - 1.0;
    fam.xi = (n - 2.0) / (k * std::sqrt(fam.p) * (fam.p - 1.0));
    double A = 2.0 * k * fam.p / (n - 2.0);
    fam.M = std::pow(A, 1.0 / (fam.p - 1.0));
    double m = 1.0 / (fam.p - 1.0);
    double B = std::pow(A * fam.xi * fam.xi, m);
    fam.profile = bubble_family(B, fam.xi, m, "u_k");
    fam.f = ScalarNonlin::parse("u^p + u^q", {{"p", fam.p}, {"q", fam.q}});
    return fam;
}

}  // namespace ellab
