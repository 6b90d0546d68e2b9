#include "ellab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellab/numerics.hpp"

namespace ellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 2x2 block for the coupled Newton systems (m = 1 uses the upper-left entry).
struct Block {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

Block inverse(const Block& B, int m) {
    Block inv;
    if (m == 1) {
        inv.a[0][0] = 1.0 / B.a[0][0];
        return inv;
    }
    double det = B.a[0][0] * B.a[1][1] - B.a[0][1] * B.a[1][0];
    if (det == 0.0) throw std::runtime_error("singular Jacobian block");
    inv.a[0][0] = B.a[1][1] / det;
    inv.a[0][1] = -B.a[0][1] / det;
    inv.a[1][0] = -B.a[1][0] / det;
    inv.a[1][1] = B.a[0][0] / det;
    return inv;
}

Block mul(const Block& A, const Block& B, int m) {
    Block C;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) C.a[i][j] += A.a[i][k] * B.a[k][j];
    return C;
}

Vec2 mulv(const Block& A, const Vec2& x, int m) {
    Vec2 y{0.0, 0.0};
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) y[i] += A.a[i][k] * x[k];
    return y;
}

// f with components extended by 0 for negative arguments (paper convention);
// keeps Newton iterates well-defined when they dip below zero.
Vec2 eval_ext(const SystemNonlin& S, double a, double b) {
    double ac = std::max(a, 0.0);
    double bc = std::max(b, 0.0);
    return S.eval(ac, bc);
}

Block jac_ext(const SystemNonlin& S, double a, double b) {
    Block J;
    double ac = std::max(a, 0.0);
    double bc = std::max(b, 0.0);
    for (int i = 0; i < S.m(); ++i) {
        if (a > 0.0) J.a[i][0] = eval_d(S.components()[i], ac, bc, Var::u).der;
        if (S.m() == 2 && b > 0.0)
            J.a[i][1] = eval_d(S.components()[i], ac, bc, Var::v).der;
    }
    return J;
}

}  // namespace

double BVPSolution::max_norm() const {
    double v = 0.0;
    for (const auto& comp : u)
        for (double x : comp) v = std::max(v, std::abs(x));
    return v;
}

double BVPSolution::residual_norm(const SystemNonlin& S) const {
    const int N = static_cast<int>(r.size()) - 1;
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
        Vec2 fv = eval_ext(S, u[0][j], m == 2 ? u[1][j] : 0.0);
        for (int i = 0; i < m; ++i) {
            double lap;
            if (j == 0) {
                lap = 2.0 * n * (u[i][1] - u[i][0]) / (h * h);
            } else {
                lap = (u[i][j + 1] - 2.0 * u[i][j] + u[i][j - 1]) / (h * h) +
                      (n - 1) / r[j] * (u[i][j + 1] - u[i][j - 1]) / (2.0 * h);
            }
            worst = std::max(worst, std::abs(-S.diffusion[i] * lap - fv[i]));
        }
    }
    return worst;
}

BVPSolution solve_ball(const SystemNonlin& S, int n, double R, Vec2 boundary,
                       const InitialGuess& guess, const SolveOptions& opt) {
    const int m = S.m();
    const int N = opt.mesh_n;
    if (N < 64) throw std::domain_error("mesh too coarse: need h <= R/64");
    if (boundary[0] < 0.0 || boundary[1] < 0.0)
        throw std::domain_error("boundary values must be nonnegative");

    BVPSolution sol;
    sol.n = n;
    sol.m = m;
    sol.R = R;
    sol.h = R / N;
    sol.boundary = boundary;
    sol.r.resize(N + 1);
    for (int j = 0; j <= N; ++j) sol.r[j] = R * j / N;
    sol.u.assign(m, std::vector<double>(N + 1, 0.0));

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= N; ++j) {
            double rr = sol.r[j];
            switch (guess.kind) {
                case GuessKind::Zero: sol.u[i][j] = 0.0; break;
                case GuessKind::Constant: sol.u[i][j] = guess.constant; break;
                case GuessKind::Bump:
                    sol.u[i][j] =
                        guess.amplitude * std::exp(-rr * rr / (2.0 * guess.width * guess.width));
                    break;
                case GuessKind::Profile:
                    sol.u[i][j] = guess.profile->value(std::min(i, guess.profile->m - 1), rr);
                    break;
            }
        }
        sol.u[i][N] = boundary[i];
    }

    const double h = sol.h;
    const double h2 = h * h;

    // returns the max-norm; also accumulates the squared 2-norm used by the
    // damped line search (max-norm damping stalls near folds)
    double fnorm2 = 0.0;
    auto residual = [&](const std::vector<std::vector<double>>& u, std::vector<Vec2>& F,
                        double* norm2) {
        double norm = 0.0;
        double sq = 0.0;
        for (int j = 0; j < N; ++j) {
            Vec2 fv = eval_ext(S, u[0][j], m == 2 ? u[1][j] : 0.0);
            for (int i = 0; i < m; ++i) {
                double lap;
                if (j == 0)
                    lap = 2.0 * n * (u[i][1] - u[i][0]) / h2;
                else
                    lap = (u[i][j + 1] - 2.0 * u[i][j] + u[i][j - 1]) / h2 +
                          (n - 1) / sol.r[j] * (u[i][j + 1] - u[i][j - 1]) / (2.0 * h);
                F[j][i] = -S.diffusion[i] * lap - fv[i];
                norm = std::max(norm, std::abs(F[j][i]));
                sq += F[j][i] * F[j][i];
            }
        }
        if (norm2) *norm2 = sq;
        return norm;
    };

    std::vector<Vec2> F(N), rhs(N), delta(N);
    std::vector<Block> diag(N), lower(N), upper(N);
    double fnorm = residual(sol.u, F, &fnorm2);

    for (int it = 0; it < opt.max_newton; ++it) {
        double fmax = 0.0;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < m; ++i)
                fmax = std::max(fmax, std::abs(S.component(
                                          i, std::max(sol.u[0][j], 0.0),
                                          m == 2 ? std::max(sol.u[1][j], 0.0) : 0.0)));
        double tol = opt.residual_tol_factor * (1.0 + fmax);
        if (fnorm <= tol) {
            sol.converged = true;
            sol.newton_iterations = it;
            sol.final_residual = fnorm;
            return sol;
        }

        // assemble the block-tridiagonal Jacobian of the residual
        for (int j = 0; j < N; ++j) {
            Block J = jac_ext(S, sol.u[0][j], m == 2 ? sol.u[1][j] : 0.0);
            diag[j] = Block{};
            lower[j] = Block{};
            upper[j] = Block{};
            for (int i = 0; i < m; ++i) {
                if (j == 0) {
                    diag[j].a[i][i] = 2.0 * n * S.diffusion[i] / h2;
                    upper[j].a[i][i] = -2.0 * n * S.diffusion[i] / h2;
                } else {
                    double cw = (n - 1) / sol.r[j] / (2.0 * h);
                    diag[j].a[i][i] = 2.0 * S.diffusion[i] / h2;
                    lower[j].a[i][i] = -S.diffusion[i] * (1.0 / h2 - cw);
                    upper[j].a[i][i] = -S.diffusion[i] * (1.0 / h2 + cw);
                }
                for (int kk = 0; kk < m; ++kk) diag[j].a[i][kk] -= J.a[i][kk];
            }
        }
        // Thomas elimination for J delta = -F
        try {
            for (int j = 0; j < N; ++j) rhs[j] = {-F[j][0], -F[j][1]};
            std::vector<Block> dmod(N);
            std::vector<Vec2> rmod(N);
            dmod[0] = diag[0];
            rmod[0] = rhs[0];
            for (int j = 1; j < N; ++j) {
                Block Linv = mul(lower[j], inverse(dmod[j - 1], m), m);
                dmod[j] = diag[j];
                Block LU = mul(Linv, upper[j - 1], m);
                for (int i = 0; i < m; ++i)
                    for (int kk = 0; kk < m; ++kk) dmod[j].a[i][kk] -= LU.a[i][kk];
                Vec2 Lr = mulv(Linv, rmod[j - 1], m);
                rmod[j] = {rhs[j][0] - Lr[0], rhs[j][1] - Lr[1]};
            }
            delta[N - 1] = mulv(inverse(dmod[N - 1], m), rmod[N - 1], m);
            for (int j = N - 2; j >= 0; --j) {
                Vec2 Ud = mulv(upper[j], delta[j + 1], m);
                Vec2 rr{rmod[j][0] - Ud[0], rmod[j][1] - Ud[1]};
                delta[j] = mulv(inverse(dmod[j], m), rr, m);
            }
        } catch (const std::runtime_error& e) {
            sol.converged = false;
            sol.newton_iterations = it;
            sol.final_residual = fnorm;
            sol.failure = e.what();  // singular Jacobian block
            return sol;
        }

        // damped update: halve until the squared residual decreases
        double step = 1.0;
        bool improved = false;
        std::vector<std::vector<double>> trial = sol.u;
        for (int half = 0; half < 40; ++half) {
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < m; ++i)
                    trial[i][j] = sol.u[i][j] + step * delta[j][i];
            double sq;
            double fn = residual(trial, F, &sq);
            if (sq < fnorm2) {
                sol.u = trial;
                fnorm = fn;
                fnorm2 = sq;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            sol.converged = false;
            sol.newton_iterations = it + 1;
            sol.final_residual = fnorm;
            sol.failure = "Newton stalled: no damped step decreased the residual";
            return sol;
        }
    }
    // recompute the residual of the final iterate
    sol.final_residual = residual(sol.u, F, nullptr);
    sol.newton_iterations = opt.max_newton;
    sol.converged = false;
    sol.failure = "Newton did not converge within the iteration budget";
    return sol;
}

BVPSolution solve_ball(const ScalarNonlin& f, int n, double R, double boundary,
                       const InitialGuess& guess, const SolveOptions& opt) {
    return solve_ball(SystemNonlin::scalar(f), n, R, {boundary, 0.0}, guess, opt);
}

BVPSolution ground_state(const ScalarNonlin& f, int n, double R,
                         const SolveOptions& opt) {
    // locate the center value whose shooting trajectory first vanishes at R
    ShootOptions sopt;
    sopt.tol = 1e-9;
    sopt.r_max = 50.0 * R;
    auto zero_of = [&](double s0) -> double {
        auto [prof, out] = shoot(f, n, s0, sopt);
        (void)prof;
        if (out.tag == ShootOutcome::Tag::FirstZero) return out.first_zero;
        if (out.tag == ShootOutcome::Tag::BlowUp) return 0.0;  // treat as tiny ball
        return kInf;
    };
    double lo = 1e-4, hi = 1e4;
    double zlo = zero_of(lo), zhi = zero_of(hi);
    // first zero shrinks as the center value grows (superlinear f)
    if (!(zlo > R && zhi < R))
        throw std::runtime_error("ground_state: could not bracket the center value");
    for (int it = 0; it < 60; ++it) {
        double mid = std::sqrt(lo * hi);
        double z = zero_of(mid);
        if (z > R)
            lo = mid;
        else
            hi = mid;
    }
    double s0 = std::sqrt(lo * hi);
    auto [prof, out] = shoot(f, n, s0, sopt);
    if (out.tag != ShootOutcome::Tag::FirstZero)
        throw std::runtime_error("ground_state: final shot lost the first zero");
    // rescale the profile radially so its zero lands exactly on R
    RadialProfile scaled = prof;
    double fac = R / out.first_zero;
    for (auto& rr : scaled.r) rr *= fac;
    for (auto& w : scaled.du[0]) w /= fac;

    InitialGuess g;
    g.kind = GuessKind::Profile;
    g.profile = &scaled;
    BVPSolution sol = solve_ball(SystemNonlin::scalar(f), n, R, {0.0, 0.0}, g, opt);
    if (!sol.converged)
        throw std::runtime_error("ground_state: Newton polish failed: " + sol.failure);
    return sol;
}

// ---------------------------------------------------------------------------
// h-calculus
// ---------------------------------------------------------------------------

HCalculus::HCalculus(ScalarNonlin f1, ScalarNonlin f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
    auto grid = log_grid(1e-6, 1e6, 600);
    auto hv = [&](const ScalarNonlin& f, double s) { return s * f(s); };

    // positivity of f_i for large s (hypothesis check)
    for (double s : log_grid(1e2, 1e6, 50))
        if (!(f1_(s) > 0.0) || !(f2_(s) > 0.0))
            throw std::domain_error("h-calculus requires f_i > 0 for large s");

    // monotonicity onset: smallest grid point from which h1 and h2 increase
    std::vector<double> h1v(grid.size()), h2v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        h1v[i] = hv(f1_, grid[i]);
        h2v[i] = hv(f2_, grid[i]);
    }
    std::size_t onset = grid.size();
    for (std::size_t i = grid.size() - 1; i > 0; --i) {
        bool ok = h1v[i] > h1v[i - 1] && h2v[i] > h2v[i - 1] && f1_(grid[i]) > 0.0 &&
                  f2_(grid[i]) > 0.0;
        if (ok)
            onset = i - 1;
        else
            break;
    }
    if (onset + 10 >= grid.size())
        throw std::domain_error("h-calculus: monotonicity never stabilizes on the scan range");
    s0_ = grid[onset];

    A1_ = 0.0;
    A2_ = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        A1_ = std::min(A1_, h1v[i]);
        A2_ = std::min(A2_, h2v[i]);
    }

    // A: smallest grid value >= 2 max(s0, -A1, -A2) with phi increasing beyond
    double t_floor = std::max({2.0 * std::max({s0_, -A1_, -A2_}), h1(s0_), h2(s0_)});
    auto tgrid = log_grid(std::max(t_floor, 1e-6), 1e6, 200);
    std::vector<double> phis(tgrid.size());
    for (std::size_t j = 0; j < tgrid.size(); ++j) phis[j] = phi(tgrid[j]);
    std::size_t c = tgrid.size() - 1;
    while (c > 0 && phis[c] >= phis[c - 1] * (1.0 - 1e-9)) --c;
    A_ = tgrid[c];
}

double HCalculus::h1(double s) const { return s * f1_(s); }
double HCalculus::h2(double s) const { return s * f2_(s); }

double HCalculus::inv(const ScalarNonlin& f, double t) const {
    auto hv = [&](double s) { return s * f(s); };
    if (t <= hv(s0_)) return s0_;
    double lo = s0_, hi = std::max(2.0 * s0_, 1.0);
    int guard = 0;
    while (hv(hi) < t) {
        hi *= 2.0;
        if (++guard > 400) throw std::runtime_error("h inverse: bracket overflow");
    }
    return bisect([&](double s) { return hv(s) - t; }, lo, hi, 200);
}

double HCalculus::h1_inv(double t) const { return inv(f1_, t); }
double HCalculus::h2_inv(double t) const { return inv(f2_, t); }
double HCalculus::comp_12(double u) const { return h1_inv(h2(u)); }
double HCalculus::comp_21(double v) const { return h2_inv(h1(v)); }
double HCalculus::phi(double t) const { return t / (h1_inv(t) * h2_inv(t)); }
double HCalculus::N(double t1, double t2) const { return 2.0 * A_ + h1(t2) + h2(t1); }

HCalculus h_calculus(const ScalarNonlin& f1, const ScalarNonlin& f2) {
    return HCalculus(f1, f2);
}

// ---------------------------------------------------------------------------
// bound reports
// ---------------------------------------------------------------------------

BoundReport bound_report(const std::vector<BVPSolution>& solutions, BoundMode mode,
                         const SystemNonlin& S, const HCalculus* hcal, double Lambda) {
    if (mode == BoundMode::LaneEmden && hcal == nullptr)
        throw std::domain_error("lane-emden bound report needs an h-calculus");
    BoundReport rep;
    rep.mode = mode;
    rep.lambda_threshold = Lambda;
    switch (mode) {
        case BoundMode::Scalar: rep.quantity = "f(u) d^2 / u"; break;
        case BoundMode::System: rep.quantity = "|f(U)| d^2 / |U|"; break;
        case BoundMode::LaneEmden:
            rep.quantity = "f2(u) d^2 / (h1^-1 o h2)(u) and symmetric";
            break;
    }
    rep.family_max = -kInf;
    rep.family_min = kInf;
    for (const auto& sol : solutions) {
        DomainSup ds;
        ds.R = sol.R;
        // all nodes strictly inside the ball, including the center
        for (std::size_t j = 0; j + 1 < sol.r.size(); ++j) {
            double d = sol.dist(j);
            double a = sol.u[0][j];
            double b = sol.m == 2 ? sol.u[1][j] : 0.0;
            double q = -kInf;
            if (mode == BoundMode::Scalar) {
                if (!(a > 0.0)) continue;
                q = S.component(0, a, 0.0) * d * d / a;
                ++ds.nodes_in_region;
            } else if (mode == BoundMode::System) {
                double norm = std::max(a, b);
                if (!(norm >= Lambda)) continue;
                q = S.norm_at(a, b) * d * d / norm;
                ++ds.nodes_in_region;
            } else {
                bool any = false;
                if (a >= hcal->s0()) {
                    q = std::max(q, hcal->f2()(a) * d * d / hcal->comp_12(a));
                    any = true;
                }
                if (b >= hcal->s0()) {
                    q = std::max(q, hcal->f1()(b) * d * d / hcal->comp_21(b));
                    any = true;
                }
                if (!any) continue;
                ++ds.nodes_in_region;
            }
            if (q > ds.sup) {
                ds.sup = q;
                ds.arg_r = sol.r[j];
            }
        }
        if (ds.nodes_in_region == 0)
            rep.warnings.push_back("no nodes inside the tested region at R = " +
                                   std::to_string(sol.R));
        rep.per_domain.push_back(ds);
        rep.family_max = std::max(rep.family_max, ds.sup);
        if (ds.nodes_in_region > 0) rep.family_min = std::min(rep.family_min, ds.sup);
    }
    rep.family_ratio = rep.family_min > 0.0 ? rep.family_max / rep.family_min : kInf;
    return rep;
}

// ---------------------------------------------------------------------------
// decay scan
// ---------------------------------------------------------------------------

std::vector<DecayScanRow> decay_scan(const ScalarNonlin& f, int n, double Lambda,
                                     double boundary, std::vector<double> radii,
                                     const SolveOptions& opt) {
    if (!(boundary >= 0.0 && boundary <= Lambda))
        throw std::domain_error("boundary value must lie in [0, Lambda]");
    std::sort(radii.rbegin(), radii.rend());  // decreasing R order
    std::vector<DecayScanRow> rows;
    for (double R : radii) {
        DecayScanRow row;
        row.R = R;
        InitialGuess g;
        g.kind = GuessKind::Constant;
        g.constant = boundary;  // zero-plus-boundary-lift
        BVPSolution sol = solve_ball(SystemNonlin::scalar(f), n, R, {boundary, 0.0}, g, opt);
        row.converged = sol.converged;
        row.center = std::abs(sol.center());
        row.branch_jump = sol.converged && sol.max_norm() > Lambda;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// proportional counterexamples
// ---------------------------------------------------------------------------

CounterexampleReport proportional_counterexample(double p, double q, double lambda,
                                                 Geometry geometry, double x_max,
                                                 int grid_n) {
    if (!(q >= p && p > 0.0)) throw std::domain_error("need q >= p > 0");
    if (!(p + q <= 1.0)) throw std::domain_error("need p + q <= 1");
    if (!(lambda > 0.0)) throw std::domain_error("need lambda > 0");

    CounterexampleReport rep;
    std::function<double(double)> w, w2;  // value and second derivative
    if (p + q < 1.0) {
        double a = 2.0 / (1.0 - p - q);
        double c = std::pow(lambda / (a * (a - 1.0)), 0.5 * a);
        rep.form = "c x^a";
        rep.a = a;
        rep.c = c;
        w = [c, a](double x) { return c * std::pow(x, a); };
        w2 = [c, a](double x) { return c * a * (a - 1.0) * std::pow(x, a - 2.0); };
    } else {
        double rt = std::sqrt(lambda);
        if (geometry == Geometry::WholeSpace) {
            rep.form = "cosh(sqrt(lambda) x)";
            w = [rt](double x) { return std::cosh(rt * x); };
        } else {
            rep.form = "sinh(sqrt(lambda) x)";
            w = [rt](double x) { return std::sinh(rt * x); };
        }
        w2 = [&, rt](double x) { return lambda * w(x); };
    }

    for (int i = 0; i < grid_n; ++i) {
        double x = x_max * i / (grid_n - 1);
        if (geometry == Geometry::WholeSpace && p + q < 1.0 && x == 0.0) x = 0.0;
        double wv = w(x);
        double lhs = w2(x);
        double rhs = lambda * std::pow(wv, p + q);
        double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        if (x == 0.0 && lhs == 0.0 && rhs == 0.0) rel = 0.0;
        rep.max_rel_residual_first = std::max(rep.max_rel_residual_first, rel);
        // second equation: -Delta 0 = k(0) (g(w) - lambda g(0)) = 0 * (...)
        double second = std::pow(0.0, p) * (std::pow(wv, q) - 0.0);
        rep.max_residual_second = std::max(rep.max_residual_second, std::abs(second));
        rep.x.push_back(x);
        rep.w.push_back(wv);
    }
    return rep;
}

}  // namespace ellab
