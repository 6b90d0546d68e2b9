#include "ellab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellab/numerics.hpp"

namespace ellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScanTol = 1e-9;
constexpr double kScanLo = 1e-6;
constexpr double kScanHi = 1e6;
constexpr int kScanN = 2048;

void scan_metadata(CheckVerdict* cv, int points) {
    cv->details["scan_lo"] = kScanLo;
    cv->details["scan_hi"] = kScanHi;
    cv->details["scan_points"] = points;
    cv->details["scan_tol"] = kScanTol;
}

std::vector<double> scan_grid_with(const std::vector<double>& kinks) {
    std::vector<double> g = log_grid(kScanLo, kScanHi, kScanN);
    for (double k : kinks)
        if (k > kScanLo && k < kScanHi) g.push_back(k);
    std::sort(g.begin(), g.end());
    return g;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        default: return "indeterminate";
    }
}

Exponents exponents(int n, Geometry geometry) {
    if (n < 1) throw std::domain_error("dimension must be >= 1");
    Exponents e;
    e.n = n;
    e.geometry = geometry;
    if (n <= 2) {
        e.p_S = kInf;
        e.p_star = kInf;
        e.kappa = kInf;
        e.p_star_star = kInf;
        return e;
    }
    e.p_S = double(n + 2) / (n - 2);
    e.p_star = n <= 4 ? e.p_S : double(n - 1) / (n - 3);
    e.kappa = double(n) / (n - 2);
    e.p_star_star = geometry == Geometry::WholeSpace ? e.p_star : e.kappa;
    return e;
}

// ---------------------------------------------------------------------------
// Theorem B
// ---------------------------------------------------------------------------

CheckVerdict check_theorem_B(const ScalarNonlin& f, int n) {
    if (!f.positive())
        throw std::domain_error("Theorem B checker requires f > 0 on (0, inf)");
    Exponents ex = exponents(n);
    CheckVerdict cv;
    cv.theorem = "B";
    if (n <= 2) {
        cv.holds = Verdict::Yes;
        cv.margin = kInf;
        cv.notes.push_back("p_S = inf for n <= 2; growth condition vacuous");
        return cv;
    }
    auto ratio = [&](double s) {
        ValDer vd = f.value_and_derivative(s);
        return s * vd.der / vd.val;
    };
    ScanResult sup = scan_sup(ratio, kScanLo, kScanHi, kScanN, f.kinks());
    // one-sided values at the kinks
    for (double k : f.kinks()) {
        for (Side side : {Side::Left, Side::Right}) {
            ValDer vd = f.value_and_derivative(k, side);
            double r = k * vd.der / vd.val;
            if (r > sup.value) {
                sup.value = r;
                sup.arg = k;
            }
        }
    }
    // nonconstancy of s^{-p_S} f(s): total variation over the grid
    double tv = 0.0, gmax = 0.0, prev = 0.0;
    bool first = true;
    for (double s : log_grid(kScanLo, kScanHi, 256)) {
        double g = std::pow(s, -ex.p_S) * f(s);
        gmax = std::max(gmax, std::abs(g));
        if (!first) tv += std::abs(g - prev);
        prev = g;
        first = false;
    }
    bool nonconstant = tv > kScanTol * std::max(gmax, 1e-300);

    cv.margin = ex.p_S - sup.value;
    scan_metadata(&cv, kScanN);
    cv.details["sup_s_fprime_over_f"] = sup.value;
    cv.details["sup_arg"] = sup.arg;
    cv.details["total_variation"] = tv;
    if (std::abs(cv.margin) <= kScanTol) {
        cv.holds = Verdict::Indeterminate;
    } else if (cv.margin < 0.0) {
        cv.holds = Verdict::No;
        cv.witness = {sup.arg};
    } else {
        cv.holds = nonconstant ? Verdict::Yes : Verdict::No;
        if (!nonconstant) cv.notes.push_back("s^-pS f(s) is constant over the scan range");
    }
    return cv;
}

CheckVerdict check_theorem_A(const ScalarNonlin& f, int n) {
    Exponents ex = exponents(n);
    RegVarProfile prof = regvar_profile(f);
    CheckVerdict cv;
    cv.theorem = "A";
    double p = prof.index_infinity;
    cv.details["p"] = p;
    cv.details["index_zero"] = prof.index_zero;
    if (std::abs(prof.index_zero - p) > 1e-6)
        cv.notes.push_back("indices at 0 and infinity differ; Theorem A assumes a pure power");
    cv.margin = std::min(p - 1.0, ex.p_S - p);
    if (std::abs(cv.margin) <= kScanTol)
        cv.holds = Verdict::Indeterminate;
    else
        cv.holds = cv.margin > 0.0 ? Verdict::Yes : Verdict::No;
    return cv;
}

// ---------------------------------------------------------------------------
// Modified Gidas-Spruck criterion
// ---------------------------------------------------------------------------

CheckVerdict check_gs_modified(const ScalarNonlin& f, int n) {
    if (n < 3) throw std::domain_error("modified GS criterion requires n >= 3");
    Exponents ex = exponents(n);
    CheckVerdict cv;
    cv.theorem = "GS-modified";

    std::vector<double> grid = scan_grid_with(f.kinks());
    std::vector<double> phi = weighted_primitive_table(f, -ex.kappa, grid);
    RegVarProfile prof = regvar_profile(f);
    cv.details["index_zero"] = prof.index_zero;
    cv.details["index_infinity"] = prof.index_infinity;
    cv.details["indices_in_window"] =
        (prof.index_zero > 1.0 && prof.index_zero < ex.p_S && prof.index_infinity > 1.0 &&
         prof.index_infinity < ex.p_S)
            ? 1.0
            : 0.0;

    if (std::isinf(phi.back())) {
        cv.holds = Verdict::Yes;
        cv.margin = kInf;
        cv.notes.push_back("phi(s) = inf: growth condition holds vacuously");
        return cv;
    }

    double Q = -kInf, Qarg = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(phi[i] > 0.0)) continue;
        double r = f(grid[i]) / (std::pow(grid[i], ex.kappa - 1.0) * phi[i]);
        if (r > Q) {
            Q = r;
            Qarg = grid[i];
        }
    }
    // local refinement around the grid argmax
    auto it = std::lower_bound(grid.begin(), grid.end(), Qarg);
    std::size_t idx = static_cast<std::size_t>(it - grid.begin());
    double lo = grid[idx > 0 ? idx - 1 : 0];
    double hi = grid[std::min(grid.size() - 1, idx + 1)];
    std::size_t ilo = idx > 0 ? idx - 1 : 0;
    auto ratio_at = [&](double s) {
        double ph = phi[ilo];
        ph += integrate([&](double t) { return std::pow(t, -ex.kappa) * f(t); }, grid[ilo],
                        s, 1e-11);
        return f(s) / (std::pow(s, ex.kappa - 1.0) * ph);
    };
    auto [xr, vr] = golden_max(ratio_at, lo, hi, 1e-10);
    if (vr > Q) {
        Q = vr;
        Qarg = xr;
    }

    cv.margin = ex.kappa - Q;
    scan_metadata(&cv, static_cast<int>(grid.size()));
    cv.details["Q"] = Q;
    cv.details["sup_arg"] = Qarg;
    if (std::abs(cv.margin) <= kScanTol) {
        cv.holds = Verdict::Indeterminate;
    } else if (cv.margin < 0.0) {
        cv.holds = Verdict::No;
        cv.witness = {Qarg};
    } else {
        cv.holds = Verdict::Yes;
    }
    return cv;
}

// ---------------------------------------------------------------------------
// General Gidas-Spruck criterion
// ---------------------------------------------------------------------------

namespace {

// log-log slope of g over the outermost decade toward an end of the scan range
double end_slope(const std::function<double(double)>& g, End end) {
    double lo = end == End::Zero ? kScanLo : kScanHi / 10.0;
    double hi = end == End::Zero ? kScanLo * 10.0 : kScanHi;
    std::vector<double> lx, ly;
    for (double s : log_grid(lo, hi, 9)) {
        double val = g(s);
        if (!(val > 0.0) || !std::isfinite(val)) return kInf;
        lx.push_back(std::log(s));
        ly.push_back(std::log(val));
    }
    return lstsq_slope(lx, ly);
}

}  // namespace

namespace {

// Grid, weighted primitive and ratios shared between the explicit check and
// the parameter search; depends on (f, n, q) only.
struct GsTables {
    std::vector<double> grid;
    std::vector<double> Fq;
    double q = 0.0;
    double p0 = 0.0;  // local index of f at 0
    double cq = 0.0;
    double cq_arg = 0.0;
    bool divergent = false;

    double fq_at(const ScalarNonlin& f, double s) const {
        auto it = std::upper_bound(grid.begin(), grid.end(), s);
        std::size_t i =
            it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
        return Fq[i] +
               integrate([&](double t) { return std::pow(t, q - 1.0) * f(t); }, grid[i], s,
                         1e-10);
    }
};

GsTables gs_tables(const ScalarNonlin& f, double q, double p0) {
    GsTables t;
    t.q = q;
    t.p0 = p0;
    if (q <= -p0 + 1e-12) {
        t.divergent = true;
        return t;
    }
    t.grid = scan_grid_with(f.kinks());
    t.Fq = weighted_primitive_table(f, q - 1.0, t.grid);
    if (std::isinf(t.Fq.back())) {
        t.divergent = true;
        return t;
    }
    t.cq = -kInf;
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        if (!(t.Fq[i] > 0.0)) continue;
        double r = std::pow(t.grid[i], q) * f(t.grid[i]) / t.Fq[i];
        if (r > t.cq) {
            t.cq = r;
            t.cq_arg = t.grid[i];
        }
    }
    return t;
}

void gs_alpha_beta(int n, double q, double k, double* alpha, double* beta,
                   double* gamma) {
    *alpha = -double(n - 1) / n * k * k + (q - 1.0) * k - q * (q - 1.0) / 2.0;
    *beta = double(n + 2) / n * k - 1.5 * q;
    *gamma = -double(n - 1) / n;
}

double gs4_slope(const ScalarNonlin& f, const GsTables& t, double m, End end) {
    return end_slope(
        [&](double s) {
            return std::pow(s, (1.0 - t.q / 2.0) * m) *
                   std::pow(t.fq_at(f, s), 2.0 * m - 1.0) / f(s);
        },
        end);
}

double gs3_slope(const ScalarNonlin& f, const GsTables& t, double g, End end) {
    return end_slope(
        [&](double s) { return std::pow(s, (2.0 + t.q) * g) / (f(s) * t.fq_at(f, s)); },
        end);
}

void gs_param_ranges(int n, double* m_hi, double* g_hi) {
    *m_hi = 3 * n - 4 > 0 ? 2.0 * n / (3 * n - 4) : kInf;
    *g_hi = n > 4 ? double(n) / (n - 4) : kInf;
}

CheckVerdict gs_general_from_tables(const ScalarNonlin& f, int n,
                                    const GsGeneralParams& prm, const GsTables& t) {
    CheckVerdict cv;
    cv.theorem = "GS-general";
    cv.details["p_local_zero"] = t.p0;
    if (t.divergent) {
        cv.holds = Verdict::No;
        cv.margin = prm.q + t.p0;
        cv.notes.push_back("F_q diverges at 0 (q <= -p); criterion not applicable");
        return cv;
    }

    double alpha, beta, gamma;
    gs_alpha_beta(n, prm.q, prm.k, &alpha, &beta, &gamma);
    scan_metadata(&cv, static_cast<int>(t.grid.size()));
    cv.details["alpha"] = alpha;
    cv.details["beta"] = beta;
    cv.details["gamma"] = gamma;
    cv.details["c_q"] = t.cq;
    cv.details["c_q_arg"] = t.cq_arg;

    double m5a = alpha;
    double m5b = -beta + t.cq * gamma;
    cv.details["hypGS5_alpha"] = m5a;
    cv.details["hypGS5_beta_term"] = m5b;

    // f-Lip on omega_1: f(s) <= C s^p with p the local index at 0
    auto flip = [&](double s) { return f(s) / std::pow(s, t.p0); };
    cv.details["fLip_sup"] = scan_sup(flip, kScanLo, 1.0, 256, f.kinks()).value;
    double flip_slope = end_slope(flip, End::Zero);
    cv.details["fLip_end_slope"] = flip_slope;
    bool flip_ok = flip_slope > -1e-2;

    double gs4_s1 = gs4_slope(f, t, prm.m1, End::Zero);
    double gs4_s2 = gs4_slope(f, t, prm.m2, End::Infinity);
    cv.details["hypGS4_slope_omega1"] = gs4_s1;
    cv.details["hypGS4_slope_omega2"] = gs4_s2;
    bool gs4_ok = gs4_s1 > -1e-6 && gs4_s2 < 1e-6;

    bool gs3_ok = true;
    if (prm.q > -2.0) {
        double gs3_s1 = gs3_slope(f, t, prm.gamma1, End::Zero);
        double gs3_s2 = gs3_slope(f, t, prm.gamma2, End::Infinity);
        cv.details["hypGS3_slope_omega1"] = gs3_s1;
        cv.details["hypGS3_slope_omega2"] = gs3_s2;
        gs3_ok = gs3_s1 > -1e-6 && gs3_s2 < 1e-6;
    }

    cv.margin = std::min(m5a, m5b);
    if (!flip_ok || !gs4_ok || !gs3_ok) {
        cv.holds = Verdict::No;
        cv.notes.push_back("a growth-window condition diverges toward an endpoint");
        cv.margin = std::min(cv.margin, -1.0);
    } else if (std::abs(cv.margin) <= kScanTol) {
        cv.holds = Verdict::Indeterminate;
    } else if (cv.margin < 0.0) {
        cv.holds = Verdict::No;
        cv.witness = {t.cq_arg};
    } else {
        cv.holds = Verdict::Yes;
    }
    return cv;
}

}  // namespace

CheckVerdict check_gs_general(const ScalarNonlin& f, int n, const GsGeneralParams& prm) {
    if (n < 3) throw std::domain_error("general GS criterion requires n >= 3");
    if (prm.k == -1.0) throw std::domain_error("k = -1 is excluded");
    if (prm.q < -2.0) throw std::domain_error("q >= -2 is required");
    if (prm.q == -2.0 && n != 3) throw std::domain_error("q = -2 requires n = 3");
    double m_hi, g_hi;
    gs_param_ranges(n, &m_hi, &g_hi);
    for (double m : {prm.m1, prm.m2})
        if (!(m > 2.0 / 3.0 && m < m_hi))
            throw std::domain_error("m_i out of (2/3, 2n/(3n-4)+)");
    if (prm.q > -2.0)
        for (double g : {prm.gamma1, prm.gamma2})
            if (!(g > 1.0 && g < g_hi))
                throw std::domain_error("gamma_i out of (1, n/(n-4)+)");

    RegVarProfile prof = regvar_profile(f);
    GsTables t = gs_tables(f, prm.q, prof.index_zero);
    return gs_general_from_tables(f, n, prm, t);
}

CheckVerdict search_gs_params(const ScalarNonlin& f, int n) {
    Exponents ex = exponents(n);
    RegVarProfile prof = regvar_profile(f);
    double p0 = prof.index_zero;

    CheckVerdict best;
    best.theorem = "GS-general-search";
    best.holds = Verdict::No;
    best.margin = -kInf;

    double m_hi, g_hi;
    gs_param_ranges(n, &m_hi, &g_hi);
    if (std::isinf(m_hi)) m_hi = 4.0;
    if (std::isinf(g_hi)) g_hi = 12.0;

    std::vector<double> qs{1.0 - ex.kappa};
    for (double q = -2.0; q <= 2.01; q += 0.25) qs.push_back(q);
    std::vector<double> ms, gs;
    for (int i = 1; i <= 8; ++i) ms.push_back(2.0 / 3.0 + i * (m_hi - 2.0 / 3.0) / 9.0);
    for (int i = 1; i <= 8; ++i) gs.push_back(1.0 + i * (g_hi - 1.0) / 9.0);

    for (double q : qs) {
        if (q < -2.0 || (q == -2.0 && n != 3) || q <= -p0 + 1e-9) continue;
        GsTables t = gs_tables(f, q, p0);
        if (t.divergent) continue;

        // the omega-window conditions decouple across parameters
        double best_m1 = ms[0], best_m1_slope = -kInf;
        double best_m2 = ms[0], best_m2_slope = kInf;
        for (double m : ms) {
            double s1 = gs4_slope(f, t, m, End::Zero);
            double s2 = gs4_slope(f, t, m, End::Infinity);
            if (s1 > best_m1_slope) {
                best_m1_slope = s1;
                best_m1 = m;
            }
            if (s2 < best_m2_slope) {
                best_m2_slope = s2;
                best_m2 = m;
            }
        }
        double best_g1 = gs[0], best_g1_slope = -kInf;
        double best_g2 = gs[0], best_g2_slope = kInf;
        if (q > -2.0) {
            for (double g : gs) {
                double s1 = gs3_slope(f, t, g, End::Zero);
                double s2 = gs3_slope(f, t, g, End::Infinity);
                if (s1 > best_g1_slope) {
                    best_g1_slope = s1;
                    best_g1 = g;
                }
                if (s2 < best_g2_slope) {
                    best_g2_slope = s2;
                    best_g2 = g;
                }
            }
        }

        // alpha(k) > 0 on an explicit window; the beta condition is linear in k:
        // -beta + c_q gamma > 0  <=>  k < (3q/2 + c_q gamma) n/(n+2)
        double A2 = -double(n - 1) / n;  // alpha = A2 k^2 + (q-1) k - q(q-1)/2
        double disc = (q - 1.0) * (q - 1.0) + 2.0 * A2 * q * (q - 1.0);
        if (disc <= 0.0) continue;
        double k_lo = (-(q - 1.0) + std::sqrt(disc)) / (2.0 * A2);
        double k_hi = (-(q - 1.0) - std::sqrt(disc)) / (2.0 * A2);
        if (k_lo > k_hi) std::swap(k_lo, k_hi);
        double gamma = -double(n - 1) / n;
        double k_beta = (1.5 * q + t.cq * gamma) * n / (n + 2.0);
        double hi_k = std::min(k_hi, k_beta);
        if (!(hi_k > k_lo)) continue;
        std::vector<double> k_candidates;
        for (double frac : {0.1, 0.25, 0.5, 0.75, 0.9})
            k_candidates.push_back(k_lo + frac * (hi_k - k_lo));
        double kstar = (q - 1.0) * n / (2.0 * (n - 1));  // argmax of alpha in k
        if (kstar > k_lo && kstar < hi_k) k_candidates.push_back(kstar);
        for (double k : k_candidates) {
            if (k == -1.0) continue;
            GsGeneralParams prm{q, k, best_m1, best_m2, best_g1, best_g2};
            CheckVerdict cv = gs_general_from_tables(f, n, prm, t);
            bool improves = (cv.holds == Verdict::Yes && best.holds != Verdict::Yes) ||
                            ((cv.holds == Verdict::Yes) == (best.holds == Verdict::Yes) &&
                             cv.margin > best.margin);
            if (improves) {
                best = cv;
                best.theorem = "GS-general-search";
                best.details["q"] = q;
                best.details["k"] = k;
                best.details["m1"] = best_m1;
                best.details["m2"] = best_m2;
                best.details["gamma1"] = best_g1;
                best.details["gamma2"] = best_g2;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Theorem 1 conditions
// ---------------------------------------------------------------------------

CheckVerdict check_thm1_scalar(const ScalarNonlin& f, int n) {
    Exponents ex = exponents(n);
    CheckVerdict cv;
    cv.theorem = "thm1-scalar";
    std::vector<double> grid = scan_grid_with(f.kinks());
    std::vector<double> F = weighted_primitive_table(f, 0.0, grid);
    double sup = -kInf, arg = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(F[i] > 0.0)) continue;
        double r = grid[i] * f(grid[i]) / F[i];
        if (r > sup) {
            sup = r;
            arg = grid[i];
        }
    }
    scan_metadata(&cv, static_cast<int>(grid.size()));
    cv.details["sup_sf_over_F"] = sup;
    cv.details["sup_arg"] = arg;
    cv.margin = ex.p_S + 1.0 - sup;
    if (std::abs(cv.margin) <= kScanTol)
        cv.holds = Verdict::Indeterminate;
    else if (cv.margin < 0.0) {
        cv.holds = Verdict::No;
        cv.witness = {arg};
    } else {
        cv.holds = Verdict::Yes;
    }
    return cv;
}

namespace {

std::vector<double> square_grid(double M) {
    std::vector<double> g{0.0};
    for (double s : log_grid(M * 1e-6, M, 40)) g.push_back(s);
    return g;
}

}  // namespace

CheckVerdict check_thm1_conditions(const SystemNonlin& F, int n, Geometry geometry,
                                   double M, double p, double q) {
    if (F.kind() != SystemKind::Gradient)
        throw std::domain_error("Theorem 1 checker requires a gradient system");
    if (!(q > 1.0 && q <= p)) throw std::domain_error("need 1 < q <= p");
    Exponents ex = exponents(n, geometry);
    CheckVerdict cv;
    cv.theorem = "Thm1";

    const std::vector<double> g = square_grid(M);
    const int m = F.m();

    // (B)  |f(U)| <= C_M |U|^q
    double CM = -kInf;
    for (double a : g)
        for (double b : g) {
            if (m == 1 && b > 0.0) continue;
            double norm = std::max(a, b);
            if (norm == 0.0) continue;
            double r = F.norm_at(a, b) / std::pow(norm, q);
            if (r > CM) CM = r;
        }
    // growth toward 0 along the diagonal
    std::vector<double> lx, ly;
    for (double t : log_grid(M * 1e-6, M * 1e-3, 13)) {
        double val = F.norm_at(t, m == 2 ? t : 0.0) / std::pow(t, q);
        if (val > 0.0) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(val));
        }
    }
    double slopeB = lx.size() >= 2 ? lstsq_slope(lx, ly) : 0.0;
    bool holdsB = std::isfinite(CM) && slopeB > -1e-2;
    cv.details["C_M"] = CM;
    cv.details["hypGrowthB_zero_slope"] = slopeB;

    // (C)  2nF - (n-2) U.gradF >= c_M |U|^{p+1}
    double cM = kInf;
    std::vector<double> cM_arg{0.0, 0.0};
    bool c_at_boundary = false;
    for (double a : g)
        for (double b : g) {
            if (m == 1 && b > 0.0) continue;
            double norm = std::max(a, b);
            if (norm == 0.0) continue;
            Vec2 fv = F.eval(a, b);
            double pot = F.potential_value(a, b);
            double expr = 2.0 * n * pot - (n - 2.0) * (a * fv[0] + (m == 2 ? b * fv[1] : 0.0));
            double r = expr / std::pow(norm, p + 1.0);
            if (r < cM) {
                cM = r;
                cM_arg = {a, b};
                c_at_boundary = (norm <= g[1] * 1.0001 || norm >= M * 0.9999);
            }
        }
    bool holdsC = cM > 0.0;
    cv.details["c_M"] = cM;
    cv.details["c_M_arg_u"] = cM_arg[0];
    cv.details["c_M_arg_v"] = cM_arg[1];
    if (c_at_boundary)
        cv.notes.push_back("hypGrowthC infimum attained at the grid boundary");

    // (D)  exists xi > 0 with xi . f(U) >= c |U|^p; the condition is
    // scale-invariant in xi, so xi is reported max-norm normalized
    double bestD = -kInf;
    std::vector<double> bestXi{1.0, 0.0};
    const int NXI = 64;  // interior subdivision points, includes the diagonal
    for (int i = 1; i < (m == 2 ? NXI : 2); ++i) {
        double t = m == 2 ? double(i) / NXI : 1.0;
        Vec2 xi{t, 1.0 - t};
        double mx = std::max(xi[0], xi[1]);
        xi = {xi[0] / mx, xi[1] / mx};
        if (m == 1) xi = {1.0, 0.0};
        double inf_val = kInf;
        for (double a : g)
            for (double b : g) {
                if (m == 1 && b > 0.0) continue;
                double norm = std::max(a, b);
                if (norm == 0.0) continue;
                Vec2 fv = F.eval(a, b);
                double r = (xi[0] * fv[0] + (m == 2 ? xi[1] * fv[1] : 0.0)) /
                           std::pow(norm, p);
                inf_val = std::min(inf_val, r);
            }
        if (inf_val > bestD) {
            bestD = inf_val;
            bestXi = {xi[0], xi[1]};
        }
    }
    bool holdsD = bestD > 0.0;
    cv.details["hypGrowthD_c"] = bestD;
    cv.details["hypGrowthD_xi_u"] = bestXi[0];
    cv.details["hypGrowthD_xi_v"] = bestXi[1];

    double p0 = 0.5 * (p + q);
    cv.details["p0"] = p0;
    cv.details["pq_gap"] = p - q;
    cv.details["p_window_margin"] = ex.p_star_star - p0;
    if (!(p0 < ex.p_star_star))
        cv.notes.push_back("p0 is not below p**; exponent window violated");
    cv.notes.push_back("conditions evaluated for the single supplied M");

    cv.margin = std::min(cM, bestD);
    if (holdsB && holdsC && holdsD && p0 < ex.p_star_star) {
        cv.holds = Verdict::Yes;
    } else {
        cv.holds = Verdict::No;
        cv.witness = cM_arg;
    }
    return cv;
}

double cor0_lambda0(double rho) { return 2.0 * std::sqrt(1.0 - rho) / (2.0 - rho); }

Cor0Params cor0_params(double p0, double K, int sigma, int n, Geometry geometry) {
    Exponents ex = exponents(n, geometry);
    if (!(p0 > 1.0 && p0 < ex.p_star_star))
        throw std::domain_error("p0 must lie in (1, p**)");
    if (K < 1.0) throw std::domain_error("K >= 1 required");
    if (sigma != 1 && sigma != -1) throw std::domain_error("sigma must be +1 or -1");
    Cor0Params out;
    if (K == 1.0) {
        out.a0 = sigma == -1 ? 0.5 * (ex.p_S - p0) : 0.5 * (ex.p_star_star - p0);
    } else {
        out.a0 = 0.5 * (ex.p_star_star - p0) * theta(K);
    }
    for (int i = 0; i <= 20; ++i) {
        double rho = i / 20.0;
        out.rho_grid.push_back(rho);
        out.lambda0.push_back(cor0_lambda0(rho));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Proportional systems
// ---------------------------------------------------------------------------

CheckVerdict check_proportional(const SystemNonlin& S, double eps, Geometry geometry,
                                int n, double M) {
    if (S.kind() != SystemKind::Proportional)
        throw std::domain_error("proportional checker requires a proportional system");
    double lambda = S.lambda();
    if (lambda > 0.0 ? eps != 0.0 : !(eps > 0.0))
        throw std::domain_error("eps = 0 iff lambda > 0");
    CheckVerdict cv;
    cv.theorem = "Proportional";
    const ScalarNonlin& kf = S.k_factor();
    const ScalarNonlin& gf = S.g_factor();

    // phi >= c_M > 0 on [0, M]^2
    double cM = kInf;
    const std::vector<double> sg = square_grid(M);
    for (double a : sg)
        for (double b : sg) cM = std::min(cM, eval(S.phi(), a, b));
    bool phi_ok = cM > 0.0;
    cv.details["phi_min"] = cM;

    // g(0) = 0, g > 0
    bool g_ok = std::abs(gf.limit_at_zero()) <= 1e-12 && gf.positive();
    cv.details["g_limit0"] = gf.limit_at_zero();

    // k > 0 on (0, inf)
    bool k_ok = kf.positive();

    // varphi = k g (lambda > 0) or g (lambda = 0) strictly increasing
    ExprPtr varphi = lambda > 0.0 ? mk_product({kf.expr(), gf.expr()}) : gf.expr();
    double dmin = kInf;
    for (double s : log_grid(kScanLo, kScanHi, 512)) {
        ValDer vd = eval_d(varphi, s, 0.0, Var::u);
        dmin = std::min(dmin, vd.der);
    }
    bool varphi_ok = dmin > 0.0;
    cv.details["varphi_deriv_min"] = dmin;

    // ktilde = k - eps: ktilde(0) >= 0 and ktilde / g nonincreasing
    double k0 = kf.limit_at_zero() - eps;
    bool k0_ok = k0 >= -1e-12;
    cv.details["ktilde_at_zero"] = k0;
    double rmax = -kInf, rmax_arg = 0.0;
    for (double s : log_grid(kScanLo, kScanHi, 512)) {
        ValDer kv = kf.value_and_derivative(s);
        ValDer gv = gf.value_and_derivative(s);
        double dr = (kv.der * gv.val - (kv.val - eps) * gv.der) / (gv.val * gv.val);
        if (dr > rmax) {
            rmax = dr;
            rmax_arg = s;
        }
    }
    bool ratio_ok = rmax <= kScanTol;
    cv.details["ktilde_over_g_deriv_max"] = rmax;
    cv.details["ktilde_over_g_deriv_argmax"] = rmax_arg;

    bool hyp2_ok = true;
    double hyp2_witness = 0.0;
    if (lambda == 1.0) {
        cv.holds = Verdict::Indeterminate;
        cv.notes.push_back("lambda = 1: components are harmonic; excluded by the theorem");
        return cv;
    }
    if (lambda < 1.0) {
        // h(s) = phi(s, s) k(s) g(s)
        ExprPtr phi_diag = substitute(S.phi(), Var::v, mk_var(Var::u));
        ScalarNonlin h =
            ScalarNonlin::make(mk_product({phi_diag, kf.expr(), gf.expr()}));
        if (geometry == Geometry::WholeSpace && n >= 3) {
            CheckVerdict hb = check_theorem_B(h, n);
            hyp2_ok = hb.holds == Verdict::Yes;
            cv.details["HypProp2_margin"] = hb.margin;
            if (!hyp2_ok && !hb.witness.empty()) hyp2_witness = hb.witness[0];
            if (hb.holds == Verdict::Indeterminate) {
                cv.holds = Verdict::Indeterminate;
                cv.notes.push_back("HypProp2 margin within scan tolerance");
                return cv;
            }
        } else {
            // convexity of h via second differences
            double worst = kInf;
            const int N = 400;
            double hi = 10.0, step = hi / N;
            double scale = 0.0;
            for (int i = 1; i + 1 <= N; ++i) {
                double s = i * step;
                double d2 = h(s - step) - 2.0 * h(s) + h(s + step);
                if (d2 < worst) {
                    worst = d2;
                    hyp2_witness = s;
                }
                scale = std::max(scale, std::abs(h(s)));
            }
            hyp2_ok = worst >= -kScanTol * std::max(1.0, scale);
            cv.details["HypProp2_second_difference_min"] = worst;
        }
    }

    bool all = phi_ok && g_ok && k_ok && varphi_ok && k0_ok && ratio_ok && hyp2_ok;
    scan_metadata(&cv, 512);
    cv.margin = std::min({cM, dmin, -rmax, k0});
    cv.holds = all ? Verdict::Yes : Verdict::No;
    if (!all) {
        if (!ratio_ok) {
            cv.notes.push_back("ktilde/g is not nonincreasing");
            cv.witness.push_back(rmax_arg);
        }
        if (!k0_ok) {
            cv.notes.push_back("ktilde(0) < 0");
            cv.witness.push_back(0.0);
        }
        if (!varphi_ok) cv.notes.push_back("varphi is not strictly increasing");
        if (!phi_ok) cv.notes.push_back("phi is not bounded below by a positive constant");
        if (!g_ok) cv.notes.push_back("g(0) = 0 or positivity fails");
        if (!k_ok) cv.notes.push_back("k is not positive on (0, inf)");
        if (!hyp2_ok) {
            cv.notes.push_back("HypProp2 fails");
            cv.witness.push_back(hyp2_witness);
        }
    }
    return cv;
}

// ---------------------------------------------------------------------------
// Lane-Emden region and the benchmark family
// ---------------------------------------------------------------------------

LaneEmdenRegion lane_emden_region(double p, double q, int n) {
    if (!(p > 0.0 && q > 0.0 && p * q > 1.0))
        throw std::domain_error("need p, q > 0 with pq > 1");
    Exponents ex = exponents(n);
    LaneEmdenRegion r;
    r.alpha = 2.0 * (p + 1.0) / (p * q - 1.0);
    r.beta = 2.0 * (q + 1.0) / (p * q - 1.0);
    r.subcritical_hyperbola =
        1.0 / (p + 1.0) + 1.0 / (q + 1.0) > double(n - 2) / n;
    r.critical_pair = p == ex.p_S && q == ex.p_S;
    r.nonexistence_sufficient =
        (p <= ex.p_S && q <= ex.p_S && !r.critical_pair) ||
        std::max(r.alpha, r.beta) >= n - 2.0;
    return r;
}

BenchmarkThresholds benchmark_thresholds(int n, double p) {
    Exponents ex = exponents(n);
    if (n < 3 || !(p > ex.kappa && p < ex.p_S))
        throw std::domain_error("benchmark requires n >= 3 and n/(n-2) < p < p_S");
    BenchmarkThresholds t;
    t.K0 = ((n - 2.0) * p - n) / (2.0 * p);
    t.K1 = 2.0 * ((n - 2.0) * p - n) / ((n + 2.0) - (n - 2.0) * p);
    t.K2 = (p + 1.0) / (2.0 * p) * t.K1;
    t.K3 = ((n - 2.0) * p - 2.0) / (2.0 * (n - 2.0) * p - n) * t.K1;
    return t;
}

ScalarNonlin benchmark_nonlin(double p, double K) {
    return ScalarNonlin::parse("(K + min(1, u^(p-1))) * u^p", {{"K", K}, {"p", p}});
}

}  // namespace ellab
