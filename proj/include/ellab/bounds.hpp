#ifndef ELLAB_BOUNDS_HPP
#define ELLAB_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ellab/criteria.hpp"
#include "ellab/nonlin.hpp"
#include "ellab/radial.hpp"

namespace ellab {

struct SolveOptions {
    int mesh_n = 512;  // intervals; h = R / mesh_n (must satisfy h <= R/64)
    double residual_tol_factor = 1e-10;
    int max_newton = 200;
};

enum class GuessKind { Zero, Constant, Bump, Profile };

struct InitialGuess {
    GuessKind kind = GuessKind::Zero;
    double constant = 0.0;
    double amplitude = 1.0;
    double width = 1.0;
    const RadialProfile* profile = nullptr;
};

struct BVPSolution {
    int n = 3;
    int m = 1;
    double R = 1.0;
    double h = 0.0;
    std::vector<double> r;                // nodes 0..N
    std::vector<std::vector<double>> u;   // per component
    Vec2 boundary{0.0, 0.0};
    int newton_iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::string failure;

    double dist(std::size_t j) const { return R - r[j]; }
    double center(int i = 0) const { return u[i][0]; }
    double max_norm() const;
    // recompute the discrete residual max-norm (invariant check)
    double residual_norm(const SystemNonlin& S) const;
};

BVPSolution solve_ball(const SystemNonlin& S, int n, double R, Vec2 boundary,
                       const InitialGuess& guess, const SolveOptions& opt = {});
BVPSolution solve_ball(const ScalarNonlin& f, int n, double R, double boundary,
                       const InitialGuess& guess, const SolveOptions& opt = {});

// Positive Dirichlet branch on B_R via shoot-and-bisect on the center value,
// polished by the finite-difference Newton solver.
BVPSolution ground_state(const ScalarNonlin& f, int n, double R,
                         const SolveOptions& opt = {});

// ---------------------------------------------------------------------------
// Lane-Emden h-calculus
// ---------------------------------------------------------------------------

class HCalculus {
  public:
    HCalculus(ScalarNonlin f1, ScalarNonlin f2);

    double h1(double s) const;
    double h2(double s) const;
    double h1_inv(double t) const;
    double h2_inv(double t) const;
    double comp_12(double u) const;  // h1^{-1} o h2
    double comp_21(double v) const;  // h2^{-1} o h1
    double phi(double t) const;      // t / (h1^{-1}(t) h2^{-1}(t))
    double N(double t1, double t2) const;  // 2A + h1(t2) + h2(t1)

    double s0() const { return s0_; }
    double A() const { return A_; }
    double A1() const { return A1_; }
    double A2() const { return A2_; }

    const ScalarNonlin& f1() const { return f1_; }
    const ScalarNonlin& f2() const { return f2_; }

  private:
    double inv(const ScalarNonlin& f, double t) const;
    ScalarNonlin f1_, f2_;
    double s0_ = 1.0;
    double A_ = 1.0;
    double A1_ = 0.0, A2_ = 0.0;
};

HCalculus h_calculus(const ScalarNonlin& f1, const ScalarNonlin& f2);

// ---------------------------------------------------------------------------
// universal-bound measurements
// ---------------------------------------------------------------------------

enum class BoundMode { Scalar, System, LaneEmden };

struct DomainSup {
    double R = 0.0;
    double sup = 0.0;
    double arg_r = 0.0;
    int nodes_in_region = 0;
};

struct BoundReport {
    std::string quantity;
    BoundMode mode = BoundMode::Scalar;
    double lambda_threshold = 1.0;  // Omega_Lambda cut for the system mode
    std::vector<DomainSup> per_domain;
    double family_max = 0.0;
    double family_min = 0.0;
    double family_ratio = 0.0;
    std::vector<std::string> warnings;
};

BoundReport bound_report(const std::vector<BVPSolution>& solutions, BoundMode mode,
                         const SystemNonlin& S, const HCalculus* hcal = nullptr,
                         double Lambda = 1.0);

// ---------------------------------------------------------------------------
// decay scan and proportional counterexamples
// ---------------------------------------------------------------------------

struct DecayScanRow {
    double R = 0.0;
    double center = 0.0;
    bool converged = false;
    bool branch_jump = false;  // Newton landed on a large-amplitude branch
};

std::vector<DecayScanRow> decay_scan(const ScalarNonlin& f, int n, double Lambda,
                                     double boundary, std::vector<double> radii,
                                     const SolveOptions& opt = {});

struct CounterexampleReport {
    std::string form;  // "c x^a", "cosh(sqrt(lambda) x)" or "sinh(sqrt(lambda) x)"
    double a = 0.0;
    double c = 1.0;
    double max_rel_residual_first = 0.0;   // equation satisfied by w
    double max_residual_second = 0.0;      // semitrivial component
    std::vector<double> x, w;
};

CounterexampleReport proportional_counterexample(double p, double q, double lambda,
                                                 Geometry geometry, double x_max = 10.0,
                                                 int grid_n = 1001);

}  // namespace ellab

#endif
