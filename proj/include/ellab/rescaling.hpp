#ifndef ELLAB_RESCALING_HPP
#define ELLAB_RESCALING_HPP

#include <string>
#include <vector>

#include "ellab/nonlin.hpp"

namespace ellab {

struct ConvergenceTable {
    End direction = End::Infinity;
    double S = 2.0;
    std::vector<double> lambda;
    std::vector<double> error;  // e(lambda) = sup over [0,S] of the rescaling gap
    bool monotone_decreasing = false;
};

// Scalar: e(lambda) = sup_{s in [0,S]} |f(lambda s)/f(lambda) - s^p|.
ConvergenceTable uniform_convergence_check(const ScalarNonlin& f, double p,
                                           End direction, std::vector<double> lambdas,
                                           double S = 2.0, int grid_n = 1000);

// System: f+(lambda)-normalized gap against the homogeneous limit.
ConvergenceTable uniform_convergence_check(const SystemNonlin& f,
                                           const std::vector<ExprPtr>& limit,
                                           End direction, std::vector<double> lambdas,
                                           double S = 2.0, int grid_n = 64);

struct DiscreteField {
    std::vector<std::vector<double>> points;  // coordinates, uniform dimension
    std::vector<double> dist;                 // boundary distance, > 0
    std::vector<double> M;                    // positive field values
};

struct DoublingResult {
    bool found = false;
    int index = -1;   // selected point
    int start = -1;   // the violator y0 used for property (a)
    int jumps = 0;
    std::vector<double> slack;  // per-point 2k/dist - M when no violator exists
};

// Discrete doubling-point selection: if some y0 has M(y0) > 2k/dist(y0),
// returns x with M(x) >= M(y0), M(x) > 2k/dist(x), and M <= 2 M(x) on the
// ball of radius k/M(x) around x.
DoublingResult doubling_point(const DiscreteField& F, double k);

struct CriticalLimitRow {
    int k = 0;
    double p = 0.0, q = 0.0, M = 0.0;
    double v0 = 0.0;             // v_k(0), exactly 1 by normalization
    double residual_max = 0.0;   // residual of v_k in -Lap v = v^{p_S}
    double bubble_deviation = 0.0;  // max gap to the fitted (1 + c y^2)^{-1/2}
};

std::vector<CriticalLimitRow> critical_limit_check(int n, const std::vector<int>& ks,
                                                   double y_max = 5.0, int grid_n = 501);

}  // namespace ellab

#endif
