#ifndef ELLAB_NONLIN_HPP
#define ELLAB_NONLIN_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellab/expr.hpp"

namespace ellab {

struct NonRegularVariationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar nonlinearity f(s), s >= 0. Immutable after construction.
class ScalarNonlin {
  public:
    ScalarNonlin() = default;  // empty; assign from make()/parse() before use
    static ScalarNonlin make(ExprPtr e);
    static ScalarNonlin parse(const std::string& text, const ParamMap& params = {});

    double operator()(double s) const;           // limit value at s = 0
    ValDer value_and_derivative(double s, Side side = Side::Auto) const;
    ScalarNonlin derivative() const;             // symbolic, kink-aware

    const ExprPtr& expr() const { return expr_; }
    bool positive() const { return positive_; }
    double limit_at_zero() const { return limit0_; }
    const std::vector<double>& kinks() const { return kinks_; }

  private:
    ExprPtr expr_;
    bool positive_ = false;
    double limit0_ = 0.0;
    std::vector<double> kinks_;
};

// Weighted primitive  integral_0^s sigma^w f(sigma) dsigma.
// Returns +inf when the integrand is not integrable at 0.
double weighted_primitive(const ScalarNonlin& f, double w, double s,
                          double rel_tol = 1e-10);

// Cumulative weighted primitive over an increasing grid (shared scan helper).
std::vector<double> weighted_primitive_table(const ScalarNonlin& f, double w,
                                             const std::vector<double>& grid,
                                             double rel_tol = 1e-11);

inline constexpr int kSystemMaxComponents = 2;
using Vec2 = std::array<double, 2>;

enum class SystemKind { Generic, Gradient, LaneEmden, Proportional };

// Vector nonlinearity with m <= 2 components, plus structural templates.
class SystemNonlin {
  public:
    static SystemNonlin scalar(ScalarNonlin f);
    static SystemNonlin generic(std::vector<ExprPtr> components);
    static SystemNonlin gradient(ExprPtr potential);
    static SystemNonlin lane_emden(ScalarNonlin f1, ScalarNonlin f2);
    static SystemNonlin proportional(ExprPtr phi, ScalarNonlin k, ScalarNonlin g,
                                     double lambda);

    int m() const { return m_; }
    SystemKind kind() const { return kind_; }
    Vec2 eval(double u, double v) const;
    double component(int i, double u, double v) const;
    // max-norm |f(U)|
    double norm_at(double u, double v) const;

    const std::vector<ExprPtr>& components() const { return components_; }
    const ExprPtr& potential() const { return potential_; }
    double potential_value(double u, double v) const;

    // Lane-Emden accessors: f1 acts on v, f2 acts on u.
    const ScalarNonlin& f1() const { return f1_; }
    const ScalarNonlin& f2() const { return f2_; }

    // Proportional accessors.
    const ExprPtr& phi() const { return phi_; }
    const ScalarNonlin& k_factor() const { return k_; }
    const ScalarNonlin& g_factor() const { return g_; }
    double lambda() const { return lambda_; }

    Vec2 diffusion = {1.0, 1.0};

    SystemNonlin() = default;  // empty; build via the factory functions

  private:
    SystemKind kind_ = SystemKind::Generic;
    int m_ = 1;
    std::vector<ExprPtr> components_;
    ExprPtr potential_;
    ScalarNonlin f1_, f2_;
    ExprPtr phi_;
    ScalarNonlin k_, g_;
    double lambda_ = 0.0;
};

// f+(lambda) = max over {|U| = lambda (max-norm), U in K} of |f(U)|.
double f_plus(const SystemNonlin& f, double lambda);
double f_plus(const ScalarNonlin& f, double lambda);

// Regular-variation profile: indices and homogeneous rescaling limits.
struct RegVarProfile {
    double index_infinity = 0.0;
    double index_zero = 0.0;
    bool structural = true;  // indices from the power-log structure, not slopes
    // homogeneous limits (components; size 1 for scalar), empty if unavailable
    std::vector<ExprPtr> limit_infinity;
    std::vector<ExprPtr> limit_zero;
    // slowly-varying factor descriptors L(s) = s^-p f(s), scalar case only
    ExprPtr slow_infinity;
    ExprPtr slow_zero;
};

RegVarProfile regvar_profile(const ScalarNonlin& f);
RegVarProfile regvar_profile(const SystemNonlin& f);

// theta(K): inverse of s -> s^-1 e^{s-1} on [1, inf).
double theta(double K);

// Minimize phi_K(s) = (1 + K/s) log(K + s) over s > 0; returns {s_K, value}.
// For K = 1 the infimum 1 is attained as s -> 0+ and s_K is reported as 0.
std::pair<double, double> phi_K_min(double K);
double phi_K(double K, double s);

}  // namespace ellab

#endif
