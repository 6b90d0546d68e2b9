#ifndef ELLAB_EXPR_HPP
#define ELLAB_EXPR_HPP

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellab {

// Which variable a node refers to. Scalar nonlinearities use u only.
enum class Var { u = 0, v = 1 };

// Side selector for one-sided derivatives at min/max kinks.
enum class Side { Auto, Left, Right };

enum class NodeKind {
    Constant,
    Variable,
    Power,    // kids[0] ^ exponent
    Log,      // log(kids[0]) ^ exponent
    Sum,      // kids[0] + kids[1] + ...
    Product,  // kids[0] * kids[1] * ...
    Min,      // min(kids[0], kids[1])
    Max,      // max(kids[0], kids[1])
    Select,   // derivative of Min/Max: kids = {a, b, da, db}
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double value = 0.0;     // Constant
    Var var = Var::u;       // Variable
    double exponent = 1.0;  // Power / Log outer exponent
    bool from_min = true;   // Select: true if derived from min(), false from max()
    std::vector<ExprPtr> kids;
    // Log over 1 + rest: evaluated as log1p(rest) to keep full relative
    // precision for small arguments
    ExprPtr log1p_rest;
};

struct ParseError : std::runtime_error {
    std::size_t offset;  // byte offset into the input text
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct EvalDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- node constructors (fold constants, drop neutral elements) ---
ExprPtr mk_const(double c);
ExprPtr mk_var(Var v);
ExprPtr mk_power(ExprPtr base, double e);
ExprPtr mk_log(ExprPtr arg, double a);
ExprPtr mk_sum(std::vector<ExprPtr> kids);
ExprPtr mk_product(std::vector<ExprPtr> kids);
ExprPtr mk_min(ExprPtr a, ExprPtr b);
ExprPtr mk_max(ExprPtr a, ExprPtr b);

// --- evaluation ---
double eval(const ExprPtr& e, double u, double v = 0.0);

struct ValDer {
    double val;
    double der;
};
// Forward-mode value+derivative with respect to `wrt`; `side` resolves
// min/max ties (one-sided derivatives at kinks).
ValDer eval_d(const ExprPtr& e, double u, double v, Var wrt, Side side = Side::Auto);

// Structural limit as the named variable tends to 0+ (other variable held at 0).
// May return +/-inf; falls back to evaluation at 1e-12 on indeterminate forms.
double limit_at_zero(const ExprPtr& e);

// --- calculus ---
ExprPtr deriv(const ExprPtr& e, Var wrt);

// --- structure ---
bool uses_var(const ExprPtr& e, Var v);
ExprPtr substitute(const ExprPtr& e, Var from, const ExprPtr& replacement);

// Pure power-sum decomposition (no log/min/max/select): f = sum coef * u^deg.
struct PowerTerm {
    double coef;
    double deg;
};
std::optional<std::vector<PowerTerm>> flatten_power_sum(const ExprPtr& e, Var var = Var::u);

// Local structural index at an end of the half-line (single-variable expressions).
enum class End { Zero, Infinity };
std::optional<double> structural_index(const ExprPtr& e, End end, Var var = Var::u);

// Kink locations (min/max branch crossings) of a single-variable expression,
// located by sign-change scan + bisection on [lo, hi].
std::vector<double> find_kinks(const ExprPtr& e, Var var, double lo = 1e-8, double hi = 1e8);

// --- parsing / printing ---
using ParamMap = std::map<std::string, double>;
ExprPtr parse_expr(const std::string& text, const ParamMap& params = {});
std::string print_expr(const ExprPtr& e);

}  // namespace ellab

#endif
