#include "ellab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace ellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExprPtr node(NodeKind k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    return n;
}

bool is_const(const ExprPtr& e, double* out = nullptr) {
    if (e->kind != NodeKind::Constant) return false;
    if (out) *out = e->value;
    return true;
}

}  // namespace

ExprPtr mk_const(double c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Constant;
    n->value = c;
    return n;
}

ExprPtr mk_var(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Variable;
    n->var = v;
    return n;
}

ExprPtr mk_power(ExprPtr base, double e) {
    double c;
    if (e == 1.0) return base;
    if (e == 0.0) return mk_const(1.0);
    if (is_const(base, &c)) return mk_const(std::pow(c, e));
    // collapse (b^a)^e -> b^(a*e)
    if (base->kind == NodeKind::Power) return mk_power(base->kids[0], base->exponent * e);
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Power;
    n->exponent = e;
    n->kids = {std::move(base)};
    return n;
}

ExprPtr mk_log(ExprPtr arg, double a) {
    double c;
    if (is_const(arg, &c)) return mk_const(std::pow(std::log(c), a));
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Log;
    n->exponent = a;
    // log(1 + rest) evaluates through log1p
    if (arg->kind == NodeKind::Sum) {
        std::vector<ExprPtr> rest;
        bool unit = false;
        for (const auto& k : arg->kids) {
            if (!unit && k->kind == NodeKind::Constant && k->value == 1.0)
                unit = true;
            else
                rest.push_back(k);
        }
        if (unit && !rest.empty()) n->log1p_rest = mk_sum(std::move(rest));
    }
    n->kids = {std::move(arg)};
    return n;
}

ExprPtr mk_sum(std::vector<ExprPtr> kids) {
    std::vector<ExprPtr> flat;
    double cacc = 0.0;
    bool have_c = false;
    for (auto& k : kids) {
        if (k->kind == NodeKind::Sum) {
            for (auto& kk : k->kids) {
                double c;
                if (is_const(kk, &c)) {
                    cacc += c;
                    have_c = true;
                } else {
                    flat.push_back(kk);
                }
            }
        } else {
            double c;
            if (is_const(k, &c)) {
                cacc += c;
                have_c = true;
            } else {
                flat.push_back(std::move(k));
            }
        }
    }
    if (have_c && cacc != 0.0) flat.push_back(mk_const(cacc));
    if (flat.empty()) return mk_const(have_c ? cacc : 0.0);
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Sum;
    n->kids = std::move(flat);
    return n;
}

ExprPtr mk_product(std::vector<ExprPtr> kids) {
    std::vector<ExprPtr> flat;
    double cacc = 1.0;
    bool have_c = false;
    for (auto& k : kids) {
        if (k->kind == NodeKind::Product) {
            for (auto& kk : k->kids) {
                double c;
                if (is_const(kk, &c)) {
                    cacc *= c;
                    have_c = true;
                } else {
                    flat.push_back(kk);
                }
            }
        } else {
            double c;
            if (is_const(k, &c)) {
                cacc *= c;
                have_c = true;
            } else {
                flat.push_back(std::move(k));
            }
        }
    }
    if (have_c && cacc == 0.0) return mk_const(0.0);
    if (have_c && cacc != 1.0) flat.insert(flat.begin(), mk_const(cacc));
    if (flat.empty()) return mk_const(1.0);
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Product;
    n->kids = std::move(flat);
    return n;
}

ExprPtr mk_min(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_const(a, &ca) && is_const(b, &cb)) return mk_const(std::min(ca, cb));
    auto n = node(NodeKind::Min);
    auto nn = std::const_pointer_cast<ExprNode>(n);
    nn->kids = {std::move(a), std::move(b)};
    return n;
}

ExprPtr mk_max(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_const(a, &ca) && is_const(b, &cb)) return mk_const(std::max(ca, cb));
    auto n = node(NodeKind::Max);
    auto nn = std::const_pointer_cast<ExprNode>(n);
    nn->kids = {std::move(a), std::move(b)};
    return n;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

double eval(const ExprPtr& e, double u, double v) {
    switch (e->kind) {
        case NodeKind::Constant:
            return e->value;
        case NodeKind::Variable:
            return e->var == Var::u ? u : v;
        case NodeKind::Power:
            return std::pow(eval(e->kids[0], u, v), e->exponent);
        case NodeKind::Log: {
            double lg;
            if (e->log1p_rest) {
                double rest = eval(e->log1p_rest, u, v);
                if (!(rest > -1.0)) throw EvalDomainError("log argument nonpositive");
                lg = std::log1p(rest);
            } else {
                double a = eval(e->kids[0], u, v);
                if (!(a > 0.0)) throw EvalDomainError("log argument nonpositive");
                lg = std::log(a);
            }
            return std::pow(lg, e->exponent);
        }
        case NodeKind::Sum: {
            double s = 0.0;
            for (const auto& k : e->kids) s += eval(k, u, v);
            return s;
        }
        case NodeKind::Product: {
            double p = 1.0;
            for (const auto& k : e->kids) p *= eval(k, u, v);
            return p;
        }
        case NodeKind::Min:
            return std::min(eval(e->kids[0], u, v), eval(e->kids[1], u, v));
        case NodeKind::Max:
            return std::max(eval(e->kids[0], u, v), eval(e->kids[1], u, v));
        case NodeKind::Select: {
            double a = eval(e->kids[0], u, v);
            double b = eval(e->kids[1], u, v);
            bool pick_a = e->from_min ? (a <= b) : (a >= b);
            return eval(e->kids[pick_a ? 2 : 3], u, v);
        }
    }
    return 0.0;
}

ValDer eval_d(const ExprPtr& e, double u, double v, Var wrt, Side side) {
    switch (e->kind) {
        case NodeKind::Constant:
            return {e->value, 0.0};
        case NodeKind::Variable:
            return {e->var == Var::u ? u : v, e->var == wrt ? 1.0 : 0.0};
        case NodeKind::Power: {
            ValDer b = eval_d(e->kids[0], u, v, wrt, side);
            double val = std::pow(b.val, e->exponent);
            double der;
            if (b.der == 0.0) {
                der = 0.0;
            } else {
                der = e->exponent * std::pow(b.val, e->exponent - 1.0) * b.der;
            }
            return {val, der};
        }
        case NodeKind::Log: {
            double lg, gval, gder;
            if (e->log1p_rest) {
                ValDer rest = eval_d(e->log1p_rest, u, v, wrt, side);
                if (!(rest.val > -1.0)) throw EvalDomainError("log argument nonpositive");
                lg = std::log1p(rest.val);
                gval = 1.0 + rest.val;
                gder = rest.der;
            } else {
                ValDer g = eval_d(e->kids[0], u, v, wrt, side);
                if (!(g.val > 0.0)) throw EvalDomainError("log argument nonpositive");
                lg = std::log(g.val);
                gval = g.val;
                gder = g.der;
            }
            double val = std::pow(lg, e->exponent);
            double der = e->exponent * std::pow(lg, e->exponent - 1.0) * gder / gval;
            return {val, der};
        }
        case NodeKind::Sum: {
            ValDer s{0.0, 0.0};
            for (const auto& k : e->kids) {
                ValDer t = eval_d(k, u, v, wrt, side);
                s.val += t.val;
                s.der += t.der;
            }
            return s;
        }
        case NodeKind::Product: {
            ValDer p{1.0, 0.0};
            for (const auto& k : e->kids) {
                ValDer t = eval_d(k, u, v, wrt, side);
                p.der = p.der * t.val + p.val * t.der;
                p.val *= t.val;
            }
            return p;
        }
        case NodeKind::Min:
        case NodeKind::Max: {
            bool is_min = e->kind == NodeKind::Min;
            ValDer a = eval_d(e->kids[0], u, v, wrt, side);
            ValDer b = eval_d(e->kids[1], u, v, wrt, side);
            if (a.val != b.val) {
                bool pick_a = is_min ? (a.val < b.val) : (a.val > b.val);
                return pick_a ? a : b;
            }
            // tie: one-sided derivatives.
            //   d/ds- min = max(da, db), d/ds+ min = min(da, db); max() mirrored.
            double der;
            if (side == Side::Left) {
                der = is_min ? std::max(a.der, b.der) : std::min(a.der, b.der);
            } else if (side == Side::Right) {
                der = is_min ? std::min(a.der, b.der) : std::max(a.der, b.der);
            } else {
                der = a.der;
            }
            return {a.val, der};
        }
        case NodeKind::Select: {
            double a = eval(e->kids[0], u, v);
            double b = eval(e->kids[1], u, v);
            if (a != b) {
                bool pick_a = e->from_min ? (a < b) : (a > b);
                return eval_d(e->kids[pick_a ? 2 : 3], u, v, wrt, side);
            }
            ValDer da = eval_d(e->kids[2], u, v, wrt, side);
            ValDer db = eval_d(e->kids[3], u, v, wrt, side);
            double val;
            if (side == Side::Left) {
                val = e->from_min ? std::max(da.val, db.val) : std::min(da.val, db.val);
            } else if (side == Side::Right) {
                val = e->from_min ? std::min(da.val, db.val) : std::max(da.val, db.val);
            } else {
                val = da.val;
            }
            // second-order information at a kink is branch-ambiguous; report the
            // matching branch's derivative.
            double der = (val == db.val) ? db.der : da.der;
            return {val, der};
        }
    }
    return {0.0, 0.0};
}

namespace {

// 0^e with the usual limit conventions.
double zero_pow(double e) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    return kInf;
}

double limit_zero_impl(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Constant:
            return e->value;
        case NodeKind::Variable:
            return 0.0;
        case NodeKind::Power: {
            double b = limit_zero_impl(e->kids[0]);
            if (b == 0.0) return zero_pow(e->exponent);
            return std::pow(b, e->exponent);
        }
        case NodeKind::Log: {
            double g = limit_zero_impl(e->kids[0]);
            if (g == 0.0) return std::numeric_limits<double>::quiet_NaN();  // log -> -inf
            if (std::isinf(g)) return e->exponent > 0 ? kInf : (e->exponent == 0 ? 1.0 : 0.0);
            if (g == 1.0) return zero_pow(e->exponent);
            return std::pow(std::log(g), e->exponent);
        }
        case NodeKind::Sum: {
            double s = 0.0;
            for (const auto& k : e->kids) s += limit_zero_impl(k);
            return s;
        }
        case NodeKind::Product: {
            double p = 1.0;
            for (const auto& k : e->kids) {
                double t = limit_zero_impl(k);
                if (t == 0.0 && std::isinf(p)) return std::numeric_limits<double>::quiet_NaN();
                if (std::isinf(t) && p == 0.0) return std::numeric_limits<double>::quiet_NaN();
                p *= t;
            }
            return p;
        }
        case NodeKind::Min:
            return std::min(limit_zero_impl(e->kids[0]), limit_zero_impl(e->kids[1]));
        case NodeKind::Max:
            return std::max(limit_zero_impl(e->kids[0]), limit_zero_impl(e->kids[1]));
        case NodeKind::Select:
            return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double limit_at_zero(const ExprPtr& e) {
    double s = limit_zero_impl(e);
    if (std::isnan(s)) {
        // indeterminate structural form; sample close to zero instead
        try {
            return eval(e, 1e-12, 1e-12);
        } catch (const EvalDomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// symbolic derivative
// ---------------------------------------------------------------------------

ExprPtr deriv(const ExprPtr& e, Var wrt) {
    switch (e->kind) {
        case NodeKind::Constant:
            return mk_const(0.0);
        case NodeKind::Variable:
            return mk_const(e->var == wrt ? 1.0 : 0.0);
        case NodeKind::Power: {
            ExprPtr g = e->kids[0];
            ExprPtr dg = deriv(g, wrt);
            double c;
            if (is_const(dg, &c) && c == 0.0) return mk_const(0.0);
            return mk_product({mk_const(e->exponent), mk_power(g, e->exponent - 1.0), dg});
        }
        case NodeKind::Log: {
            ExprPtr g = e->kids[0];
            ExprPtr dg = deriv(g, wrt);
            double c;
            if (is_const(dg, &c) && c == 0.0) return mk_const(0.0);
            return mk_product({mk_const(e->exponent), mk_log(g, e->exponent - 1.0),
                               mk_power(g, -1.0), dg});
        }
        case NodeKind::Sum: {
            std::vector<ExprPtr> ds;
            ds.reserve(e->kids.size());
            for (const auto& k : e->kids) ds.push_back(deriv(k, wrt));
            return mk_sum(std::move(ds));
        }
        case NodeKind::Product: {
            std::vector<ExprPtr> terms;
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                std::vector<ExprPtr> fac;
                ExprPtr di = deriv(e->kids[i], wrt);
                double c;
                if (is_const(di, &c) && c == 0.0) continue;
                fac.push_back(di);
                for (std::size_t j = 0; j < e->kids.size(); ++j)
                    if (j != i) fac.push_back(e->kids[j]);
                terms.push_back(mk_product(std::move(fac)));
            }
            return mk_sum(std::move(terms));
        }
        case NodeKind::Min:
        case NodeKind::Max: {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Select;
            n->from_min = e->kind == NodeKind::Min;
            n->kids = {e->kids[0], e->kids[1], deriv(e->kids[0], wrt), deriv(e->kids[1], wrt)};
            return n;
        }
        case NodeKind::Select: {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Select;
            n->from_min = e->from_min;
            n->kids = {e->kids[0], e->kids[1], deriv(e->kids[2], wrt), deriv(e->kids[3], wrt)};
            return n;
        }
    }
    return mk_const(0.0);
}

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

bool uses_var(const ExprPtr& e, Var v) {
    if (e->kind == NodeKind::Variable) return e->var == v;
    for (const auto& k : e->kids)
        if (uses_var(k, v)) return true;
    return false;
}

ExprPtr substitute(const ExprPtr& e, Var from, const ExprPtr& replacement) {
    switch (e->kind) {
        case NodeKind::Constant:
            return e;
        case NodeKind::Variable:
            return e->var == from ? replacement : e;
        default: {
            std::vector<ExprPtr> kids;
            kids.reserve(e->kids.size());
            bool changed = false;
            for (const auto& k : e->kids) {
                ExprPtr s = substitute(k, from, replacement);
                changed = changed || (s != k);
                kids.push_back(std::move(s));
            }
            if (!changed) return e;
            switch (e->kind) {
                case NodeKind::Power:
                    return mk_power(kids[0], e->exponent);
                case NodeKind::Log:
                    return mk_log(kids[0], e->exponent);
                case NodeKind::Sum:
                    return mk_sum(std::move(kids));
                case NodeKind::Product:
                    return mk_product(std::move(kids));
                case NodeKind::Min:
                    return mk_min(kids[0], kids[1]);
                case NodeKind::Max:
                    return mk_max(kids[0], kids[1]);
                default: {
                    auto n = std::make_shared<ExprNode>();
                    n->kind = e->kind;
                    n->from_min = e->from_min;
                    n->kids = std::move(kids);
                    return n;
                }
            }
        }
    }
}

std::optional<std::vector<PowerTerm>> flatten_power_sum(const ExprPtr& e, Var var) {
    switch (e->kind) {
        case NodeKind::Constant:
            return std::vector<PowerTerm>{{e->value, 0.0}};
        case NodeKind::Variable:
            if (e->var != var) return std::nullopt;
            return std::vector<PowerTerm>{{1.0, 1.0}};
        case NodeKind::Power: {
            auto inner = flatten_power_sum(e->kids[0], var);
            if (!inner || inner->size() != 1) return std::nullopt;
            PowerTerm t = (*inner)[0];
            if (t.coef <= 0.0 && t.deg != 0.0) return std::nullopt;
            return std::vector<PowerTerm>{{std::pow(t.coef, e->exponent), t.deg * e->exponent}};
        }
        case NodeKind::Sum: {
            std::vector<PowerTerm> all;
            for (const auto& k : e->kids) {
                auto part = flatten_power_sum(k, var);
                if (!part) return std::nullopt;
                all.insert(all.end(), part->begin(), part->end());
            }
            return all;
        }
        case NodeKind::Product: {
            std::vector<PowerTerm> acc{{1.0, 0.0}};
            for (const auto& k : e->kids) {
                auto part = flatten_power_sum(k, var);
                if (!part) return std::nullopt;
                std::vector<PowerTerm> next;
                for (const auto& a : acc)
                    for (const auto& b : *part) next.push_back({a.coef * b.coef, a.deg + b.deg});
                if (next.size() > 64) return std::nullopt;
                acc = std::move(next);
            }
            return acc;
        }
        default:
            return std::nullopt;
    }
}

namespace {

// Index bookkeeping for one multiplicative factor at an end: value behaves
// like coef * s^deg * |log s|^logw (coef retained only through finiteness).
struct EndBehavior {
    double deg = 0.0;
    double logw = 0.0;
    bool valid = true;
};

double probe_point(End end) { return end == End::Infinity ? 1e7 : 1e-7; }

EndBehavior end_behavior(const ExprPtr& e, End end, Var var);

EndBehavior eb_invalid() {
    EndBehavior b;
    b.valid = false;
    return b;
}

EndBehavior end_behavior_sum(const std::vector<ExprPtr>& kids, End end, Var var) {
    bool first = true;
    EndBehavior best;
    for (const auto& k : kids) {
        EndBehavior b = end_behavior(k, end, var);
        if (!b.valid) return eb_invalid();
        bool better;
        if (first) {
            better = true;
        } else if (end == End::Infinity) {
            better = b.deg > best.deg || (b.deg == best.deg && b.logw > best.logw);
        } else {
            better = b.deg < best.deg || (b.deg == best.deg && b.logw > best.logw);
        }
        if (better) best = b;
        first = false;
    }
    // sums of same-order terms can cancel; the numeric fallback handles that,
    // here we assume positive-coefficient families
    return first ? eb_invalid() : best;
}

EndBehavior end_behavior(const ExprPtr& e, End end, Var var) {
    switch (e->kind) {
        case NodeKind::Constant:
            if (e->value == 0.0) return eb_invalid();
            return {};
        case NodeKind::Variable:
            if (e->var != var) return eb_invalid();
            return {1.0, 0.0, true};
        case NodeKind::Power: {
            EndBehavior b = end_behavior(e->kids[0], end, var);
            if (!b.valid) return b;
            return {b.deg * e->exponent, b.logw * e->exponent, true};
        }
        case NodeKind::Log: {
            EndBehavior g = end_behavior(e->kids[0], end, var);
            if (!g.valid) return g;
            if (g.deg > 0.0) {
                if (end == End::Infinity) return {0.0, e->exponent, true};  // log(x)->slow
                // arg -> 0+: log -> -inf, sign trouble for fractional outer exponents
                return eb_invalid();
            }
            if (g.deg < 0.0) {
                if (end == End::Zero) return {0.0, e->exponent, true};
                return eb_invalid();
            }
            // argument tends to a constant: need its limit value
            double c = (end == End::Zero) ? limit_at_zero(e->kids[0])
                                          : eval(e->kids[0], probe_point(End::Infinity),
                                                 probe_point(End::Infinity));
            if (std::isinf(c)) return {0.0, e->exponent, true};
            if (!(c > 0.0)) return eb_invalid();
            if (std::abs(c - 1.0) < 1e-12) {
                // log(1 + vanishing part): behaves like the vanishing part itself.
                // Isolate it structurally: arg = 1 + rest.
                if (e->kids[0]->kind != NodeKind::Sum) return eb_invalid();
                std::vector<ExprPtr> rest;
                bool dropped_one = false;
                for (const auto& k : e->kids[0]->kids) {
                    double cv;
                    if (!dropped_one && k->kind == NodeKind::Constant && k->value == 1.0) {
                        dropped_one = true;
                        continue;
                    }
                    (void)cv;
                    rest.push_back(k);
                }
                if (!dropped_one || rest.empty()) return eb_invalid();
                EndBehavior r = end_behavior(mk_sum(std::move(rest)), end, var);
                if (!r.valid) return r;
                return {r.deg * e->exponent, r.logw * e->exponent, true};
            }
            return {};  // constant log factor
        }
        case NodeKind::Sum:
            return end_behavior_sum(e->kids, end, var);
        case NodeKind::Product: {
            EndBehavior acc;
            for (const auto& k : e->kids) {
                EndBehavior b = end_behavior(k, end, var);
                if (!b.valid) return b;
                acc.deg += b.deg;
                acc.logw += b.logw;
            }
            return acc;
        }
        case NodeKind::Min:
        case NodeKind::Max: {
            // pick the asymptotically active branch by probing near the end
            double lo = end == End::Infinity ? 1e5 : 1e-9;
            double hi = end == End::Infinity ? 1e9 : 1e-5;
            int pick = 0, consistent = 0;
            for (double s : {lo, std::sqrt(lo * hi), hi}) {
                double a = eval(e->kids[0], s, s);
                double b = eval(e->kids[1], s, s);
                int p = (e->kind == NodeKind::Min) == (a <= b) ? 0 : 1;
                if (consistent == 0) pick = p;
                if (p != pick) return eb_invalid();
                ++consistent;
            }
            return end_behavior(e->kids[pick], end, var);
        }
        default:
            return eb_invalid();
    }
}

}  // namespace

std::optional<double> structural_index(const ExprPtr& e, End end, Var var) {
    EndBehavior b = end_behavior(e, end, var);
    if (!b.valid) return std::nullopt;
    // index of regular variation ignores the slowly varying log weight, except
    // that log(1+s)-type factors already converted their weight into deg
    return b.deg;
}

std::vector<double> find_kinks(const ExprPtr& e, Var var, double lo, double hi) {
    std::vector<double> kinks;
    std::vector<ExprPtr> stack{e};
    std::vector<ExprPtr> mins;
    while (!stack.empty()) {
        ExprPtr cur = stack.back();
        stack.pop_back();
        if (cur->kind == NodeKind::Min || cur->kind == NodeKind::Max ||
            cur->kind == NodeKind::Select)
            mins.push_back(cur);
        for (const auto& k : cur->kids) stack.push_back(k);
    }
    const int N = 512;
    for (const auto& m : mins) {
        auto diff = [&](double s) {
            double other = s;
            return eval(m->kids[0], var == Var::u ? s : other, var == Var::v ? s : other) -
                   eval(m->kids[1], var == Var::u ? s : other, var == Var::v ? s : other);
        };
        double prev_s = lo, prev_d;
        try {
            prev_d = diff(lo);
        } catch (const EvalDomainError&) {
            continue;
        }
        for (int i = 1; i <= N; ++i) {
            double s = lo * std::pow(hi / lo, double(i) / N);
            double d;
            try {
                d = diff(s);
            } catch (const EvalDomainError&) {
                prev_s = s;
                continue;
            }
            if (d == 0.0) {
                kinks.push_back(s);
            } else if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
                double a = prev_s, b = s;
                for (int it = 0; it < 100; ++it) {
                    double mid = std::sqrt(a * b);
                    double dm = diff(mid);
                    if (dm == 0.0) {
                        a = b = mid;
                        break;
                    }
                    if ((dm < 0.0) == (prev_d < 0.0))
                        a = mid;
                    else
                        b = mid;
                }
                kinks.push_back(0.5 * (a + b));
            }
            prev_s = s;
            prev_d = d;
        }
    }
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }),
                kinks.end());
    return kinks;
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& text;
    const ParamMap& params;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos);
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) { throw ParseError(msg, at); }

    bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string read_ident() {
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    double read_number() {
        skip_ws();
        const char* begin = text.c_str() + pos;
        char* endp = nullptr;
        double val = std::strtod(begin, &endp);
        if (endp == begin) fail("expected a number", pos);
        pos += static_cast<std::size_t>(endp - begin);
        return val;
    }

    double bound_param(const std::string& name, std::size_t at) {
        auto it = params.find(name);
        if (it == params.end()) fail("unbound parameter '" + name + "'", at);
        if (!std::isfinite(it->second)) fail("non-finite value bound to '" + name + "'", at);
        return it->second;
    }

    ExprPtr parse_expression() {
        ExprPtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = mk_sum({lhs, parse_term()});
            } else if (accept('-')) {
                lhs = mk_sum({lhs, mk_product({mk_const(-1.0), parse_term()})});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (accept('*')) lhs = mk_product({lhs, parse_factor()});
        return lhs;
    }

    ExprPtr parse_factor() {
        ExprPtr atom = parse_atom();
        skip_ws();
        if (accept('^')) {
            double e = parse_exponent();
            if (atom->kind == NodeKind::Log) {
                // exponent applies to the log factor itself
                return mk_log(atom->kids[0], atom->exponent * e);
            }
            return mk_power(atom, e);
        }
        return atom;
    }

    // exponent := signed-number | param-name | "(" expr ")" folding to a constant
    double parse_exponent() {
        skip_ws();
        std::size_t at = pos;
        if (accept('(')) {
            ExprPtr sub = parse_expression();
            expect(')');
            if (sub->kind != NodeKind::Constant)
                fail("exponent must fold to a constant", at);
            return sub->value;
        }
        if (pos < text.size() && ident_start(text[pos])) {
            std::string name = read_ident();
            return bound_param(name, at);
        }
        return read_number();
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input", pos);
        std::size_t at = pos;
        char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprPtr sub = parse_expression();
            expect(')');
            return sub;
        }
        if (ident_start(c)) {
            std::string name = read_ident();
            if (name == "u") return mk_var(Var::u);
            if (name == "v") return mk_var(Var::v);
            if (name == "log") {
                expect('(');
                ExprPtr arg = parse_expression();
                expect(')');
                return mk_log(arg, 1.0);
            }
            if (name == "min" || name == "max") {
                expect('(');
                ExprPtr a = parse_expression();
                expect(',');
                ExprPtr b = parse_expression();
                expect(')');
                return name == "min" ? mk_min(a, b) : mk_max(a, b);
            }
            return mk_const(bound_param(name, at));
        }
        return mk_const(read_number());
    }
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_impl(const ExprPtr& e, std::ostream& os) {
    switch (e->kind) {
        case NodeKind::Constant:
            os << fmt_double(e->value);
            break;
        case NodeKind::Variable:
            os << (e->var == Var::u ? 'u' : 'v');
            break;
        case NodeKind::Power:
            if (e->kids[0]->kind == NodeKind::Variable) {
                print_impl(e->kids[0], os);
            } else {
                os << '(';
                print_impl(e->kids[0], os);
                os << ')';
            }
            os << '^' << '(' << fmt_double(e->exponent) << ')';
            break;
        case NodeKind::Log:
            os << "log(";
            print_impl(e->kids[0], os);
            os << ')';
            if (e->exponent != 1.0) os << "^(" << fmt_double(e->exponent) << ')';
            break;
        case NodeKind::Sum:
            os << '(';
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << " + ";
                print_impl(e->kids[i], os);
            }
            os << ')';
            break;
        case NodeKind::Product:
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << " * ";
                bool paren = e->kids[i]->kind == NodeKind::Sum;
                if (paren) {
                    print_impl(e->kids[i], os);  // sums already parenthesize
                } else {
                    print_impl(e->kids[i], os);
                }
            }
            break;
        case NodeKind::Min:
        case NodeKind::Max:
            os << (e->kind == NodeKind::Min ? "min(" : "max(");
            print_impl(e->kids[0], os);
            os << ", ";
            print_impl(e->kids[1], os);
            os << ')';
            break;
        case NodeKind::Select:
            // not part of the input grammar; informational form
            os << (e->from_min ? "dmin(" : "dmax(");
            print_impl(e->kids[0], os);
            os << ", ";
            print_impl(e->kids[1], os);
            os << "; ";
            print_impl(e->kids[2], os);
            os << ", ";
            print_impl(e->kids[3], os);
            os << ')';
            break;
    }
}

}  // namespace

ExprPtr parse_expr(const std::string& text, const ParamMap& params) {
    Parser p{text, params};
    ExprPtr e = p.parse_expression();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
    return e;
}

std::string print_expr(const ExprPtr& e) {
    std::ostringstream os;
    print_impl(e, os);
    return os.str();
}

}  // namespace ellab
