#include "ellab/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellab/numerics.hpp"

namespace ellab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// ScalarNonlin
// ---------------------------------------------------------------------------

ScalarNonlin ScalarNonlin::make(ExprPtr e) {
    if (uses_var(e, Var::v))
        throw std::invalid_argument("scalar nonlinearity must use the variable u only");
    ScalarNonlin f;
    f.expr_ = std::move(e);
    bool pos = true;
    for (double s : log_grid(1e-8, 1e8, 100)) {
        double val;
        try {
            val = eval(f.expr_, s);
        } catch (const EvalDomainError& err) {
            throw std::invalid_argument(std::string("expression undefined at s=") +
                                        std::to_string(s) + ": " + err.what());
        }
        if (!std::isfinite(val))
            throw std::invalid_argument("expression not finite at s=" + std::to_string(s));
        if (!(val > 0.0)) pos = false;
    }
    f.positive_ = pos;
    f.limit0_ = ellab::limit_at_zero(f.expr_);
    f.kinks_ = find_kinks(f.expr_, Var::u);
    return f;
}

ScalarNonlin ScalarNonlin::parse(const std::string& text, const ParamMap& params) {
    return make(parse_expr(text, params));
}

double ScalarNonlin::operator()(double s) const {
    if (s == 0.0) return limit0_;
    return eval(expr_, s);
}

ValDer ScalarNonlin::value_and_derivative(double s, Side side) const {
    return eval_d(expr_, s, 0.0, Var::u, side);
}

ScalarNonlin ScalarNonlin::derivative() const {
    ScalarNonlin d;
    d.expr_ = deriv(expr_, Var::u);
    d.limit0_ = ellab::limit_at_zero(d.expr_);
    d.kinks_ = kinks_;
    bool pos = true;
    for (double s : log_grid(1e-8, 1e8, 100)) {
        double val = eval(d.expr_, s);
        if (!(val > 0.0)) pos = false;
    }
    d.positive_ = pos;
    return d;
}

// ---------------------------------------------------------------------------
// weighted primitive
// ---------------------------------------------------------------------------

namespace {

// Local index of f at 0: structural where the power-log shape allows,
// otherwise a log-log slope over small lambda.
std::optional<double> index_at(const ScalarNonlin& f, End end) {
    if (auto s = structural_index(f.expr(), end)) return s;
    std::vector<double> lx, ly;
    double lo = end == End::Zero ? 1e-8 : 1e2;
    double hi = end == End::Zero ? 1e-2 : 1e8;
    for (double lam : log_grid(lo, hi, 25)) {
        double val = std::abs(f(lam));
        if (val <= 0.0 || !std::isfinite(val)) return std::nullopt;
        lx.push_back(std::log(lam));
        ly.push_back(std::log(val));
    }
    return lstsq_slope(lx, ly);
}

bool all_zero(const ScalarNonlin& f) {
    for (double s : log_grid(1e-8, 1e8, 20))
        if (f(s) != 0.0) return false;
    return true;
}

}  // namespace

double weighted_primitive(const ScalarNonlin& f, double w, double s, double rel_tol) {
    if (s <= 0.0) return 0.0;
    if (all_zero(f)) return 0.0;

    // closed form for pure power sums
    if (auto terms = flatten_power_sum(f.expr())) {
        double total = 0.0;
        for (const auto& t : *terms) {
            double e = t.deg + w + 1.0;
            if (e <= 0.0) return kInf;
            total += t.coef * std::pow(s, e) / e;
        }
        return total;
    }

    auto q0opt = index_at(f, End::Zero);
    if (!q0opt) throw NonRegularVariationError("cannot determine the local index at 0");
    double q0 = *q0opt;
    if (q0 + w <= -1.0 + 1e-12) return kInf;  // divergent at the origin

    auto integrand = [&](double sigma) { return std::pow(sigma, w) * f(sigma); };

    double eps = std::min(s, 1e-3 * s);
    double tail = integrate(integrand, eps, s, rel_tol);
    for (int i = 0; i < 90; ++i) {
        double head = std::pow(eps, w + q0 + 1.0) * f(eps) * std::pow(eps, -q0) /
                      (w + q0 + 1.0);
        double total = head + tail;
        if (std::abs(head) <= 1e-3 * std::abs(total) || eps <= 1e-250) return total;
        double eps_new = eps / 100.0;
        tail += integrate(integrand, eps_new, eps, rel_tol);
        eps = eps_new;
    }
    return tail;
}

std::vector<double> weighted_primitive_table(const ScalarNonlin& f, double w,
                                             const std::vector<double>& grid,
                                             double rel_tol) {
    std::vector<double> out(grid.size(), 0.0);
    if (grid.empty()) return out;

    if (auto terms = flatten_power_sum(f.expr())) {
        bool divergent = false;
        for (const auto& t : *terms)
            if (t.deg + w + 1.0 <= 0.0) divergent = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (divergent) {
                out[i] = kInf;
                continue;
            }
            double total = 0.0;
            for (const auto& t : *terms) {
                double e = t.deg + w + 1.0;
                total += t.coef * std::pow(grid[i], e) / e;
            }
            out[i] = total;
        }
        return out;
    }

    out[0] = weighted_primitive(f, w, grid[0]);
    if (std::isinf(out[0])) {
        std::fill(out.begin(), out.end(), kInf);
        return out;
    }
    auto integrand = [&](double sigma) { return std::pow(sigma, w) * f(sigma); };
    for (std::size_t i = 1; i < grid.size(); ++i)
        out[i] = out[i - 1] + integrate(integrand, grid[i - 1], grid[i], rel_tol);
    return out;
}

// ---------------------------------------------------------------------------
// SystemNonlin
// ---------------------------------------------------------------------------

SystemNonlin SystemNonlin::scalar(ScalarNonlin f) {
    SystemNonlin s;
    s.kind_ = SystemKind::Generic;
    s.m_ = 1;
    s.components_ = {f.expr()};
    s.f1_ = f;
    return s;
}

SystemNonlin SystemNonlin::generic(std::vector<ExprPtr> components) {
    if (components.empty() || components.size() > kSystemMaxComponents)
        throw std::invalid_argument("system dimension must be 1 or 2");
    SystemNonlin s;
    s.kind_ = SystemKind::Generic;
    s.m_ = static_cast<int>(components.size());
    s.components_ = std::move(components);
    return s;
}

SystemNonlin SystemNonlin::gradient(ExprPtr potential) {
    SystemNonlin s;
    s.kind_ = SystemKind::Gradient;
    s.m_ = uses_var(potential, Var::v) ? 2 : 1;
    s.potential_ = potential;
    s.components_ = {deriv(potential, Var::u)};
    if (s.m_ == 2) s.components_.push_back(deriv(potential, Var::v));
    // cross-derivative symmetry check (finite differences on the components)
    if (s.m_ == 2) {
        for (double a : {0.3, 1.0, 4.2}) {
            for (double b : {0.5, 2.1}) {
                double h = 1e-5 * std::max(1.0, std::max(a, b));
                double d12 = (ellab::eval(s.components_[0], a, b + h) -
                              ellab::eval(s.components_[0], a, b - h)) /
                             (2 * h);
                double d21 = (ellab::eval(s.components_[1], a + h, b) -
                              ellab::eval(s.components_[1], a - h, b)) /
                             (2 * h);
                double scale = std::max({1e-12, std::abs(d12), std::abs(d21)});
                if (std::abs(d12 - d21) > 1e-5 * scale * 10.0)
                    throw std::invalid_argument(
                        "gradient system: mixed partials of the potential disagree");
            }
        }
    }
    return s;
}

SystemNonlin SystemNonlin::lane_emden(ScalarNonlin f1, ScalarNonlin f2) {
    SystemNonlin s;
    s.kind_ = SystemKind::LaneEmden;
    s.m_ = 2;
    s.f1_ = f1;
    s.f2_ = f2;
    s.components_ = {substitute(f1.expr(), Var::u, mk_var(Var::v)), f2.expr()};
    return s;
}

SystemNonlin SystemNonlin::proportional(ExprPtr phi, ScalarNonlin k, ScalarNonlin g,
                                        double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("proportional system: lambda >= 0");
    SystemNonlin s;
    s.kind_ = SystemKind::Proportional;
    s.m_ = 2;
    s.phi_ = phi;
    s.k_ = k;
    s.g_ = g;
    s.lambda_ = lambda;
    ExprPtr gu = g.expr();
    ExprPtr gv = substitute(g.expr(), Var::u, mk_var(Var::v));
    ExprPtr ku = k.expr();
    ExprPtr kv = substitute(k.expr(), Var::u, mk_var(Var::v));
    ExprPtr lam = mk_const(-lambda);
    s.components_ = {
        mk_product({phi, ku, mk_sum({gv, mk_product({lam, gu})})}),
        mk_product({phi, kv, mk_sum({gu, mk_product({lam, gv})})}),
    };
    return s;
}

Vec2 SystemNonlin::eval(double u, double v) const {
    Vec2 out{0.0, 0.0};
    for (int i = 0; i < m_; ++i) out[i] = ellab::eval(components_[i], u, v);
    return out;
}

double SystemNonlin::component(int i, double u, double v) const {
    return ellab::eval(components_[i], u, v);
}

double SystemNonlin::norm_at(double u, double v) const {
    Vec2 f = eval(u, v);
    double n = std::abs(f[0]);
    if (m_ == 2) n = std::max(n, std::abs(f[1]));
    return n;
}

double SystemNonlin::potential_value(double u, double v) const {
    if (!potential_) throw std::logic_error("system has no potential");
    return ellab::eval(potential_, u, v);
}

// ---------------------------------------------------------------------------
// f_plus
// ---------------------------------------------------------------------------

double f_plus(const ScalarNonlin& f, double lambda) { return std::abs(f(lambda)); }

double f_plus(const SystemNonlin& f, double lambda) {
    if (lambda == 0.0) return f.norm_at(0.0, 0.0);
    if (f.m() == 1) return std::abs(f.component(0, lambda, 0.0));
    // boundary of [0,lambda]^2 under the max-norm: the two far edges
    double best = 0.0;
    for (int edge = 0; edge < 2; ++edge) {
        auto along = [&](double t) {
            return edge == 0 ? f.norm_at(lambda, t) : f.norm_at(t, lambda);
        };
        const int N = 512;
        double arg_best = 0.0, val_best = -1.0;
        for (int i = 0; i <= N; ++i) {
            double t = lambda * i / N;
            double val = along(t);
            if (val > val_best) {
                val_best = val;
                arg_best = t;
            }
        }
        double a = std::max(0.0, arg_best - lambda / N);
        double b = std::min(lambda, arg_best + lambda / N);
        auto [xm, vm] = golden_max(along, a, b, 1e-9);
        (void)xm;
        best = std::max({best, val_best, vm});
    }
    return best;
}

// ---------------------------------------------------------------------------
// regular variation
// ---------------------------------------------------------------------------

namespace {

double numeric_index(const std::function<double(double)>& fabs, End end) {
    double lo = end == End::Infinity ? 1e2 : 1e-8;
    double hi = end == End::Infinity ? 1e8 : 1e-2;
    std::vector<double> lx, ly;
    for (double lam : log_grid(lo, hi, 49)) {
        double val = fabs(lam);
        if (!(val > 0.0) || !std::isfinite(val))
            throw NonRegularVariationError("nonpositive values in index estimation");
        lx.push_back(std::log(lam));
        ly.push_back(std::log(val));
    }
    // convergence: two-decade window slopes must agree to 1e-3
    double full = lstsq_slope(lx, ly);
    std::vector<double> slopes;
    const int per_decade = (static_cast<int>(lx.size()) - 1) / 6;
    for (int start = 0; start + 2 * per_decade < static_cast<int>(lx.size());
         start += per_decade) {
        std::vector<double> wx(lx.begin() + start, lx.begin() + start + 2 * per_decade + 1);
        std::vector<double> wy(ly.begin() + start, ly.begin() + start + 2 * per_decade + 1);
        slopes.push_back(lstsq_slope(wx, wy));
    }
    double lo_s = *std::min_element(slopes.end() - 3, slopes.end());
    double hi_s = *std::max_element(slopes.end() - 3, slopes.end());
    if (hi_s - lo_s > 1e-3)
        throw NonRegularVariationError("log-log slope did not converge over two decades");
    return end == End::Infinity ? slopes.back() : full;
}

// --- term decomposition with log and power-of-sum factors, for structural
// vector limits ---

struct LogFac {
    ExprPtr arg;
    double a;
};

struct PowFac {
    ExprPtr base;  // flattens to several terms
    double e;
};

struct Term2 {
    double coef = 1.0;
    double du = 0.0, dv = 0.0;
    std::vector<LogFac> logs;
    std::vector<PowFac> pows;
};

std::optional<std::vector<Term2>> flatten_terms(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Constant:
            return std::vector<Term2>{{e->value, 0.0, 0.0, {}, {}}};
        case NodeKind::Variable: {
            Term2 t;
            (e->var == Var::u ? t.du : t.dv) = 1.0;
            return std::vector<Term2>{t};
        }
        case NodeKind::Power: {
            auto inner = flatten_terms(e->kids[0]);
            if (!inner) return std::nullopt;
            if (inner->size() != 1) {
                // power of a genuine sum: keep symbolic
                Term2 r;
                r.pows.push_back({e->kids[0], e->exponent});
                return std::vector<Term2>{r};
            }
            Term2 t = (*inner)[0];
            if (t.coef <= 0.0 && (t.du != 0.0 || t.dv != 0.0 || !t.logs.empty() ||
                                  !t.pows.empty()))
                return std::nullopt;
            Term2 r;
            r.coef = std::pow(t.coef, e->exponent);
            r.du = t.du * e->exponent;
            r.dv = t.dv * e->exponent;
            for (auto lf : t.logs) {
                lf.a *= e->exponent;
                r.logs.push_back(lf);
            }
            for (auto pf : t.pows) {
                pf.e *= e->exponent;
                r.pows.push_back(pf);
            }
            return std::vector<Term2>{r};
        }
        case NodeKind::Log: {
            Term2 t;
            t.logs.push_back({e->kids[0], e->exponent});
            return std::vector<Term2>{t};
        }
        case NodeKind::Sum: {
            std::vector<Term2> all;
            for (const auto& k : e->kids) {
                auto part = flatten_terms(k);
                if (!part) return std::nullopt;
                all.insert(all.end(), part->begin(), part->end());
            }
            return all;
        }
        case NodeKind::Product: {
            std::vector<Term2> acc{Term2{}};
            for (const auto& k : e->kids) {
                auto part = flatten_terms(k);
                if (!part) return std::nullopt;
                std::vector<Term2> next;
                for (const auto& a : acc)
                    for (const auto& b : *part) {
                        Term2 t;
                        t.coef = a.coef * b.coef;
                        t.du = a.du + b.du;
                        t.dv = a.dv + b.dv;
                        t.logs = a.logs;
                        t.logs.insert(t.logs.end(), b.logs.begin(), b.logs.end());
                        t.pows = a.pows;
                        t.pows.insert(t.pows.end(), b.pows.begin(), b.pows.end());
                        next.push_back(std::move(t));
                    }
                if (next.size() > 128) return std::nullopt;
                acc = std::move(next);
            }
            return acc;
        }
        default:
            return std::nullopt;
    }
}

// Effective behavior of a term at an end after classifying each log factor.
struct EffTerm {
    double coef;
    double du, dv;
    double weight;  // total slowly-varying log weight
    bool valid = true;
};

struct LeadMono {
    double coef, du, dv;
};

// Leading monomial of a log/pow-free term list at an end; nullopt when the
// leading part is not a single monomial ray.
std::optional<LeadMono> leading_monomial(const std::vector<Term2>& terms, End end) {
    bool first = true;
    LeadMono lead{0.0, 0.0, 0.0};
    for (const auto& t : terms) {
        if (!t.logs.empty() || !t.pows.empty()) return std::nullopt;
        if (t.coef == 0.0) continue;
        double d = t.du + t.dv;
        double dl = lead.du + lead.dv;
        if (first || (end == End::Infinity ? d > dl + 1e-12 : d < dl - 1e-12)) {
            lead = {t.coef, t.du, t.dv};
            first = false;
        } else if (std::abs(d - dl) <= 1e-12) {
            if (std::abs(t.du - lead.du) > 1e-12) return std::nullopt;  // mixed ray
            lead.coef += t.coef;
        }
    }
    if (first || lead.coef == 0.0) return std::nullopt;
    return lead;
}

EffTerm classify_term(const Term2& t, End end) {
    EffTerm r{t.coef, t.du, t.dv, 0.0, true};
    const EffTerm invalid{0, 0, 0, 0, false};
    for (const auto& lf : t.logs) {
        auto args = flatten_terms(lf.arg);
        if (!args) return invalid;
        double K = 0.0;
        std::vector<Term2> pos, neg;  // joint degree sign
        for (const auto& at : *args) {
            double d = at.du + at.dv;
            if (at.du == 0.0 && at.dv == 0.0)
                K += at.coef;
            else if (d > 0.0)
                pos.push_back(at);
            else if (d < 0.0)
                neg.push_back(at);
            else
                return invalid;
        }
        const std::vector<Term2>& grows = end == End::Infinity ? pos : neg;
        const std::vector<Term2>& vanishes = end == End::Infinity ? neg : pos;
        if (!grows.empty()) {
            r.weight += lf.a;  // slowly varying: ~ |log lambda|^a
            continue;
        }
        if (K > 1.0 + 1e-12) {
            r.coef *= std::pow(std::log(K), lf.a);  // constant factor
            continue;
        }
        if (std::abs(K - 1.0) <= 1e-12) {
            // log(1 + x) ~ x at the end where x vanishes
            auto lm = leading_monomial(vanishes, end);
            if (!lm || lm->coef <= 0.0) return invalid;
            r.coef *= std::pow(lm->coef, lf.a);
            r.du += lm->du * lf.a;
            r.dv += lm->dv * lf.a;
            continue;
        }
        return invalid;
    }
    for (const auto& pf : t.pows) {
        auto base = flatten_terms(pf.base);
        if (!base) return invalid;
        auto lm = leading_monomial(*base, end);
        if (!lm || lm->coef <= 0.0) return invalid;
        // (K + x)^e behaves like (leading monomial)^e at the end
        r.coef *= std::pow(lm->coef, pf.e);
        r.du += lm->du * pf.e;
        r.dv += lm->dv * pf.e;
    }
    return r;
}

struct LeadingLimit {
    double index;
    std::vector<ExprPtr> components;  // normalized homogeneous limit
};

ExprPtr monomial_expr(double coef, double du, double dv) {
    std::vector<ExprPtr> fac{mk_const(coef)};
    if (du != 0.0) fac.push_back(mk_power(mk_var(Var::u), du));
    if (dv != 0.0) fac.push_back(mk_power(mk_var(Var::v), dv));
    return mk_product(std::move(fac));
}

std::optional<LeadingLimit> structural_limit(const std::vector<ExprPtr>& comps, End end) {
    std::vector<std::vector<EffTerm>> eff(comps.size());
    double best_deg = 0.0, best_w = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        auto terms = flatten_terms(comps[i]);
        if (!terms) return std::nullopt;
        for (const auto& t : *terms) {
            EffTerm et = classify_term(t, end);
            if (!et.valid) return std::nullopt;
            if (et.coef == 0.0) continue;
            eff[i].push_back(et);
            double d = et.du + et.dv;
            bool better;
            if (first)
                better = true;
            else if (end == End::Infinity)
                better = d > best_deg + 1e-12 ||
                         (std::abs(d - best_deg) <= 1e-12 && et.weight > best_w + 1e-12);
            else
                better = d < best_deg - 1e-12 ||
                         (std::abs(d - best_deg) <= 1e-12 && et.weight > best_w + 1e-12);
            if (better) {
                best_deg = d;
                best_w = et.weight;
            }
            first = false;
        }
    }
    if (first) return std::nullopt;
    std::vector<ExprPtr> lead(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::vector<ExprPtr> terms;
        for (const auto& et : eff[i]) {
            if (std::abs(et.du + et.dv - best_deg) <= 1e-12 &&
                std::abs(et.weight - best_w) <= 1e-12)
                terms.push_back(monomial_expr(et.coef, et.du, et.dv));
        }
        lead[i] = mk_sum(std::move(terms));
    }
    // normalize by max of |lead| over the unit max-norm boundary
    double c;
    if (comps.size() == 1 && !uses_var(lead[0], Var::v)) {
        c = std::abs(eval(lead[0], 1.0, 0.0));
    } else {
        c = f_plus(SystemNonlin::generic(lead), 1.0);
    }
    if (!(c > 0.0) || !std::isfinite(c)) return std::nullopt;
    for (auto& l : lead) l = mk_product({mk_const(1.0 / c), l});
    return LeadingLimit{best_deg, std::move(lead)};
}

}  // namespace

RegVarProfile regvar_profile(const ScalarNonlin& f) {
    RegVarProfile p;
    auto pi = structural_index(f.expr(), End::Infinity);
    auto pz = structural_index(f.expr(), End::Zero);
    p.structural = pi.has_value() && pz.has_value();
    auto fabs = [&](double s) { return std::abs(f(s)); };
    p.index_infinity = pi ? *pi : numeric_index(fabs, End::Infinity);
    p.index_zero = pz ? *pz : numeric_index(fabs, End::Zero);
    p.limit_infinity = {mk_power(mk_var(Var::u), p.index_infinity)};
    p.limit_zero = {mk_power(mk_var(Var::u), p.index_zero)};
    p.slow_infinity =
        mk_product({mk_power(mk_var(Var::u), -p.index_infinity), f.expr()});
    p.slow_zero = mk_product({mk_power(mk_var(Var::u), -p.index_zero), f.expr()});
    return p;
}

RegVarProfile regvar_profile(const SystemNonlin& f) {
    if (f.m() == 1) {
        RegVarProfile p;
        auto fabs = [&](double s) { return std::abs(f.component(0, s, 0.0)); };
        auto li = structural_limit(f.components(), End::Infinity);
        auto lz = structural_limit(f.components(), End::Zero);
        p.structural = li.has_value() && lz.has_value();
        p.index_infinity = li ? li->index : numeric_index(fabs, End::Infinity);
        p.index_zero = lz ? lz->index : numeric_index(fabs, End::Zero);
        if (li) p.limit_infinity = li->components;
        if (lz) p.limit_zero = lz->components;
        return p;
    }
    RegVarProfile p;
    auto fp = [&](double lam) { return f_plus(f, lam); };
    auto li = structural_limit(f.components(), End::Infinity);
    auto lz = structural_limit(f.components(), End::Zero);
    p.structural = li.has_value() && lz.has_value();
    p.index_infinity = li ? li->index : numeric_index(fp, End::Infinity);
    p.index_zero = lz ? lz->index : numeric_index(fp, End::Zero);
    if (li) p.limit_infinity = li->components;
    if (lz) p.limit_zero = lz->components;
    return p;
}

// ---------------------------------------------------------------------------
// theta and phi_K
// ---------------------------------------------------------------------------

double theta(double K) {
    if (K < 1.0) throw std::domain_error("theta(K) requires K >= 1");
    if (K == 1.0) return 1.0;
    auto g = [K](double s) { return std::exp(s - 1.0) / s - K; };
    auto dg = [](double s) { return std::exp(s - 1.0) * (s - 1.0) / (s * s); };
    double b = 2.0;
    while (g(b) < 0.0) b *= 2.0;
    return newton_safeguarded(g, dg, 1.0, b, std::min(b, 1.0 + std::log(K) + 1.0));
}

double phi_K(double K, double s) { return (1.0 + K / s) * std::log(K + s); }

std::pair<double, double> phi_K_min(double K) {
    if (K < 1.0) throw std::domain_error("phi_K requires K >= 1");
    if (K == 1.0) return {0.0, 1.0};  // increasing; infimum attained as s -> 0+
    auto phi_ld = [K](long double s) -> long double {
        return (1.0L + static_cast<long double>(K) / s) *
               std::log(static_cast<long double>(K) + s);
    };
    // bracket the interior minimum on a log grid
    auto grid = log_grid(1e-6, 1e6, 1200);
    int best = 0;
    long double best_val = phi_ld(grid[0]);
    for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
        long double v = phi_ld(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    long double a = grid[std::max(0, best - 1)];
    long double b = grid[std::min<int>(grid.size() - 1, best + 1)];
    auto [sK, val] = golden_min_ld(phi_ld, a, b);
    return {static_cast<double>(sK), static_cast<double>(val)};
}

}  // namespace ellab
