#pragma once

#include <functional>
#include <optional>

#include "qc/core/hbar.hpp"
#include "qc/loop/loop_system.hpp"

namespace qc {

struct Divisor {
    std::vector<Var> points;
    std::vector<std::int32_t> weights;

    std::size_t size() const { return points.size(); }

    // "z1 - z2", "z1 + z2 - z3 - z4", "2*z1 - z2 - z3"
    static Divisor parse(const std::string& text) {
        Divisor D;
        std::size_t i = 0;
        auto skip = [&] {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        };
        skip();
        while (i < text.size()) {
            std::int32_t sign = 1;
            if (text[i] == '+' || text[i] == '-') {
                sign = text[i] == '-' ? -1 : 1;
                ++i;
                skip();
            } else if (!D.points.empty()) {
                throw std::invalid_argument("expected + or - in divisor '" + text + "'");
            }
            std::int32_t w = 1;
            if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                std::size_t j = i;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                w = std::stoi(text.substr(i, j - i));
                i = j;
                skip();
                if (i >= text.size() || text[i] != '*') throw std::invalid_argument("expected '*' after weight in divisor");
                ++i;
                skip();
            }
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            if (j == i) throw std::invalid_argument("expected a point name in divisor '" + text + "'");
            D.points.push_back(var(text.substr(i, j - i)));
            D.weights.push_back(sign * w);
            i = j;
            skip();
        }
        return D;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < size(); ++i) {
            std::int32_t w = weights[i];
            s += (w < 0 ? (s.empty() ? "-" : " - ") : (s.empty() ? "" : " + "));
            if (std::abs(w) != 1) s += std::to_string(std::abs(w)) + "*";
            s += var_name(points[i]);
        }
        return s;
    }
};

inline void validate_divisor(const SpectralCurve& C, const Divisor& D) {
    if (D.points.size() != D.weights.size()) throw std::invalid_argument("divisor points and weights differ in length");
    std::int32_t deg = 0;
    std::set<Var> seen;
    for (std::size_t i = 0; i < D.size(); ++i) {
        deg += D.weights[i];
        if (D.weights[i] == 0) throw std::invalid_argument("zero weight in divisor");
        if (!seen.insert(D.points[i]).second) throw std::invalid_argument("repeated point in divisor");
        Var v = D.points[i];
        if (v == C.z || v == xvar()) throw std::invalid_argument("divisor point clashes with a curve variable");
        for (auto& p : C.parameters)
            if (var(p) == v) throw std::invalid_argument("divisor point clashes with a curve parameter");
    }
    if (deg != 0) throw std::invalid_argument("divisor has nonzero degree");
}

namespace detail {

inline std::optional<Poly> as_laurent(const RatFunc& c) {
    Monomial dm;
    Rat scale = 1;
    for (auto& f : c.den_factors()) {
        if (f.p.size() != 1) return std::nullopt;
        for (auto& [v, k] : f.p.terms().front().m.entries()) dm = dm * Monomial(v, -f.e * k);
        for (std::int32_t i = 0; i < f.e; ++i) scale /= f.p.lc();
    }
    std::vector<Poly::Term> ts;
    for (auto& t : c.num().terms()) ts.push_back({t.m * dm, t.c * scale});
    return Poly::from_terms(std::move(ts));
}

// slots [first, n) integrated once each
inline LPoly integrate_slots(const LPoly& w, std::int32_t first) {
    LPoly r(w.nvars());
    for (auto& [e, c] : w.terms()) {
        Exps f = e;
        Rat s = 1;
        for (std::size_t i = static_cast<std::size_t>(first); i < f.size(); ++i) {
            if (f[i] == -1) throw std::logic_error("residue in a stable multidifferential");
            f[i] += 1;
            s /= f[i];
        }
        r.add(f, c * RatFunc(s));
    }
    return r;
}

inline std::int64_t orbit_size(const Exps& e) {
    std::int64_t r = 1;
    std::int64_t k = 1, run = 1;
    for (std::size_t i = 1; i <= e.size(); ++i) {
        r *= static_cast<std::int64_t>(i);
        if (i < e.size() && e[i] == e[i - 1]) {
            ++run;
            k *= run;
        } else {
            run = 1;
        }
    }
    return r / k;
}

}  // namespace detail

// d/dp at fixed x(v) of a function (not a density) of the listed points
inline LogExpr point_function_derivative(const SpectralCurve& C, const LogExpr& f, const std::vector<Var>& vars, Var p) {
    LogExpr r = f.total_derivative(p);
    RatFunc extra;
    for (Var v : vars) {
        RatFunc zv = RatFunc::variable(v);
        extra += f.derivative(v) * (RatFunc(-1) * C.x.subs(C.z, zv).derivative(p) / C.dx().subs(C.z, zv));
    }
    return r + LogExpr(extra);
}

// The functions F_{g,n}(D), the exponents S_m(D) and the PDE residuals for one divisor.
class WaveFunction {
public:
    WaveFunction(OmegaTable& T, Divisor D) : T_(T), D_(std::move(D)), op_(build_L_bcycle(T.curve())) {
        validate_divisor(T.curve(), D_);
    }

    const Divisor& divisor() const { return D_; }
    const SpectralCurve& curve() const { return T_.curve(); }
    const DeformOperator& op() const { return op_; }
    OmegaTable& omega_table() { return T_; }

    RatFunc point(std::size_t i) const { return RatFunc::variable(D_.points[i]); }
    RatFunc x_at(std::size_t i) const { return curve().x.subs(curve().z, point(i)); }
    RatFunc dx_at(std::size_t i) const { return curve().dx().subs(curve().z, point(i)); }

    // sum over ordered tuples of points of alpha_{i1}..alpha_{in} Phi(p_{i1}, .., p_{in}) for symmetric Phi
    RatFunc on_divisor(const LPoly& Phi) {
        const std::int32_t n = Phi.nvars();
        Poly acc;
        RatFunc slow;
        for (auto& [e, c] : Phi.terms()) {
            if (!std::is_sorted(e.begin(), e.end())) continue;
            Poly prod = Poly(Rat(detail::orbit_size(e)));
            for (std::int32_t i = 0; i < n; ++i) prod = prod * power_sum(e[static_cast<std::size_t>(i)]);
            if (auto l = detail::as_laurent(c)) acc += prod * *l;
            else slow += RatFunc::from_laurent(prod) * c;
        }
        return RatFunc::from_laurent(acc) + slow;
    }

    // slots [0, free) become the given variables, the rest are summed over the divisor
    RatFunc on_divisor_partial(const LPoly& Phi, const std::vector<RatFunc>& free) {
        RatFunc r;
        for (auto& [e, c] : Phi.terms()) {
            Poly prod = Poly(1L);
            for (std::size_t i = free.size(); i < e.size(); ++i) prod = prod * power_sum(e[i]);
            RatFunc t = RatFunc::from_laurent(prod) * c;
            for (std::size_t i = 0; i < free.size(); ++i) t *= free[i].pow(e[i]);
            r += t;
        }
        return r;
    }

    LogExpr F(std::int32_t g, std::int32_t n) {
        auto key = std::pair{g, n};
        if (auto it = F_.find(key); it != F_.end()) return it->second;
        LogExpr r;
        const auto& C = curve();
        if (n <= 0) throw std::invalid_argument("F_{g,0}(D) is the free energy and is not computed here");
        if (g == 0 && n == 1) {
            LogExpr prim = primitive(C.ydx(), C.z);
            for (std::size_t i = 0; i < D_.size(); ++i) r = r + RatFunc(static_cast<long>(D_.weights[i])) * prim.subs(C.z, point(i));
        } else if (g == 0 && n == 2) {
            for (std::size_t i = 0; i < D_.size(); ++i)
                for (std::size_t j = i + 1; j < D_.size(); ++j) {
                    RatFunc a(static_cast<long>(D_.weights[i] * D_.weights[j]));
                    r.add_log(RatFunc(2) * a, point(i) - point(j));
                    r.add_log(a, dx_at(i));
                    r.add_log(a, dx_at(j));
                }
        } else {
            r = LogExpr(on_divisor(detail::integrate_slots(T_.omega(g, n).density, 0)));
        }
        F_.emplace(key, r);
        return r;
    }

    LogExpr S(std::int32_t m) {
        if (auto it = S_.find(m); it != S_.end()) return it->second;
        LogExpr r;
        if (m == 0) r = F(0, 1);
        else if (m == 1) r = RatFunc(Rat(1, 2)) * F(0, 2);
        else
            for (std::int32_t g = 0; 2 * g <= m; ++g) {
                std::int32_t n = m + 1 - 2 * g;
                if (n >= 1) r = r + RatFunc(Rat(1) / factorial(n)) * F(g, n);
            }
        S_.emplace(m, r);
        return r;
    }

    // d/dx_i S_m
    RatFunc dS(std::int32_t m, std::size_t i) {
        auto key = std::tuple{m, i, 1};
        if (auto it = D1_.find(key); it != D1_.end()) return it->second;
        RatFunc r = S(m).derivative(D_.points[i]) / dx_at(i);
        D1_.emplace(key, r);
        return r;
    }
    RatFunc d2S(std::int32_t m, std::size_t i) { return d_dx(dS(m, i), i); }
    RatFunc d_dx(const RatFunc& f, std::size_t i) const { return f.derivative(D_.points[i]) / dx_at(i); }

    // d_B F_{g,n}(D) for the cycle of operator term j
    LogExpr dB_F(std::size_t term, std::int32_t g, std::int32_t n) {
        auto key = std::tuple{term, g, n};
        if (auto it = dBF_.find(key); it != dBF_.end()) return it->second;
        const auto& C = curve();
        const auto& d = op_.terms[term].d;
        const Point& loc = C.poles[d.pole].loc;
        LogExpr r;
        if (g == 0 && n == 1) {
            Var w = var("wave_tmp");
            LogExpr prim = primitive(second_kind_period(C, OmegaTable::bergman(C.z, w), loc, d.index), w);
            for (std::size_t i = 0; i < D_.size(); ++i) r = r + RatFunc(static_cast<long>(D_.weights[i])) * prim.subs(w, point(i));
        } else {
            LPoly per = first_slot_period(T_.omega(g, n + 1).density, d.pole, d.index);
            r = LogExpr(on_divisor(detail::integrate_slots(per, 0)));
        }
        dBF_.emplace(key, r);
        return r;
    }

    LogExpr dB_S(std::size_t term, std::int32_t m) {
        if (m == 0) return dB_F(term, 0, 1);
        if (m == 1) return RatFunc(Rat(1, 2)) * dB_F(term, 0, 2);
        LogExpr r;
        for (std::int32_t g = 0; 2 * g <= m; ++g) {
            std::int32_t n = m + 1 - 2 * g;
            if (n >= 1) r = r + RatFunc(Rat(1) / factorial(n)) * dB_F(term, g, n);
        }
        return r;
    }

    RatFunc coef_at(std::size_t term, std::size_t k) const { return op_.terms[term].coef.subs(xvar(), x_at(k)); }

    // L(x_k).S_m
    LogExpr LS(std::int32_t m, std::size_t k) {
        LogExpr r;
        for (std::size_t j = 0; j < op_.terms.size(); ++j) r = r + coef_at(j, k) * dB_S(j, m);
        return r;
    }

    // L(x_k).F_g
    RatFunc LF(std::int32_t g, std::size_t k) {
        if (op_.empty()) return RatFunc();
        return apply_L(T_, op_, g, 0).subs(xvar(), x_at(k));
    }

    RatFunc star(std::size_t k) const {
        RatFunc r;
        for (std::size_t i = 0; i < D_.size(); ++i)
            for (std::size_t j = 0; j < D_.size(); ++j) {
                if (i == j || i == k || j == k) continue;
                r += RatFunc(static_cast<long>(D_.weights[i] * D_.weights[j])) / ((x_at(k) - x_at(i)) * (x_at(i) - x_at(j)));
            }
        return r;
    }

    // h^l coefficient of the PDE at point k divided by psi
    LogExpr pde_residual(std::size_t k, std::int32_t l) {
        if (k >= D_.size()) throw std::out_of_range("probe index outside the divisor");
        if (D_.weights[k] * D_.weights[k] != 1) throw std::invalid_argument("PDE needs unit weight at the probed point");
        if (l < 0) throw std::invalid_argument("negative hbar order");
        const Rat ak(D_.weights[k]);
        RatFunc rat;
        for (std::int32_t m1 = 0; m1 <= l; ++m1) rat += dS(m1, k) * dS(l - m1, k);
        LogExpr r;
        if (l >= 1) {
            std::int32_t m = l - 1;
            rat += d2S(m, k);
            for (std::size_t i = 0; i < D_.size(); ++i) {
                if (i == k) continue;
                RatFunc ratio(Rat(D_.weights[i]) / ak);
                rat -= (dS(m, i) + ratio * dS(m, k)) / (x_at(k) - x_at(i));
            }
            r = r - LS(m, k);
        }
        if (l >= 2 && l % 2 == 0) rat -= LF(l / 2, k);
        if (l == 2) rat += star(k);
        if (l == 0) rat -= curve().R.subs(xvar(), x_at(k));
        return r + LogExpr(rat);
    }

    // the prime-form derivative F'_{0,2}(z, D) at a free point z
    RatFunc cylinder_prime(const RatFunc& zf) const {
        RatFunc r;
        for (std::size_t i = 0; i < D_.size(); ++i) r += RatFunc(static_cast<long>(D_.weights[i])) / (zf - point(i));
        return r / curve().dx().subs(curve().z, zf);
    }

    // F'(z,D) and F''(z, z~, D) for stable (g,n)
    RatFunc F_prime(std::int32_t g, std::int32_t n, const RatFunc& zf) {
        LPoly Phi = detail::integrate_slots(T_.omega(g, n).density, 1);
        return on_divisor_partial(Phi, {zf}) / curve().dx().subs(curve().z, zf);
    }
    RatFunc F_second(std::int32_t g, std::int32_t n, const RatFunc& za, const RatFunc& zb) {
        LPoly Phi = detail::integrate_slots(T_.omega(g, n).density, 2);
        return on_divisor_partial(Phi, {za, zb}) / (curve().dx().subs(curve().z, za) * curve().dx().subs(curve().z, zb));
    }

    static Rat factorial(std::int32_t n) {
        Rat r = 1;
        for (std::int32_t i = 2; i <= n; ++i) r *= i;
        return r;
    }

private:
    const Poly& power_sum(std::int32_t a) {
        if (auto it = P_.find(a); it != P_.end()) return it->second;
        Poly p;
        for (std::size_t i = 0; i < D_.size(); ++i) p += Poly::monomial(Monomial(D_.points[i], a), Rat(D_.weights[i]));
        return P_.emplace(a, p).first->second;
    }

    LPoly first_slot_period(const LPoly& w, std::size_t pole, std::int32_t k) {
        const auto& C = curve();
        LPoly r(w.nvars() - 1);
        for (auto& [e, c] : w.terms()) {
            auto key = std::tuple{pole, k, e[0]};
            auto it = period_.find(key);
            if (it == period_.end())
                it = period_.emplace(key, second_kind_period(C, RatFunc::variable(C.z).pow(e[0]), C.poles[pole].loc, k)).first;
            if (it->second.is_zero()) continue;
            r.add(Exps(e.begin() + 1, e.end()), c * it->second);
        }
        return r;
    }

    OmegaTable& T_;
    Divisor D_;
    DeformOperator op_;
    std::map<std::int32_t, Poly> P_;
    std::map<std::pair<std::int32_t, std::int32_t>, LogExpr> F_;
    std::map<std::int32_t, LogExpr> S_;
    std::map<std::tuple<std::int32_t, std::size_t, int>, RatFunc> D1_;
    std::map<std::tuple<std::size_t, std::int32_t, std::int32_t>, LogExpr> dBF_;
    std::map<std::tuple<std::size_t, std::int32_t, std::int32_t>, RatFunc> period_;
};

inline CheckResult pde_check(WaveFunction& W, std::size_t k, std::int32_t l) {
    CheckResult r;
    r.label = "PDE k=" + std::to_string(k + 1) + " order " + std::to_string(l);
    LogExpr res = W.pde_residual(k, l);
    r.pass = res.is_zero();
    if (!r.pass) r.detail = res.to_string();
    return r;
}

// F'_{0,2}(z,D) + F'_{0,2}(-z,D) = sum alpha_i/(x(z) - x(p_i))
inline CheckResult cylinder_identity_check(WaveFunction& W) {
    const auto& C = W.curve();
    RatFunc z = RatFunc::variable(C.z);
    RatFunc lhs = W.cylinder_prime(z) + W.cylinder_prime(RatFunc(-1) * z);
    RatFunc rhs;
    for (std::size_t i = 0; i < W.divisor().size(); ++i) rhs += RatFunc(static_cast<long>(W.divisor().weights[i])) / (C.x - W.x_at(i));
    CheckResult r;
    r.label = "cylinder identity";
    r.witness = lhs - rhs;
    r.pass = r.witness.is_zero();
    return r;
}

// d/dx_i F = n alpha_i F'(p_i) and the second-derivative relation
inline CheckResult symmetry_check(WaveFunction& W, std::int32_t g, std::int32_t n) {
    CheckResult r;
    r.label = "symmetry (" + std::to_string(g) + "," + std::to_string(n) + ")";
    r.pass = true;
    const auto& D = W.divisor();
    RatFunc F = W.F(g, n).rational();
    Var zt = var("wave_ztilde");
    for (std::size_t i = 0; i < D.size() && r.pass; ++i) {
        RatFunc a(static_cast<long>(D.weights[i])), nn(static_cast<long>(n));
        RatFunc d1 = W.d_dx(F, i);
        RatFunc w1 = d1 - nn * a * W.F_prime(g, n, W.point(i));
        RatFunc w2;
        if (n >= 2) {
            RatFunc d2 = W.d_dx(d1, i);
            RatFunc Fp = W.F_prime(g, n, RatFunc::variable(zt));
            RatFunc dFp = (Fp.derivative(zt) / W.curve().dx().subs(W.curve().z, RatFunc::variable(zt))).subs(zt, W.point(i));
            w2 = d2 - nn * RatFunc(static_cast<long>(n - 1)) * a * a * W.F_second(g, n, W.point(i), W.point(i)) - nn * a * dFp;
        }
        if (!w1.is_zero() || !w2.is_zero()) {
            r.pass = false;
            r.witness = w1.is_zero() ? w2 : w1;
        }
    }
    return r;
}

// d/dt_{zeta,k} F_{0,2}(D) from the double primitive of the cycle derivative equals the parameter derivative at fixed x
inline CheckResult cylinder_time_check(WaveFunction& W) {
    const auto& C = W.curve();
    CheckResult r;
    r.label = "time derivative of F02";
    if (C.parameters.size() != 1) throw CurveError("time check needs a one-parameter family");
    Var p = var(C.parameters[0]);
    r.pass = true;
    for (std::size_t j = 0; j < W.op().terms.size(); ++j) {
        const auto& d = W.op().terms[j].d;
        const auto& P = C.poles[d.pole];
        if (!P.over_infinity() || P.d != -2) throw CurveError("time check implemented for ramified poles at infinity");
        RatFunc rate = kp_time(C, P.loc, d.index).derivative(p);
        if (rate.is_zero()) continue;
        LogExpr fam = point_function_derivative(C, W.F(0, 2), W.divisor().points, p);
        if (!fam.is_rational()) throw std::logic_error("logarithmic time derivative of F02");
        r.witness = fam.rational() / rate - W.dB_F(j, 0, 2).rational();
        if (!r.witness.is_zero()) r.pass = false;
    }
    return r;
}

// Truncated hbar series keyed by order.
using HSeries = std::map<std::int32_t, RatFunc>;

namespace detail {

inline HSeries hs_add(HSeries a, const HSeries& b, const Rat& s = Rat(1)) {
    for (auto& [k, v] : b) a[k] += v * RatFunc(s);
    return a;
}
inline HSeries hs_mul(const HSeries& a, const HSeries& b, std::int32_t top) {
    HSeries r;
    for (auto& [i, u] : a)
        for (auto& [j, v] : b)
            if (i + j <= top) r[i + j] += u * v;
    return r;
}
inline HSeries hs_shift(const HSeries& a, std::int32_t k) {
    HSeries r;
    for (auto& [i, v] : a) r[i + k] = v;
    return r;
}
inline HSeries hs_map(const HSeries& a, const std::function<RatFunc(const RatFunc&)>& f) {
    HSeries r;
    for (auto& [i, v] : a) r[i] = f(v);
    return r;
}
inline HSeries hs_scale(const HSeries& a, const RatFunc& s) {
    return hs_map(a, [&](const RatFunc& v) { return v * s; });
}

}  // namespace detail

struct ReducedResult {
    CheckResult first;   // D psi~ = h^2/(x - x') (d/dx + d/dx') psi~ = -D' psi~
    CheckResult second;  // D^2 psi~ with d/dx' eliminated
};

// Two-point reduced equations for psi~ = (x - x') psi e^F, checked through hbar^l.
inline ReducedResult reduced_residual(WaveFunction& W, std::int32_t l) {
    using namespace detail;
    const auto& C = W.curve();
    const auto& D = W.divisor();
    if (D.size() != 2 || D.weights[0] != 1 || D.weights[1] != -1) throw std::invalid_argument("reduced equation needs a divisor [z] - [z']");
    auto Lt = build_L_times(C);
    if (Lt.terms.size() > 1) throw CurveError("reduced equation implemented for at most one time derivation");
    Var zv = D.points[0], zpv = D.points[1];
    RatFunc x = W.x_at(0), xp = W.x_at(1);
    auto dx = [&](const RatFunc& f) { return W.d_dx(f, 0); };
    auto dxp = [&](const RatFunc& f) { return W.d_dx(f, 1); };
    RatFunc c, cp, dc;
    std::function<RatFunc(const RatFunc&)> dt = [](const RatFunc&) { return RatFunc(); };
    RatFunc Lcoef;
    if (!Lt.empty()) {
        const auto& term = Lt.terms[0];
        Lcoef = term.coef;
        c = term.coef.subs(xvar(), x);
        cp = term.coef.subs(xvar(), xp);
        dc = term.coef.derivative(xvar()).subs(xvar(), x);
        if (C.parameters.size() != 1) throw CurveError("time derivation needs a one-parameter family");
        Var p = var(C.parameters[0]);
        RatFunc rate = coordinate_of(C, term.d).derivative(p);
        if (rate.is_zero()) throw CurveError("time does not move along the family");
        dt = [&C, p, rate, zv, zpv](const RatFunc& f) {
            LogExpr d = point_function_derivative(C, LogExpr(f), {zv, zpv}, p);
            return d.rational() / rate;
        };
    }
    const std::int32_t top = l;
    HSeries G, Gp, H;
    for (std::int32_t m = 0; m <= top + 1; ++m) {
        G[m - 1] += W.dS(m, 0);
        Gp[m - 1] += W.dS(m, 1);
    }
    G[0] += RatFunc(1) / (x - xp);
    Gp[0] -= RatFunc(1) / (x - xp);
    if (!Lt.empty()) {
        Var p = var(C.parameters[0]);
        RatFunc rate = coordinate_of(C, Lt.terms[0].d).derivative(p);
        for (std::int32_t m = 0; m <= top; ++m) {
            LogExpr d = point_function_derivative(C, W.S(m), {zv, zpv}, p);
            if (!d.is_rational()) throw std::logic_error("logarithmic time derivative of S");
            H[m - 1] += d.rational() / rate;
        }
        RatFunc unit = Lcoef;
        for (std::int32_t g = 1; 2 * g - 2 <= top; ++g) {
            RatFunc lf = apply_L(W.omega_table(), W.op(), g, 0);
            RatFunc q = lf / unit;
            if (q.depends_on(xvar())) throw CurveError("free-energy derivative depends on x");
            H[2 * g - 2] += q;
        }
    }
    RatFunc R = C.R.subs(xvar(), x), Rp = C.R.subs(xvar(), xp), dR = C.R.derivative(xvar()).subs(xvar(), x);
    auto op_D = [&](const HSeries& Gs, const HSeries& Hs, const RatFunc& cc, const RatFunc& RR, auto&& deriv, std::int32_t upto) {
        HSeries A = hs_shift(hs_add(hs_map(Gs, deriv), hs_mul(Gs, Gs, upto - 2)), 2);
        A = hs_add(A, hs_shift(hs_scale(Hs, cc), 2), Rat(-1));
        A[0] -= RR;
        return A;
    };
    const std::int32_t upto = top + 2;
    HSeries A = op_D(G, H, c, R, dx, upto);
    HSeries Ap = op_D(Gp, H, cp, Rp, dxp, upto);
    HSeries mid = hs_shift(hs_scale(hs_add(G, Gp), RatFunc(1) / (x - xp)), 2);
    ReducedResult out;
    out.first.label = "reduced first-order form";
    out.second.label = "reduced second-order form";
    out.first.pass = out.second.pass = true;
    auto record = [](CheckResult& r, std::int32_t k, const RatFunc& w) {
        if (r.pass && !w.is_zero()) {
            r.pass = false;
            r.witness = w;
            r.detail = "hbar^" + std::to_string(k);
        }
    };
    for (std::int32_t k = 0; k <= top; ++k) {
        record(out.first, k, A[k] - mid[k]);
        record(out.first, k, Ap[k] + mid[k]);
    }
    // D^2 psi~ / psi~ = h^2(A'' + 2 G A' + (G' + G^2) A) - h^2 c (dt A + H A) - R A
    HSeries dA = hs_map(A, dx), ddA = hs_map(dA, dx);
    HSeries GG = hs_add(hs_map(G, dx), hs_mul(G, G, top));
    HSeries D2 = hs_shift(hs_add(hs_add(ddA, hs_mul(G, dA, top), Rat(2)), hs_mul(GG, A, top)), 2);
    if (!Lt.empty()) D2 = hs_add(D2, hs_shift(hs_scale(hs_add(hs_map(A, dt), hs_mul(H, A, top)), c), 2), Rat(-1));
    D2 = hs_add(D2, hs_scale(A, R), Rat(-1));
    // h^2/(x - x') (R'(x) - dR/dx + h^2 (L'(x) - dL/dx)) with dF/dx the divided difference
    HSeries rhs;
    rhs[2] = (dR - (R - Rp) / (x - xp)) / (x - xp);
    if (!Lt.empty()) rhs = hs_add(rhs, hs_shift(hs_scale(H, (dc - (c - cp) / (x - xp)) / (x - xp)), 4));
    for (std::int32_t k = 0; k <= top; ++k) record(out.second, k, D2[k] - rhs[k]);
    return out;
}

// Regularized one-point wave function with the second point sent to a pole at infinity:
// psi = x'(z)^(-1/2) exp(S0/h) (1 + sum_k h^k series[k]).
struct QuantumLimit {
    LogExpr S0;
    LogExpr S1;
    std::map<std::int32_t, RatFunc> log_terms;  // W_m, m >= 2, coefficient of h^(m-1)
    HbarSeries<RatFunc> series;
};

inline QuantumLimit quantum_limit(OmegaTable& T, std::int32_t K) {
    const auto& C = T.curve();
    const PoleData* inf = nullptr;
    for (auto& P : C.poles)
        if (P.loc.is_infinity()) inf = &P;
    if (!inf || inf->d != -2) throw CurveError("quantum limit needs a ramified pole at infinity");
    if (!kp_time(C, inf->loc, 0).is_zero()) throw CurveError("y dx has a residue at the limit point");
    QuantumLimit q;
    Var z = C.z;
    RatFunc Z = RatFunc::variable(z);
    q.S0 = primitive(C.ydx(), z);
    q.S1.add_log(Rat(-1, 2), C.dx());
    HbarSeries<RatFunc> logs(1, K);
    for (std::int32_t m = 2; m <= K + 1; ++m) {
        RatFunc w;
        for (std::int32_t g = 0; 2 * g <= m; ++g) {
            std::int32_t n = m + 1 - 2 * g;
            if (n < 1) continue;
            LPoly Phi = detail::integrate_slots(T.omega(g, n).density, 0);
            RatFunc v;
            for (auto& [e, c] : Phi.terms()) {
                std::int32_t tot = 0;
                for (auto k : e) tot += k;
                v += c * Z.pow(tot);
            }
            w += v * RatFunc(Rat(1) / WaveFunction::factorial(n));
        }
        q.log_terms[m] = w;
        logs.at(m - 1) = w;
    }
    q.series = logs.exp();
    return q;
}

// h^l coefficient of (h^2 d^2/dx^2 - R(x)) psi / psi for the one-point limit; valid when L = 0
inline RatFunc quantum_limit_residual(OmegaTable& T, const QuantumLimit& q, std::int32_t l) {
    const auto& C = T.curve();
    if (!build_L_bcycle(C).empty()) throw CurveError("one-point ODE check needs an empty deformation operator");
    Var z = C.z;
    auto ddx = [&](const RatFunc& f) { return f.derivative(z) / C.dx(); };
    HSeries Wp;
    Wp[-1] = q.S0.derivative(z) / C.dx();
    Wp[0] = q.S1.derivative(z) / C.dx();
    for (auto& [m, w] : q.log_terms) Wp[m - 1] = ddx(w);
    RatFunc r;
    for (auto& [i, a] : Wp)
        if (Wp.count(l - 2 - i)) r += a * Wp.at(l - 2 - i);
    if (Wp.count(l - 2)) r += ddx(Wp.at(l - 2));
    if (l == 0) r -= C.R.subs(xvar(), C.x);
    return r;
}

}  // namespace qc
