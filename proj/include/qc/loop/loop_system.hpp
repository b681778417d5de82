#pragma once

#include "qc/tr/loop_equations.hpp"

namespace qc {

enum class DerivKind { BCycle, Time, Lambda };

struct Derivation {
    DerivKind kind;
    std::size_t pole;     // for Lambda: a preimage of lambda
    std::int32_t index;   // cycle or time index; unused for Lambda
    std::string to_string(const SpectralCurve& C) const {
        std::string p = point_to_string(C.poles[pole].loc);
        switch (kind) {
            case DerivKind::BCycle: return "dB[" + p + "," + std::to_string(index) + "]";
            case DerivKind::Time: return "d/dt[" + p + "," + std::to_string(index) + "]";
            default: return "d/dlambda[" + C.poles[pole].x_value.to_string() + "]";
        }
    }
};

struct OpTerm {
    RatFunc coef;  // rational in x
    Derivation d;
};

struct DeformOperator {
    std::vector<OpTerm> terms;
    bool empty() const { return terms.empty(); }
    std::string to_string(const SpectralCurve& C) const {
        if (terms.empty()) return "0";
        std::string s;
        for (auto& t : terms) {
            if (!s.empty()) s += " + ";
            s += "(" + t.coef.to_string() + ")*" + t.d.to_string(C);
        }
        return s;
    }
};

inline Var xvar() { return var("x"); }

namespace detail {

inline void push_term(DeformOperator& op, const RatFunc& c, Derivation d) {
    if (c.is_zero()) return;
    for (auto& t : op.terms)
        if (t.d.kind == d.kind && t.d.pole == d.pole && t.d.index == d.index) {
            t.coef += c;
            return;
        }
    op.terms.push_back({c, d});
}

// j + d(k+2) >= 1 with k >= 0
template <class F>
void for_infinite_range(const PoleData& P, F&& f) {
    for (std::int32_t j = 1 - 2 * P.d; j <= P.m; ++j)
        for (std::int32_t k = 0; j + P.d * (k + 2) >= 1; ++k) f(j, k, j + P.d * (k + 2));
}

}  // namespace detail

// Operator in second-kind cycle derivations.
inline DeformOperator build_L_bcycle(const SpectralCurve& C) {
    DeformOperator op;
    RatFunc X = RatFunc::variable(xvar());
    for (std::size_t i = 0; i < C.poles.size(); ++i) {
        const auto& P = C.poles[i];
        if (P.over_infinity()) {
            detail::for_infinite_range(P, [&](std::int32_t j, std::int32_t k, std::int32_t K) {
                RatFunc c = kp_time(C, P.loc, j) * X.pow(k) * RatFunc((Rat(-j) / Rat(P.d)) - k - 2);
                detail::push_term(op, c, {DerivKind::BCycle, i, K});
            });
        } else {
            for (std::int32_t j = 0; j <= P.m; ++j)
                for (std::int32_t k = 0; k <= j; ++k) {
                    RatFunc c = kp_time(C, P.loc, j) * (X - P.x_value).pow(-(k + 1)) * RatFunc(static_cast<long>(j + 1 - k));
                    detail::push_term(op, c, {DerivKind::BCycle, i, j + 1 - k});
                }
        }
    }
    return op;
}

// Operator in time and pole-position derivations.
inline DeformOperator build_L_times(const SpectralCurve& C) {
    DeformOperator op;
    RatFunc X = RatFunc::variable(xvar());
    for (std::size_t i = 0; i < C.poles.size(); ++i) {
        const auto& P = C.poles[i];
        if (P.over_infinity()) {
            if (P.d != -2) throw CurveError("time form of L needs a ramified pole at infinity");
            detail::for_infinite_range(P, [&](std::int32_t j, std::int32_t k, std::int32_t K) {
                RatFunc c = kp_time(C, P.loc, j) * X.pow(k) * RatFunc((Rat(-j) / Rat(P.d)) - k - 2);
                detail::push_term(op, c, {DerivKind::Time, i, K});
            });
        } else if (P.plus) {
            RatFunc xi = X - P.x_value;
            detail::push_term(op, xi.inv(), {DerivKind::Lambda, i, 0});
            for (std::int32_t j = 1; j <= P.m - 1; ++j)
                for (std::int32_t k = 1; k <= j; ++k) {
                    RatFunc c = kp_time(C, P.loc, j) * xi.pow(-(k + 1)) * RatFunc(static_cast<long>(j + 1 - k));
                    detail::push_term(op, c, {DerivKind::Time, i, j + 1 - k});
                }
        }
    }
    return op;
}

// omega_{g,n+1}(z, z1..zn) as a rational function, first slot in the curve variable
inline RatFunc omega_with_first_slot(OmegaTable& T, std::int32_t g, std::int32_t n) {
    std::vector<Arg> a{{T.curve().z, false}};
    for (Var v : zvars(n)) a.push_back({v, false});
    return omega_at(T, g, a);
}

inline RatFunc apply_L(OmegaTable& T, const DeformOperator& op, std::int32_t g, std::int32_t n) {
    if (op.empty()) return RatFunc();
    const auto& C = T.curve();
    RatFunc w = omega_with_first_slot(T, g, n);
    RatFunc r;
    for (auto& t : op.terms) {
        if (t.d.kind != DerivKind::BCycle) throw std::invalid_argument("apply_L expects the cycle form; use apply_L_family");
        r += t.coef * second_kind_period(C, w, C.poles[t.d.pole].loc, t.d.index);
    }
    return r;
}

// Extracted polar part of the squared singular part of y at every pole, as a function of x.
inline RatFunc singular_square(const SpectralCurve& C) {
    RatFunc X = RatFunc::variable(xvar()), Q;
    for (auto& P : C.poles) {
        if (P.over_infinity()) {
            // y_sing = (1/d) sum_j t_j x^(-j/d - 1)
            for (std::int32_t j = 0; j <= P.m; ++j)
                for (std::int32_t jj = 0; jj <= P.m; ++jj) {
                    Rat e = (Rat(-(j + jj)) / Rat(P.d)) - 2;
                    if (e < 0) continue;
                    RatFunc tt = kp_time(C, P.loc, j) * kp_time(C, P.loc, jj);
                    if (tt.is_zero()) continue;
                    if (e.get_den() != 1) throw CurveError("half-integer power in the singular square");
                    Q += tt * X.pow(static_cast<std::int32_t>(e.get_num().get_si())) * RatFunc(Rat(1, P.d * P.d));
                }
            if (P.d == -1) throw CurveError("unramified poles at infinity are not supported");
        } else if (P.plus) {
            RatFunc xi = X - P.x_value;
            for (std::int32_t j = 0; j <= P.m; ++j)
                for (std::int32_t jj = 0; jj <= P.m; ++jj)
                    Q += kp_time(C, P.loc, j) * kp_time(C, P.loc, jj) * xi.pow(-(j + jj + 2));
        }
    }
    return Q;
}

// P_{g,n}(x; z1..zn) as a rational function of x and the spectators.
inline RatFunc pgn(OmegaTable& T, std::int32_t g, std::int32_t n) {
    const auto& C = T.curve();
    Var z = C.z;
    RatFunc E = quadratic_combination(T, g, n);
    auto J = zvars(n);
    for (std::int32_t i = 0; i < n; ++i) {
        std::vector<Arg> a;
        for (std::int32_t k = 0; k < n; ++k) a.push_back({J[static_cast<std::size_t>(k)], k == i});
        RatFunc w = omega_at(T, g, a);
        RatFunc zi = RatFunc::variable(J[static_cast<std::size_t>(i)]);
        RatFunc xi = C.x.subs(z, zi), dxi = C.dx().subs(z, zi);
        E += (w / (dxi * (C.x - xi))).derivative(J[static_cast<std::size_t>(i)]);
    }
    RatFunc odd = E - E.negate_var(z);
    if (!odd.is_zero()) throw std::logic_error("P_{g,n} is not even in z");
    if (!E.is_zero() && order_at(E, z, Point::at(RatFunc())) < 0) throw std::logic_error("P_{g,n} has a pole at the branch point");
    return as_function_of_x(C, E);
}

inline CheckResult check_P_equals_L(OmegaTable& T, std::int32_t g, std::int32_t n) {
    const auto& C = T.curve();
    CheckResult r;
    r.label = "P=L (" + std::to_string(g) + "," + std::to_string(n) + ")";
    RatFunc P = pgn(T, g, n);
    RatFunc L = apply_L(T, build_L_bcycle(C), g, n);
    if (g == 0 && n == 0) L += singular_square(C);
    r.witness = P - L;
    r.pass = r.witness.is_zero();
    return r;
}

// d/dp of a multidifferential density at fixed x(v) for every listed variable
inline RatFunc fixed_x_derivative(const SpectralCurve& C, const RatFunc& f, const std::vector<Var>& vars, Var p) {
    RatFunc J(1);
    std::vector<RatFunc> dzdp;
    for (Var v : vars) {
        RatFunc zv = RatFunc::variable(v);
        RatFunc xv = C.x.subs(C.z, zv), dxv = C.dx().subs(C.z, zv);
        J *= dxv;
        dzdp.push_back(-xv.derivative(p) / dxv);
    }
    RatFunc h = f / J;
    RatFunc d = h.derivative(p);
    for (std::size_t i = 0; i < vars.size(); ++i) d += h.derivative(vars[i]) * dzdp[i];
    return d * J;
}

// the curve coordinate moved by a derivation, as a function of the parameters
inline RatFunc coordinate_of(const SpectralCurve& C, const Derivation& d) {
    if (d.kind == DerivKind::Lambda) return C.poles[d.pole].x_value;
    return kp_time(C, C.poles[d.pole].loc, d.index);
}

// omega_{g,n}(z1..zn), with the prepotential for (0,0)
inline LogExpr stored_omega(OmegaTable& T, std::int32_t g, std::int32_t n) {
    if (g == 0 && n == 0) return prepotential_F0(T.curve());
    return LogExpr(T.omega_ratfunc(g, n));
}

// d/d t_{zeta,0} omega_{g,n}: third-kind period of omega_{g,n+1} in its first slot
inline LogExpr residue_derivative(OmegaTable& T, std::size_t pole, std::int32_t g, std::int32_t n) {
    const auto& C = T.curve();
    RatFunc w = (g == 0 && n == 0) ? C.ydx() : omega_with_first_slot(T, g, n);
    return third_kind_period(C, w, C.poles[pole].loc);
}

inline LogExpr fixed_x_derivative(const SpectralCurve& C, const LogExpr& f, const std::vector<Var>& vars, Var p) {
    if (vars.empty()) return f.total_derivative(p);
    if (!f.is_rational()) throw std::logic_error("logarithmic multidifferential");
    return LogExpr(fixed_x_derivative(C, f.rational(), vars, p));
}

// d/d(coordinate) of omega_{g,n} along the one-parameter family; residues at finite poles may move too
inline RatFunc family_coordinate_derivative(OmegaTable& T, const Derivation& d, std::int32_t g, std::int32_t n) {
    const auto& C = T.curve();
    if (C.parameters.size() != 1) throw CurveError("family derivative needs exactly one curve parameter");
    Var p = var(C.parameters[0]);
    RatFunc rate = coordinate_of(C, d).derivative(p);
    if (rate.is_zero()) throw CurveError("coordinate " + d.to_string(C) + " does not move along the family");
    LogExpr total = fixed_x_derivative(C, stored_omega(T, g, n), zvars(n), p);
    for (std::size_t i = 0; i < C.poles.size(); ++i) {
        const auto& P = C.poles[i];
        for (std::int32_t j = 1; j <= P.m; ++j) {
            if (d.kind == DerivKind::Time && d.pole == i && d.index == j) continue;
            if (P.over_infinity() || P.plus)
                if (!kp_time(C, P.loc, j).derivative(p).is_zero())
                    throw CurveError("family moves more than one coordinate (t[" + point_to_string(P.loc) + "," + std::to_string(j) + "])");
        }
        if (P.over_infinity() || !P.plus) continue;
        if (!(d.kind == DerivKind::Lambda && d.pole == i) && !P.x_value.derivative(p).is_zero())
            throw CurveError("family moves a pole position as well");
        RatFunc dt0 = kp_time(C, P.loc, 0).derivative(p);
        if (!dt0.is_zero()) total = total - dt0 * residue_derivative(T, i, g, n);
    }
    if (!total.is_rational()) throw std::logic_error("family derivative left logarithms: " + total.to_string());
    return total.rational() / rate;
}

// L in the time form applied through parameter derivatives of omega_{g,n}
inline RatFunc apply_L_family(OmegaTable& T, std::int32_t g, std::int32_t n) {
    RatFunc r;
    for (auto& t : build_L_times(T.curve()).terms) r += t.coef * family_coordinate_derivative(T, t.d, g, n);
    return r;
}

inline CheckResult family_derivative_check(OmegaTable& T, std::int32_t g, std::int32_t n) {
    CheckResult r;
    r.label = "family derivative (" + std::to_string(g) + "," + std::to_string(n) + ")";
    if (T.curve().time_map.empty()) throw CurveError("curve declares no time map");
    RatFunc a = apply_L(T, build_L_bcycle(T.curve()), g, n);
    RatFunc b = apply_L_family(T, g, n);
    r.witness = a - b;
    r.pass = r.witness.is_zero();
    return r;
}

// d/dlambda omega_{g,n} = sum over both preimages, j of (j+1) t_j dB_{j+1} omega_{g,n}
inline CheckResult lambda_derivative_check(OmegaTable& T, std::size_t pole, std::int32_t g, std::int32_t n) {
    const auto& C = T.curve();
    const auto& P = C.poles[pole];
    CheckResult r;
    r.label = "pole-position derivative (" + std::to_string(g) + "," + std::to_string(n) + ")";
    RatFunc w = (g == 0 && n == 0) ? C.ydx() : omega_with_first_slot(T, g, n);
    RatFunc rhs;
    for (std::size_t i : {pole, P.partner})
        for (std::int32_t j = 0; j <= C.poles[i].m; ++j)
            rhs += RatFunc(static_cast<long>(j + 1)) * kp_time(C, C.poles[i].loc, j) * second_kind_period(C, w, C.poles[i].loc, j + 1);
    RatFunc lhs = family_coordinate_derivative(T, {DerivKind::Lambda, pole, 0}, g, n);
    r.witness = lhs - rhs;
    r.pass = r.witness.is_zero();
    return r;
}

}  // namespace qc
