#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qc/core/calculus.hpp"
#include "qc/core/laurent.hpp"
#include "qc/core/ratfunc.hpp"

namespace qc {

class CurveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A declared reparametrization: a named modulus as a function of the curve parameters.
struct TimeEntry {
    std::string name;
    RatFunc value;
    std::map<std::string, RatFunc> jacobian;  // d value / d parameter
};

struct PoleData {
    Point loc;
    std::int32_t d = 0;  // ord of x at the pole
    std::int32_t m = 0;  // pole order of y dx minus one
    RatFunc x_value;     // x(pole), zero when x has a pole there
    std::size_t partner = 0;  // index of sigma(pole)
    bool plus = true;
    bool ramified() const { return loc.is_infinity() || (loc.value->is_zero()); }
    bool over_infinity() const { return d < 0; }
};

inline bool same_point(const Point& a, const Point& b) {
    if (a.is_infinity() || b.is_infinity()) return a.is_infinity() && b.is_infinity();
    return *a.value == *b.value;
}

inline std::string point_to_string(const Point& p) { return p.is_infinity() ? "inf" : p.value->to_string(); }

struct SpectralCurve {
    std::string name;
    std::vector<std::string> parameters;
    Var z = var("z");
    RatFunc x, y;
    RatFunc R;          // y^2 = R(x), in the variable "x"
    RatFunc z2_of_x;    // z^2 as a function of x
    std::vector<TimeEntry> time_map;
    std::vector<PoleData> poles;
    std::vector<Point> ramification;

    RatFunc dx() const { return x.derivative(z); }
    RatFunc ydx() const { return y * dx(); }
    std::string id() const { return name + "|" + x.to_string() + "|" + y.to_string(); }

    std::size_t pole_index(const Point& p) const {
        for (std::size_t i = 0; i < poles.size(); ++i)
            if (same_point(poles[i].loc, p)) return i;
        throw CurveError("point " + point_to_string(p) + " is not a pole of y dx");
    }
    const PoleData& pole_at(const Point& p) const { return poles[pole_index(p)]; }
    std::optional<std::size_t> infinite_pole() const {
        for (std::size_t i = 0; i < poles.size(); ++i)
            if (poles[i].loc.is_infinity()) return i;
        return std::nullopt;
    }
};

namespace detail {

// odd and even parts checked; returns p with z^(2k) replaced by w^k
inline Poly even_to_square(const Poly& p, Var z, Var w) {
    std::vector<Poly::Term> ts;
    for (auto& [m, c] : p.terms()) {
        std::int32_t e = m.degree(z);
        if (e % 2 != 0) throw CurveError("expected an even function of z");
        Monomial r = m.without(z);
        if (e) r = r * Monomial(w, e / 2);
        ts.push_back({r, c});
    }
    return Poly::from_terms(std::move(ts));
}

inline RatFunc even_ratfunc_to_square(const RatFunc& f, Var z, Var w) {
    return RatFunc(even_to_square(f.num(), z, w)) / RatFunc(even_to_square(f.den(), z, w));
}

inline Rat sign_of(const RatFunc& f) {
    auto [n, d] = f.canonical();
    return Rat(sgn(n.lc()) * sgn(d.lc()));
}

}  // namespace detail

// Series in the local chart coordinate c (z - p, or 1/z at infinity).
inline LaurentSeries chart_function_series(const SpectralCurve& C, const RatFunc& f, const Point& p, std::int32_t through) {
    return laurent_expand(f, C.z, p, through);
}

// Density of the one-form f(z) dz against dc.
inline LaurentSeries chart_form_series(const SpectralCurve& C, const RatFunc& f, const Point& p, std::int32_t through) {
    if (!p.is_infinity()) return laurent_expand(f, C.z, p, through);
    auto s = laurent_expand(f, C.z, p, through + 2);
    return s * LaurentSeries::monomial(-2, RatFunc(-1), through + 3 - s.val());
}

// xi = (x - x(p))^(1/d) in the chart coordinate, leading coefficient a rational root of that of x.
inline LaurentSeries xi_series(const SpectralCurve& C, const PoleData& P, std::int32_t terms) {
    RatFunc base = P.d > 0 ? C.x - P.x_value : C.x;
    std::int32_t ord = order_at(base, C.z, P.loc);
    auto s = chart_function_series(C, base, P.loc, ord + terms - 1);
    return s.pow(Rat(1) / Rat(P.d));
}

// Res_p xi^e f dz, with the window grown until the coefficient is determined.
inline RatFunc xi_weighted_residue(const SpectralCurve& C, const PoleData& P, std::int32_t e, const RatFunc& f) {
    if (f.is_zero()) return RatFunc();
    std::int32_t vf = order_at(f, C.z, P.loc) - (P.loc.is_infinity() ? 2 : 0);
    if (e + vf >= 0) return RatFunc();
    auto xi = xi_series(C, P, -vf - e).pow(Rat(e));
    auto w = chart_form_series(C, f, P.loc, -1 - e);
    return (xi * w).coeff(-1);
}

inline RatFunc kp_time(const SpectralCurve& C, const Point& p, std::int32_t j) {
    const auto& P = C.pole_at(p);
    if (j < 0) throw CurveError("negative time index");
    if (j > P.m) return RatFunc();
    return xi_weighted_residue(C, P, j, C.ydx());
}

// Pairing with the second-kind cycle: Res_p xi^(-k)/k f dz.
inline RatFunc second_kind_period(const SpectralCurve& C, const RatFunc& f, const Point& p, std::int32_t k) {
    if (k < 1) throw CurveError("second-kind cycle index must be >= 1");
    const auto& P = C.pole_at(p);
    return xi_weighted_residue(C, P, -k, f) / RatFunc(static_cast<long>(k));
}

// B(p) - B(sigma p) for unramified poles, B(p) otherwise.
inline RatFunc time_derivative_period(const SpectralCurve& C, const RatFunc& f, const Point& p, std::int32_t k) {
    std::size_t i = C.pole_index(p);
    RatFunc r = second_kind_period(C, f, p, k);
    std::size_t s = C.poles[i].partner;
    if (s != i) r -= second_kind_period(C, f, C.poles[s].loc, k);
    return r;
}

struct TimeValue {
    std::size_t pole;
    std::int32_t j;
    RatFunc value;
};

inline std::vector<TimeValue> times_table(const SpectralCurve& C) {
    std::vector<TimeValue> out;
    for (std::size_t i = 0; i < C.poles.size(); ++i)
        for (std::int32_t j = 0; j <= C.poles[i].m; ++j) out.push_back({i, j, kp_time(C, C.poles[i].loc, j)});
    return out;
}

// An even function of z rewritten as a rational function of x.
inline RatFunc as_function_of_x(const SpectralCurve& C, const RatFunc& f) {
    Var w = var("w");
    return detail::even_ratfunc_to_square(f, C.z, w).subs(w, C.z2_of_x);
}

// Regularized integral of f dz from the partner of a finite unramified pole to the pole; log(x - lambda) is subtracted at both ends.
inline LogExpr third_kind_period(const SpectralCurve& C, const RatFunc& f, const Point& pole) {
    std::size_t i = C.pole_index(pole);
    const auto& P = C.poles[i];
    if (P.over_infinity()) throw CurveError("third-kind periods are implemented for finite poles only");
    Var z = C.z;
    LogExpr prim = primitive(f, z);
    auto at_end = [&](const Point& e) {
        RatFunc ze = *e.value;
        if (!prim.rational().is_zero() && order_at(prim.rational(), z, e) < 0)
            throw CurveError("third-kind period needs a simple pole at " + point_to_string(e));
        LogExpr v(prim.rational().is_zero() ? RatFunc() : prim.rational().subs(z, ze));
        for (auto& a : prim.atoms()) {
            RatFunc arg = a.arg.subs(z, ze);
            if (arg.is_zero()) v.add_log(RatFunc(-1) * a.coeff, C.dx().subs(z, ze));
            else v.add_log(a.coeff, arg);
        }
        return v;
    };
    return at_end(P.loc) - at_end(C.poles[P.partner].loc);
}

// Genus-zero prepotential: 1/2 sum t_k int_{B_k} y dx over all poles, plus 1/2 t_0 times the regularized third-kind period for finite pole pairs.
inline LogExpr prepotential_F0(const SpectralCurve& C) {
    LogExpr F;
    for (auto& P : C.poles) {
        if (P.over_infinity() && P.d != -2) throw CurveError("prepotential needs a ramified pole at infinity");
        for (std::int32_t k = 1; k <= P.m; ++k) {
            RatFunc t = kp_time(C, P.loc, k);
            if (!t.is_zero()) F = F + LogExpr(t * second_kind_period(C, C.ydx(), P.loc, k));
        }
        if (P.over_infinity() || !P.plus) continue;
        RatFunc t0 = kp_time(C, P.loc, 0);
        if (!t0.is_zero()) F = F + t0 * third_kind_period(C, C.ydx(), P.loc);
    }
    return RatFunc(Rat(1, 2)) * F;
}

inline std::vector<Point> ramification_points(const SpectralCurve& C) { return C.ramification; }

inline SpectralCurve validate_curve(std::string name, std::vector<std::string> parameters, const RatFunc& x, const RatFunc& y,
                                    std::vector<TimeEntry> time_map = {}) {
    SpectralCurve C;
    C.name = std::move(name);
    C.parameters = std::move(parameters);
    C.x = x;
    C.y = y;
    C.time_map = std::move(time_map);
    Var z = C.z;
    std::set<Var> allowed{z};
    for (auto& p : C.parameters) allowed.insert(var(p));
    for (const RatFunc* f : {&x, &y})
        for (Var v : f->vars())
            if (!allowed.count(v)) throw CurveError("undeclared symbol '" + var_name(v) + "' in curve");
    if (!x.depends_on(z) || !y.depends_on(z)) throw CurveError("x and y must depend on z");
    if (x.negate_var(z) != x) throw CurveError("involution violated: x(-z) != x(z)");
    if (y.negate_var(z) != -y) throw CurveError("involution violated: y(-z) != -y(z)");

    // x = (a w + b)/(c w + e) with w = z^2
    Var w = var("w"), X = var("x");
    RatFunc xw = detail::even_ratfunc_to_square(x, z, w);
    auto ncs = xw.num().coeffs(w), dcs = xw.den().coeffs(w);
    if (ncs.size() > 2 || dcs.size() > 2) throw CurveError("x must have degree 2 in z");
    auto cf = [](const std::vector<Poly>& cs, std::size_t i) { return i < cs.size() ? RatFunc(cs[i]) : RatFunc(); };
    RatFunc a = cf(ncs, 1), b = cf(ncs, 0), c = cf(dcs, 1), e = cf(dcs, 0);
    RatFunc Xv = RatFunc::variable(X);
    RatFunc winv = (e * Xv - b) / (a - c * Xv);
    C.z2_of_x = winv;
    C.R = detail::even_ratfunc_to_square(y * y, z, w).subs(w, winv);
    if (C.R.subs(X, x) != y * y) throw CurveError("failed to express y^2 as a rational function of x");

    // ramification: sigma-fixed points 0 and infinity; dx must vanish at 0 and x must have a double pole at infinity
    RatFunc dxz = x.derivative(z), dyz = y.derivative(z);
    if (order_at(x, z, Point::infinity()) != -2)
        throw CurveError("unsupported curve: x must have a double pole at z = infinity");
    if (order_at(dxz, z, Point::at(RatFunc())) != 1) throw CurveError("dx must have a simple zero at z = 0");
    auto dxr = linear_roots(dxz.num(), z);
    for (auto& [r, mult] : dxr)
        if (!r.is_zero()) throw CurveError("unexpected zero of dx away from z = 0");
    Poly g = poly_gcd(dxz.num(), dyz.num());
    if (g.has_var(z)) throw CurveError("zeros of dx and dy coincide");
    if (order_at(y, z, Point::at(RatFunc())) < 0) throw CurveError("y has a pole at a ramification point");
    C.ramification = {Point::at(RatFunc()), Point::infinity()};

    // poles of y dx
    RatFunc ydx = y * dxz;
    std::vector<Point> locs;
    for (auto& fac : ydx.den_factors()) {
        if (!fac.p.has_var(z)) continue;
        for (auto& [r, mult] : linear_roots(fac.p, z)) locs.push_back(Point::at(r));
    }
    if (order_at(ydx, z, Point::infinity()) - 2 < 0) locs.push_back(Point::infinity());
    for (auto& p : locs) {
        PoleData P;
        P.loc = p;
        std::int32_t vf = order_at(ydx, z, p) - (p.is_infinity() ? 2 : 0);
        P.m = -vf - 1;
        std::int32_t ox = order_at(x, z, p);
        if (ox < 0) {
            P.d = ox;
            P.x_value = RatFunc();
        } else {
            P.x_value = x.subs(z, *p.value);
            P.d = order_at(x - P.x_value, z, p);
        }
        if (P.d == 0 || P.d > 1 || P.d < -2) throw CurveError("unsupported local structure of x at pole " + point_to_string(p));
        if (!p.is_infinity() && p.value->is_zero()) throw CurveError("pole of y dx at a ramification point");
        C.poles.push_back(P);
    }
    for (std::size_t i = 0; i < C.poles.size(); ++i) {
        auto& P = C.poles[i];
        if (P.loc.is_infinity()) {
            P.partner = i;
            continue;
        }
        Point s = Point::at(-*P.loc.value);
        bool found = false;
        for (std::size_t k = 0; k < C.poles.size(); ++k)
            if (same_point(C.poles[k].loc, s)) {
                P.partner = k;
                found = true;
            }
        if (!found) throw CurveError("poles not closed under the involution");
    }
    // label by the sign of the top time
    for (std::size_t i = 0; i < C.poles.size(); ++i) {
        auto& P = C.poles[i];
        if (P.partner == i) continue;
        P.plus = detail::sign_of(kp_time(C, P.loc, P.m)) > 0;
    }
    return C;
}

}  // namespace qc
