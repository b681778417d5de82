#pragma once

#include "qc/core/calculus.hpp"
#include "qc/core/hbar.hpp"
#include "qc/iso/gelfand_dikii.hpp"
#include "qc/loop/loop_system.hpp"

namespace qc {

using Series = HbarSeries<RatFunc>;

namespace detail {

inline Series series_inverse(const Series& s) {
    if (s.m0() != 0) throw std::logic_error("series inverse expects storage from h^0");
    if (s[0].is_zero()) throw std::domain_error("series with vanishing leading coefficient is not invertible");
    Series r(0, s.K());
    RatFunc r0 = s[0].inv();
    r.at(0) = r0;
    for (std::int32_t k = 1; k <= s.K(); ++k) {
        RatFunc acc;
        for (std::int32_t j = 1; j <= k; ++j) acc += s[j] * r[k - j];
        r.at(k) = -r0 * acc;
    }
    return r;
}

inline Series series_const(const RatFunc& f, std::int32_t K, std::int32_t shift = 0) {
    Series r(0, K);
    if (shift <= K) r.at(shift) = f;
    return r;
}

inline Series series_shift(const Series& s, std::int32_t k) {
    Series r(0, s.K());
    for (std::int32_t m = 0; m + k <= s.K(); ++m) r.at(m + k) = s[m];
    return r;
}

inline Series series_times(const Series& s, const RatFunc& f) {
    return s.map([&](const RatFunc& c) { return c * f; });
}

inline Series series_subs(const Series& s, Var v, const RatFunc& val) {
    return s.map([&](const RatFunc& c) { return c.subs(v, val); });
}

inline Series series_d(const Series& s, Var v) {
    return s.map([&](const RatFunc& c) { return c.derivative(v); });
}

inline bool series_zero_through(const Series& s, std::int32_t K) {
    for (std::int32_t m = s.m0(); m <= std::min(K, s.K()); ++m)
        if (!s[m].is_zero()) return false;
    return true;
}

inline Rat double_factorial(std::int32_t n) {
    Rat r(1);
    for (std::int32_t k = n; k > 1; k -= 2) r *= Rat(k);
    return r;
}

}  // namespace detail

inline Var uvar() { return var("u"); }

// Formal solution U = sum_k h^{2k} U_k(u) of the string equation, with u the leading term.
struct Background {
    StringEquation eq;
    std::int32_t K = 0;
    RatFunc t_of_u, udot;
    std::vector<RatFunc> U;  // coefficient of h^{2k}

    // d/dt on functions of u
    RatFunc dt(const RatFunc& f) const { return udot * f.derivative(uvar()); }

    const Series& Uder(std::int32_t j) const {
        while (static_cast<std::int32_t>(cache_.size()) <= j) {
            if (cache_.empty()) {
                Series s(0, K);
                for (std::size_t k = 0; k < U.size() && 2 * static_cast<std::int32_t>(k) <= K; ++k)
                    s.at(2 * static_cast<std::int32_t>(k)) = U[k];
                cache_.push_back(s);
            } else {
                cache_.push_back(cache_.back().map([&](const RatFunc& c) { return dt(c); }));
            }
        }
        return cache_[static_cast<std::size_t>(j)];
    }

    // a differential polynomial with U, t replaced by the series; x stays symbolic
    Series eval(const Poly& p) const {
        Series r(0, K);
        for (auto& term : p.terms()) {
            RatFunc c(term.c);
            std::int32_t hp = 0;
            std::vector<std::pair<std::int32_t, std::int32_t>> us;
            for (auto& [v, e] : term.m.entries()) {
                if (v == hvar()) hp = e;
                else if (v == tvar()) c *= t_of_u.pow(e);
                else if (auto j = derivative_order(v)) us.emplace_back(*j, e);
                else c *= RatFunc::variable(v).pow(e);
            }
            if (hp < 0) throw std::domain_error("negative power of h in evaluated expression");
            if (hp > K) continue;
            Series s = detail::series_const(c, K, hp);
            for (auto& [j, e] : us)
                for (std::int32_t i = 0; i < e; ++i) s = (s * Uder(j)).truncated(K);
            r = r + s;
        }
        return r;
    }
    Series eval(const RatFunc& f) const {
        return (eval(f.num()) * detail::series_inverse(eval(f.den()))).truncated(K);
    }

private:
    mutable std::vector<Series> cache_;
};

inline Background solve_background(const StringEquation& s, std::int32_t K) {
    if (K < 0) throw std::invalid_argument("K must be non-negative");
    Background b;
    b.eq = s;
    b.K = K;
    Poly lhs0 = s.lhs.p.eval(hvar(), Rat(0));
    Rat sigma = lhs0.coeffs(tvar()).size() > 1 ? lhs0.coeffs(tvar())[1].constant_value() : Rat(0);
    RatFunc G = RatFunc(lhs0.coeffs(tvar())[0]).subs(uder(0), RatFunc::variable(uvar()));
    RatFunc Gp = G.derivative(uvar());
    if (Gp.is_zero()) throw std::invalid_argument("string equation is degenerate at leading order");
    b.t_of_u = -G / RatFunc(sigma);
    b.udot = RatFunc(-sigma) / Gp;
    b.U.push_back(RatFunc::variable(uvar()));
    for (std::int32_t k = 1; 2 * k <= K; ++k) {
        Background trial = b;
        trial.K = 2 * k;
        trial.U.push_back(RatFunc());
        RatFunc r = trial.eval(s.lhs.p)[2 * k];
        b.U.push_back(-r / Gp);
    }
    return b;
}

// rational chart x = z^2 - 2u, y = sum_j tt_j sum_k (-u)^k (2j+1)!!/(2j-2k+1)!! z^{2j-2k+1}
struct GDChart {
    Var z;
    RatFunc x, y;
};

inline GDChart gd_chart(std::int32_t m, const std::vector<Rat>& tt) {
    check_times(m, tt);
    Var z = var("z");
    RatFunc Z = RatFunc::variable(z), u = RatFunc::variable(uvar());
    GDChart c{z, Z * Z - u * RatFunc(2L), RatFunc()};
    for (std::int32_t j = 0; j <= m; ++j)
        for (std::int32_t k = 0; k <= j; ++k)
            c.y += RatFunc(tt[static_cast<std::size_t>(j)] * detail::double_factorial(2 * j + 1) / detail::double_factorial(2 * j - 2 * k + 1)) *
                   (-u).pow(k) * Z.pow(2 * j - 2 * k + 1);
    return c;
}

struct WkbSolution {
    GDChart chart;
    std::int32_t K = 0;
    Series c1, c0;        // quantum-curve coefficients in the chart, through h^{K+1}
    Series w;             // h dlog A/dx, through h^{K+1}
    LogExpr S0, S1;       // A = exp(S0/h + S1) a
    Series a, at, b, bt;  // A, A~, B, B~ with the exponential prefactors stripped
    Series det_ratio;     // det Psi divided by its h^0 term
    bool det_leading_constant = false;

    RatFunc ddx(const RatFunc& f) const { return f.derivative(chart.z) / chart.x.derivative(chart.z); }
    Series ddx(const Series& s) const { return s.map([&](const RatFunc& f) { return ddx(f); }); }
};

inline RatFunc reflect(const RatFunc& f, Var z) { return f.subs(z, -RatFunc::variable(z)); }

inline WkbSolution wkb_solve(const LaxPair& P, const Background& bg, std::int32_t K) {
    if (K < 1) throw std::invalid_argument("WKB order must be at least 1");
    // a through h^K needs the Riccati solution through h^{K+1}
    const std::int32_t Kw = K + 1;
    if (bg.K < Kw) throw std::invalid_argument("background series must extend one order beyond the WKB order");
    WkbSolution W;
    W.chart = gd_chart(P.m, P.tt);
    W.K = K;
    Var z = W.chart.z, x = var("x");
    const RatFunc& X = W.chart.x;
    RatFunc xz = X.derivative(z);
    auto in_chart = [&](const Series& s) { return detail::series_subs(s.truncated(Kw), x, X); };
    QuantumCurveOp q = quantum_curve_op(P);
    // c0, c1 are rational in U and its derivatives; expand numerator and denominator in h
    W.c1 = in_chart(bg.eval(q.c1));
    W.c0 = in_chart(bg.eval(q.c0));
    Matrix2 M = P.effective();
    Series alpha = in_chart(bg.eval(M.a)), beta = in_chart(bg.eval(M.b));

    // Riccati h w' + w^2 + c1 w + c0 = 0 order by order
    const RatFunc& y = W.chart.y;
    if (!(y * y + W.c1[0] * y + W.c0[0]).is_zero())
        throw std::logic_error("chart y does not solve the classical curve of the Lax matrix");
    Series w(0, Kw);
    w.at(0) = y;
    RatFunc lin = RatFunc(2L) * y + W.c1[0];
    for (std::int32_t k = 1; k <= Kw; ++k) {
        RatFunc rhs = W.ddx(w[k - 1]) + W.c0[k];
        for (std::int32_t i = 1; i < k; ++i) rhs += w[i] * w[k - i];
        for (std::int32_t i = 1; i <= k; ++i) rhs += W.c1[i] * w[k - i];
        w.at(k) = -rhs / lin;
    }
    W.w = w;
    W.S0 = primitive(y * xz, z);
    W.S1 = primitive(w[1] * xz, z);
    Series logs(1, K);
    for (std::int32_t k = 2; k <= Kw; ++k) {
        LogExpr Sk = primitive(w[k] * xz, z);
        if (!Sk.is_rational()) throw std::logic_error("WKB correction has a logarithmic part at order " + std::to_string(k));
        const RatFunc& r = Sk.rational();
        if (r.num().degree(z) >= r.den().degree(z) && !r.is_zero())
            throw std::logic_error("WKB correction does not vanish at the pole");
        logs.at(k - 1) = r;
    }
    Series a = logs.exp().truncated(K);
    Series ratio = ((w.truncated(K) - alpha.truncated(K)) * detail::series_inverse(beta.truncated(K))).truncated(K);
    W.a = a;
    W.at = (a * ratio).truncated(K);
    W.b = W.a.map([&](const RatFunc& f) { return reflect(f, z); });
    W.bt = W.at.map([&](const RatFunc& f) { return reflect(f, z); });
    Series D = (W.a * W.bt - W.at * W.b).truncated(K);
    W.det_ratio = detail::series_times(D, D[0].inv());
    RatFunc lead = W.S1.derivative(z) + reflect(W.S1.derivative(z), z) * RatFunc(-1L) + D[0].derivative(z) / D[0];
    W.det_leading_constant = lead.is_zero();
    return W;
}

// exp(-S0/h - S1) times the quantum-curve operator applied to A
inline Series quantum_curve_residual(const WkbSolution& W) {
    std::int32_t K = W.K;
    RatFunc xz = W.chart.x.derivative(W.chart.z);
    Series e(0, K);
    e.at(0) = W.chart.y;
    if (K >= 1) e.at(1) = W.S1.derivative(W.chart.z) / xz;
    const Series& a = W.a;
    Series ap = W.ddx(a), app = W.ddx(ap), ep = W.ddx(e);
    using detail::series_shift;
    Series r = series_shift((ep * a).truncated(K), 1) + (e * e * a).truncated(K) + series_shift((e * ap).truncated(K), 1).scaled(Rat(2)) +
               series_shift(app, 2) + (W.c1 * ((e * a).truncated(K) + series_shift(ap, 1))).truncated(K) + (W.c0 * a).truncated(K);
    return r.truncated(K);
}

// -det L - R(x) against sum_g h^{2g} L.F_g, one result per h-order
inline std::vector<CheckResult> det_identity_check(const LaxPair& P, const Background& bg, OmegaTable& T, std::int32_t K) {
    const auto& C = T.curve();
    Series d = bg.eval(P.L.det() * Poly(-1L));
    DeformOperator L = build_L_bcycle(C);
    std::vector<CheckResult> out;
    for (std::int32_t k = 0; k <= std::min(K, bg.K); ++k) {
        RatFunc expect;
        if (k == 0) expect = C.R;
        else if (k % 2 == 0) expect = apply_L(T, L, k / 2, 0);
        CheckResult r;
        r.label = "det identity h^" + std::to_string(k);
        r.witness = d[k] - expect;
        r.pass = r.witness.is_zero();
        r.detail = "-det L = " + d[k].to_string();
        out.push_back(r);
    }
    return out;
}

// (D - h^2 L.F - h^2/(x-x')(d/dx + d/dx')) applied to the kernel A(x)B~(x') - A~(x)B(x'),
// divided by its exponential prefactor; one result per h-order
inline std::vector<CheckResult> kernel_pde_check(const LaxPair& P, const Background& bg, const WkbSolution& W, OmegaTable& T, std::int32_t K) {
    if (K > W.K || K > bg.K) throw std::invalid_argument("kernel check order exceeds the WKB order");
    const auto& C = T.curve();
    Var z = W.chart.z, zp = var("zp"), u = uvar(), x = var("x");
    RatFunc Z = RatFunc::variable(z), ZP = RatFunc::variable(zp);
    auto to_zp = [&](const RatFunc& f) { return f.subs(z, ZP); };
    auto to_mzp = [&](const RatFunc& f) { return f.subs(z, -ZP); };
    const RatFunc& X = W.chart.x;
    RatFunc XP = to_zp(X), xz = X.derivative(z), xzp = XP.derivative(zp);
    auto dx = [&](const RatFunc& f) { return f.derivative(z) / xz; };
    auto dxp = [&](const RatFunc& f) { return f.derivative(zp) / xzp; };
    RatFunc dzdu = -X.derivative(u) / xz, dzpdu = -XP.derivative(u) / xzp;
    auto dt = [&](const RatFunc& f) { return bg.udot * (f.derivative(u) + dzdu * f.derivative(z) + dzpdu * f.derivative(zp)); };
    auto smap = [](const Series& s, auto f) { return s.map([&](const RatFunc& c) { return f(c); }); };

    // deformation operator as a multiple of d/dt
    DeformOperator Lt = C.poles.empty() ? DeformOperator() : build_L_times(C);
    RatFunc Lcoef;
    for (auto& t : Lt.terms) {
        if (t.d.kind != DerivKind::Time) throw std::invalid_argument("kernel check supports time derivatives only");
        RatFunc tj = kp_time(C, C.poles[t.d.pole].loc, t.d.index);
        Lcoef += t.coef / (bg.udot * tj.derivative(u));
    }
    RatFunc Lx = Lcoef.subs(x, X);

    Series k = ((W.a * smap(W.at, to_mzp)) - (W.at * smap(W.a, to_mzp))).truncated(K);
    RatFunc S0 = W.S0.rational(), S0b = to_mzp(S0);
    if (!W.S0.is_rational()) throw std::logic_error("S0 must be rational in the chart");
    RatFunc s1 = W.S1.derivative(z) / xz;
    RatFunc s1b = to_mzp(W.S1.derivative(z)) * RatFunc(-1L) / xzp;
    // h Phi_x, h Phi_x', h Phi_t
    Series ex = detail::series_const(dx(S0), K) + detail::series_const(s1, K, 1);
    Series exp_ = detail::series_const(dxp(S0b), K) + detail::series_const(s1b, K, 1);
    LogExpr S1both = W.S1 + W.S1.subs(z, -ZP);
    RatFunc S1t = bg.udot * (S1both.derivative(u) + dzdu * S1both.derivative(z) + dzpdu * S1both.derivative(zp));
    Series et = detail::series_const(dt(S0 + S0b), K) + detail::series_const(S1t, K, 1);

    using detail::series_shift;
    Series kx = smap(k, dx), kxp = smap(k, dxp);
    Series r = series_shift(smap(kx, dx), 2) + series_shift((ex * kx).truncated(K), 1).scaled(Rat(2)) +
               series_shift(smap(ex, dx), 1) * k + ex * ex * k;
    r = r.truncated(K);
    if (!Lx.is_zero()) {
        Series kt = smap(k, dt);
        r = r - detail::series_times(series_shift(kt, 2) + series_shift((et * k).truncated(K), 1), Lx);
    }
    RatFunc R = bg.eval(P.effective().det() * Poly(-1L))[0].subs(x, X);
    r = r - detail::series_times(k, R);
    DeformOperator Lb = build_L_bcycle(C);
    Series LF(0, K);
    for (std::int32_t g = 1; 2 * g <= K; ++g) LF.at(2 * g) = apply_L(T, Lb, g, 0).subs(x, X);
    r = r - (LF * k).truncated(K);
    Series side = series_shift(kx + kxp, 1) + (ex + exp_) * k;
    r = r - series_shift(detail::series_times(side.truncated(K), (X - XP).inv()), 1);
    r = r.truncated(K);
    std::vector<CheckResult> out;
    for (std::int32_t m = 0; m <= K; ++m) {
        CheckResult c;
        c.label = "kernel PDE h^" + std::to_string(m);
        c.witness = r[m];
        c.pass = r[m].is_zero();
        out.push_back(c);
    }
    return out;
}

}  // namespace qc
