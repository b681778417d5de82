#pragma once

#include "qc/tr/tr_engine.hpp"

namespace qc {

struct CheckResult {
    bool pass = true;
    std::string label;
    RatFunc witness;  // nonzero difference on failure
    std::string detail;
};

// An argument of a multidifferential: the point v, or sigma(v) = -v.
struct Arg {
    Var v;
    bool sigma = false;
};

// Density of omega_{g,n}(args) against prod d(v) with pullback signs.
inline RatFunc omega_at(OmegaTable& T, std::int32_t g, const std::vector<Arg>& args) {
    std::int32_t n = static_cast<std::int32_t>(args.size());
    auto sgn = [](const Arg& a) { return RatFunc(a.sigma ? -1 : 1); };
    auto val = [&](const Arg& a) { return a.sigma ? -RatFunc::variable(a.v) : RatFunc::variable(a.v); };
    if (g == 0 && n == 1) return T.curve().ydx().subs(T.curve().z, val(args[0])) * sgn(args[0]);
    if (g == 0 && n == 2) return (val(args[0]) - val(args[1])).pow(-2) * sgn(args[0]) * sgn(args[1]);
    const auto& w = T.omega(g, n);
    std::vector<Var> distinct;
    std::vector<std::int32_t> slot;
    for (auto& a : args) {
        auto it = std::find(distinct.begin(), distinct.end(), a.v);
        slot.push_back(static_cast<std::int32_t>(it - distinct.begin()));
        if (it == distinct.end()) distinct.push_back(a.v);
    }
    LPoly r(static_cast<std::int32_t>(distinct.size()));
    for (auto& [e, c] : w.density.terms()) {
        Exps f(distinct.size(), 0);
        bool neg = false;
        for (std::int32_t i = 0; i < n; ++i) {
            f[static_cast<std::size_t>(slot[static_cast<std::size_t>(i)])] += e[static_cast<std::size_t>(i)];
            if (args[static_cast<std::size_t>(i)].sigma && e[static_cast<std::size_t>(i)] % 2 == 0) neg = !neg;
        }
        r.add(f, neg ? -c : c);
    }
    return r.to_ratfunc(distinct);
}

// omega_{g-1,n+2}(z, sigma z, J) + sum over all splits of omega(z, I1) omega(sigma z, I2), divided by -dx(z)^2
inline RatFunc quadratic_combination(OmegaTable& T, std::int32_t g, std::int32_t n) {
    Var z = T.curve().z;
    auto J = zvars(n);
    RatFunc acc;
    if (g >= 1) {
        std::vector<Arg> a{{z, false}, {z, true}};
        for (Var v : J) a.push_back({v, false});
        acc += omega_at(T, g - 1, a);
    }
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Arg> A{{z, false}}, B{{z, true}};
        for (std::int32_t k = 0; k < n; ++k) ((mask >> k) & 1u ? A : B).push_back({J[static_cast<std::size_t>(k)], false});
        for (std::int32_t g1 = 0; g1 <= g; ++g1) {
            std::int32_t g2 = g - g1;
            std::int32_t nA = static_cast<std::int32_t>(A.size()), nB = static_cast<std::int32_t>(B.size());
            if (2 * g1 - 2 + nA < -1 || 2 * g2 - 2 + nB < -1) continue;
            acc += omega_at(T, g1, A) * omega_at(T, g2, B);
        }
    }
    RatFunc dx = T.curve().dx();
    return -acc / (dx * dx);
}

inline CheckResult check_linear_loop(OmegaTable& T, std::int32_t g, std::int32_t n) {
    Var z = T.curve().z;
    auto J = zvars(n);
    std::vector<Arg> a{{z, false}}, b{{z, true}};
    for (Var v : J) {
        a.push_back({v, false});
        b.push_back({v, false});
    }
    RatFunc lhs = omega_at(T, g, a) + omega_at(T, g, b);
    RatFunc rhs;
    if (g == 0 && n == 1) {
        const auto& C = T.curve();
        RatFunc x0 = C.x, x1 = C.x.subs(z, RatFunc::variable(J[0]));
        rhs = C.dx() * C.dx().subs(z, RatFunc::variable(J[0])) / (x0 - x1).pow(2);
    }
    CheckResult r;
    r.label = "linear loop (" + std::to_string(g) + "," + std::to_string(n) + ")";
    r.witness = lhs - rhs;
    r.pass = r.witness.is_zero();
    return r;
}

namespace detail {

// one-variable series in slot 0 times an LPoly in all slots, truncated at z^top
inline LPoly times_series(const LaurentSeries& s, const LPoly& p, std::int32_t top) {
    LPoly r(p.nvars());
    for (auto& [e, c] : p.terms())
        for (std::int32_t k = s.val(); k + e[0] <= top; ++k) {
            RatFunc a = s.coeff(k);
            if (a.is_zero()) continue;
            Exps f = e;
            f[0] += k;
            r.add(f, a * c);
        }
    return r;
}

inline LPoly constant_lpoly(std::int32_t n) {
    LPoly r(n);
    r.add(Exps(static_cast<std::size_t>(n), 0), RatFunc(1));
    return r;
}

}  // namespace detail

// Laurent expansion at z = 0 of dx(z)^2 times the quadratic combination, in slots (z, J), through z^top.
inline LPoly quadratic_numerator_series(OmegaTable& T, std::int32_t g, std::int32_t n, std::int32_t top) {
    const auto& C = T.curve();
    using S = OmegaTable::Series;
    S acc(n + 1);
    if (g >= 1) {
        if (g == 1 && n == 0) acc.add(Exps{-2}, RatFunc(Rat(-1, 4)));
        else {
            const auto& w = T.omega(g - 1, n + 2);
            for (auto& [e, c] : w.density.terms()) {
                Exps f(static_cast<std::size_t>(n + 1), 0);
                f[0] = e[0] + e[1];
                for (std::int32_t k = 0; k < n; ++k) f[static_cast<std::size_t>(k + 1)] = e[static_cast<std::size_t>(k + 2)];
                if (f[0] > top) continue;
                acc.add(f, e[1] % 2 == 0 ? -c : c);
            }
        }
    }
    std::int32_t ylow = order_at(C.ydx(), C.z, Point::at(RatFunc()));
    auto low = [&](std::int32_t h, std::size_t nI) { return (h == 0 && nI == 0) ? ylow : T.factor_low(h, nI); };
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::int32_t> I1, I2;
        for (std::int32_t k = 0; k < n; ++k) ((mask >> k) & 1u ? I1 : I2).push_back(k + 1);
        for (std::int32_t g1 = 0; g1 <= g; ++g1) {
            std::int32_t g2 = g - g1;
            bool u1 = g1 == 0 && I1.empty(), u2 = g2 == 0 && I2.empty();
            std::int32_t l1 = low(g1, I1.size()), l2 = low(g2, I2.size());
            auto fac = [&](std::int32_t h, const std::vector<std::int32_t>& I, bool unst, bool sigma, std::int32_t other) {
                if (!unst) return T.factor(h, I, n, sigma, top - other);
                // omega_{0,1}(z) = y dx, and at sigma z the density is -y x'(z)
                auto ys = laurent_expand(C.ydx(), C.z, Point::at(RatFunc()), top - other);
                return detail::times_series(sigma ? -ys : ys, detail::constant_lpoly(n + 1), top - other);
            };
            acc = acc + OmegaTable::multiply(fac(g1, I1, u1, false, l2), fac(g2, I2, u2, true, l1), top);
        }
    }
    return acc;
}

// Even in z and regular at the branch point z = 0; at (0,0) also equal to R(x(z)).
inline CheckResult check_quadratic_loop(OmegaTable& T, std::int32_t g, std::int32_t n, std::int32_t full_rational_up_to = 3) {
    const auto& C = T.curve();
    Var z = C.z;
    CheckResult r;
    r.label = "quadratic loop (" + std::to_string(g) + "," + std::to_string(n) + ")";
    // the only term whose parity is not automatic from the split pairing
    if (g >= 1 && !(g == 1 && n == 0)) {
        const auto& w = T.omega(g - 1, n + 2);
        LPoly diag(n + 1);
        for (auto& [e, c] : w.density.terms()) {
            Exps f(static_cast<std::size_t>(n + 1), 0);
            f[0] = e[0] + e[1];
            for (std::int32_t k = 0; k < n; ++k) f[static_cast<std::size_t>(k + 1)] = e[static_cast<std::size_t>(k + 2)];
            diag.add(f, e[1] % 2 == 0 ? -c : c);
        }
        LPoly odd = diag - diag.negated_slot(0);
        if (!odd.is_zero()) {
            std::vector<Var> vs{z};
            for (Var v : zvars(n)) vs.push_back(v);
            r.pass = false;
            r.witness = odd.to_ratfunc(vs);
            r.detail = "omega(z, sigma z, J) not even in z";
            return r;
        }
    }
    // principal part at z = 0 of -S/dx^2
    RatFunc dx2 = C.dx() * C.dx();
    std::int32_t w = order_at(dx2, z, Point::at(RatFunc()));
    LPoly S = quadratic_numerator_series(T, g, n, w - 1);
    std::int32_t smin = S.is_zero() ? 0 : S.min_exp(0);
    auto inv = laurent_expand(RatFunc(-1) / dx2, z, Point::at(RatFunc()), -1 - smin);
    LPoly E = detail::times_series(inv, S, -1);
    if (!E.is_zero()) {
        std::vector<Var> vs{z};
        for (Var v : zvars(n)) vs.push_back(v);
        r.pass = false;
        r.witness = E.to_ratfunc(vs);
        r.detail = "pole at the branch point z = 0";
        return r;
    }
    if (n <= full_rational_up_to) {
        RatFunc Ef = quadratic_combination(T, g, n);
        RatFunc odd = Ef - Ef.negate_var(z);
        if (!odd.is_zero()) {
            r.pass = false;
            r.witness = odd;
            r.detail = "not even in z";
            return r;
        }
        if (!Ef.is_zero() && order_at(Ef, z, Point::at(RatFunc())) < 0) {
            r.pass = false;
            r.witness = Ef;
            r.detail = "pole at the branch point z = 0";
            return r;
        }
        if (g == 0 && n == 0) {
            RatFunc d = Ef - C.R.subs(var("x"), C.x);
            if (!d.is_zero()) {
                r.pass = false;
                r.witness = d;
                r.detail = "P_{0,0} differs from R(x)";
            }
        }
    }
    return r;
}

// Res_{z1 = 0} of omega_{g,n} in each slot, and decay O(z_i^-2) at infinity
inline CheckResult check_residue_free_and_decay(OmegaTable& T, std::int32_t g, std::int32_t n) {
    const auto& w = T.omega(g, n);
    CheckResult r;
    r.label = "residue-free and decaying (" + std::to_string(g) + "," + std::to_string(n) + ")";
    for (auto& [e, c] : w.density.terms())
        for (auto x : e)
            if (x == -1 || x > -2) {
                r.pass = false;
                r.detail = "term with exponent " + std::to_string(x);
                return r;
            }
    return r;
}

inline CheckResult check_symmetry(OmegaTable& T, std::int32_t g, std::int32_t n) {
    const auto& w = T.omega(g, n);
    CheckResult r;
    r.label = "symmetry (" + std::to_string(g) + "," + std::to_string(n) + ")";
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t j = i + 1; j < n; ++j) {
            std::vector<std::int32_t> p(static_cast<std::size_t>(n));
            for (std::int32_t k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = k;
            std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
            if (!(w.density.permuted(p) == w.density)) {
                r.pass = false;
                r.detail = "not symmetric under the transposition of slots " + std::to_string(i + 1) + "," + std::to_string(j + 1);
                return r;
            }
        }
    return r;
}

}  // namespace qc
