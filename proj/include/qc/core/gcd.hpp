#pragma once

#include <algorithm>
#include <limits>

#include "qc/core/poly.hpp"

namespace qc {

Poly poly_gcd(const Poly& a, const Poly& b);

// pseudo-remainder of a by b in v: lc(b)^(da-db+1) a mod b
inline Poly prem(const Poly& a, const Poly& b, Var v) {
    auto db = b.degree(v);
    Poly r = a;
    Poly lb = b.leading_coeff(v);
    auto ca = r.coeffs(v);
    auto cb = b.coeffs(v);
    auto da = static_cast<std::int32_t>(ca.size()) - 1;
    if (r.is_zero() || da < db) return r;
    int steps = 0;
    while (!ca.empty() && static_cast<std::int32_t>(ca.size()) - 1 >= db) {
        auto d = static_cast<std::int32_t>(ca.size()) - 1;
        Poly lr = ca.back();
        for (auto& c : ca) c = c * lb;
        for (std::int32_t i = 0; i <= db; ++i) ca[static_cast<std::size_t>(d - db + i)] -= lr * cb[static_cast<std::size_t>(i)];
        while (!ca.empty() && ca.back().is_zero()) ca.pop_back();
        ++steps;
    }
    Poly res = Poly::from_coeffs(v, ca);
    for (; steps < da - db + 1; ++steps) res = res * lb;
    return res;
}

inline Poly poly_content(const Poly& p, Var v) {
    auto cs = p.coeffs(v);
    Poly g;
    std::sort(cs.begin(), cs.end(), [](const Poly& x, const Poly& y) { return x.size() < y.size(); });
    for (auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.monic() : poly_gcd(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g.is_zero() ? Poly(1) : g;
}

inline Poly exact_quotient(const Poly& a, const Poly& b) {
    Poly q;
    if (!a.divide_exact(b, q)) throw std::logic_error("exact division failed");
    return q;
}

inline Poly univariate_gcd(Poly a, Poly b, Var v) {
    if (a.degree(v) < b.degree(v)) std::swap(a, b);
    while (!b.is_zero()) {
        Poly r = prem(a, b, v);
        a = std::move(b);
        b = r.is_zero() ? r : r.monic();
    }
    return a.monic();
}

inline Poly poly_gcd(const Poly& a0, const Poly& b0) {
    if (a0.is_zero()) return b0.monic();
    if (b0.is_zero()) return a0.monic();
    if (a0.is_constant() || b0.is_constant()) return Poly(1);
    Monomial mg = Monomial::gcd(a0.monomial_content(), b0.monomial_content());
    Poly a = exact_quotient(a0, Poly::monomial(a0.monomial_content(), Rat(1)));
    Poly b = exact_quotient(b0, Poly::monomial(b0.monomial_content(), Rat(1)));
    Poly gm = Poly::monomial(mg, Rat(1));
    if (a.is_constant() || b.is_constant()) return gm;
    if (a == b || a == -b) return (gm * a).monic();

    auto va = a.vars(), vb = b.vars();
    for (Var v : va)
        if (!vb.count(v)) return (gm * poly_gcd(poly_content(a, v), b)).monic();
    for (Var v : vb)
        if (!va.count(v)) return (gm * poly_gcd(a, poly_content(b, v))).monic();

    if (va.size() == 1) return (gm * univariate_gcd(a, b, *va.begin())).monic();

    Var v = *va.begin();
    std::int32_t best = std::numeric_limits<std::int32_t>::max();
    for (Var w : va) {
        auto d = std::max(a.degree(w), b.degree(w));
        if (d < best) best = d, v = w;
    }
    Poly ca = poly_content(a, v), cb = poly_content(b, v);
    Poly g = poly_gcd(ca, cb);
    Poly pa = exact_quotient(a, ca), pb = exact_quotient(b, cb);
    if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
    while (true) {
        Poly r = prem(pa, pb, v);
        if (r.is_zero()) break;
        if (r.degree(v) == 0) {
            pb = Poly(1);
            break;
        }
        pa = std::move(pb);
        pb = exact_quotient(r, poly_content(r, v));
    }
    return (gm * g * pb).monic();
}

}  // namespace qc
