#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qc/core/parse.hpp"
#include "qc/core/ratfunc.hpp"

namespace qc {

// Differential polynomials in U and its t-derivatives U_j, with the formal parameter h.
// The variables t and x may appear as parameters.
inline Var hvar() { return var("h"); }
inline Var tvar() { return var("t"); }
inline Var uder(std::int32_t j) { return j == 0 ? var("U") : var("U_" + std::to_string(j)); }

inline std::optional<std::int32_t> derivative_order(Var v) {
    std::string n = var_name(v);
    if (n == "U") return 0;
    if (n.size() > 2 && n[0] == 'U' && n[1] == '_' && n.find_first_not_of("0123456789", 2) == std::string::npos)
        return std::stoi(n.substr(2));
    return std::nullopt;
}

struct DiffPoly {
    Poly p;

    DiffPoly() = default;
    DiffPoly(const Poly& q) : p(q) {}
    static DiffPoly U(std::int32_t j = 0) { return DiffPoly(Poly::variable(uder(j))); }
    static DiffPoly h(std::int32_t e = 1) { return DiffPoly(Poly::variable(hvar(), e)); }

    bool is_zero() const { return p.is_zero(); }
    friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) { return a.p + b.p; }
    friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return a.p - b.p; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) { return a.p * b.p; }
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.p == b.p; }

    std::int32_t max_order() const {
        std::int32_t r = -1;
        for (Var v : p.vars())
            if (auto j = derivative_order(v)) r = std::max(r, *j);
        return r;
    }

    // total t-derivative
    DiffPoly dt() const {
        Poly r = p.derivative(tvar());
        for (Var v : p.vars())
            if (auto j = derivative_order(v)) r += p.derivative(v) * Poly::variable(uder(*j + 1));
        return r;
    }
    DiffPoly dt(std::int32_t n) const {
        DiffPoly r = *this;
        for (std::int32_t i = 0; i < n; ++i) r = r.dt();
        return r;
    }

    // U, U', U'', ... notation; terms by rising power of h, then other variables, then derivative orders
    std::string to_string() const {
        if (p.is_zero()) return "0";
        struct Item {
            std::int32_t hp;
            std::vector<std::pair<std::string, std::int32_t>> others;
            std::vector<std::int32_t> ders;
            std::string factors;
            Rat c;
        };
        std::vector<Item> items;
        for (auto& t : p.terms()) {
            Item it{0, {}, {}, {}, t.c};
            std::vector<std::pair<std::int32_t, std::int32_t>> us;
            for (auto& [v, e] : t.m.entries()) {
                if (v == hvar()) it.hp = e;
                else if (auto j = derivative_order(v)) us.push_back({*j, e});
                else it.others.push_back({var_name(v), e});
            }
            std::sort(it.others.begin(), it.others.end());
            std::sort(us.begin(), us.end());
            auto pw = [](std::string b, std::int32_t e) { return e == 1 ? b : b + "^" + std::to_string(e); };
            std::vector<std::string> f;
            if (it.hp) f.push_back(pw("h", it.hp));
            for (auto& [n, e] : it.others) f.push_back(pw(n, e));
            for (auto [j, e] : us) {
                f.push_back(pw("U" + std::string(static_cast<std::size_t>(j), '\''), e));
                for (std::int32_t k = 0; k < e; ++k) it.ders.push_back(j);
            }
            for (auto& x : f) it.factors += (it.factors.empty() ? "" : "*") + x;
            items.push_back(std::move(it));
        }
        std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            return std::tie(a.hp, a.others, a.ders) < std::tie(b.hp, b.others, b.ders);
        });
        std::string s;
        for (auto& it : items) {
            Rat a = abs(it.c);
            s += sgn(it.c) < 0 ? (s.empty() ? "-" : " - ") : (s.empty() ? "" : " + ");
            std::string cs = a.get_den() == 1 ? a.get_str() : "(" + a.get_str() + ")";
            if (it.factors.empty()) s += cs;
            else s += (a == 1 ? "" : cs + "*") + it.factors;
        }
        return s;
    }
    static DiffPoly parse(const std::string& text) {
        std::string s;
        for (std::size_t i = 0; i < text.size(); ++i) {
            s += text[i];
            if (text[i] != 'U' || (i + 1 < text.size() && text[i + 1] != '\'')) continue;
            std::size_t k = 0;
            while (i + 1 < text.size() && text[i + 1] == '\'') ++k, ++i;
            if (k) s += "_" + std::to_string(k);
        }
        RatFunc f = parse_expr(s);
        if (!f.is_polynomial()) throw ParseError("differential polynomial expected: " + text);
        return f.num();
    }
};

// In every monomial the power of h equals the number of t-derivatives.
inline bool hbar_grading_ok(const DiffPoly& d) {
    for (auto& t : d.p.terms()) {
        std::int32_t ders = 0, hp = 0;
        for (auto& [v, e] : t.m.entries()) {
            if (v == hvar()) hp = e;
            else if (auto j = derivative_order(v)) ders += *j * e;
        }
        if (hp != ders) return false;
    }
    return true;
}

// degree with deg U_j = 1 and deg h = 1/2, doubled; nullopt unless homogeneous
inline std::optional<std::int32_t> doubled_degree(const DiffPoly& d) {
    std::optional<std::int32_t> deg;
    for (auto& t : d.p.terms()) {
        std::int32_t w = 0;
        for (auto& [v, e] : t.m.entries()) {
            if (v == hvar()) w += e;
            else if (derivative_order(v)) w += 2 * e;
            else return std::nullopt;
        }
        if (deg && *deg != w) return std::nullopt;
        deg = w;
    }
    return deg.value_or(0);
}

// Antiderivative in t with zero integration constant. Throws if q is not a total derivative.
inline DiffPoly integrate_dt(const DiffPoly& q) {
    DiffPoly rest = q, out;
    while (!rest.is_zero()) {
        std::int32_t n = rest.max_order();
        if (n <= 0) {
            if (rest.p.has_var(uder(0))) throw std::domain_error("not a total derivative: " + q.to_string());
            // explicit t dependence only
            Poly prim;
            for (auto& t : rest.p.terms()) {
                std::int32_t e = t.m.degree(tvar());
                prim += Poly::monomial(t.m * Monomial(tvar()), t.c / Rat(e + 1));
            }
            return out + prim;
        }
        Var top = uder(n);
        if (rest.p.degree(top) != 1) throw std::domain_error("not a total derivative: " + q.to_string());
        Poly a = rest.p.coeffs(top)[1];
        // partial antiderivative of a in U_{n-1}
        Var below = uder(n - 1);
        Poly piece;
        for (auto& t : a.terms()) {
            std::int32_t e = t.m.degree(below);
            piece += Poly::monomial(t.m * Monomial(below), t.c / Rat(e + 1));
        }
        out = out + piece;
        DiffPoly next = rest - DiffPoly(piece).dt();
        if (next.max_order() >= n) throw std::domain_error("not a total derivative: " + q.to_string());
        rest = next;
    }
    return out;
}

namespace detail {
inline std::vector<DiffPoly>& gd_cache() {
    static std::vector<DiffPoly> c{DiffPoly(Poly(2L))};
    return c;
}
}  // namespace detail

inline DiffPoly gd_R(std::int32_t k) {
    if (k < 0) throw std::invalid_argument("Gelfand-Dikii index must be non-negative");
    auto& c = detail::gd_cache();
    while (static_cast<std::int32_t>(c.size()) <= k) {
        const DiffPoly& R = c.back();
        DiffPoly U = DiffPoly::U(), h2 = DiffPoly::h(2);
        DiffPoly rhs = DiffPoly(Poly(-2L)) * U * R.dt() - R * U.dt() + DiffPoly(Poly(Rat(1, 4))) * h2 * R.dt(3);
        c.push_back(integrate_dt(rhs));
    }
    return c[static_cast<std::size_t>(k)];
}

// d/dt R_{k+1} - (-2U R_k' - R_k U' + (h^2/4) R_k''')
inline DiffPoly gd_recursion_residual(std::int32_t k) {
    DiffPoly R = gd_R(k), U = DiffPoly::U();
    return gd_R(k + 1).dt() - (DiffPoly(Poly(-2L)) * U * R.dt() - R * U.dt() + DiffPoly(Poly(Rat(1, 4))) * DiffPoly::h(2) * R.dt(3));
}

// Sign convention of the linear system.
//   Plus:  h dPsi/dx = L Psi, h dPsi/dt = R Psi; string equation sum t_j R_{j+1} = -t
//   Minus: h dPsi/dx = -L Psi, h dPsi/dt = R Psi; string equation sum t_j R_{j+1} = t
enum class LaxConvention { Plus, Minus };

inline std::string to_string(LaxConvention c) { return c == LaxConvention::Plus ? "plus" : "minus"; }

struct StringEquation {
    std::int32_t m = 0;
    std::vector<Rat> tt;
    LaxConvention conv = LaxConvention::Minus;
    DiffPoly lhs;       // lhs = 0
    std::int32_t top;   // order of the eliminated derivative
    DiffPoly solved;    // U_top = solved
};

inline void check_times(std::int32_t m, const std::vector<Rat>& tt) {
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    if (static_cast<std::int32_t>(tt.size()) != m + 1) throw std::invalid_argument("expected m+1 times");
}

inline StringEquation gd_string_equation(std::int32_t m, const std::vector<Rat>& tt, LaxConvention conv = LaxConvention::Minus) {
    check_times(m, tt);
    StringEquation s{m, tt, conv, DiffPoly(), 0, DiffPoly()};
    for (std::int32_t j = 0; j <= m; ++j)
        s.lhs = s.lhs + DiffPoly(Poly(tt[static_cast<std::size_t>(j)])) * gd_R(j + 1);
    Poly t = Poly::variable(tvar());
    s.lhs = s.lhs + DiffPoly(conv == LaxConvention::Minus ? -t : t);
    s.top = s.lhs.max_order();
    if (s.top < 0) throw std::invalid_argument("string equation does not involve U");
    Var top = uder(s.top);
    auto cs = s.lhs.p.coeffs(top);
    if (cs.size() != 2 || cs[1].size() != 1) throw std::logic_error("string equation not linear in its top derivative");
    // the coefficient of the top derivative is a rational times a power of h
    const auto& lead = cs[1].terms()[0];
    Monomial invm;
    for (auto& [v, e] : lead.m.entries()) invm = invm * Monomial(v, -e);
    s.solved = cs[0].mul_term(invm, -Rat(1) / lead.c);
    return s;
}

// Normal form modulo the string equation and its t-derivatives.
inline DiffPoly reduce_mod(const DiffPoly& d, const StringEquation& s, std::int32_t max_order = 64) {
    std::int32_t n = d.max_order();
    if (n > max_order) throw std::runtime_error("reduction bound exceeded");
    if (n < s.top) return d;
    Var top = uder(s.top);
    std::vector<Poly> rep{s.solved.p};
    for (std::int32_t j = s.top + 1; j <= n; ++j) rep.push_back(DiffPoly(rep.back()).dt().p.subs(top, s.solved.p));
    Poly r = d.p;
    for (std::int32_t j = n; j >= s.top; --j) r = r.subs(uder(j), rep[static_cast<std::size_t>(j - s.top)]);
    return r;
}

// sum_j (2j+1)!/(j!(j+1)!) tt_j (-u/2)^{j+1} + t/4, which vanishes on the leading solution
inline Poly u_leading(std::int32_t m, const std::vector<Rat>& tt) {
    check_times(m, tt);
    bool any = false;
    for (auto& c : tt) any = any || sgn(c) != 0;
    if (!any) throw std::invalid_argument("all times vanish; the leading equation is degenerate");
    Poly mu = Poly::variable(var("u")) * Rat(-1, 2), r = Poly::variable(tvar()) * Rat(1, 4);
    Rat binom(1);  // (2j+1)!/(j!(j+1)!)
    for (std::int32_t j = 0; j <= m; ++j) {
        if (j > 0) binom = binom * Rat((2 * j) * (2 * j + 1)) / Rat(j * (j + 1));
        r += mu.pow(static_cast<unsigned>(j + 1)) * (binom * tt[static_cast<std::size_t>(j)]);
    }
    return r;
}

// c_k with u_k = c_k u^{1-5k} for the Painleve I string equation
inline std::vector<Rat> painleve_u_series(std::int32_t K) {
    if (K < 0) throw std::invalid_argument("K must be non-negative");
    std::vector<Rat> c{Rat(1)};
    for (std::int32_t k = 0; k < K; ++k) {
        Rat s = Rat(25 * k * k - 1) / Rat(216) * c[static_cast<std::size_t>(k)];
        for (std::int32_t j = 1; j <= k; ++j) s -= c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k + 1 - j)];
        c.push_back(s / Rat(2));
    }
    return c;
}

struct Matrix2 {
    Poly a, b, c, d;

    friend Matrix2 operator*(const Matrix2& p, const Matrix2& q) {
        return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d, p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
    }
    friend Matrix2 operator+(const Matrix2& p, const Matrix2& q) { return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d}; }
    friend Matrix2 operator-(const Matrix2& p, const Matrix2& q) { return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d}; }
    Matrix2 scaled(const Poly& s) const { return {a * s, b * s, c * s, d * s}; }
    template <class F>
    Matrix2 map(F&& f) const { return {f(a), f(b), f(c), f(d)}; }
    bool is_zero() const { return a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero(); }
    Poly trace() const { return a + d; }
    Poly det() const { return a * d - b * c; }
    std::vector<std::string> to_strings() const {
        auto f = [](const Poly& p) { return DiffPoly(p).to_string(); };
        return {f(a), f(b), f(c), f(d)};
    }
};

struct LaxPair {
    Matrix2 L, R;
    LaxConvention conv;
    std::int32_t m = 0;
    std::vector<Rat> tt;
    // the matrix M with h dPsi/dx = M Psi
    Matrix2 effective() const { return conv == LaxConvention::Plus ? L : L.scaled(Poly(-1L)); }
};

inline LaxPair gd_lax(std::int32_t m, const std::vector<Rat>& tt, LaxConvention conv = LaxConvention::Minus) {
    check_times(m, tt);
    Poly x = Poly::variable(var("x")), h = Poly::variable(hvar()), U = Poly::variable(uder(0));
    LaxPair P{{}, {Poly(), Poly(1L), x + U * Rat(2), Poly()}, conv, m, tt};
    for (std::int32_t j = 0; j <= m; ++j) {
        Poly beta;
        for (std::int32_t k = 0; k <= j; ++k) beta += x.pow(static_cast<unsigned>(j - k)) * gd_R(k).p * Rat(1, 2);
        Poly alpha = DiffPoly(beta).dt().p * h * Rat(-1, 2);
        Poly gamma = (x + U * Rat(2)) * beta + DiffPoly(alpha).dt().p * h;
        const Rat& s = tt[static_cast<std::size_t>(j)];
        P.L = P.L + Matrix2{alpha, beta, gamma, -alpha}.scaled(Poly(s));
    }
    return P;
}

// the Painleve I pair written directly in the Plus convention
inline LaxPair painleve_lax() {
    Poly x = Poly::variable(var("x")), h = Poly::variable(hvar()), U = Poly::variable(uder(0));
    Poly U1 = Poly::variable(uder(1)), U2 = Poly::variable(uder(2));
    Matrix2 L{h * U1 * Rat(1, 2), x - U, (x - U) * (x + U * Rat(2)) + h * h * U2 * Rat(1, 2), h * U1 * Rat(-1, 2)};
    return {L, {Poly(), Poly(1L), x + U * Rat(2), Poly()}, LaxConvention::Plus, 1, {Rat(0), Rat(1)}};
}

// h dL/dt -+ h dR/dx + [L, R], reduced modulo the string equation, h-orders above K dropped
inline Matrix2 zero_curvature_residual(const LaxPair& P, const StringEquation& s, std::int32_t K) {
    if (P.conv != s.conv) throw std::invalid_argument("Lax pair and string equation use different conventions");
    Var x = var("x");
    Poly h = Poly::variable(hvar());
    Matrix2 Lt = P.L.map([](const Poly& q) { return DiffPoly(q).dt().p; });
    Matrix2 Rx = P.R.map([&](const Poly& q) { return q.derivative(x); });
    Poly sgn_rx = P.conv == LaxConvention::Plus ? Poly(-1L) : Poly(1L);
    Matrix2 E = Lt.scaled(h) + Rx.scaled(h * sgn_rx) + (P.L * P.R - P.R * P.L);
    return E.map([&](const Poly& q) {
        Poly r = reduce_mod(q, s).p;
        std::vector<Poly::Term> keep;
        for (auto& t : r.terms())
            if (t.m.degree(hvar()) <= K) keep.push_back(t);
        return Poly::from_terms(std::move(keep));
    });
}

// y^2 + c1 y + c0 with y = h d/dx, annihilating the first component of h dPsi/dx = M Psi
struct QuantumCurveOp {
    RatFunc c1, c0;
    std::string to_string() const {
        return "yhat^2 + (" + c1.to_string() + ")*yhat + (" + c0.to_string() + ")";
    }
};

inline QuantumCurveOp quantum_curve_op(const LaxPair& P) {
    Matrix2 M = P.effective();
    if (M.b.is_zero()) throw std::domain_error("degenerate gauge: upper-right entry vanishes");
    Var x = var("x");
    RatFunc al(M.a), be(M.b), ga(M.c), de(M.d), h = RatFunc::variable(hvar());
    RatFunc lb = RatFunc(M.b.derivative(x)) / be;
    return {-(al + de) - h * lb, al * de - be * ga - h * (RatFunc(M.a.derivative(x)) - al * lb)};
}

}  // namespace qc
