#pragma once

#include "qc/core/laurent.hpp"

namespace qc {

// rational part plus sum of c_i log(a_i)
class LogExpr {
public:
    struct Atom {
        RatFunc coeff;
        RatFunc arg;
    };

    LogExpr() = default;
    LogExpr(const RatFunc& r) : rat_(r) {}

    const RatFunc& rational() const { return rat_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool is_rational() const { return atoms_.empty(); }
    bool is_zero() const { return atoms_.empty() && rat_.is_zero(); }

    void add_log(const RatFunc& c, const RatFunc& arg) {
        if (c.is_zero()) return;
        for (auto it = atoms_.begin(); it != atoms_.end(); ++it)
            if (it->arg == arg) {
                it->coeff += c;
                if (it->coeff.is_zero()) atoms_.erase(it);
                return;
            }
        atoms_.push_back({c, arg});
    }

    friend LogExpr operator+(const LogExpr& a, const LogExpr& b) {
        LogExpr r = a;
        r.rat_ += b.rat_;
        for (auto& x : b.atoms_) r.add_log(x.coeff, x.arg);
        return r;
    }
    friend LogExpr operator*(const RatFunc& s, const LogExpr& a) {
        LogExpr r(s * a.rat_);
        for (auto& x : a.atoms_) r.add_log(s * x.coeff, x.arg);
        return r;
    }
    friend LogExpr operator-(const LogExpr& a, const LogExpr& b) { return a + RatFunc(-1) * b; }

    // d/dv; the coefficients must not depend on v
    RatFunc derivative(Var v) const {
        RatFunc r = rat_.derivative(v);
        for (auto& x : atoms_) {
            if (x.coeff.depends_on(v)) throw std::logic_error("log coefficient depends on the differentiation variable");
            r += x.coeff * x.arg.derivative(v) / x.arg;
        }
        return r;
    }

    // d/dv allowing coefficients that depend on v
    LogExpr total_derivative(Var v) const {
        LogExpr r(derivative_of_args(v));
        for (auto& x : atoms_) r.add_log(x.coeff.derivative(v), x.arg);
        return r;
    }

    LogExpr subs(Var v, const RatFunc& val) const {
        LogExpr r(rat_.subs(v, val));
        for (auto& x : atoms_) r.add_log(x.coeff.subs(v, val), x.arg.subs(v, val));
        return r;
    }

    std::string to_string() const {
        std::string s = rat_.to_string();
        for (auto& x : atoms_) s += " + (" + x.coeff.to_string() + ")*log(" + x.arg.to_string() + ")";
        return s;
    }

private:
    RatFunc derivative_of_args(Var v) const {
        RatFunc r = rat_.derivative(v);
        for (auto& x : atoms_) r += x.coeff * x.arg.derivative(v) / x.arg;
        return r;
    }

    RatFunc rat_;
    std::vector<Atom> atoms_;
};

// exact square root of a polynomial, if it exists
inline std::optional<Poly> poly_sqrt(const Poly& p) {
    if (p.is_zero()) return Poly();
    const auto& lm = p.lm();
    Monomial root_m;
    for (auto& [v, k] : lm.entries()) {
        if (k % 2) return std::nullopt;
        root_m = root_m * Monomial(v, k / 2);
    }
    Rat c = p.lc();
    if (sgn(c) < 0) return std::nullopt;
    mpz_class n = c.get_num(), d = c.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    Poly q = Poly::monomial(root_m, Rat(sqrt(n), sqrt(d)));
    Poly lead = q;
    for (std::size_t it = 0; it <= p.size() + 2; ++it) {
        Poly r = p - q * q;
        if (r.is_zero()) return q;
        if (!lead.lm().divides(r.lm())) return std::nullopt;
        if (compare(r.lm(), lead.lm()) > 0 && r.lm().degree() > 2 * lead.lm().degree()) return std::nullopt;
        Poly t = Poly::monomial(lead.lm().quotient_of(r.lm()), r.lc() / (2 * lead.lc()));
        if (!(compare(t.lm(), lead.lm()) < 0)) return std::nullopt;
        q += t;
    }
    return std::nullopt;
}

// roots of f in v with multiplicities: f = lc * prod (v - r)^m
inline std::vector<std::pair<RatFunc, std::int32_t>> linear_roots(const Poly& f, Var v) {
    std::vector<std::pair<RatFunc, std::int32_t>> out;
    auto d = f.degree(v);
    if (d == 0) return out;
    auto cs = f.coeffs(v);
    if (d == 1) {
        out.emplace_back(-RatFunc(cs[0]) / RatFunc(cs[1]), 1);
        return out;
    }
    if (d == 2) {
        Poly disc = cs[1] * cs[1] - Poly(4) * cs[0] * cs[2];
        if (disc.is_zero()) {
            out.emplace_back(-RatFunc(cs[1]) / RatFunc(cs[2] * Rat(2)), 2);
            return out;
        }
        auto sq = poly_sqrt(disc);
        if (!sq) {
            auto sqn = poly_sqrt(-disc);
            (void)sqn;
            throw FieldExtensionError("irrational root of " + f.to_string() + " in " + var_name(v));
        }
        RatFunc two_a = RatFunc(cs[2] * Rat(2));
        out.emplace_back((-RatFunc(cs[1]) + RatFunc(*sq)) / two_a, 1);
        out.emplace_back((-RatFunc(cs[1]) - RatFunc(*sq)) / two_a, 1);
        return out;
    }
    if (f.vars().size() == 1) {
        // rational root theorem on the integer-primitive form
        Poly g;
        f.make_primitive_integer(g);
        auto gc = g.coeffs(v);
        std::size_t low = 0;
        while (gc[low].is_zero()) ++low;
        if (low) out.emplace_back(RatFunc(0), static_cast<std::int32_t>(low));
        mpz_class a0 = abs(gc[low].constant_value().get_num()), an = abs(gc.back().constant_value().get_num());
        Poly rest = exact_quotient(g, Poly::variable(v, static_cast<std::int32_t>(low)));
        auto divisors = [](mpz_class n) {
            std::vector<mpz_class> ds;
            if (n > mpz_class(1000000)) throw FieldExtensionError("constant too large for rational root search");
            for (mpz_class i = 1; i * i <= n; ++i)
                if (n % i == 0) {
                    ds.push_back(i);
                    if (i * i != n) ds.push_back(n / i);
                }
            return ds;
        };
        for (auto& p : divisors(a0))
            for (auto& q : divisors(an))
                for (int sgn_ = -1; sgn_ <= 1; sgn_ += 2) {
                    Rat r(p * sgn_, q);
                    r.canonicalize();
                    std::int32_t m = 0;
                    Poly lin = Poly::variable(v) - Poly(r), qq;
                    while (rest.degree(v) > 0 && rest.divide_exact(lin, qq)) rest = qq, ++m;
                    if (m) out.emplace_back(RatFunc(r), m);
                }
        if (rest.degree(v) > 0) throw FieldExtensionError("irrational root of " + f.to_string());
        return out;
    }
    throw FieldExtensionError("cannot split " + f.to_string() + " into linear factors in " + var_name(v));
}

// antiderivative in v: rational part plus logarithms of the simple-pole residues
inline LogExpr primitive(const RatFunc& f, Var v) {
    if (f.is_zero()) return LogExpr();
    RatFunc rest = f;
    LogExpr out;
    RatFunc vv = RatFunc::variable(v);
    for (auto& fac : f.den_factors()) {
        if (!fac.p.has_var(v)) continue;
        for (auto& [root, mult] : linear_roots(fac.p, v)) {
            auto s = laurent_expand(f, v, Point::at(root), -1);
            for (std::int32_t k = s.val(); k <= -1; ++k) {
                RatFunc c = s.coeff(k);
                if (c.is_zero()) continue;
                RatFunc term = c * (vv - root).pow(k);
                rest -= term;
                if (k == -1) out.add_log(c, vv - root);
                else out = out + LogExpr(c * (vv - root).pow(k + 1) * RatFunc(Rat(1, 1) / Rat(k + 1)));
            }
        }
    }
    // remaining part is polynomial in v
    RatFunc scale(1);
    for (auto& fac : rest.den_factors()) {
        if (fac.p.has_var(v)) throw std::logic_error("partial fraction remainder not polynomial");
        scale *= RatFunc(fac.p).pow(-fac.e);
    }
    auto cs = rest.num().coeffs(v);
    RatFunc poly_part;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        if (cs[k].is_zero()) continue;
        poly_part += RatFunc(cs[k] * Rat(1, static_cast<unsigned long>(k + 1))) * vv.pow(static_cast<std::int32_t>(k + 1));
    }
    return out + LogExpr(poly_part * scale);
}

}  // namespace qc
