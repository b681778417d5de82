#pragma once

#include <mutex>
#include <optional>
#include <unordered_map>

#include "qc/core/gcd.hpp"

namespace qc {

class FieldExtensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Factor {
    Poly p;  // monic, non-constant, not divisible by any variable unless p is a variable
    std::int32_t e = 0;
    bool irreducible = false;
};

inline bool known_irreducible(const Poly& f) {
    if (f.total_degree() == 1) return true;
    for (Var v : f.vars())
        if (f.degree(v) == 1) return true;  // primitive in every variable by construction
    return false;
}

class GcdCache {
public:
    static GcdCache& instance() {
        static GcdCache c;
        return c;
    }
    Poly get(const Poly& a, const Poly& b) {
        const Poly& x = a.hash() <= b.hash() ? a : b;
        const Poly& y = &x == &a ? b : a;
        std::size_t h = x.hash() * 1000003u ^ y.hash();
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto [lo, hi] = map_.equal_range(h);
            for (auto it = lo; it != hi; ++it)
                if (it->second.a == x && it->second.b == y) return it->second.g;
        }
        Poly g = poly_gcd(x, y);
        std::lock_guard<std::mutex> lk(mu_);
        map_.emplace(h, Entry{x, y, g});
        return g;
    }

private:
    struct Entry {
        Poly a, b, g;
    };
    std::mutex mu_;
    std::unordered_multimap<std::size_t, Entry> map_;
};

inline bool is_single_variable(const Poly& p) { return p.size() == 1 && p.lm().degree() == 1 && p.lc() == 1; }

inline Poly factor_gcd(const Poly& f, const Poly& q) {
    if (is_single_variable(f) || is_single_variable(q)) return Poly(1);
    if (f.total_degree() == 1 && q.total_degree() == 1) return Poly(1);
    auto vf = f.vars(), vq = q.vars();
    bool shared = false;
    for (Var v : vf)
        if (vq.count(v)) shared = true;
    if (!shared) return Poly(1);
    return GcdCache::instance().get(f, q);
}

// Inserts f^e into a pairwise-coprime factor list. Returns the constant c with f^e = c * (monic pieces).
inline Rat add_coprime(std::vector<Factor>& list, const Poly& f0, std::int32_t e) {
    if (f0.is_constant()) {
        if (f0.is_zero()) throw std::domain_error("division by zero");
        Rat c = f0.constant_value();
        Rat r = 1;
        for (std::int32_t i = 0; i < e; ++i) r *= c;
        return r;
    }
    Rat c = 1;
    for (std::int32_t i = 0; i < e; ++i) c *= f0.lc();
    Poly f = f0.monic();
    if (f.size() == 1) {
        for (auto& [v, k] : f.lm().entries()) {
            Poly pv = Poly::variable(v);
            bool found = false;
            for (auto& q : list)
                if (q.p == pv) q.e += e * k, found = true;
            if (!found) list.push_back({pv, e * k, true});
        }
        return c;
    }
    Monomial m = f.monomial_content();
    if (!m.is_one()) {
        for (auto& [v, k] : m.entries()) add_coprime(list, Poly::variable(v), e * k);
        f = exact_quotient(f, Poly::monomial(m, Rat(1)));
        if (f.is_constant()) return c;
        c *= add_coprime(list, f, e);
        return c;
    }
    auto vs = f.vars();
    if (vs.size() > 1) {
        for (Var v : vs) {
            Poly ct = poly_content(f, v);
            if (!ct.is_constant()) {
                c *= add_coprime(list, ct, e);
                c *= add_coprime(list, exact_quotient(f, ct), e);
                return c;
            }
        }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].p == f) {
            list[i].e += e;
            return c;
        }
        Poly g = factor_gcd(list[i].p, f);
        if (!g.is_constant()) {
            Factor q = list[i];
            list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
            c *= add_coprime(list, g, q.e + e);
            c *= add_coprime(list, exact_quotient(q.p, g), q.e);
            c *= add_coprime(list, exact_quotient(f, g), e);
            return c;
        }
    }
    list.push_back({f, e, known_irreducible(f)});
    return c;
}

// Removes common factors between num and the listed denominators.
inline void cancel(Poly& num, std::vector<Factor>& den) {
    if (num.is_zero()) {
        den.clear();
        return;
    }
    bool again = true;
    while (again) {
        again = false;
        for (std::size_t i = 0; i < den.size(); ++i) {
            auto& f = den[i];
            Poly q;
            while (f.e > 0) {
                if (is_single_variable(f.p)) {
                    Var v = f.p.lm().entries()[0].first;
                    auto k = std::min(f.e, num.min_degree(v));
                    if (k <= 0) break;
                    num = exact_quotient(num, Poly::variable(v, k));
                    f.e -= k;
                    break;
                }
                if (!num.divide_exact(f.p, q)) break;
                num = std::move(q);
                --f.e;
            }
            if (f.e > 0 && !f.irreducible) {
                Var v = *f.p.vars().begin();
                Poly g = poly_gcd(f.p, prem(num, f.p, v));
                if (!g.is_constant()) {
                    Factor old = f;
                    den.erase(den.begin() + static_cast<std::ptrdiff_t>(i));
                    Rat c = add_coprime(den, g, old.e);
                    c *= add_coprime(den, exact_quotient(old.p, g), old.e);
                    num = num * Rat(1 / c);
                    again = true;
                    break;
                }
                f.irreducible = true;  // coprime to num; stays so only for this num, cleared below
            }
        }
        den.erase(std::remove_if(den.begin(), den.end(), [](const Factor& f) { return f.e == 0; }), den.end());
    }
    for (auto& f : den) f.irreducible = known_irreducible(f.p);
}

}  // namespace detail

class RatFunc {
public:
    RatFunc() = default;
    RatFunc(long c) : num_(c) {}
    RatFunc(const Rat& c) : num_(c) {}
    RatFunc(const Poly& p) : num_(p) {}
    static RatFunc variable(Var v) { return RatFunc(Poly::variable(v)); }
    static RatFunc variable(std::string_view name) { return variable(var(name)); }
    // num / den with den nonzero
    static RatFunc fraction(const Poly& num, const Poly& den) {
        RatFunc r;
        Rat c = detail::add_coprime(r.den_, den, 1);
        r.num_ = num * Rat(1 / c);
        detail::cancel(r.num_, r.den_);
        r.sort_den();
        return r;
    }
    // Laurent monomial c * m, negative exponents allowed
    static RatFunc laurent_monomial(const Monomial& m, const Rat& c) {
        RatFunc r;
        Monomial pos;
        for (auto& [v, k] : m.entries()) {
            if (k > 0) pos = pos * Monomial(v, k);
            else r.den_.push_back({Poly::variable(v), -k, true});
        }
        r.num_ = Poly::monomial(pos, c);
        r.sort_den();
        return r;
    }
    static RatFunc from_laurent(const Poly& p) {
        Monomial low;
        bool any = false;
        for (auto& t : p.terms())
            for (auto& [v, k] : t.m.entries())
                if (k < 0) any = true;
        if (!any) return RatFunc(p);
        std::map<Var, std::int32_t> mins;
        for (auto& t : p.terms())
            for (auto& [v, k] : t.m.entries()) mins[v] = std::min(mins[v], k);
        Monomial shift;
        for (auto& [v, k] : mins)
            if (k < 0) shift = shift * Monomial(v, -k);
        RatFunc r;
        r.num_ = p.mul_term(shift, Rat(1));
        for (auto& [v, k] : shift.entries()) r.den_.push_back({Poly::variable(v), k, true});
        detail::cancel(r.num_, r.den_);
        r.sort_den();
        return r;
    }

    const Poly& num() const { return num_; }
    const std::vector<detail::Factor>& den_factors() const { return den_; }
    Poly den() const {
        Poly d(1);
        for (auto& f : den_) d *= f.p.pow(static_cast<unsigned>(f.e));
        return d;
    }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.empty(); }
    bool is_constant() const { return den_.empty() && num_.is_constant(); }
    Rat constant_value() const {
        if (!is_constant()) throw std::logic_error("rational function is not constant");
        return num_.constant_value();
    }
    bool depends_on(Var v) const {
        if (num_.has_var(v)) return true;
        for (auto& f : den_)
            if (f.p.has_var(v)) return true;
        return false;
    }
    std::set<Var> vars() const {
        auto s = num_.vars();
        for (auto& f : den_)
            for (Var v : f.p.vars()) s.insert(v);
        return s;
    }

    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) { return add(a, b, false); }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return add(a, b, true); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return RatFunc();
        if (a.den_.empty() && b.den_.empty()) return RatFunc(a.num_ * b.num_);
        Poly na = a.num_, nb = b.num_;
        auto da = a.den_, db = b.den_;
        if (!db.empty()) detail::cancel(na, db);
        if (!da.empty()) detail::cancel(nb, da);
        RatFunc r;
        r.den_ = std::move(da);
        Rat c = 1;
        for (auto& f : db) c *= detail::add_coprime(r.den_, f.p, f.e);
        r.num_ = (na * nb) * Rat(1 / c);
        if (c != 1 || r.den_.size() != a.den_.size() + b.den_.size()) detail::cancel(r.num_, r.den_);
        r.sort_den();
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inv(); }
    RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
    RatFunc& operator-=(const RatFunc& b) { return *this = *this - b; }
    RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }
    RatFunc& operator/=(const RatFunc& b) { return *this = *this / b; }

    RatFunc inv() const {
        if (is_zero()) throw std::domain_error("inverse of zero rational function");
        RatFunc r;
        Rat c = detail::add_coprime(r.den_, num_, 1);
        r.num_ = den() * Rat(1 / c);
        r.sort_den();
        return r;
    }

    RatFunc pow(std::int32_t e) const {
        if (e < 0) return inv().pow(-e);
        RatFunc r;
        r.num_ = num_.pow(static_cast<unsigned>(e));
        for (auto& f : den_) r.den_.push_back({f.p, f.e * e, f.irreducible});
        if (e == 0) r.den_.clear();
        return r;
    }

    RatFunc derivative(Var v) const {
        if (den_.empty()) return RatFunc(num_.derivative(v));
        std::vector<std::size_t> dep;
        for (std::size_t i = 0; i < den_.size(); ++i)
            if (den_[i].p.has_var(v)) dep.push_back(i);
        if (dep.empty()) {
            RatFunc r = *this;
            r.num_ = num_.derivative(v);
            detail::cancel(r.num_, r.den_);
            return r;
        }
        Poly all(1);
        for (auto i : dep) all *= den_[i].p;
        Poly n = num_.derivative(v) * all;
        for (auto i : dep) {
            Poly others(1);
            for (auto j : dep)
                if (j != i) others *= den_[j].p;
            n -= num_ * den_[i].p.derivative(v) * others * Rat(den_[i].e);
        }
        RatFunc r;
        r.den_ = den_;
        for (auto i : dep) r.den_[i].e += 1;
        r.num_ = std::move(n);
        detail::cancel(r.num_, r.den_);
        r.sort_den();
        return r;
    }

    RatFunc negate_var(Var v) const {
        RatFunc r;
        r.num_ = num_.negate_var(v);
        for (auto& f : den_) {
            Poly g = f.p.negate_var(v);
            if (g.lc() != 1) {
                if (f.e & 1) r.num_ = -r.num_;
                g = -g;
            }
            r.den_.push_back({g, f.e, f.irreducible});
        }
        r.sort_den();
        return r;
    }

    RatFunc subs(Var v, const RatFunc& val) const {
        if (!depends_on(v)) return *this;
        RatFunc r = subs_poly(num_, v, val);
        for (auto& f : den_) {
            if (!f.p.has_var(v)) {
                r *= RatFunc(f.p).pow(-f.e);
                continue;
            }
            r *= subs_poly(f.p, v, val).pow(-f.e);
        }
        return r;
    }
    RatFunc subs(const std::map<Var, RatFunc>& m) const {
        RatFunc r = *this;
        for (auto& [v, val] : m) r = r.subs(v, val);
        return r;
    }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        if (a.num_ == b.num_ && a.den_.size() == b.den_.size()) {
            bool same = true;
            for (std::size_t i = 0; i < a.den_.size() && same; ++i)
                same = a.den_[i].p == b.den_[i].p && a.den_[i].e == b.den_[i].e;
            if (same) return true;
        }
        return (a - b).is_zero();
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    // canonical pair: integer-primitive denominator with positive leading coefficient
    std::pair<Poly, Poly> canonical() const {
        Poly d = den();
        Poly dn;
        Rat f = d.make_primitive_integer(dn);
        return {num_ * f, dn};
    }

    std::string to_string() const {
        auto [n, d] = canonical();
        if (d.is_one()) return n.to_string();
        std::string ns = n.to_string();
        if (n.size() > 1) ns = "(" + ns + ")";
        std::string ds = d.to_string();
        if (d.size() > 1 || d.terms()[0].c != 1 || d.lm().entries().size() > 1 ||
            (d.lm().entries().size() == 1 && d.lm().entries()[0].second != 1))
            ds = "(" + ds + ")";
        return ns + "/" + ds;
    }

private:
    static RatFunc subs_poly(const Poly& p, Var v, const RatFunc& val) {
        if (val.den_.empty()) return RatFunc(p.subs(v, val.num_));
        auto cs = p.coeffs(v);
        RatFunc r;
        for (std::size_t k = cs.size(); k-- > 0;) r = r * val + RatFunc(cs[k]);
        return r;
    }

    static RatFunc add(const RatFunc& a, const RatFunc& b, bool sub) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return sub ? -b : b;
        if (a.den_.empty() && b.den_.empty()) return RatFunc(sub ? a.num_ - b.num_ : a.num_ + b.num_);
        std::vector<detail::Factor> l = a.den_;
        Rat cb = 1;
        for (auto& f : b.den_) cb *= detail::add_coprime(l, f.p, 0);
        (void)cb;
        // l now holds a coprime basis refining both denominators' supports
        auto expo = [&](const std::vector<detail::Factor>& d, std::vector<std::int32_t>& out) {
            out.assign(l.size(), 0);
            for (auto& f : d) {
                // decompose f.p over basis l
                Poly rest = f.p;
                for (std::size_t i = 0; i < l.size(); ++i) {
                    Poly q;
                    while (!rest.is_constant() && rest.divide_exact(l[i].p, q)) {
                        rest = std::move(q);
                        out[i] += f.e;
                    }
                }
                if (!rest.is_constant()) throw std::logic_error("coprime basis refinement failed");
            }
        };
        bool same_basis = l.size() == a.den_.size();
        std::vector<std::int32_t> ea, eb;
        expo(a.den_, ea);
        expo(b.den_, eb);
        // constants from monic decomposition of a.den_ and b.den_ factors are 1 since all monic
        Poly na = a.num_, nb = b.num_;
        for (std::size_t i = 0; i < l.size(); ++i) {
            auto m = std::max(ea[i], eb[i]);
            if (m > ea[i]) na = na * l[i].p.pow(static_cast<unsigned>(m - ea[i]));
            if (m > eb[i]) nb = nb * l[i].p.pow(static_cast<unsigned>(m - eb[i]));
            l[i].e = m;
        }
        (void)same_basis;
        RatFunc r;
        r.num_ = sub ? na - nb : na + nb;
        r.den_ = std::move(l);
        r.den_.erase(std::remove_if(r.den_.begin(), r.den_.end(), [](auto& f) { return f.e == 0; }), r.den_.end());
        detail::cancel(r.num_, r.den_);
        r.sort_den();
        return r;
    }

    void sort_den() {
        std::sort(den_.begin(), den_.end(), [](const detail::Factor& x, const detail::Factor& y) {
            if (x.p.size() != y.p.size()) return x.p.size() < y.p.size();
            if (x.p.total_degree() != y.p.total_degree()) return x.p.total_degree() < y.p.total_degree();
            return x.p.hash() < y.p.hash();
        });
    }

    Poly num_;
    std::vector<detail::Factor> den_;
};

}  // namespace qc
