#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <boost/container/small_vector.hpp>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qc/core/symbol.hpp"

namespace qc {

using Rat = mpq_class;

class Monomial {
public:
    using Entry = std::pair<Var, std::int32_t>;
    using Storage = boost::container::small_vector<Entry, 4>;

    Monomial() = default;
    explicit Monomial(Var v, std::int32_t e = 1) {
        if (e != 0) e_.emplace_back(v, e);
    }

    const Storage& entries() const { return e_; }
    bool is_one() const { return e_.empty(); }

    std::int32_t degree() const {
        std::int32_t d = 0;
        for (auto& [v, k] : e_) d += k;
        return d;
    }
    std::int32_t degree(Var v) const {
        for (auto& [w, k] : e_)
            if (w == v) return k;
        return 0;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        r.e_.reserve(a.e_.size() + b.e_.size());
        auto i = a.e_.begin(), j = b.e_.begin();
        while (i != a.e_.end() && j != b.e_.end()) {
            if (i->first < j->first) r.e_.push_back(*i++);
            else if (j->first < i->first) r.e_.push_back(*j++);
            else {
                if (i->second + j->second != 0) r.e_.emplace_back(i->first, i->second + j->second);
                ++i, ++j;
            }
        }
        r.e_.insert(r.e_.end(), i, a.e_.end());
        r.e_.insert(r.e_.end(), j, b.e_.end());
        return r;
    }

    bool divides(const Monomial& b) const {
        auto j = b.e_.begin();
        for (auto& [v, k] : e_) {
            while (j != b.e_.end() && j->first < v) ++j;
            if (j == b.e_.end() || j->first != v || j->second < k) return false;
        }
        return true;
    }

    // b / *this, assuming divides(b)
    Monomial quotient_of(const Monomial& b) const {
        Monomial r;
        auto i = e_.begin();
        for (auto& [v, k] : b.e_) {
            std::int32_t d = k;
            if (i != e_.end() && i->first == v) d -= (i++)->second;
            if (d != 0) r.e_.emplace_back(v, d);
        }
        return r;
    }

    Monomial without(Var v) const {
        Monomial r;
        for (auto& p : e_)
            if (p.first != v) r.e_.push_back(p);
        return r;
    }

    static Monomial gcd(const Monomial& a, const Monomial& b) {
        Monomial r;
        auto j = b.e_.begin();
        for (auto& [v, k] : a.e_) {
            while (j != b.e_.end() && j->first < v) ++j;
            if (j != b.e_.end() && j->first == v) r.e_.emplace_back(v, std::min(k, j->second));
        }
        return r;
    }

    // graded lex, smaller id counts as the more significant variable
    friend int compare(const Monomial& a, const Monomial& b) {
        auto da = a.degree(), db = b.degree();
        if (da != db) return da < db ? -1 : 1;
        auto i = a.e_.begin(), j = b.e_.begin();
        // a variable missing on one side has exponent 0 there
        while (i != a.e_.end() && j != b.e_.end()) {
            if (i->first < j->first) return i->second > 0 ? 1 : -1;
            if (j->first < i->first) return j->second > 0 ? -1 : 1;
            if (i->second != j->second) return i->second < j->second ? -1 : 1;
            ++i, ++j;
        }
        if (i != a.e_.end()) return i->second > 0 ? 1 : -1;
        if (j != b.e_.end()) return j->second > 0 ? -1 : 1;
        return 0;
    }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }
    friend bool operator<(const Monomial& a, const Monomial& b) { return compare(a, b) < 0; }

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (auto& [v, k] : e_) {
            h ^= static_cast<std::size_t>(v) * 0x100000001b3ULL + static_cast<std::size_t>(k) + (h << 6) + (h >> 2);
        }
        return h;
    }

    void push_back_unchecked(Var v, std::int32_t k) { e_.emplace_back(v, k); }

private:
    Storage e_;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

inline std::size_t rat_hash(const Rat& q) {
    std::size_t h = mpz_get_ui(q.get_num_mpz_t()) * 31u + mpz_get_ui(q.get_den_mpz_t());
    if (sgn(q) < 0) h = ~h;
    return h;
}

class Poly {
public:
    struct Term {
        Monomial m;
        Rat c;
    };

    Poly() = default;
    Poly(long c) {
        if (c != 0) t_.push_back({Monomial(), Rat(c)});
    }
    Poly(const Rat& c) {
        if (sgn(c) != 0) t_.push_back({Monomial(), c});
    }
    static Poly variable(Var v, std::int32_t e = 1) {
        Poly p;
        p.t_.push_back({Monomial(v, e), Rat(1)});
        return p;
    }
    static Poly monomial(const Monomial& m, const Rat& c) {
        Poly p;
        if (sgn(c) != 0) p.t_.push_back({m, c});
        return p;
    }
    // terms may be unsorted and contain duplicates
    static Poly from_terms(std::vector<Term> ts) {
        std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) { return compare(a.m, b.m) > 0; });
        Poly p;
        for (auto& t : ts) {
            if (!p.t_.empty() && p.t_.back().m == t.m) p.t_.back().c += t.c;
            else {
                if (!p.t_.empty() && sgn(p.t_.back().c) == 0) p.t_.pop_back();
                p.t_.push_back(std::move(t));
            }
        }
        if (!p.t_.empty() && sgn(p.t_.back().c) == 0) p.t_.pop_back();
        return p;
    }

    const std::vector<Term>& terms() const { return t_; }
    std::size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
    Rat constant_value() const {
        if (t_.empty()) return Rat(0);
        if (!is_constant()) throw std::logic_error("polynomial is not constant");
        return t_[0].c;
    }
    bool is_one() const { return t_.size() == 1 && t_[0].m.is_one() && t_[0].c == 1; }
    const Monomial& lm() const { return t_.front().m; }
    const Rat& lc() const { return t_.front().c; }

    std::int32_t total_degree() const {
        std::int32_t d = 0;
        for (auto& t : t_) d = std::max(d, t.m.degree());
        return d;
    }
    std::int32_t degree(Var v) const {
        std::int32_t d = 0;
        for (auto& t : t_) d = std::max(d, t.m.degree(v));
        return d;
    }
    std::int32_t min_degree(Var v) const {
        if (t_.empty()) return 0;
        std::int32_t d = t_[0].m.degree(v);
        for (auto& t : t_) d = std::min(d, t.m.degree(v));
        return d;
    }
    bool has_var(Var v) const {
        for (auto& t : t_)
            if (t.m.degree(v) != 0) return true;
        return false;
    }
    std::set<Var> vars() const {
        std::set<Var> s;
        for (auto& t : t_)
            for (auto& e : t.m.entries()) s.insert(e.first);
        return s;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.t_.size() != b.t_.size()) return false;
        for (std::size_t i = 0; i < a.t_.size(); ++i)
            if (!(a.t_[i].m == b.t_[i].m) || a.t_[i].c != b.t_[i].c) return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::size_t hash() const {
        std::size_t h = t_.size();
        for (auto& t : t_) h = h * 1000003u ^ (t.m.hash() + 7 * rat_hash(t.c));
        return h;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.t_) t.c = -t.c;
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }

    friend Poly operator*(const Poly& a, const Rat& c) {
        if (sgn(c) == 0) return Poly();
        Poly r = a;
        for (auto& t : r.t_) t.c *= c;
        return r;
    }
    friend Poly operator*(const Rat& c, const Poly& a) { return a * c; }

    Poly mul_term(const Monomial& m, const Rat& c) const {
        Poly r;
        if (sgn(c) == 0) return r;
        r.t_.reserve(t_.size());
        for (auto& t : t_) r.t_.push_back({t.m * m, t.c * c});
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        if (a.size() < b.size()) return b * a;
        if (b.size() == 1) return a.mul_term(b.t_[0].m, b.t_[0].c);
        std::unordered_map<Monomial, Rat, MonomialHash> acc;
        acc.reserve(a.size() * b.size());
        Rat tmp;
        for (auto& x : a.t_)
            for (auto& y : b.t_) {
                mpq_mul(tmp.get_mpq_t(), x.c.get_mpq_t(), y.c.get_mpq_t());
                auto [it, fresh] = acc.try_emplace(x.m * y.m);
                if (fresh) it->second = tmp;
                else it->second += tmp;
            }
        Poly r;
        r.t_.reserve(acc.size());
        for (auto& kv : acc)
            if (sgn(kv.second) != 0) r.t_.push_back({kv.first, std::move(kv.second)});
        std::sort(r.t_.begin(), r.t_.end(), [](const Term& x, const Term& y) { return compare(x.m, y.m) > 0; });
        return r;
    }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    Poly pow(unsigned e) const {
        Poly r(1), b = *this;
        while (e) {
            if (e & 1u) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    Poly derivative(Var v) const {
        std::vector<Term> out;
        for (auto& t : t_) {
            auto k = t.m.degree(v);
            if (k == 0) continue;
            Monomial m = t.m.without(v);
            if (k != 1) m = m * Monomial(v, k - 1);
            out.push_back({m, t.c * k});
        }
        return from_terms(std::move(out));
    }

    // coefficients of v^k, k = 0..deg
    std::vector<Poly> coeffs(Var v) const {
        std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(degree(v)) + 1);
        for (auto& t : t_) buckets[static_cast<std::size_t>(t.m.degree(v))].push_back({t.m.without(v), t.c});
        std::vector<Poly> r;
        r.reserve(buckets.size());
        for (auto& b : buckets) r.push_back(from_terms(std::move(b)));
        return r;
    }
    static Poly from_coeffs(Var v, const std::vector<Poly>& cs) {
        std::vector<Term> out;
        for (std::size_t k = 0; k < cs.size(); ++k)
            for (auto& t : cs[k].t_) out.push_back({k ? t.m * Monomial(v, static_cast<std::int32_t>(k)) : t.m, t.c});
        return from_terms(std::move(out));
    }
    Poly leading_coeff(Var v) const {
        auto d = degree(v);
        std::vector<Term> out;
        for (auto& t : t_)
            if (t.m.degree(v) == d) out.push_back({t.m.without(v), t.c});
        return from_terms(std::move(out));
    }

    // v -> -v
    Poly negate_var(Var v) const {
        Poly r = *this;
        for (auto& t : r.t_)
            if (t.m.degree(v) & 1) t.c = -t.c;
        return r;
    }

    Poly subs(Var v, const Poly& p) const {
        auto cs = coeffs(v);
        Poly r;
        for (std::size_t k = cs.size(); k-- > 0;) r = r * p + cs[k];
        return r;
    }
    Poly subs(const std::map<Var, Poly>& m) const {
        Poly r = *this;
        for (auto& [v, p] : m) r = r.subs(v, p);
        return r;
    }
    Poly eval(Var v, const Rat& c) const { return subs(v, Poly(c)); }

    // exact division; returns false if b does not divide *this
    bool divide_exact(const Poly& b, Poly& q) const {
        if (b.is_zero()) throw std::domain_error("division by zero polynomial");
        if (is_zero()) {
            q = Poly();
            return true;
        }
        if (b.size() == 1) {
            const auto& bm = b.t_[0].m;
            Rat inv = 1 / b.t_[0].c;
            Poly r;
            r.t_.reserve(t_.size());
            for (auto& t : t_) {
                if (!bm.divides(t.m)) return false;
                r.t_.push_back({bm.quotient_of(t.m), t.c * inv});
            }
            q = std::move(r);
            return true;
        }
        if (total_degree() < b.total_degree()) return false;
        auto gt = [](const Monomial& x, const Monomial& y) { return compare(x, y) > 0; };
        std::map<Monomial, Rat, decltype(gt)> rem(gt);
        for (auto& t : t_) rem.emplace(t.m, t.c);
        std::vector<Term> qt;
        const Monomial& blm = b.lm();
        Rat binv = 1 / b.lc();
        while (!rem.empty()) {
            auto it = rem.begin();
            if (!blm.divides(it->first)) return false;
            Monomial m = blm.quotient_of(it->first);
            Rat c = it->second * binv;
            rem.erase(it);
            for (std::size_t i = 1; i < b.t_.size(); ++i) {
                Monomial mm = b.t_[i].m * m;
                auto [jt, fresh] = rem.try_emplace(std::move(mm));
                if (fresh) jt->second = -c * b.t_[i].c;
                else {
                    jt->second -= c * b.t_[i].c;
                    if (sgn(jt->second) == 0) rem.erase(jt);
                }
            }
            qt.push_back({std::move(m), std::move(c)});
        }
        q = from_terms(std::move(qt));
        return true;
    }

    Poly monic() const {
        if (is_zero()) return *this;
        return *this * Rat(1 / lc());
    }

    // scale to integer coefficients with gcd 1 and positive leading coefficient; returns factor applied
    Rat make_primitive_integer(Poly& out) const {
        if (is_zero()) {
            out = *this;
            return Rat(1);
        }
        mpz_class l = 1, g = 0;
        for (auto& t : t_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
        for (auto& t : t_) {
            mpz_class n = t.c.get_num() * (l / t.c.get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        }
        Rat f(l, g);
        f.canonicalize();
        if (sgn(lc()) < 0) f = -f;
        out = *this * f;
        return f;
    }

    Monomial monomial_content() const {
        if (t_.empty()) return Monomial();
        Monomial g = t_[0].m;
        for (auto& t : t_) g = Monomial::gcd(g, t.m);
        return g;
    }

    std::string to_string() const;

private:
    static Poly merge(const Poly& a, const Poly& b, bool sub) {
        Poly r;
        r.t_.reserve(a.size() + b.size());
        auto i = a.t_.begin(), j = b.t_.begin();
        while (i != a.t_.end() && j != b.t_.end()) {
            int c = compare(i->m, j->m);
            if (c > 0) r.t_.push_back(*i++);
            else if (c < 0) {
                r.t_.push_back(*j++);
                if (sub) r.t_.back().c = -r.t_.back().c;
            } else {
                Rat s = sub ? Rat(i->c - j->c) : Rat(i->c + j->c);
                if (sgn(s) != 0) r.t_.push_back({i->m, std::move(s)});
                ++i, ++j;
            }
        }
        for (; i != a.t_.end(); ++i) r.t_.push_back(*i);
        for (; j != b.t_.end(); ++j) {
            r.t_.push_back(*j);
            if (sub) r.t_.back().c = -r.t_.back().c;
        }
        return r;
    }

    std::vector<Term> t_;
};

struct PolyHash {
    std::size_t operator()(const Poly& p) const { return p.hash(); }
};

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

// Printing order: graded, then lexicographic on variable names. Independent of interning order.
inline std::vector<std::pair<std::string, std::int32_t>> named_entries(const Monomial& m) {
    std::vector<std::pair<std::string, std::int32_t>> r;
    for (auto& [v, k] : m.entries()) r.emplace_back(var_name(v), k);
    std::sort(r.begin(), r.end());
    return r;
}

inline bool print_order_greater(const Monomial& a, const Monomial& b) {
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    auto x = named_entries(a), y = named_entries(b);
    std::size_t i = 0;
    for (; i < x.size() && i < y.size(); ++i) {
        if (x[i].first != y[i].first) return x[i].first < y[i].first;
        if (x[i].second != y[i].second) return x[i].second > y[i].second;
    }
    return x.size() > y.size();
}

inline std::string monomial_to_string(const Monomial& m) {
    std::string s;
    for (auto& [n, k] : named_entries(m)) {
        if (!s.empty()) s += "*";
        s += n;
        if (k != 1) s += "^" + (k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k));
    }
    return s;
}

inline std::vector<const Poly::Term*> print_sorted(const Poly& p) {
    std::vector<const Poly::Term*> ts;
    for (auto& t : p.terms()) ts.push_back(&t);
    std::sort(ts.begin(), ts.end(), [](auto* a, auto* b) { return print_order_greater(a->m, b->m); });
    return ts;
}

inline std::string Poly::to_string() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto* t : print_sorted(*this)) {
        Rat c = t->c;
        bool neg = sgn(c) < 0;
        if (neg) c = -c;
        if (first) s += neg ? "-" : "";
        else s += neg ? " - " : " + ";
        first = false;
        std::string ms = monomial_to_string(t->m);
        std::string cs = c.get_den() == 1 ? c.get_num().get_str() : "(" + c.get_str() + ")";
        if (ms.empty()) s += cs;
        else if (c == 1) s += ms;
        else s += cs + "*" + ms;
    }
    return s;
}

}  // namespace qc
