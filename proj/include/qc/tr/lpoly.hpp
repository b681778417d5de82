#pragma once

#include <map>

#include <boost/container/small_vector.hpp>

#include "qc/core/ratfunc.hpp"

namespace qc {

using Exps = boost::container::small_vector<std::int32_t, 8>;

// Sparse Laurent polynomial in n indexed slots with coefficients in the parameter field.
class LPoly {
public:
    LPoly() = default;
    explicit LPoly(std::int32_t n) : n_(n) {}

    std::int32_t nvars() const { return n_; }
    const std::map<Exps, RatFunc>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    void add(const Exps& e, const RatFunc& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = t_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }

    friend LPoly operator+(LPoly a, const LPoly& b) {
        for (auto& [e, c] : b.t_) a.add(e, c);
        return a;
    }
    friend LPoly operator-(LPoly a, const LPoly& b) {
        for (auto& [e, c] : b.t_) a.add(e, -c);
        return a;
    }
    friend LPoly operator*(const LPoly& a, const RatFunc& s) {
        LPoly r(a.n_);
        if (s.is_zero()) return r;
        for (auto& [e, c] : a.t_) r.t_.emplace(e, c * s);
        return r;
    }
    friend bool operator==(const LPoly& a, const LPoly& b) { return a.n_ == b.n_ && a.t_ == b.t_; }

    // slot i of the result takes slot perm[i] of this
    LPoly permuted(const std::vector<std::int32_t>& perm) const {
        LPoly r(static_cast<std::int32_t>(perm.size()));
        for (auto& [e, c] : t_) {
            Exps f(perm.size());
            for (std::size_t i = 0; i < perm.size(); ++i) f[i] = e[static_cast<std::size_t>(perm[i])];
            r.add(f, c);
        }
        return r;
    }

    // z_i -> -z_i
    LPoly negated_slot(std::int32_t i) const {
        LPoly r = *this;
        for (auto& [e, c] : r.t_)
            if (e[static_cast<std::size_t>(i)] % 2 != 0) c = -c;
        return r;
    }

    std::int32_t min_exp(std::int32_t i) const {
        std::int32_t m = 0;
        bool first = true;
        for (auto& [e, c] : t_) {
            if (first || e[static_cast<std::size_t>(i)] < m) m = e[static_cast<std::size_t>(i)];
            first = false;
        }
        return m;
    }

    RatFunc to_ratfunc(const std::vector<Var>& vars) const {
        // one Laurent numerator when every coefficient has a monomial denominator
        bool laurent = true;
        for (auto& [e, c] : t_) {
            for (auto& f : c.den_factors())
                if (f.p.size() != 1) laurent = false;
            if (!laurent) break;
        }
        if (laurent) {
            std::vector<Poly::Term> ts;
            for (auto& [e, c] : t_) {
                Monomial m;
                for (std::size_t i = 0; i < e.size(); ++i)
                    if (e[i]) m = m * Monomial(vars[i], e[i]);
                Monomial dm;
                for (auto& f : c.den_factors())
                    for (auto& [v, k] : f.p.terms().front().m.entries()) dm = dm * Monomial(v, -f.e * k);
                Rat scale = 1 / f_lc(c);
                for (auto& t : c.num().terms()) ts.push_back({t.m * m * dm, t.c * scale});
            }
            return RatFunc::from_laurent(Poly::from_terms(std::move(ts)));
        }
        RatFunc r;
        for (auto& [e, c] : t_) {
            Monomial m;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) m = m * Monomial(vars[i], e[i]);
            r += RatFunc::laurent_monomial(m, 1) * c;
        }
        return r;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(n_);
        for (auto& [e, c] : t_) {
            for (auto x : e) h = h * 1000003u + static_cast<std::size_t>(x + 1000);
            h ^= c.num().hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    static Rat f_lc(const RatFunc& c) {
        Rat r = 1;
        for (auto& f : c.den_factors()) r *= pow_rat(f.p.lc(), f.e);
        return r;
    }
    static Rat pow_rat(const Rat& a, std::int32_t e) {
        Rat r = 1;
        for (std::int32_t i = 0; i < e; ++i) r *= a;
        return r;
    }

    std::int32_t n_ = 0;
    std::map<Exps, RatFunc> t_;
};

}  // namespace qc
