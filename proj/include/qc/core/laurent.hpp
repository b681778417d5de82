#pragma once

#include <optional>

#include "qc/core/ratfunc.hpp"

namespace qc {

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expansion point: a field value or infinity.
struct Point {
    std::optional<RatFunc> value;  // empty means infinity
    static Point at(const RatFunc& v) { return Point{v}; }
    static Point infinity() { return Point{}; }
    bool is_infinity() const { return !value.has_value(); }
};

// Truncated Laurent series sum_{k<order} c_k t^k; coefficients below val vanish.
class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(std::int32_t val, std::int32_t order, std::vector<RatFunc> c)
        : val_(val), order_(order), c_(std::move(c)) {
        c_.resize(static_cast<std::size_t>(std::max(0, order_ - val_)));
    }
    static LaurentSeries constant(const RatFunc& a, std::int32_t order) {
        if (order <= 0) return LaurentSeries(order, order, {});
        return LaurentSeries(0, order, {a});
    }
    static LaurentSeries monomial(std::int32_t k, const RatFunc& a, std::int32_t order) {
        if (order <= k) return LaurentSeries(order, order, {});
        return LaurentSeries(k, order, {a});
    }

    std::int32_t val() const { return val_; }
    std::int32_t order() const { return order_; }

    RatFunc coeff(std::int32_t k) const {
        if (k >= order_) throw TruncationError("coefficient t^" + std::to_string(k) + " beyond valid window (order " + std::to_string(order_) + ")");
        if (k < val_) return RatFunc();
        return c_[static_cast<std::size_t>(k - val_)];
    }

    // drops leading zero coefficients
    LaurentSeries normalized() const {
        LaurentSeries r = *this;
        std::size_t i = 0;
        while (i < r.c_.size() && r.c_[i].is_zero()) ++i;
        r.c_.erase(r.c_.begin(), r.c_.begin() + static_cast<std::ptrdiff_t>(i));
        r.val_ += static_cast<std::int32_t>(i);
        return r;
    }
    bool known_zero() const {
        for (auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }
    // valuation; throws if every known coefficient vanishes
    std::int32_t valuation() const {
        auto n = normalized();
        if (n.c_.empty()) throw TruncationError("valuation not determined within window");
        return n.val_;
    }

    LaurentSeries truncated(std::int32_t order) const {
        if (order > order_) throw TruncationError("cannot extend series window");
        LaurentSeries r = *this;
        r.order_ = order;
        if (r.val_ > order) r.val_ = order;
        r.c_.resize(static_cast<std::size_t>(std::max(0, order - r.val_)));
        return r;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return add(a, b, false); }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return add(a, b, true); }
    LaurentSeries operator-() const {
        LaurentSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend LaurentSeries operator*(const LaurentSeries& a0, const LaurentSeries& b0) {
        auto a = a0.normalized(), b = b0.normalized();
        std::int32_t val = a.val_ + b.val_;
        std::int32_t order = std::min(a.val_ + b.order_, b.val_ + a.order_);
        std::vector<RatFunc> c(static_cast<std::size_t>(std::max(0, order - val)));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size() && i + j < c.size(); ++j) {
                if (b.c_[j].is_zero()) continue;
                c[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return LaurentSeries(val, order, std::move(c));
    }
    friend LaurentSeries operator*(const LaurentSeries& a, const RatFunc& s) {
        LaurentSeries r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }

    LaurentSeries inverse() const {
        auto a = normalized();
        if (a.c_.empty()) throw TruncationError("cannot invert a series with no known nonzero coefficient");
        std::size_t n = a.c_.size();
        RatFunc inv0 = a.c_[0].inv();
        std::vector<RatFunc> r(n);
        r[0] = inv0;
        for (std::size_t k = 1; k < n; ++k) {
            RatFunc s;
            for (std::size_t j = 1; j <= k; ++j)
                if (!a.c_[j].is_zero()) s += a.c_[j] * r[k - j];
            r[k] = -s * inv0;
        }
        return LaurentSeries(-a.val_, -a.val_ + static_cast<std::int32_t>(n), std::move(r));
    }

    // (series)^e for rational e; leading coefficient must have a rational e-th power
    LaurentSeries pow(const Rat& e) const {
        auto a = normalized();
        if (a.c_.empty()) throw TruncationError("power of a series with no known nonzero coefficient");
        mpz_class num = e.get_num(), den = e.get_den();
        if ((a.val_ * num) % den != 0) throw FieldExtensionError("fractional valuation in series power");
        RatFunc lead = a.c_[0];
        RatFunc lead_pow = rational_power(lead, e);
        std::size_t n = a.c_.size();
        // w = a/(lead t^val) - 1, then (1+w)^e by the J.C.P. Miller recurrence
        RatFunc linv = lead.inv();
        std::vector<RatFunc> w(n);
        for (std::size_t k = 0; k < n; ++k) w[k] = a.c_[k] * linv;
        std::vector<RatFunc> r(n);
        r[0] = RatFunc(1);
        for (std::size_t k = 1; k < n; ++k) {
            RatFunc s;
            for (std::size_t j = 1; j <= k; ++j) {
                if (w[j].is_zero()) continue;
                Rat coef = e * Rat(static_cast<long>(j)) - Rat(static_cast<long>(k - j));
                s += w[j] * r[k - j] * RatFunc(coef);
            }
            r[k] = s * RatFunc(Rat(1, static_cast<unsigned long>(k)));
        }
        for (auto& x : r) x *= lead_pow;
        std::int32_t v = static_cast<std::int32_t>(mpz_class(a.val_ * num / den).get_si());
        return LaurentSeries(v, v + static_cast<std::int32_t>(n), std::move(r));
    }

    LaurentSeries derivative() const {
        std::vector<RatFunc> c;
        std::int32_t v = val_ - 1;
        for (std::size_t i = 0; i < c_.size(); ++i) c.push_back(c_[i] * RatFunc(static_cast<long>(val_ + static_cast<std::int32_t>(i))));
        return LaurentSeries(v, order_ - 1, std::move(c));
    }

    std::string to_string(const std::string& t = "t") const {
        std::string s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[i].to_string() + ")*" + t + "^" + std::to_string(val_ + static_cast<std::int32_t>(i));
        }
        if (!s.empty()) s += " + ";
        return s + "O(" + t + "^" + std::to_string(order_) + ")";
    }

    static RatFunc rational_power(const RatFunc& a, const Rat& e) {
        if (e.get_den() == 1) return a.pow(static_cast<std::int32_t>(e.get_num().get_si()));
        if (a == RatFunc(1)) return RatFunc(1);
        if (a.is_constant()) {
            Rat c = a.constant_value();
            unsigned long q = e.get_den().get_ui();
            if (sgn(c) < 0 && q % 2 == 0) throw FieldExtensionError("even root of a negative constant");
            mpz_class n = abs(c.get_num()), d = c.get_den(), rn, rd;
            if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), q) || !mpz_root(rd.get_mpz_t(), d.get_mpz_t(), q))
                throw FieldExtensionError("constant is not a perfect power");
            Rat root(rn, rd);
            if (sgn(c) < 0) root = -root;
            return RatFunc(root).pow(static_cast<std::int32_t>(e.get_num().get_si()));
        }
        throw FieldExtensionError("root of a non-constant leading coefficient");
    }

private:
    static LaurentSeries add(const LaurentSeries& a, const LaurentSeries& b, bool sub) {
        std::int32_t order = std::min(a.order_, b.order_);
        std::int32_t val = std::min(a.val_, b.val_);
        val = std::min(val, order);
        std::vector<RatFunc> c(static_cast<std::size_t>(order - val));
        for (std::int32_t k = val; k < order; ++k) {
            RatFunc x = k >= a.val_ ? a.c_[static_cast<std::size_t>(k - a.val_)] : RatFunc();
            RatFunc y = k >= b.val_ ? b.c_[static_cast<std::size_t>(k - b.val_)] : RatFunc();
            c[static_cast<std::size_t>(k - val)] = sub ? x - y : x + y;
        }
        return LaurentSeries(val, order, std::move(c));
    }

    std::int32_t val_ = 0;
    std::int32_t order_ = 0;
    std::vector<RatFunc> c_;
};

namespace detail {

// coefficients of p(point + t) in t, or of t^deg p(1/t) at infinity
inline std::vector<RatFunc> local_coeffs(const Poly& p, Var v, const Point& pt, std::int32_t& shift) {
    auto cs = p.coeffs(v);
    std::vector<RatFunc> out;
    if (pt.is_infinity()) {
        shift = -static_cast<std::int32_t>(cs.size()) + 1;
        for (std::size_t k = cs.size(); k-- > 0;) out.push_back(RatFunc(cs[k]));
        return out;
    }
    shift = 0;
    const RatFunc& a = *pt.value;
    // Taylor shift by Horner on coefficient vectors
    std::size_t n = cs.size();
    std::vector<RatFunc> r(n);
    for (std::size_t k = n; k-- > 0;) {
        // r <- r * (a + t) + cs[k]
        std::vector<RatFunc> nr(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (r[i].is_zero()) continue;
            nr[i] += r[i] * a;
            if (i + 1 < n) nr[i + 1] += r[i];
        }
        nr[0] += RatFunc(cs[k]);
        r = std::move(nr);
    }
    return r;
}

inline LaurentSeries poly_series(const Poly& p, Var v, const Point& pt, std::int32_t rel_terms) {
    std::int32_t shift = 0;
    auto cs = local_coeffs(p, v, pt, shift);
    std::size_t first = 0;
    while (first < cs.size() && cs[first].is_zero()) ++first;
    if (first == cs.size()) throw std::domain_error("expanding the zero polynomial as a denominator");
    std::int32_t val = shift + static_cast<std::int32_t>(first);
    std::vector<RatFunc> c;
    for (std::size_t i = first; i < cs.size() && static_cast<std::int32_t>(c.size()) < rel_terms; ++i) c.push_back(cs[i]);
    // polynomial: exact beyond its degree
    return LaurentSeries(val, val + rel_terms, std::move(c));
}

}  // namespace detail

namespace detail {

inline std::int32_t poly_order(const Poly& p, Var v, const Point& pt) {
    std::int32_t shift = 0;
    auto cs = local_coeffs(p, v, pt, shift);
    std::size_t i = 0;
    while (cs[i].is_zero()) ++i;
    return shift + static_cast<std::int32_t>(i);
}

}  // namespace detail

// ord_pt(f) in the local coordinate (v - pt, or 1/v at infinity)
inline std::int32_t order_at(const RatFunc& f, Var v, const Point& pt) {
    if (f.is_zero()) throw std::domain_error("order of the zero function");
    std::int32_t val = detail::poly_order(f.num(), v, pt);
    for (auto& fac : f.den_factors())
        if (fac.p.has_var(v)) val -= fac.e * detail::poly_order(fac.p, v, pt);
    return val;
}

// Laurent expansion of f in variable v at pt, valid for exponents <= through.
// At infinity the local coordinate is t = 1/v.
inline LaurentSeries laurent_expand(const RatFunc& f, Var v, const Point& pt, std::int32_t through) {
    if (f.is_zero()) return LaurentSeries(through + 1, through + 1, {});
    std::int32_t val = order_at(f, v, pt);
    std::int32_t rel = std::max(1, through + 1 - val);
    RatFunc constant_part(1);
    std::vector<const detail::Factor*> dep;
    for (auto& fac : f.den_factors()) {
        if (fac.p.has_var(v)) dep.push_back(&fac);
        else constant_part *= RatFunc(fac.p).pow(-fac.e);
    }
    LaurentSeries s = detail::poly_series(f.num(), v, pt, rel) * constant_part;
    for (auto* fac : dep) {
        LaurentSeries d = detail::poly_series(fac->p, v, pt, rel).inverse();
        for (std::int32_t k = 0; k < fac->e; ++k) s = s * d;
    }
    return s.truncated(through + 1);
}

// Res_{v=pt} f dv
inline RatFunc residue(const RatFunc& f, Var v, const Point& pt) {
    if (pt.is_infinity()) {
        // f(1/t) d(1/t) = -f(1/t) t^{-2} dt
        return -laurent_expand(f, v, pt, 1).coeff(1);
    }
    return laurent_expand(f, v, pt, -1).coeff(-1);
}

}  // namespace qc
