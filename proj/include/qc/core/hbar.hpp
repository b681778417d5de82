#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qc/core/ratfunc.hpp"

namespace qc {

// Truncated series sum_{m=m0}^{K} h^m c_m.
template <class T>
class HbarSeries {
public:
    HbarSeries(std::int32_t m0 = 0, std::int32_t K = 0) : m0_(m0), K_(K), c_(static_cast<std::size_t>(std::max(0, K - m0 + 1))) {}

    std::int32_t m0() const { return m0_; }
    std::int32_t K() const { return K_; }

    const T& operator[](std::int32_t m) const {
        static const T zero{};
        if (m > K_) throw std::out_of_range("hbar order beyond truncation");
        if (m < m0_) return zero;
        return c_[static_cast<std::size_t>(m - m0_)];
    }
    T& at(std::int32_t m) {
        if (m < m0_ || m > K_) throw std::out_of_range("hbar order outside storage");
        return c_[static_cast<std::size_t>(m - m0_)];
    }

    friend HbarSeries operator+(const HbarSeries& a, const HbarSeries& b) {
        HbarSeries r(std::min(a.m0_, b.m0_), std::min(a.K_, b.K_));
        for (std::int32_t m = r.m0_; m <= r.K_; ++m) r.at(m) = a[m] + b[m];
        return r;
    }
    friend HbarSeries operator-(const HbarSeries& a, const HbarSeries& b) {
        HbarSeries r(std::min(a.m0_, b.m0_), std::min(a.K_, b.K_));
        for (std::int32_t m = r.m0_; m <= r.K_; ++m) r.at(m) = a[m] - b[m];
        return r;
    }
    // product valid through min(a.m0 + b.K, b.m0 + a.K)
    friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b) {
        HbarSeries r(a.m0_ + b.m0_, std::min(a.m0_ + b.K_, b.m0_ + a.K_));
        for (std::int32_t i = a.m0_; i <= a.K_; ++i)
            for (std::int32_t j = b.m0_; j <= b.K_ && i + j <= r.K_; ++j) r.at(i + j) += a[i] * b[j];
        return r;
    }

    HbarSeries map(const std::function<T(const T&)>& f) const {
        HbarSeries r(m0_, K_);
        for (std::int32_t m = m0_; m <= K_; ++m) r.at(m) = f((*this)[m]);
        return r;
    }

    // exp of a series with vanishing h^{<=0} part
    HbarSeries exp() const {
        for (std::int32_t m = m0_; m <= std::min(0, K_); ++m)
            if (!is_zero_coeff((*this)[m])) throw std::domain_error("exp requires vanishing h^(<=0) part");
        HbarSeries r(0, K_);
        r.at(0) = T(1);
        HbarSeries term = r;
        for (std::int32_t k = 1; k <= K_; ++k) {
            term = term * (*this);
            term = term.scaled(Rat(1, static_cast<unsigned long>(k)));
            term = term.truncated(K_);
            r = r + term;
        }
        return r;
    }
    // log of 1 + X with X vanishing at h^{<=0}
    HbarSeries log1p_of_tail() const {
        HbarSeries x = *this;
        if (x.m0_ <= 0) x.at(0) = x[0] - T(1);
        for (std::int32_t m = x.m0_; m <= std::min(0, K_); ++m)
            if (!is_zero_coeff(x[m])) throw std::domain_error("log requires leading coefficient 1");
        HbarSeries r(1, K_), pw(0, K_);
        pw.at(0) = T(1);
        for (std::int32_t k = 1; k <= K_; ++k) {
            pw = (pw * x).truncated(K_);
            r = r + pw.scaled(Rat(k % 2 ? 1 : -1, static_cast<unsigned long>(k)));
        }
        return r;
    }

    HbarSeries scaled(const Rat& s) const {
        HbarSeries r = *this;
        for (auto& x : r.c_) x = x * T(s);
        return r;
    }
    HbarSeries truncated(std::int32_t K) const {
        HbarSeries r(m0_, std::min(K, K_));
        for (std::int32_t m = m0_; m <= r.K_; ++m) r.at(m) = (*this)[m];
        return r;
    }

private:
    static bool is_zero_coeff(const T& t) { return t.is_zero(); }
    std::int32_t m0_, K_;
    std::vector<T> c_;
};

}  // namespace qc
