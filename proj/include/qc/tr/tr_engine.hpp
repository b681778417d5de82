#pragma once

#include <memory>
#include <mutex>
#include <shared_mutex>

#include "qc/curve/spectral_curve.hpp"
#include "qc/tr/lpoly.hpp"

namespace qc {

inline Var zvar(std::int32_t i) { return var("z" + std::to_string(i)); }
inline std::vector<Var> zvars(std::int32_t n, std::int32_t first = 1) {
    std::vector<Var> v;
    for (std::int32_t i = 0; i < n; ++i) v.push_back(zvar(first + i));
    return v;
}

struct MultiDifferential {
    std::int32_t g = 0, n = 0;
    LPoly density;  // in slots z1..zn, stable (g,n) only
    RatFunc as_ratfunc(const std::vector<Var>& vars) const { return density.to_ratfunc(vars); }
};

// Topological recursion with residues at z = 0, memoized per curve.
class OmegaTable {
public:
    explicit OmegaTable(SpectralCurve C) : C_(std::move(C)) {
        RatFunc S = RatFunc(1) / (RatFunc(4) * C_.y * C_.dx());
        S_ = S;
        s_low_ = order_at(S, C_.z, Point::at(RatFunc()));
    }

    const SpectralCurve& curve() const { return C_; }

    static RatFunc bergman(Var a, Var b) {
        return (RatFunc::variable(a) - RatFunc::variable(b)).pow(-2);
    }

    // Density of omega_{g,n} in z1..zn, including the unstable cases (0,1) and (0,2).
    RatFunc omega_ratfunc(std::int32_t g, std::int32_t n) {
        if (g == 0 && n == 1) return C_.ydx().subs(C_.z, RatFunc::variable(zvar(1)));
        if (g == 0 && n == 2) return bergman(zvar(1), zvar(2));
        return omega(g, n).as_ratfunc(zvars(n));
    }

    const MultiDifferential& omega(std::int32_t g, std::int32_t n) {
        if (g < 0 || n < 1 || 2 * g - 2 + n <= 0) throw std::invalid_argument("omega(g,n) requires 2g-2+n > 0 and n >= 1");
        {
            std::shared_lock lk(mu_);
            auto it = memo_.find({g, n});
            if (it != memo_.end()) return *it->second;
        }
        auto md = std::make_unique<MultiDifferential>(compute(g, n));
        std::unique_lock lk(mu_);
        auto [it, fresh] = memo_.emplace(std::make_pair(g, n), std::move(md));
        return *it->second;
    }

    std::size_t memo_size() const {
        std::shared_lock lk(mu_);
        return memo_.size();
    }

    // Coefficients of 1/(4 y x') at z = 0 for powers s_low .. through
    RatFunc kernel_denominator_coeff(std::int32_t j) {
        std::unique_lock lk(series_mu_);
        if (j > s_through_) {
            s_through_ = std::max(j, s_through_ + 8);
            s_series_ = laurent_expand(S_, C_.z, Point::at(RatFunc()), s_through_);
        }
        return s_series_.coeff(j);
    }

    // Series in the integration variable: slot 0 is its power, slots 1.. are J.
    using Series = LPoly;

    // stable omega_{h,1+|I|}(s z, I) with sign s and pullback sign, truncated to z-power <= top
    Series stable_factor(std::int32_t h, const std::vector<std::int32_t>& I, std::int32_t n, bool sigma) {
        const auto& w = omega(h, 1 + static_cast<std::int32_t>(I.size()));
        Series r(n + 1);
        for (auto& [e, c] : w.density.terms()) {
            Exps f(static_cast<std::size_t>(n + 1), 0);
            f[0] = e[0];
            for (std::size_t k = 0; k < I.size(); ++k) f[static_cast<std::size_t>(I[k])] = e[k + 1];
            // density at sigma z: -f(-z)
            bool neg = sigma && (e[0] % 2 == 0);
            r.add(f, neg ? -c : c);
        }
        return r;
    }

    // 1/(z - z_i)^2 or, with sigma, -1/(z + z_i)^2, through z^top
    Series bergman_factor(std::int32_t i, std::int32_t n, bool sigma, std::int32_t top) {
        Series r(n + 1);
        for (std::int32_t k = 0; k <= top; ++k) {
            Exps f(static_cast<std::size_t>(n + 1), 0);
            f[0] = k;
            f[static_cast<std::size_t>(i)] = -k - 2;
            long c = k + 1;
            if (sigma) c = (k % 2 == 0) ? -c : c;
            r.add(f, RatFunc(c));
        }
        return r;
    }

    static Series multiply(const Series& a, const Series& b, std::int32_t top) {
        Series r(a.nvars());
        for (auto& [ea, ca] : a.terms())
            for (auto& [eb, cb] : b.terms()) {
                if (ea[0] + eb[0] > top) continue;
                Exps f(ea.size());
                for (std::size_t k = 0; k < f.size(); ++k) f[k] = ea[k] + eb[k];
                r.add(f, ca * cb);
            }
        return r;
    }

    // factor for omega_{h,1+|I|}(z or sigma z, I) truncated to z-power <= top
    Series factor(std::int32_t h, const std::vector<std::int32_t>& I, std::int32_t n, bool sigma, std::int32_t top) {
        if (h == 0 && I.size() == 1) return bergman_factor(I[0], n, sigma, top);
        return stable_factor(h, I, n, sigma);
    }

    std::int32_t factor_low(std::int32_t h, std::size_t nI) {
        if (h == 0 && nI == 1) return 0;
        return omega(h, 1 + static_cast<std::int32_t>(nI)).density.min_exp(0);
    }

private:
    MultiDifferential compute(std::int32_t g, std::int32_t n1) {
        std::int32_t n = n1 - 1;  // |J|
        Series Q(n + 1);
        // omega_{g-1,n+2}(z, sigma z, J)
        if (g >= 1) {
            if (g == 1 && n == 0) {
                Exps f{-2};
                Q.add(f, RatFunc(Rat(-1, 4)));
            } else {
                const auto& w = omega(g - 1, n + 2);
                for (auto& [e, c] : w.density.terms()) {
                    Exps f(static_cast<std::size_t>(n + 1), 0);
                    f[0] = e[0] + e[1];
                    for (std::int32_t k = 0; k < n; ++k) f[static_cast<std::size_t>(k + 1)] = e[static_cast<std::size_t>(k + 2)];
                    if (f[0] > 0) continue;
                    bool neg = (e[1] % 2 == 0);
                    Q.add(f, neg ? -c : c);
                }
            }
        }
        // stable splits, omega_{0,1} excluded
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::int32_t> I1, I2;
            for (std::int32_t k = 0; k < n; ++k) ((mask >> k) & 1u ? I1 : I2).push_back(k + 1);
            for (std::int32_t g1 = 0; g1 <= g; ++g1) {
                std::int32_t g2 = g - g1;
                if ((g1 == 0 && I1.empty()) || (g2 == 0 && I2.empty())) continue;
                std::int32_t l1 = factor_low(g1, I1.size()), l2 = factor_low(g2, I2.size());
                Series A = factor(g1, I1, n, false, -l2);
                Series B = factor(g2, I2, n, true, -l1);
                Q = Q + multiply(A, B, 0);
            }
        }
        // Res_z K(z0,z) Q(z) with K = 2 sum_{l odd} z^l z0^{-l-1} * sum_j s_j z^j
        MultiDifferential out;
        out.g = g;
        out.n = n1;
        out.density = LPoly(n1);
        std::int32_t qmin = Q.is_zero() ? 0 : Q.min_exp(0);
        std::map<std::int32_t, std::vector<const std::pair<const Exps, RatFunc>*>> by_power;
        for (auto& t : Q.terms()) by_power[t.first[0]].push_back(&t);
        for (std::int32_t q = qmin; q <= 0; ++q) {
            auto it = by_power.find(q);
            if (it == by_power.end()) continue;
            std::int32_t k = -1 - q;  // needed power of z in K
            // K_k(z0) = sum_{l odd, l + j = k} 2 s_j z0^{-l-1}
            for (std::int32_t l = 1; k - l >= s_low_; l += 2) {
                RatFunc s = kernel_denominator_coeff(k - l);
                if (s.is_zero()) continue;
                s = s * RatFunc(2);
                for (auto* t : it->second) {
                    Exps f(static_cast<std::size_t>(n1), 0);
                    f[0] = -l - 1;
                    for (std::int32_t m = 1; m <= n; ++m) f[static_cast<std::size_t>(m)] = t->first[static_cast<std::size_t>(m)];
                    out.density.add(f, s * t->second);
                }
            }
        }
        return out;
    }

    SpectralCurve C_;
    RatFunc S_;
    std::int32_t s_low_ = 0;
    std::int32_t s_through_ = -1000;
    LaurentSeries s_series_;
    std::mutex series_mu_;
    mutable std::shared_mutex mu_;
    std::map<std::pair<std::int32_t, std::int32_t>, std::unique_ptr<MultiDifferential>> memo_;
};

}  // namespace qc
