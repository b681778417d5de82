#pragma once
// Weierstrass dictionary (nu, tau) -> (t, V, eps, I, F0, F1) evaluated through
// Eisenstein q-series.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qc::elliptic {

using real = long double;
using cplx = std::complex<real>;

inline constexpr real pi = std::numbers::pi_v<real>;
inline const cplx two_pi_i{0, 2 * pi};

// Neumaier compensated sum, componentwise.
class CompensatedSum {
public:
    void add(cplx v) {
        step(re_, cre_, v.real());
        step(im_, cim_, v.imag());
    }
    cplx value() const { return {re_ + cre_, im_ + cim_}; }

private:
    static void step(real& s, real& c, real x) {
        real t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    real re_ = 0, cre_ = 0, im_ = 0, cim_ = 0;
};

struct SeriesValue {
    cplx value;
    real tail_bound;  // rigorous bound on the dropped terms n > terms
    int terms;
};

namespace detail {

inline real sigma(int p, int n) {
    real s = 0;
    for (int d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        s += std::pow(real(d), p);
        int e = n / d;
        if (e != d) s += std::pow(real(e), p);
    }
    return s;
}

// Bound on sum_{n>N} n^p r^n, using sigma_{k-1}(n) <= n^k.
inline real power_tail(int p, real r, int N) {
    real n1 = N + 1;
    real rho = std::pow((n1 + 1) / n1, p) * r;
    if (rho >= 1) return std::numeric_limits<real>::infinity();
    return std::pow(n1, p) * std::pow(r, n1) / (1 - rho);
}

inline real factorial(int n) {
    real f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline cplx nome(cplx tau) {
    if (!(tau.imag() > 0)) throw std::domain_error("Im tau must be positive");
    return std::exp(two_pi_i * tau);
}

// Constant term 2 zeta(k) and q-coefficient c_k:
// G_k = 2 zeta(k) + c_k sum sigma_{k-1}(n) q^n.
inline void coefficients(int k, real& z, cplx& c) {
    switch (k) {
        case 2: z = pi * pi / 3; break;
        case 4: z = std::pow(pi, 4) / 45; break;
        case 6: z = 2 * std::pow(pi, 6) / 945; break;
        default: throw std::invalid_argument("eisenstein: k must be 2, 4 or 6");
    }
    c = real(2) * std::pow(two_pi_i, k) / factorial(k - 1);
}

inline SeriesValue q_series(int k, cplx tau, int N, int extra_power) {
    if (N < 1) throw std::invalid_argument("eisenstein: cutoff must be >= 1");
    real z;
    cplx c;
    coefficients(k, z, c);
    cplx q = nome(tau), qn = 1;
    CompensatedSum s;
    if (extra_power == 0) s.add(z);
    for (int n = 1; n <= N; ++n) {
        qn *= q;
        real w = sigma(k - 1, n) * (extra_power ? n : 1);
        s.add(c * (extra_power ? two_pi_i : cplx(1)) * w * qn);
    }
    real scale = std::abs(c) * (extra_power ? 2 * pi : 1);
    return {s.value(), scale * power_tail(k + extra_power, std::abs(q), N), N};
}

}  // namespace detail

inline SeriesValue eisenstein(int k, cplx tau, int N) {
    return detail::q_series(k, tau, N, 0);
}

// d/dtau of G_k.
inline SeriesValue eisenstein_derivative(int k, cplx tau, int N) {
    return detail::q_series(k, tau, N, 1);
}

// Smallest cutoff N = 8, 16, ... with sum_{n>N} n^7 |q|^n below rel.
inline int auto_cutoff(cplx tau, real rel = 1e-30L, int max_terms = 20000) {
    real r = std::abs(detail::nome(tau));
    for (int N = 8; N <= max_terms; N *= 2)
        if (detail::power_tail(7, r, N) < rel) return N;
    return max_terms;
}

// Derivative convention for G4' in eps: d/dtau, or q d/dq = (2 pi i)^{-1} d/dtau.
enum class DerivConvention { Tau, Q };
// B-period formula: I = 2 pi i tau eps + c nu t with c = -8 pi i / 5 (from the
// Legendre relation) or c = 4/5.
enum class PeriodFormula { Legendre, FourFifths };

inline std::string to_string(DerivConvention c) { return c == DerivConvention::Tau ? "d/dtau" : "q d/dq"; }
inline std::string to_string(PeriodFormula f) { return f == PeriodFormula::Legendre ? "legendre" : "4/5"; }

struct EllipticParams {
    cplx nu, tau;
    cplx G2, G4, G6, dG4;
    cplx t, V, eps, I, F0, F1;
    DerivConvention conv;
    PeriodFormula formula;
    real tail_bound;
    int terms;
};

inline EllipticParams dictionary(cplx nu, cplx tau, DerivConvention conv = DerivConvention::Tau,
                                                                  PeriodFormula formula = PeriodFormula::Legendre, int N = 0) {
    if (nu == cplx(0)) throw std::invalid_argument("nu must be nonzero");
    if (N <= 0) N = auto_cutoff(tau);
    EllipticParams p{};
    p.nu = nu;
    p.tau = tau;
    p.conv = conv;
    p.formula = formula;
    p.terms = N;
    auto g2 = eisenstein(2, tau, N), g4 = eisenstein(4, tau, N), g6 = eisenstein(6, tau, N);
    auto d4 = eisenstein_derivative(4, tau, N);
    p.tail_bound = std::max({g2.tail_bound, g4.tail_bound, g6.tail_bound, d4.tail_bound});
    p.G2 = g2.value;
    p.G4 = g4.value;
    p.G6 = g6.value;
    p.dG4 = conv == DerivConvention::Tau ? d4.value : d4.value / two_pi_i;
    cplx nu2 = nu * nu, nu4 = nu2 * nu2;
    p.t = real(-15) * nu4 * p.G4;
    p.V = real(-35) * nu4 * nu2 * p.G6;
    p.eps = real(3) * nu4 * nu * p.dG4;
    cplx c = formula == PeriodFormula::Legendre ? cplx(0, -8 * pi / 5) : cplx(real(4) / 5);
    p.I = two_pi_i * tau * p.eps + c * nu * p.t;
    p.F0 = real(2) / 5 * p.t * p.V + p.I * p.eps / real(2);
    cplx disc = real(4) * p.t * p.t * p.t + real(27) * p.V * p.V;
    real scale = std::abs(real(4) * p.t * p.t * p.t) + std::abs(real(27) * p.V * p.V);
    if (std::abs(disc) <= 1e-15L * scale) throw std::domain_error("F1 undefined: 4t^3 + 27V^2 = 0");
    p.F1 = std::log(disc) / real(48) + std::log(real(2) / nu) / real(4);
    return p;
}

// dF0 = V dt + I deps, tested by solving the Jacobian system for (dF0/dt, dF0/deps)
// with Richardson-extrapolated central differences in nu and tau.
struct PrepotentialCheck {
    cplx dF0_dt, dF0_deps, V, I;
    real rel_error;
    bool pass;
};

namespace detail {

template <class F>
cplx richardson(F f, cplx x, real h) {
    auto d = [&](real s) { return (f(x + s) - f(x - s)) / (2 * s); };
    cplx d1 = d(h), d2 = d(h / 2);
    return (real(4) * d2 - d1) / real(3);
}

}  // namespace detail

inline PrepotentialCheck prepotential_check(cplx nu, cplx tau, DerivConvention conv,
                                                                                        PeriodFormula formula, real h = 1e-4L, real tol = 1e-6L) {
    auto at = [&](cplx n, cplx t) { return dictionary(n, t, conv, formula); };
    auto comp = [&](auto field) {
        auto fnu = [&](cplx n) { return field(at(n, tau)); };
        auto ftau = [&](cplx t) { return field(at(nu, t)); };
        return std::pair{detail::richardson(fnu, nu, h), detail::richardson(ftau, tau, h)};
    };
    auto [t_nu, t_tau] = comp([](const EllipticParams& p) { return p.t; });
    auto [e_nu, e_tau] = comp([](const EllipticParams& p) { return p.eps; });
    auto [f_nu, f_tau] = comp([](const EllipticParams& p) { return p.F0; });
    cplx det = t_nu * e_tau - t_tau * e_nu;
    if (std::abs(det) == 0) throw std::domain_error("(t, eps) Jacobian is singular");
    PrepotentialCheck r{};
    r.dF0_dt = (f_nu * e_tau - f_tau * e_nu) / det;
    r.dF0_deps = (t_nu * f_tau - t_tau * f_nu) / det;
    auto p = at(nu, tau);
    r.V = p.V;
    r.I = p.I;
    r.rel_error = std::max(std::abs(r.dF0_dt - p.V) / std::abs(p.V), std::abs(r.dF0_deps - p.I) / std::abs(p.I));
    r.pass = r.rel_error < tol;
    return r;
}

struct ConventionReport {
    struct Entry {
        DerivConvention conv;
        PeriodFormula formula;
        real rel_error;
    };
    std::vector<Entry> entries;
    bool found;
    DerivConvention conv;
    PeriodFormula formula;
};

// Runs the prepotential check for every combination and selects the first that passes.
inline ConventionReport select_convention(cplx nu, cplx tau, real tol = 1e-6L) {
    ConventionReport rep{};
    for (auto f : {PeriodFormula::FourFifths, PeriodFormula::Legendre})
        for (auto c : {DerivConvention::Tau, DerivConvention::Q}) {
            auto r = prepotential_check(nu, tau, c, f, 1e-4L, tol);
            rep.entries.push_back({c, f, r.rel_error});
            if (r.pass && !rep.found) {
                rep.found = true;
                rep.conv = c;
                rep.formula = f;
            }
        }
    return rep;
}

}  // namespace qc::elliptic
