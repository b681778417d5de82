#include <gtest/gtest.h>

#include <random>

#include "qc/elliptic/elliptic_dictionary.hpp"

using namespace qc::elliptic;

namespace {

const cplx I1{0, 1};
const cplx rho = std::exp(two_pi_i / real(3));

// Direct lattice sum over the square |m|,|n| <= N.
cplx lattice_sum(int k, cplx tau, int N) {
    CompensatedSum s;
    for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n)
            if (m || n) s.add(real(1) / std::pow(cplx(m) + real(n) * tau, k));
    return s.value();
}

// Lattice sum by rows |n| <= N, each row summed over all m in closed form:
// sum_m (z+m)^-4 = pi^4 (c^4 - 2c^2/3), sum_m (z+m)^-6 = pi^6 (c^6 - c^4 + 2c^2/15), c = csc(pi z).
cplx row_lattice_sum(int k, cplx tau, int N) {
    CompensatedSum s;
    s.add(k == 4 ? 2 * std::pow(pi, 4) / 90 : 2 * std::pow(pi, 6) / 945);
    for (int n = -N; n <= N; ++n) {
        if (!n) continue;
        cplx c2 = real(1) / std::pow(std::sin(pi * real(n) * tau), 2);
        if (k == 4)
            s.add(std::pow(pi, 4) * (c2 * c2 - real(2) / 3 * c2));
        else
            s.add(std::pow(pi, 6) * (c2 * c2 * c2 - c2 * c2 + real(2) / 15 * c2));
    }
    return s.value();
}

// Weierstrass p' from row sums of pi^2 csc^2(pi(z + n tau)).
cplx wp_prime(cplx z, cplx tau, int rows = 40) {
    CompensatedSum s;
    for (int n = -rows; n <= rows; ++n) {
        cplx w = pi * (z + real(n) * tau);
        cplx sn = std::sin(w);
        s.add(real(-2) * pi * pi * pi * std::cos(w) / (sn * sn * sn));
    }
    return s.value();
}

// Integral of y dx = (nu^5/2) p'(z)^2 dz along z0 -> z0 + period (trapezoid rule, periodic integrand).
cplx period(cplx nu, cplx tau, cplx z0, cplx per, int M = 2000) {
    CompensatedSum s;
    for (int j = 0; j < M; ++j) {
        cplx wp = wp_prime(z0 + per * (real(j) / M), tau);
        s.add(wp * wp);
    }
    return std::pow(nu, 5) / real(2) * s.value() * per / real(M);
}

std::vector<std::pair<cplx, cplx>> samples() {
    std::mt19937 gen(20261017);
    std::uniform_real_distribution<double> a(-0.5, 0.5), b(0.8, 1.6), c(0.6, 1.4);
    std::vector<std::pair<cplx, cplx>> out;
    for (int i = 0; i < 3; ++i) {
        cplx nu(c(gen), a(gen));
        cplx tau(a(gen), b(gen));
        out.push_back({nu, tau});
    }
    return out;
}

}  // namespace

TEST(Eisenstein, SymmetryZeros) {
    EXPECT_LT(std::abs(eisenstein(6, I1, 64).value), 1e-10);
    EXPECT_LT(std::abs(eisenstein(4, rho, 64).value), 1e-10);
}

TEST(Eisenstein, SquareLatticeG4) {
    real closed = std::pow(std::tgamma(0.25L), 8) / (960 * pi * pi);
    auto g4 = eisenstein(4, I1, 64);
    EXPECT_LT(std::abs(g4.value - closed), 1e-15);
    // Square truncation converges only like N^-2.
    EXPECT_LT(std::abs(lattice_sum(4, I1, 200) - g4.value), 1e-4);
    EXPECT_LT(std::abs(row_lattice_sum(4, I1, 200) - g4.value), 1e-10);
}

TEST(Eisenstein, LatticeOracleGeneric) {
    cplx tau(0.31L, 1.17L);
    for (int k : {4, 6}) {
        EXPECT_LT(std::abs(row_lattice_sum(k, tau, 200) - eisenstein(k, tau, 64).value), 1e-10) << k;
    }
}

TEST(Eisenstein, TailBoundHonest) {
    cplx tau(0.2L, 0.35L);
    for (int k : {2, 4, 6}) {
        auto a = eisenstein(k, tau, 20), b = eisenstein(k, tau, 40);
        EXPECT_LE(std::abs(a.value - b.value), a.tail_bound) << k;
        auto da = eisenstein_derivative(k, tau, 20), db = eisenstein_derivative(k, tau, 40);
        EXPECT_LE(std::abs(da.value - db.value), da.tail_bound) << k;
    }
}

TEST(Eisenstein, DerivativeMatchesDifference) {
    cplx tau(-0.1L, 0.9L);
    real h = 1e-5L;
    cplx fd = (eisenstein(4, tau + h, 200).value - eisenstein(4, tau - h, 200).value) / (2 * h);
    EXPECT_LT(std::abs(fd - eisenstein_derivative(4, tau, 200).value) / std::abs(fd), 1e-8);
}

TEST(Eisenstein, Errors) {
    EXPECT_THROW(eisenstein(4, cplx(0.3L, 0), 10), std::domain_error);
    EXPECT_THROW(eisenstein(4, cplx(0.3L, -1), 10), std::domain_error);
    EXPECT_THROW(eisenstein(8, I1, 10), std::invalid_argument);
    EXPECT_THROW(eisenstein(4, I1, 0), std::invalid_argument);
}

TEST(Dictionary, PeriodsMatchContourIntegrals) {
    for (auto [nu, tau] : samples()) {
        auto p = dictionary(nu, tau);
        // Cycle orientation: A runs z -> z - 1, B runs z -> z - tau.
        cplx epsA = -period(nu, tau, tau / real(2), 1) / two_pi_i;
        cplx intB = -period(nu, tau, cplx(0.5L), tau);
        EXPECT_LT(std::abs(epsA - p.eps) / std::abs(p.eps), 1e-12);
        EXPECT_LT(std::abs(intB - p.I) / std::abs(p.I), 1e-12);
    }
}

TEST(Dictionary, PrepotentialRelation) {
    for (auto [nu, tau] : samples()) {
        auto r = prepotential_check(nu, tau, DerivConvention::Tau, PeriodFormula::Legendre);
        EXPECT_TRUE(r.pass) << r.rel_error;
        EXPECT_LT(r.rel_error, 1e-9);
    }
}

TEST(Dictionary, ConventionSelection) {
    auto [nu, tau] = samples()[0];
    auto rep = select_convention(nu, tau);
    ASSERT_TRUE(rep.found);
    EXPECT_EQ(rep.conv, DerivConvention::Tau);
    EXPECT_EQ(rep.formula, PeriodFormula::Legendre);
    for (auto& e : rep.entries)
        if (e.formula == PeriodFormula::FourFifths) {
            EXPECT_GT(e.rel_error, 1e-2);
        }
}

TEST(Dictionary, DegenerateLimit) {
    cplx nu(0.8L, 0.1L);
    cplx u = -nu * nu * pi * pi / real(3);
    for (real T : {4.0L, 6.0L}) {
        auto p = dictionary(nu, cplx(0.2L, T));
        EXPECT_LT(std::abs(p.t - real(-3) * u * u) / std::abs(p.t), 1e-4);
        EXPECT_LT(std::abs(p.V - real(2) * u * u * u) / std::abs(p.V), 1e-4);
        cplx f = real(-12) / 5 * std::pow(u, 5);
        EXPECT_LT(std::abs(p.F0 - f) / std::abs(f), 1e-4);
    }
}

TEST(Dictionary, FreeEnergyGenusOne) {
    auto p = dictionary(cplx(1.1L, 0.2L), cplx(0.1L, 1.2L));
    cplx disc = real(4) * std::pow(p.t, 3) + real(27) * p.V * p.V;
    EXPECT_LT(std::abs(std::exp(real(48) * (p.F1 - std::log(real(2) / p.nu) / real(4))) - disc) / std::abs(disc),
                        1e-12);
    EXPECT_THROW(dictionary(cplx(0), I1), std::invalid_argument);
}
