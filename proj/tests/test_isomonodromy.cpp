#include <gtest/gtest.h>

#include <map>

#include "qc/core/parse.hpp"
#include "qc/curve/curve_file.hpp"
#include "qc/iso/wkb.hpp"
#include "qc/wave/wavefunction_pde.hpp"

using namespace qc;

namespace {

SpectralCurve curve(const std::string& name) { return load_curve(std::string(QC_CURVE_DIR) + "/" + name + ".curve"); }

RatFunc P(const std::string& s) { return parse_expr(s); }
DiffPoly D(const std::string& s) { return DiffPoly::parse(s); }

std::vector<Rat> unit_times(int m) {
    std::vector<Rat> tt(static_cast<std::size_t>(m + 1), Rat(0));
    tt.back() = 1;
    return tt;
}

// h-expansion of U = sum_k c_k h^{2k} u^{1-5k} substituted into (h^2/2) U'' - 3 U^2 - t with
// du/dt = -1/(6u) and t = -3u^2; returns coefficient of h^{2k} as a map exponent -> coefficient
using UPoly = std::map<int, Rat>;

UPoly ddt(const UPoly& f) {
    UPoly r;
    for (auto& [e, c] : f) {
        if (e == 0) continue;
        r[e - 2] += c * Rat(-e) / Rat(6);
    }
    return r;
}

UPoly mul(const UPoly& a, const UPoly& b) {
    UPoly r;
    for (auto& [e, c] : a)
        for (auto& [f, d] : b) r[e + f] += c * d;
    return r;
}

bool all_zero(const UPoly& f) {
    for (auto& [e, c] : f)
        if (c != 0) return false;
    return true;
}

}  // namespace

TEST(GelfandDikii, LowOrderPolynomials) {
    EXPECT_EQ(gd_R(0), D("2"));
    EXPECT_EQ(gd_R(1), D("-2*U"));
    EXPECT_EQ(gd_R(2), D("3*U^2 - (1/2)*h^2*U''"));
    EXPECT_EQ(gd_R(3), D("-5*U^3 + (5/2)*h^2*U*U'' + (5/4)*h^2*U'^2 - (1/8)*h^4*U''''"));
}

TEST(GelfandDikii, RecursionAndGrading) {
    for (int k = 0; k <= 4; ++k) EXPECT_TRUE(gd_recursion_residual(k).is_zero()) << k;
    for (int k = 0; k <= 5; ++k) {
        EXPECT_TRUE(hbar_grading_ok(gd_R(k))) << k;
        auto deg = doubled_degree(gd_R(k));
        ASSERT_TRUE(deg.has_value()) << k;
        EXPECT_EQ(*deg, 2 * k);
    }
}

// dispersionless part: (-1)^k binom(2k,k) / 2^{k-1} U^k
TEST(GelfandDikii, DispersionlessCoefficients) {
    Rat binom(1);
    for (int k = 1; k <= 5; ++k) {
        binom = binom * Rat((2 * k - 1) * (2 * k)) / Rat(k * k);
        Rat expect = binom / Rat(1L << (k - 1));
        if (k % 2) expect = -expect;
        Poly h0 = gd_R(k).p.eval(hvar(), Rat(0));
        EXPECT_EQ(h0, Poly::variable(uder(0), k) * expect) << k;
    }
}

TEST(GelfandDikii, DiffPolyRoundTrip) {
    for (int k = 0; k <= 4; ++k) EXPECT_EQ(DiffPoly::parse(gd_R(k).to_string()), gd_R(k));
    EXPECT_EQ(gd_R(2).to_string(), "3*U^2 - (1/2)*h^2*U''");
    EXPECT_EQ(gd_R(3).to_string(), "-5*U^3 + (5/2)*h^2*U*U'' + (5/4)*h^2*U'^2 - (1/8)*h^4*U''''");
    EXPECT_THROW(integrate_dt(D("U'^2")), std::domain_error);
    EXPECT_EQ(integrate_dt(D("2*U*U'")), D("U^2"));
}

TEST(StringEquation, Examples) {
    auto s0 = gd_string_equation(0, {Rat(1)});
    EXPECT_EQ(s0.lhs, D("-2*U - t"));
    EXPECT_EQ(s0.solved, D("-t/2"));
    auto s1 = gd_string_equation(1, {Rat(0), Rat(1)});
    EXPECT_EQ(s1.lhs, D("3*U^2 - (1/2)*h^2*U'' - t"));
    EXPECT_EQ(s1.top, 2);
    // the Painleve I form (h^2/2) U'' - 3U^2 = t is the opposite convention
    auto p1 = gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus);
    EXPECT_EQ(p1.lhs, D("3*U^2 - (1/2)*h^2*U'' + t"));
}

TEST(StringEquation, LeadingOrder) {
    EXPECT_EQ(RatFunc(u_leading(1, {Rat(0), Rat(1)})), P("(3/4)*u^2 + t/4"));
    EXPECT_EQ(RatFunc(u_leading(0, {Rat(1)})), P("-u/2 + t/4"));
    EXPECT_THROW(u_leading(1, {Rat(0), Rat(0)}), std::invalid_argument);
}

TEST(StringEquation, PainleveSeries) {
    auto c = painleve_u_series(3);
    EXPECT_EQ(c[0], Rat(1));
    EXPECT_EQ(c[1], Rat(-1, 432));
    EXPECT_EQ(c[2], Rat(-49, 373248));
    // substitute into (h^2/2) U'' - 3U^2 - t order by order
    std::vector<UPoly> U(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) U[k][1 - 5 * static_cast<int>(k)] = c[k];
    for (std::size_t order = 1; order < c.size(); ++order) {
        UPoly r;
        for (auto& [e, v] : ddt(ddt(U[order - 1]))) r[e] += v / Rat(2);
        for (std::size_t i = 0; i <= order; ++i)
            for (auto& [e, v] : mul(U[i], U[order - i])) r[e] -= Rat(3) * v;
        EXPECT_TRUE(all_zero(r)) << order;
    }
    auto bg = solve_background(gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus), 6);
    EXPECT_EQ(bg.t_of_u, P("-3*u^2"));
    EXPECT_EQ(bg.udot, P("-1/(6*u)"));
    for (std::size_t k = 0; k < bg.U.size(); ++k)
        EXPECT_EQ(bg.U[k], RatFunc(c[k]) * P("u").pow(1 - 5 * static_cast<int>(k))) << k;
}

TEST(Lax, AiryAndPainleve) {
    auto A = gd_lax(0, {Rat(1)});
    EXPECT_EQ(A.L.a, Poly());
    EXPECT_EQ(A.L.b, Poly(1L));
    auto s0 = gd_string_equation(0, {Rat(1)});
    EXPECT_EQ(RatFunc(reduce_mod(DiffPoly(A.L.c), s0).p), P("x - t"));
    EXPECT_EQ(gd_lax(1, {Rat(0), Rat(1)}).L.to_strings(), painleve_lax().L.to_strings());
    for (int m = 0; m <= 3; ++m) EXPECT_TRUE(gd_lax(m, unit_times(m)).L.trace().is_zero()) << m;
    Matrix2 L = gd_lax(2, unit_times(2)).L;
    for (auto* e : {&L.a, &L.b, &L.c, &L.d}) EXPECT_TRUE(hbar_grading_ok(*e));
}

TEST(Lax, ZeroCurvature) {
    for (int m = 0; m <= 2; ++m)
        for (auto conv : {LaxConvention::Minus, LaxConvention::Plus}) {
            auto Z = zero_curvature_residual(gd_lax(m, unit_times(m), conv), gd_string_equation(m, unit_times(m), conv), 4);
            EXPECT_TRUE(Z.is_zero()) << m << " " << to_string(conv);
        }
    // a mismatched string equation leaves a residual
    auto Z = zero_curvature_residual(gd_lax(1, {Rat(0), Rat(1)}), gd_string_equation(1, {Rat(0), Rat(2)}), 4);
    EXPECT_FALSE(Z.is_zero());
    EXPECT_THROW(zero_curvature_residual(gd_lax(1, {Rat(0), Rat(1)}), gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus), 4),
                 std::invalid_argument);
}

TEST(QuantumCurve, PainleveOperator) {
    auto q = quantum_curve_op(painleve_lax());
    EXPECT_EQ(q.c1, P("-h/(x - U)"));
    EXPECT_EQ(q.c0, P("-((x - U)^2*(x + 2*U) + (h^2/2)*U_2*(x - U) + (h^2/4)*U_1^2) + h^2*U_1/(2*(x - U))"));
    EXPECT_EQ(q.c0.subs(hvar(), RatFunc(0L)), P("-(x - U)^2*(x + 2*U)"));
    auto a = quantum_curve_op(gd_lax(0, {Rat(1)}));
    EXPECT_TRUE(a.c1.is_zero());
    EXPECT_EQ(a.c0, P("-(x + 2*U)"));
    LaxPair bad = painleve_lax();
    bad.L.b = Poly();
    EXPECT_THROW(quantum_curve_op(bad), std::domain_error);
}

TEST(Wkb, PainleveSolution) {
    const int K = 4;
    auto P1 = painleve_lax();
    auto bg = solve_background(gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus), K + 1);
    auto W = wkb_solve(P1, bg, K);
    EXPECT_EQ(W.w[0], W.chart.y);
    EXPECT_EQ(W.S0.rational(), P("(2/5)*z^5 - 2*u*z^3"));
    EXPECT_EQ(W.S1.derivative(var("z")), P("-1/(2*z)"));
    EXPECT_TRUE(W.det_leading_constant);
    EXPECT_EQ(W.det_ratio[0], RatFunc(1L));
    for (int k = 1; k <= K; ++k) EXPECT_TRUE(W.det_ratio[k].is_zero()) << k;
    auto r = quantum_curve_residual(W);
    for (int k = 0; k <= K; ++k) EXPECT_TRUE(r[k].is_zero()) << k;
    // corrections vanish at z = infinity
    for (int k = 1; k <= K; ++k) EXPECT_LT(W.a[k].num().degree(var("z")), W.a[k].den().degree(var("z")));
    EXPECT_THROW(wkb_solve(P1, bg, K + 1), std::invalid_argument);
}

TEST(Wkb, AiryMatchesQuantumLimit) {
    const int K = 4;
    auto bg = solve_background(gd_string_equation(0, {Rat(1)}, LaxConvention::Plus), K + 1);
    auto W = wkb_solve(gd_lax(0, {Rat(1)}, LaxConvention::Plus), bg, K);
    OmegaTable T(curve("airy"));
    auto q = quantum_limit(T, K);
    for (int k = 0; k <= K; ++k) EXPECT_EQ(W.a[k].subs(uvar(), RatFunc(0L)), q.series[k]) << k;
}

TEST(IntegrableKernel, DeterminantIdentity) {
    OmegaTable T(curve("painleve1"));
    auto bg = solve_background(gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus), 4);
    auto res = det_identity_check(painleve_lax(), bg, T, 4);
    ASSERT_EQ(res.size(), 5u);
    for (auto& r : res) EXPECT_TRUE(r.pass) << r.label << " " << r.witness.to_string();
    EXPECT_EQ(apply_L(T, build_L_bcycle(T.curve()), 1, 0), P("1/(144*u^2)"));
    EXPECT_EQ(res[2].detail, "-det L = " + P("1/(144*u^2)").to_string());
}

TEST(IntegrableKernel, KernelPde) {
    const int K = 2;
    OmegaTable T(curve("painleve1"));
    auto P1 = painleve_lax();
    auto bg = solve_background(gd_string_equation(1, {Rat(0), Rat(1)}, LaxConvention::Plus), K + 1);
    auto W = wkb_solve(P1, bg, K);
    for (auto& r : kernel_pde_check(P1, bg, W, T, K)) EXPECT_TRUE(r.pass) << r.label << " " << r.witness.to_string();
    // without the deformation operator the check must fail
    OmegaTable TA(curve("airy"));
    auto wrong = kernel_pde_check(P1, bg, W, TA, K);
    EXPECT_TRUE(wrong[0].pass);
    EXPECT_FALSE(wrong[1].pass && wrong[2].pass);

    auto bgA = solve_background(gd_string_equation(0, {Rat(1)}, LaxConvention::Plus), 5);
    auto PA = gd_lax(0, {Rat(1)}, LaxConvention::Plus);
    auto WA = wkb_solve(PA, bgA, 4);
    for (auto& r : kernel_pde_check(PA, bgA, WA, TA, 4)) EXPECT_TRUE(r.pass) << r.label;
}
