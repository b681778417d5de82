#include <gtest/gtest.h>

#include "qc/curve/curve_file.hpp"

using namespace qc;

namespace {

SpectralCurve curve(const std::string& n) { return load_curve(std::string(QC_CURVE_DIR) + "/" + n + ".curve"); }
RatFunc P(const char* s) { return parse_expr(s); }
const Point inf = Point::infinity();

// Coefficients of (1 - 2u w)^(-1/2) and (1 - 2u w)^(1/2) by the binomial theorem.
RatFunc binom_half(long k, bool inverse) {
    Rat a = inverse ? Rat(-1, 2) : Rat(1, 2), c = 1;
    for (long i = 0; i < k; ++i) c = c * (a - i) / (i + 1);
    return RatFunc(c) * (RatFunc(-2) * RatFunc::variable("u")).pow(static_cast<std::int32_t>(k));
}

}  // namespace

TEST(Curve, ValidateAndR) {
    auto A = curve("airy");
    EXPECT_EQ(A.R, P("x"));
    auto PI = curve("painleve1");
    // R = x^3 + t x + V with t = -3u^2, V = 2u^3
    EXPECT_EQ(PI.R, P("x^3 - 3*u^2*x + 2*u^3"));
    EXPECT_THROW(validate_curve("bad", {}, P("z^2"), P("z^2")), CurveError);
    EXPECT_THROW(validate_curve("bad", {}, P("z^2 + z"), P("z")), CurveError);
    auto F = curve("finitepole");
    EXPECT_EQ(F.R, P("x/(x - s^2)^2"));
}

TEST(Curve, RamificationAndPoles) {
    for (auto n : {"airy", "painleve1", "finitepole"}) {
        auto C = curve(n);
        auto r = ramification_points(C);
        ASSERT_EQ(r.size(), 2u);
        EXPECT_TRUE(r[0].value->is_zero());
        EXPECT_TRUE(r[1].is_infinity());
    }
    auto PI = curve("painleve1");
    ASSERT_EQ(PI.poles.size(), 1u);
    EXPECT_EQ(PI.poles[0].d, -2);
    EXPECT_EQ(PI.poles[0].m, 5);
    auto F = curve("finitepole");
    ASSERT_EQ(F.poles.size(), 3u);
    EXPECT_EQ(F.pole_at(inf).m, 1);
    EXPECT_EQ(F.pole_at(Point::at(P("s"))).d, 1);
    EXPECT_EQ(F.pole_at(Point::at(P("s"))).m, 0);
    EXPECT_TRUE(F.pole_at(Point::at(P("s"))).plus);
    EXPECT_FALSE(F.pole_at(Point::at(P("-s"))).plus);
}

TEST(Curve, PainleveTimes) {
    auto C = curve("painleve1");
    EXPECT_EQ(kp_time(C, inf, 1), P("3*u^2"));
    EXPECT_EQ(kp_time(C, inf, 5), RatFunc(-2));
    for (int j : {0, 2, 3, 4, 6, 7}) EXPECT_TRUE(kp_time(C, inf, j).is_zero()) << j;
    EXPECT_EQ(second_kind_period(C, C.ydx(), inf, 1), P("-2*u^3"));
    EXPECT_EQ(second_kind_period(C, C.ydx(), inf, 5), P("-(3/5)*u^5"));
}

TEST(Curve, TimesAgainstBinomialOracle) {
    // xi = x^(-1/2) = sum_k b_k z^(-2k-1); t_j = -[z^-1 coefficient of xi^j y x'] in the t = 1/z chart sign
    auto C = curve("painleve1");
    RatFunc Z = RatFunc::variable("z");
    RatFunc xi;
    for (long k = 0; k <= 6; ++k) xi += binom_half(k, true) * Z.pow(static_cast<std::int32_t>(-2 * k - 1));
    RatFunc f = C.ydx();
    for (std::int32_t j = 0; j <= 5; ++j) {
        RatFunc prod = xi.pow(j) * f;
        // coefficient of z^-1 among terms of degree >= -1 is exact once truncation exceeds the pole order
        auto s = laurent_expand(prod, var("z"), inf, 1);
        EXPECT_EQ(kp_time(C, inf, j), -s.coeff(1)) << j;
    }
    RatFunc xinv;  // x^(1/2)
    for (long k = 0; k <= 6; ++k) xinv += binom_half(k, false) * Z.pow(static_cast<std::int32_t>(1 - 2 * k));
    auto s = laurent_expand(xinv * f, var("z"), inf, 1);
    EXPECT_EQ(second_kind_period(C, f, inf, 1), -s.coeff(1));
}

TEST(Curve, AiryValues) {
    auto C = curve("airy");
    EXPECT_EQ(C.ydx(), P("2*z^2"));
    EXPECT_EQ(kp_time(C, inf, 3), RatFunc(-2));
    EXPECT_TRUE(kp_time(C, inf, 1).is_zero());
    EXPECT_TRUE(second_kind_period(C, C.ydx(), inf, 1).is_zero());
    EXPECT_THROW(kp_time(C, Point::at(RatFunc(1)), 0), CurveError);
}

TEST(Curve, FinitePoleTimesAntisymmetric) {
    auto C = curve("finitepole");
    for (auto& P0 : C.poles) {
        if (P0.loc.is_infinity()) continue;
        for (int j = 0; j <= P0.m + 1; ++j)
            EXPECT_EQ(kp_time(C, C.poles[P0.partner].loc, j), -kp_time(C, P0.loc, j));
    }
    EXPECT_EQ(kp_time(C, Point::at(P("s")), 0), P("s"));
    EXPECT_EQ(kp_time(C, Point::at(P("-s")), 0), P("-s"));
}

TEST(Curve, SingularPartReconstruction) {
    for (auto n : {"airy", "painleve1", "finitepole"}) {
        auto C = curve(n);
        for (auto& Pd : C.poles) {
            // sum_j t_j xi^(-j-1) dxi versus y dx in the chart, orders -m-1 .. -1
            auto xi = xi_series(C, Pd, Pd.m + 3);
            auto dxi = xi.derivative();
            auto w = chart_form_series(C, C.ydx(), Pd.loc, -1);
            LaurentSeries acc = LaurentSeries(0, Pd.m + 2, {});
            for (std::int32_t j = 0; j <= Pd.m; ++j) {
                auto term = xi.pow(Rat(-j - 1)) * dxi * kp_time(C, Pd.loc, j);
                acc = acc + term.truncated(0);
            }
            for (std::int32_t k = -Pd.m - 1; k <= -1; ++k) EXPECT_EQ(acc.coeff(k), w.coeff(k)) << n << " " << k;
        }
    }
}

TEST(Curve, PeriodsOfExactForms) {
    auto C = curve("painleve1");
    Var z = var("z");
    RatFunc f = P("z^5 - u*z^3 + 1/z^3 + z");
    for (std::int32_t k = 1; k <= 6; ++k) {
        RatFunc lhs = second_kind_period(C, f.derivative(z), inf, k);
        // -Res f d(xi^-k/k), with xi^-k expanded in the chart
        const auto& Pd = C.pole_at(inf);
        auto xik = xi_series(C, Pd, 12).pow(Rat(-k));
        auto dxik = xik.derivative() * RatFunc(Rat(1, k));
        auto fs = chart_function_series(C, f, inf, 8);
        RatFunc rhs = -(fs * dxik).coeff(-1);
        EXPECT_EQ(lhs, rhs) << k;
    }
}

TEST(Curve, FreeEnergyPainleve) {
    auto C = curve("painleve1");
    RatFunc F0;
    for (int k : {1, 5}) F0 += kp_time(C, inf, k) * second_kind_period(C, C.ydx(), inf, k);
    F0 = F0 * RatFunc(Rat(1, 2));
    EXPECT_EQ(F0, P("-(12/5)*u^5"));
}

TEST(CurveFile, ParseErrors) {
    EXPECT_THROW(curve_from_string("[curve]\nx = \"z^2\"\n"), CurveError);
    EXPECT_THROW(curve_from_string("x = 1\n"), CurveError);
    EXPECT_THROW(curve_from_string("[curve]\nx = \"z^2\"\ny=\"z\"\n[times]\nt = \"u\"\ndt/du = \"2\"\n"), CurveError);
    EXPECT_THROW(curve_from_string("[curve]\nx = \"z^2\"\ny=\"q*z\"\n"), CurveError);
}
