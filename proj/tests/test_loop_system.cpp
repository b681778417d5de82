#include <gtest/gtest.h>

#include "qc/core/parse.hpp"
#include "qc/curve/curve_file.hpp"
#include "qc/loop/loop_system.hpp"

using namespace qc;

namespace {

SpectralCurve curve(const std::string& name) { return load_curve(std::string(QC_CURVE_DIR) + "/" + name + ".curve"); }

RatFunc P(const std::string& s) { return parse_expr(s); }

}  // namespace

TEST(LoopSystem, PgnExamples) {
    for (auto name : {"airy", "painleve1", "finitepole"}) {
        OmegaTable T(curve(name));
        EXPECT_EQ(pgn(T, 0, 0), T.curve().R) << name;
    }
    OmegaTable A(curve("airy"));
    for (int g = 0; g <= 2; ++g)
        for (int n = 0; 2 * g - 2 + n <= 2; ++n)
            if (!(g == 0 && n == 0)) {
                EXPECT_TRUE(pgn(A, g, n).is_zero()) << g << "," << n;
            }
    OmegaTable PI(curve("painleve1"));
    EXPECT_EQ(pgn(PI, 0, 0), P("x^3 - 3*u^2*x + 2*u^3"));
}

// P_{0,1} on Painleve I against an explicit chain-rule derivative of y(z1) x'(z1)
TEST(LoopSystem, PainleveP01ChainRule) {
    OmegaTable T(curve("painleve1"));
    Var u = var("u"), z1 = var("z1");
    RatFunc Z = RatFunc::variable(z1);
    RatFunc x1 = Z * Z - P("2*u"), y1 = Z * Z * Z - P("3*u") * Z, dx1 = RatFunc(2) * Z;
    // at fixed x1, z1 moves with dz1/du = -(dx1/du)/x1'
    RatFunc dz = RatFunc(-1) * x1.derivative(u) / dx1;
    RatFunc dy = y1.derivative(u) + y1.derivative(z1) * dz;
    RatFunc expected = RatFunc(-1) / P("6*u") * dy * dx1;
    EXPECT_EQ(pgn(T, 0, 1), expected);
}

TEST(LoopSystem, BuildL) {
    EXPECT_TRUE(build_L_bcycle(curve("airy")).empty());
    EXPECT_TRUE(build_L_times(curve("airy")).empty());
    auto C = curve("painleve1");
    auto Lb = build_L_bcycle(C), Lt = build_L_times(C);
    ASSERT_EQ(Lt.terms.size(), 1u);
    EXPECT_EQ(Lt.terms[0].d.kind, DerivKind::Time);
    EXPECT_EQ(Lt.terms[0].d.index, 1);
    EXPECT_EQ(Lt.terms[0].coef, RatFunc(-1));
    ASSERT_EQ(Lb.terms.size(), 1u);
    auto F = curve("finitepole");
    auto Lf = build_L_times(F);
    ASSERT_EQ(Lf.terms.size(), 1u);
    EXPECT_EQ(Lf.terms[0].d.kind, DerivKind::Lambda);
    EXPECT_EQ(Lf.terms[0].coef, RatFunc(1) / P("x - s^2"));
    // coefficient poles stay within the poles of R
    auto lambda = Point::at(P("s^2"));
    for (auto& t : build_L_bcycle(F).terms) EXPECT_GE(order_at(t.coef, xvar(), lambda), order_at(F.R, xvar(), lambda));
}

TEST(LoopSystem, PEqualsL) {
    for (auto name : {"airy", "painleve1", "finitepole"}) {
        OmegaTable T(curve(name));
        for (int g = 0; g <= 2; ++g)
            for (int n = 0; 2 * g - 2 + n <= 2; ++n) {
                auto r = check_P_equals_L(T, g, n);
                EXPECT_TRUE(r.pass) << name << " " << r.label << " " << r.witness.to_string();
            }
    }
}

TEST(LoopSystem, PainleveApplyL00) {
    OmegaTable T(curve("painleve1"));
    EXPECT_EQ(apply_L(T, build_L_bcycle(T.curve()), 0, 0), P("2*u^3"));
    EXPECT_EQ(singular_square(T.curve()), P("x^3 - 3*u^2*x"));
}

TEST(LoopSystem, FamilyDerivatives) {
    for (auto name : {"painleve1", "finitepole"}) {
        OmegaTable T(curve(name));
        for (auto [g, n] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 1}}) {
            auto r = family_derivative_check(T, g, n);
            EXPECT_TRUE(r.pass) << name << " " << r.label << " " << r.witness.to_string();
        }
    }
    OmegaTable A(curve("airy"));
    EXPECT_THROW(family_derivative_check(A, 0, 1), CurveError);
}

TEST(LoopSystem, PainleveFreeEnergyDerivative) {
    OmegaTable T(curve("painleve1"));
    auto F0 = prepotential_F0(T.curve());
    ASSERT_TRUE(F0.is_rational());
    EXPECT_EQ(F0.rational(), P("-12/5*u^5"));
    EXPECT_EQ(RatFunc(-1) / P("6*u") * F0.rational().derivative(var("u")), P("2*u^3"));
}

TEST(LoopSystem, PolePositionDerivative) {
    OmegaTable T(curve("finitepole"));
    std::size_t i = T.curve().pole_index(Point::at(P("s")));
    for (auto [g, n] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 1}, {0, 3}}) {
        auto r = lambda_derivative_check(T, i, g, n);
        EXPECT_TRUE(r.pass) << r.label << " " << r.witness.to_string();
    }
}

// hand integral: int_{-s}^{s} dz/(z - z1)^2 = -2s/(s^2 - z1^2)
TEST(LoopSystem, ThirdKindPeriod) {
    auto C = curve("finitepole");
    auto v = third_kind_period(C, OmegaTable::bergman(C.z, var("z1")), Point::at(P("s")));
    ASSERT_TRUE(v.is_rational());
    EXPECT_EQ(v.rational(), P("-2*s/(s^2 - z1^2)"));
    auto mu = third_kind_period(C, C.ydx(), Point::at(P("s")));
    EXPECT_FALSE(mu.is_rational());
    EXPECT_EQ(mu.rational(), P("4*s"));
    ASSERT_EQ(mu.atoms().size(), 2u);
    for (auto& a : mu.atoms()) EXPECT_EQ(a.coeff, P("-2*s"));
    // d/ds (4s - 2s log(2s) - 2s log(-2s)) has no rational part
    EXPECT_TRUE(mu.total_derivative(var("s")).rational().is_zero());
}
