#include <gtest/gtest.h>

#include "qc/core/parse.hpp"
#include "qc/curve/curve_file.hpp"
#include "qc/wave/wavefunction_pde.hpp"

using namespace qc;

namespace {

SpectralCurve curve(const std::string& name) { return load_curve(std::string(QC_CURVE_DIR) + "/" + name + ".curve"); }

RatFunc P(const std::string& s) { return parse_expr(s); }

}  // namespace

TEST(Wavefunction, DivisorParsing) {
    auto D = Divisor::parse("z1 + z2 - z3 - z4");
    ASSERT_EQ(D.size(), 4u);
    EXPECT_EQ(D.weights, (std::vector<std::int32_t>{1, 1, -1, -1}));
    EXPECT_EQ(D.to_string(), "z1 + z2 - z3 - z4");
    EXPECT_EQ(Divisor::parse("2*a - b - c").weights, (std::vector<std::int32_t>{2, -1, -1}));
    auto C = curve("airy");
    EXPECT_THROW(validate_divisor(C, Divisor::parse("z1 - z2 - z3")), std::invalid_argument);
    EXPECT_THROW(validate_divisor(C, Divisor::parse("z1 - z1")), std::invalid_argument);
    EXPECT_THROW(validate_divisor(C, Divisor::parse("z - z2")), std::invalid_argument);
    EXPECT_THROW(Divisor::parse("z1 z2"), std::invalid_argument);
}

TEST(Wavefunction, AiryLowFunctions) {
    OmegaTable T(curve("airy"));
    WaveFunction W(T, Divisor::parse("z1 - z2"));
    auto F01 = W.F(0, 1);
    ASSERT_TRUE(F01.is_rational());
    EXPECT_EQ(F01.rational(), P("2/3*z1^3 - 2/3*z2^3"));
    // d/dx1 F02 = 2 a1 a2 d/dx1 log((z1 - z2) sqrt(x'(z1) x'(z2))) with x' = 2z
    RatFunc z1 = P("z1"), z2 = P("z2");
    RatFunc expected = RatFunc(-2) * (RatFunc(1) / (z1 - z2) + RatFunc(1) / (RatFunc(2) * z1)) / (RatFunc(2) * z1);
    EXPECT_EQ(W.F(0, 2).derivative(var("z1")) / (RatFunc(2) * z1), expected);
    WaveFunction E(T, Divisor{});
    EXPECT_TRUE(E.F(0, 1).is_zero());
    EXPECT_TRUE(E.F(0, 2).is_zero());
    EXPECT_TRUE(E.F(0, 3).is_zero());
    EXPECT_TRUE(E.F(1, 1).is_zero());
}

TEST(Wavefunction, CylinderAndSymmetry) {
    for (auto name : {"airy", "painleve1", "finitepole"}) {
        OmegaTable T(curve(name));
        for (auto ds : {"z1 - z2", "z1 + z2 - z3 - z4", "2*z1 - z2 - z3"}) {
            WaveFunction W(T, Divisor::parse(ds));
            auto c = cylinder_identity_check(W);
            EXPECT_TRUE(c.pass) << name << " " << ds << " " << c.witness.to_string();
            for (auto [g, n] : {std::pair{0, 3}, {1, 1}, {0, 4}, {1, 2}, {2, 1}}) {
                auto s = symmetry_check(W, g, n);
                EXPECT_TRUE(s.pass) << name << " " << ds << " " << s.label << " " << s.witness.to_string();
            }
        }
    }
}

TEST(Wavefunction, CylinderTimeDerivative) {
    OmegaTable T(curve("painleve1"));
    for (auto ds : {"z1 - z2", "z1 + z2 - z3 - z4"}) {
        WaveFunction W(T, Divisor::parse(ds));
        auto r = cylinder_time_check(W);
        EXPECT_TRUE(r.pass) << ds << " " << r.witness.to_string();
    }
}

TEST(Wavefunction, PdeThroughFourthOrder) {
    for (auto name : {"airy", "painleve1"}) {
        OmegaTable T(curve(name));
        for (auto ds : {"z1 - z2", "z1 + z2 - z3 - z4"}) {
            WaveFunction W(T, Divisor::parse(ds));
            for (std::int32_t l = 0; l <= 4; ++l)
                for (std::size_t k = 0; k < W.divisor().size(); ++k) {
                    auto r = pde_check(W, k, l);
                    EXPECT_TRUE(r.pass) << name << " " << ds << " " << r.label << " " << r.detail.substr(0, 200);
                }
        }
    }
}

// the classical limit and the terms that make higher orders nontrivial
TEST(Wavefunction, PdeIngredientsAreNonzero) {
    OmegaTable A(curve("airy"));
    WaveFunction W(A, Divisor::parse("z1 - z2"));
    EXPECT_EQ(W.dS(0, 0) * W.dS(0, 0), W.x_at(0));
    WaveFunction W4(A, Divisor::parse("z1 + z2 - z3 - z4"));
    EXPECT_FALSE(W4.star(0).is_zero());
    OmegaTable T(curve("painleve1"));
    WaveFunction V(T, Divisor::parse("z1 - z2"));
    EXPECT_FALSE(V.LF(1, 0).is_zero());
    EXPECT_FALSE(V.LS(2, 0).is_zero());
    EXPECT_THROW(V.pde_residual(5, 0), std::out_of_range);
    WaveFunction V2(T, Divisor::parse("2*z1 - z2 - z3"));
    EXPECT_THROW(V2.pde_residual(0, 1), std::invalid_argument);
}

TEST(Wavefunction, ReducedEquation) {
    {
        OmegaTable T(curve("airy"));
        WaveFunction W(T, Divisor::parse("w - wp"));
        auto r = reduced_residual(W, 4);
        EXPECT_TRUE(r.first.pass) << r.first.detail << " " << r.first.witness.to_string();
        EXPECT_TRUE(r.second.pass) << r.second.detail << " " << r.second.witness.to_string();
    }
    {
        OmegaTable T(curve("painleve1"));
        WaveFunction W(T, Divisor::parse("w - wp"));
        auto r = reduced_residual(W, 2);
        EXPECT_TRUE(r.first.pass) << r.first.detail << " " << r.first.witness.to_string();
        EXPECT_TRUE(r.second.pass) << r.second.detail << " " << r.second.witness.to_string();
        EXPECT_THROW(reduced_residual(*std::make_unique<WaveFunction>(T, Divisor::parse("a + b - c - d")), 2), std::invalid_argument);
    }
}

// Airy asymptotics: u_k = (6k-5)(6k-3)(6k-1)/(216 k (2k-1)) u_{k-1}, in powers of 1/zeta with zeta = (2/3) z^3
TEST(Wavefunction, AiryQuantumLimit) {
    OmegaTable T(curve("airy"));
    const std::int32_t K = 5;
    auto q = quantum_limit(T, K);
    for (std::int32_t l = 0; l <= K + 1; ++l) EXPECT_TRUE(quantum_limit_residual(T, q, l).is_zero()) << l;
    Rat u = 1;
    for (std::int32_t k = 1; k <= K; ++k) {
        u *= Rat((6 * k - 5) * (6 * k - 3) * (6 * k - 1), 216 * k * (2 * k - 1));
        Rat scale = 1;
        for (std::int32_t i = 0; i < k; ++i) scale *= Rat(3, 2);
        EXPECT_EQ(q.series[k], RatFunc(u * scale) * P("z").pow(-3 * k)) << k;
    }
    OmegaTable F(curve("finitepole"));
    auto qf = quantum_limit(F, 2);
    EXPECT_THROW(quantum_limit_residual(F, qf, 1), CurveError);
}
