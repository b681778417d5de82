#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "qc/cli/acceptance.hpp"

using namespace qc;
using namespace qc::cli;

namespace {

std::string curve_path(const std::string& name) { return std::string(QC_CURVE_DIR) + "/" + name + ".curve"; }

int run(const std::string& args) {
    std::string cmd = std::string(QC_BINARY) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// canonical strings re-parse to themselves; the display form of an operator re-parses to an equal value
void expect_round_trip(const json& j) {
    if (j.is_object() || j.is_array()) {
        for (auto& [k, v] : j.items())
            if (k == "operator")
                EXPECT_EQ(parse_expr(parse_expr(v.get<std::string>()).to_string()), parse_expr(v.get<std::string>()));
            else if (k != "label" && k != "detail" && k != "schema" && k != "command" && k != "curve" && k != "divisor" && k != "pole" &&
                k != "convention")
                expect_round_trip(v);
    } else if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s.find('\'') != std::string::npos) {
            EXPECT_EQ(DiffPoly::parse(s).to_string(), s);
        } else {
            EXPECT_EQ(parse_expr(s).to_string(), s) << s;
        }
    }
}

}  // namespace

TEST(Cli, TimesReport) {
    auto r = cmd_times(load_curve(curve_path("painleve1")));
    EXPECT_EQ(r.body["schema"], kSchema);
    EXPECT_TRUE(r.pass);
    auto& t = r.body["times"];
    EXPECT_EQ(t[1]["value"], "3*u^2");
    EXPECT_EQ(t[5]["value"], "-2");
    EXPECT_EQ(t[1]["period"], "-2*u^3");
    EXPECT_EQ(r.body["F0"]["rational"], "-(12/5)*u^5");
    EXPECT_TRUE(r.body["F0"]["logs"].empty());
    auto f = cmd_times(load_curve(curve_path("finitepole")));
    EXPECT_FALSE(f.body["F0"]["logs"].empty());
    expect_round_trip(f.body);
    expect_round_trip(r.body);
}

TEST(Cli, GdReport) {
    auto r = cmd_gd(2);
    EXPECT_EQ(r.body["R"], "3*U^2 - (1/2)*h^2*U''");
    EXPECT_TRUE(r.pass);
    EXPECT_THROW(cmd_gd(-1), InputError);
}

TEST(Cli, ReportsRoundTrip) {
    OmegaTable T(load_curve(curve_path("airy")));
    expect_round_trip(cmd_omega(T, 1, 1).body);
    expect_round_trip(cmd_lax(1, unit_times(1), LaxConvention::Minus).body);
    expect_round_trip(cmd_quantum_curve(1, unit_times(1), LaxConvention::Plus).body);
    expect_round_trip(cmd_wkb(1, unit_times(1), 2).body);
}

TEST(Cli, WitnessOnFailure) {
    auto r = cmd_zero_curvature(1, {Rat(0), Rat(1)}, LaxConvention::Minus, 4);
    EXPECT_TRUE(r.pass);
    // Airy tables with the Painleve Lax pair: the kernel PDE must fail and carry a witness
    OmegaTable A(load_curve(curve_path("airy")));
    auto k = cmd_kernel_pde(A, 1, unit_times(1), 2);
    EXPECT_FALSE(k.pass);
    bool has_witness = false;
    for (auto& c : k.body["checks"])
        if (!c["pass"].get<bool>()) has_witness = has_witness || !c["witness"].get<std::string>().empty();
    EXPECT_TRUE(has_witness);
}

TEST(Cli, DeterministicAcrossThreads) {
    OmegaTable A(load_curve(curve_path("painleve1"))), B(load_curve(curve_path("painleve1")));
    precompute(B, 3, 4);
    EXPECT_EQ(cmd_check_loop(A, 3).body.dump(), cmd_check_loop(B, 3).body.dump());
    EXPECT_EQ(cmd_omega(A, 2, 1).body.dump(), cmd_omega(B, 2, 1).body.dump());
}

TEST(Cli, InputParsing) {
    EXPECT_EQ(parse_rational("0.25"), Rat(1, 4));
    EXPECT_EQ(parse_rational("-3/6"), Rat(-1, 2));
    EXPECT_THROW(parse_rational("abc"), InputError);
    EXPECT_THROW(parse_rational("1/0"), InputError);
    auto z = parse_complex("1/2,-3/2");
    EXPECT_DOUBLE_EQ(double(z.real()), 0.5);
    EXPECT_DOUBLE_EQ(double(z.imag()), -1.5);
    EXPECT_EQ(parse_divisor("[z1]-[z2]").to_string(), "z1 - z2");
    EXPECT_THROW(cmd_elliptic({1, 0}, {0.5L, -1}), InputError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("gd --k 2"), 0);
    EXPECT_EQ(run("times --curve " + curve_path("painleve1")), 0);
    EXPECT_EQ(run("check-pde --curve " + curve_path("airy") + " --divisor \"[z1]-[z2]\" --order 4"), 0);
    EXPECT_EQ(run("kernel-pde --curve " + curve_path("airy") + " --m 1 --order 2"), 1);
    EXPECT_EQ(run("elliptic-dict --nu 1 --tau 1/10,11/10"), 0);
    EXPECT_EQ(run("elliptic-dict --tau 1,0"), 2);
    EXPECT_EQ(run("times --curve /nonexistent.curve"), 2);
    EXPECT_EQ(run("gd"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("check-pde --curve " + curve_path("airy") + " --divisor \"z1 - z2 - z3\""), 2);
}

TEST(Cli, AcceptSubset) {
    auto r = cmd_accept(QC_CURVE_DIR, {1, 2, 9});
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.body["criteria"].size(), 3u);
}
