#pragma once
// Subcommand implementations shared by the qc executable and the acceptance driver.
// Every command returns a JSON report; exact values are strings in the expression grammar.

#include <cstdio>
#include <atomic>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qc/core/parse.hpp"
#include "qc/curve/curve_file.hpp"
#include "qc/elliptic/elliptic_dictionary.hpp"
#include "qc/iso/wkb.hpp"
#include "qc/wave/wavefunction_pde.hpp"

namespace qc::cli {

using json = nlohmann::json;

inline constexpr const char* kSchema = "qc-report/1";

struct Report {
    json body;
    bool pass = true;
    int exit_code() const { return pass ? 0 : 1; }
};

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Report start(const std::string& command) {
    Report r;
    r.body["schema"] = kSchema;
    r.body["command"] = command;
    return r;
}

inline void finish(Report& r) { r.body["pass"] = r.pass; }

inline json check_json(const CheckResult& c) {
    json j{{"label", c.label}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (!c.pass) j["witness"] = c.witness.to_string();
    return j;
}

// rational part plus coefficient*log(argument) atoms
inline json log_json(const LogExpr& f) {
    json j{{"rational", f.rational().to_string()}, {"logs", json::array()}};
    for (auto& a : f.atoms()) j["logs"].push_back({{"coeff", a.coeff.to_string()}, {"arg", a.arg.to_string()}});
    return j;
}

inline void add_check(Report& r, const CheckResult& c) {
    r.body["checks"].push_back(check_json(c));
    r.pass = r.pass && c.pass;
}

inline CheckResult zero_check(std::string label, const RatFunc& residual) {
    CheckResult c;
    c.label = std::move(label);
    c.pass = residual.is_zero();
    c.witness = residual;
    return c;
}

// ---- input parsing ----

inline Rat parse_rational(const std::string& s) {
    std::string t = qc::trim(s);
    if (t.empty()) throw InputError("empty number");
    auto dot = t.find('.');
    try {
        if (dot == std::string::npos) {
            Rat q(t, 10);
            if (q.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
            q.canonicalize();
            return q;
        }
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        Rat q(digits, 10);
        mpz_class den = 1;
        for (std::size_t i = dot + 1; i < t.size(); ++i) den *= 10;
        return q / Rat(den);
    } catch (const std::invalid_argument&) {
        throw InputError("not a rational number: '" + s + "'");
    }
}

inline std::vector<Rat> parse_rational_list(const std::string& s) {
    std::vector<Rat> out;
    for (auto& p : qc::split_list(s)) out.push_back(parse_rational(p));
    return out;
}

// "re" or "re,im" with rational components.
inline elliptic::cplx parse_complex(const std::string& s) {
    auto parts = qc::split_list(s);
    if (parts.empty() || parts.size() > 2) throw InputError("complex literal must be 're' or 're,im': '" + s + "'");
    auto ld = [](const Rat& q) { return elliptic::real(q.get_num().get_d()) / elliptic::real(q.get_den().get_d()); };
    elliptic::real re = ld(parse_rational(parts[0]));
    elliptic::real im = parts.size() == 2 ? ld(parse_rational(parts[1])) : 0;
    return {re, im};
}

// "[z1]-[z2]" or "z1 - z2"
inline Divisor parse_divisor(std::string s) {
    std::erase_if(s, [](char c) { return c == '[' || c == ']'; });
    return Divisor::parse(s);
}

inline SpectralCurve read_curve(const std::string& path) {
    if (path.empty()) throw InputError("--curve is required");
    return load_curve(path);
}

inline std::vector<Rat> unit_times(std::int32_t m) {
    std::vector<Rat> tt(static_cast<std::size_t>(m + 1), Rat(0));
    tt.back() = 1;
    return tt;
}

inline LaxConvention parse_convention(const std::string& s) {
    if (s == "plus") return LaxConvention::Plus;
    if (s == "minus") return LaxConvention::Minus;
    throw InputError("convention must be 'plus' or 'minus'");
}

// Warm the omega table over (g, n) with 2g-2+n <= chi using a few worker threads.
// Results are memoized by key, so reports do not depend on the thread count.
inline void precompute(OmegaTable& T, std::int32_t chi, unsigned threads) {
    if (threads <= 1) return;
    for (std::int32_t level = 1; level <= chi; ++level) {
        std::vector<std::pair<std::int32_t, std::int32_t>> keys;
        for (std::int32_t g = 0; 2 * g - 2 < level; ++g)
            if (std::int32_t n = level - 2 * g + 2; n >= 1) keys.push_back({g, n});
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned i = 0; i < std::min<std::size_t>(threads, keys.size()); ++i)
            pool.emplace_back([&] {
                for (std::size_t k; (k = next++) < keys.size();) T.omega(keys[k].first, keys[k].second);
            });
        for (auto& t : pool) t.join();
    }
}

// ---- subcommands ----

inline Report cmd_times(const SpectralCurve& C) {
    Report r = start("times");
    r.body["curve"] = C.name;
    for (auto& tv : times_table(C)) {
        const auto& P = C.poles[tv.pole];
        json e{{"pole", point_to_string(P.loc)}, {"j", tv.j}, {"value", tv.value.to_string()}};
        if (tv.j >= 1) e["period"] = second_kind_period(C, C.ydx(), P.loc, tv.j).to_string();
        r.body["times"].push_back(e);
    }
    auto F0 = prepotential_F0(C);
    r.body["F0"] = log_json(F0);
    finish(r);
    return r;
}

inline Report cmd_omega(OmegaTable& T, std::int32_t g, std::int32_t n) {
    Report r = start("omega");
    r.body["curve"] = T.curve().name;
    r.body["g"] = g;
    r.body["n"] = n;
    if (n < 1 || g < 0 || 2 * g - 2 + n <= 0) {
        if (!(g == 0 && (n == 1 || n == 2))) throw InputError("omega needs n >= 1 and 2g-2+n > 0, or (0,1), (0,2)");
    }
    std::vector<std::string> vars;
    for (auto v : zvars(n)) vars.push_back(var_name(v));
    r.body["variables"] = vars;
    r.body["density"] = T.omega_ratfunc(g, n).to_string();
    finish(r);
    return r;
}

inline Report cmd_check_loop(OmegaTable& T, std::int32_t chi) {
    Report r = start("check-loop");
    r.body["curve"] = T.curve().name;
    for (std::int32_t g = 0; 2 * g - 2 <= chi; ++g)
        for (std::int32_t n = 0; 2 * g - 2 + n <= chi; ++n) {
            add_check(r, check_linear_loop(T, g, n));
            add_check(r, check_quadratic_loop(T, g, n, 2));
        }
    finish(r);
    return r;
}

inline Report cmd_check_pl(OmegaTable& T, std::int32_t chi) {
    Report r = start("check-pl");
    r.body["curve"] = T.curve().name;
    for (std::int32_t g = 0; 2 * g - 2 <= chi; ++g)
        for (std::int32_t n = 0; 2 * g - 2 + n <= chi; ++n) add_check(r, check_P_equals_L(T, g, n));
    finish(r);
    return r;
}

inline Report cmd_check_pde(OmegaTable& T, const Divisor& D, std::int32_t order) {
    Report r = start("check-pde");
    r.body["curve"] = T.curve().name;
    r.body["divisor"] = D.to_string();
    r.body["order"] = order;
    WaveFunction W(T, D);
    for (std::int32_t l = 0; l <= order; ++l)
        for (std::size_t k = 0; k < D.size(); ++k) add_check(r, pde_check(W, k, l));
    finish(r);
    return r;
}

inline Report cmd_check_reduced(OmegaTable& T, std::int32_t order) {
    Report r = start("check-reduced");
    r.body["curve"] = T.curve().name;
    r.body["order"] = order;
    WaveFunction W(T, Divisor::parse("w - wp"));
    auto res = reduced_residual(W, order);
    add_check(r, res.first);
    add_check(r, res.second);
    finish(r);
    return r;
}

inline Report cmd_quantum_limit(OmegaTable& T, std::int32_t order) {
    Report r = start("quantum-limit");
    r.body["curve"] = T.curve().name;
    auto q = quantum_limit(T, order);
    for (std::int32_t k = 0; k <= order; ++k) r.body["series"].push_back(q.series[k].to_string());
    for (std::int32_t l = 0; l <= order; ++l)
        add_check(r, zero_check("(h^2 d^2/dx^2 - R) psi at h^" + std::to_string(l), quantum_limit_residual(T, q, l)));
    finish(r);
    return r;
}

inline Report cmd_gd(std::int32_t k) {
    if (k < 0) throw InputError("--k must be >= 0");
    Report r = start("gd");
    r.body["k"] = k;
    r.body["R"] = gd_R(k).to_string();
    add_check(r, zero_check("recursion identity", RatFunc(gd_recursion_residual(k).p)));
    CheckResult g;
    g.label = "hbar grading";
    g.pass = hbar_grading_ok(gd_R(k)) && doubled_degree(gd_R(k)) == std::optional<std::int32_t>(2 * k);
    add_check(r, g);
    finish(r);
    return r;
}

inline json matrix_json(const Matrix2& M) { return M.to_strings(); }

inline Report cmd_lax(std::int32_t m, const std::vector<Rat>& tt, LaxConvention conv) {
    Report r = start("lax");
    auto P = gd_lax(m, tt, conv);
    auto s = gd_string_equation(m, tt, conv);
    r.body["m"] = m;
    r.body["convention"] = to_string(conv);
    r.body["L"] = matrix_json(P.L);
    r.body["R"] = matrix_json(P.R);
    r.body["string_equation"] = s.lhs.to_string();
    r.body["u_leading"] = RatFunc(u_leading(m, tt)).to_string();
    finish(r);
    return r;
}

inline Report cmd_zero_curvature(std::int32_t m, const std::vector<Rat>& tt, LaxConvention conv, std::int32_t order) {
    Report r = start("zero-curvature");
    r.body["m"] = m;
    r.body["convention"] = to_string(conv);
    r.body["order"] = order;
    auto Z = zero_curvature_residual(gd_lax(m, tt, conv), gd_string_equation(m, tt, conv), order);
    const char* names[] = {"11", "12", "21", "22"};
    const Poly* e[] = {&Z.a, &Z.b, &Z.c, &Z.d};
    for (int i = 0; i < 4; ++i) add_check(r, zero_check(std::string("entry ") + names[i], RatFunc(*e[i])));
    finish(r);
    return r;
}

inline Report cmd_quantum_curve(std::int32_t m, const std::vector<Rat>& tt, LaxConvention conv) {
    Report r = start("quantum-curve");
    auto P = m == 1 && tt == unit_times(1) && conv == LaxConvention::Plus ? painleve_lax() : gd_lax(m, tt, conv);
    auto q = quantum_curve_op(P);
    r.body["m"] = m;
    r.body["convention"] = to_string(conv);
    r.body["c1"] = q.c1.to_string();
    r.body["c0"] = q.c0.to_string();
    r.body["operator"] = q.to_string();
    finish(r);
    return r;
}

struct IsoSetup {
    LaxPair P;
    Background bg;
};

inline IsoSetup iso_setup(std::int32_t m, const std::vector<Rat>& tt, std::int32_t background_order) {
    auto P = gd_lax(m, tt, LaxConvention::Plus);
    auto bg = solve_background(gd_string_equation(m, tt, LaxConvention::Plus), background_order);
    return {std::move(P), std::move(bg)};
}

inline Report cmd_wkb(std::int32_t m, const std::vector<Rat>& tt, std::int32_t order) {
    Report r = start("wkb");
    auto [P, bg] = iso_setup(m, tt, order + 1);
    auto W = wkb_solve(P, bg, order);
    r.body["m"] = m;
    r.body["order"] = order;
    r.body["chart"] = {{"x", W.chart.x.to_string()}, {"y", W.chart.y.to_string()}};
    r.body["S0"] = log_json(W.S0);
    r.body["S1"] = log_json(W.S1);
    for (std::int32_t k = 0; k <= order; ++k) r.body["a"].push_back(W.a[k].to_string());
    auto res = quantum_curve_residual(W);
    for (std::int32_t k = 0; k <= order; ++k) add_check(r, zero_check("quantum curve on A at h^" + std::to_string(k), res[k]));
    for (std::int32_t k = 1; k <= order; ++k) add_check(r, zero_check("det Psi ratio at h^" + std::to_string(k), W.det_ratio[k]));
    finish(r);
    return r;
}

inline Report cmd_det_identity(OmegaTable& T, std::int32_t m, const std::vector<Rat>& tt, std::int32_t order) {
    Report r = start("det-identity");
    r.body["curve"] = T.curve().name;
    auto [P, bg] = iso_setup(m, tt, order);
    for (auto& c : det_identity_check(P, bg, T, order)) add_check(r, c);
    finish(r);
    return r;
}

inline Report cmd_kernel_pde(OmegaTable& T, std::int32_t m, const std::vector<Rat>& tt, std::int32_t order) {
    Report r = start("kernel-pde");
    r.body["curve"] = T.curve().name;
    auto [P, bg] = iso_setup(m, tt, order + 1);
    auto W = wkb_solve(P, bg, order);
    for (auto& c : kernel_pde_check(P, bg, W, T, order)) add_check(r, c);
    finish(r);
    return r;
}

inline std::string fmt(elliptic::real v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.19Lg", v);
    return buf;
}

inline json cjson(elliptic::cplx z) { return json::array({fmt(z.real()), fmt(z.imag())}); }

inline Report cmd_elliptic(elliptic::cplx nu, elliptic::cplx tau) {
    using namespace elliptic;
    if (!(tau.imag() > 0)) throw InputError("Im tau must be positive");
    if (nu == cplx(0)) throw InputError("nu must be nonzero");
    Report r = start("elliptic-dict");
    auto rep = select_convention(nu, tau);
    for (auto& e : rep.entries)
        r.body["conventions"].push_back({{"derivative", to_string(e.conv)}, {"period", to_string(e.formula)}, {"rel_error", fmt(e.rel_error)}});
    auto conv = rep.found ? rep.conv : DerivConvention::Tau;
    auto formula = rep.found ? rep.formula : PeriodFormula::Legendre;
    auto p = dictionary(nu, tau, conv, formula);
    r.body["nu"] = cjson(nu);
    r.body["tau"] = cjson(tau);
    r.body["selected"] = {{"derivative", to_string(conv)}, {"period", to_string(formula)}, {"found", rep.found}};
    r.body["terms"] = p.terms;
    r.body["tail_bound"] = fmt(p.tail_bound);
    for (auto [k, v] : {std::pair{"G2", p.G2}, {"G4", p.G4}, {"G6", p.G6}, {"dG4", p.dG4}, {"t", p.t}, {"V", p.V},
                        {"eps", p.eps}, {"I", p.I}, {"F0", p.F0}, {"F1", p.F1}})
        r.body["values"][k] = cjson(v);
    auto chk = prepotential_check(nu, tau, conv, formula);
    r.body["dF0_dt"] = cjson(chk.dF0_dt);
    r.body["dF0_deps"] = cjson(chk.dF0_deps);
    r.body["rel_error"] = fmt(chk.rel_error);
    r.pass = chk.pass;
    if (!chk.pass) r.body["witness"] = "dF0 - V dt - I deps relative error " + fmt(chk.rel_error);
    finish(r);
    return r;
}

}  // namespace qc::cli
