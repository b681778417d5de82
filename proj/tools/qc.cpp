#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qc/cli/acceptance.hpp"

using namespace qc;
using namespace qc::cli;

namespace {

struct RunConfig {
    std::string curve;
    std::int32_t order = 4;
    std::int32_t g = 0, n = 1;
    std::int32_t chi = 2;
    std::int32_t k = 0;
    std::int32_t m = 1;
    std::string times;
    std::string convention = "minus";
    std::string divisor = "z1 - z2";
    std::string nu = "1", tau = "0,1";
    std::string output;
    std::string cache;
    std::string curve_dir = QC_CURVE_DIR;
    std::vector<int> criteria;
    unsigned threads = 1;
};

std::vector<Rat> lax_times(const RunConfig& cfg) {
    if (cfg.m < 0) throw InputError("--m must be >= 0");
    if (cfg.times.empty()) return unit_times(cfg.m);
    auto tt = parse_rational_list(cfg.times);
    if (tt.size() != static_cast<std::size_t>(cfg.m + 1)) throw InputError("--times needs m+1 entries");
    return tt;
}

Report dispatch(const std::string& cmd, const RunConfig& cfg) {
    if (cfg.order < 0) throw InputError("--order must be >= 0");
    auto table = [&] {
        auto T = std::make_unique<OmegaTable>(read_curve(cfg.curve));
        precompute(*T, cfg.chi, cfg.threads);
        return T;
    };
    if (cmd == "times") return cmd_times(read_curve(cfg.curve));
    if (cmd == "omega") return cmd_omega(*table(), cfg.g, cfg.n);
    if (cmd == "check-loop") return cmd_check_loop(*table(), cfg.chi);
    if (cmd == "check-pl") return cmd_check_pl(*table(), cfg.chi);
    if (cmd == "check-pde") return cmd_check_pde(*table(), parse_divisor(cfg.divisor), cfg.order);
    if (cmd == "check-reduced") return cmd_check_reduced(*table(), cfg.order);
    if (cmd == "quantum-limit") return cmd_quantum_limit(*table(), cfg.order);
    if (cmd == "gd") return cmd_gd(cfg.k);
    if (cmd == "lax") return cmd_lax(cfg.m, lax_times(cfg), parse_convention(cfg.convention));
    if (cmd == "zero-curvature") return cmd_zero_curvature(cfg.m, lax_times(cfg), parse_convention(cfg.convention), cfg.order);
    if (cmd == "quantum-curve") return cmd_quantum_curve(cfg.m, lax_times(cfg), parse_convention(cfg.convention));
    if (cmd == "wkb") return cmd_wkb(cfg.m, lax_times(cfg), cfg.order);
    if (cmd == "kernel-pde") return cmd_kernel_pde(*table(), cfg.m, lax_times(cfg), cfg.order);
    if (cmd == "det-identity") return cmd_det_identity(*table(), cfg.m, lax_times(cfg), cfg.order);
    if (cmd == "elliptic-dict") return cmd_elliptic(parse_complex(cfg.nu), parse_complex(cfg.tau));
    if (cmd == "accept") return cmd_accept(cfg.curve_dir, cfg.criteria);
    throw InputError("unknown command " + cmd);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Cache key: schema, command, every option, and the curve file contents.
std::filesystem::path cache_file(const std::string& cmd, const RunConfig& c) {
    std::ostringstream key;
    key << kSchema << '|' << cmd << '|' << c.order << '|' << c.g << '|' << c.n << '|' << c.chi << '|' << c.k << '|' << c.m << '|'
        << c.times << '|' << c.convention << '|' << c.divisor << '|' << c.nu << '|' << c.tau << '|';
    for (int id : c.criteria) key << id << ',';
    if (!c.curve.empty()) key << '|' << slurp(c.curve);
    std::ostringstream name;
    name << cmd << '-' << std::hex << std::hash<std::string>{}(key.str()) << ".json";
    return std::filesystem::path(c.cache) / name.str();
}

int emit(const json& body, const RunConfig& cfg) {
    std::string text = body.dump(2) + "\n";
    if (cfg.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.output);
        if (!out) throw InputError("cannot write " + cfg.output);
        out << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-curve recursion and isomonodromy checks"};
    app.require_subcommand(1);
    RunConfig cfg;
    if (const char* env = std::getenv("QC_CACHE_DIR")) cfg.cache = env;
    app.add_option("-o,--output", cfg.output, "write the JSON report here instead of stdout");
    app.add_option("--cache", cfg.cache, "report cache directory (default $QC_CACHE_DIR)");
    app.add_option("--threads", cfg.threads, "worker threads for omega precomputation")->check(CLI::Range(1u, 256u));

    auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
    auto curve_opt = [&](CLI::App* s) { s->add_option("--curve", cfg.curve, "curve-spec file")->required(); };
    auto lax_opts = [&](CLI::App* s) {
        s->add_option("--m", cfg.m, "order of the string equation");
        s->add_option("--times", cfg.times, "comma-separated t~_0..t~_m (default t~_m = 1, others 0)");
    };

    auto* times = sub("times", "KP times, second-kind periods and F0");
    curve_opt(times);
    auto* omega = sub("omega", "omega_{g,n} density");
    curve_opt(omega);
    omega->add_option("--g", cfg.g)->required();
    omega->add_option("--n", cfg.n)->required();
    for (auto [name, help] : {std::pair{"check-loop", "linear and quadratic loop equations"}, {"check-pl", "P_{g,n} = L.omega_{g,n}"}}) {
        auto* s = sub(name, help);
        curve_opt(s);
        s->add_option("--max-chi", cfg.chi, "check all (g,n) with 2g-2+n up to this");
    }
    auto* pde = sub("check-pde", "wave-function PDE");
    curve_opt(pde);
    pde->add_option("--divisor", cfg.divisor, "e.g. \"[z1]-[z2]\"");
    pde->add_option("--order", cfg.order, "hbar order");
    auto* red = sub("check-reduced", "two-point reduced equations");
    curve_opt(red);
    red->add_option("--order", cfg.order, "hbar order");
    auto* ql = sub("quantum-limit", "one-point wave function annihilated by h^2 d^2/dx^2 - R(x)");
    curve_opt(ql);
    ql->add_option("--order", cfg.order, "hbar order");
    auto* gd = sub("gd", "Gelfand-Dikii polynomial R_k");
    gd->add_option("--k", cfg.k)->required();
    auto* lax = sub("lax", "Lax matrices and string equation");
    lax_opts(lax);
    lax->add_option("--convention", cfg.convention, "plus or minus");
    auto* zc = sub("zero-curvature", "zero-curvature residual modulo the string equation");
    lax_opts(zc);
    zc->add_option("--convention", cfg.convention, "plus or minus");
    zc->add_option("--order", cfg.order, "hbar order");
    auto* qcurve = sub("quantum-curve", "scalar operator from the first Lax row");
    lax_opts(qcurve);
    qcurve->add_option("--convention", cfg.convention, "plus or minus")->default_str("plus");
    auto* wkb = sub("wkb", "WKB solution of the Lax system");
    lax_opts(wkb);
    wkb->add_option("--order", cfg.order, "hbar order");
    for (auto [name, help] : {std::pair{"kernel-pde", "integrable-kernel PDE"}, {"det-identity", "-det L against R(x) + h^2 L.F"}}) {
        auto* s = sub(name, help);
        curve_opt(s);
        lax_opts(s);
        s->add_option("--order", cfg.order, "hbar order");
    }
    auto* ell = sub("elliptic-dict", "elliptic parameter dictionary");
    ell->add_option("--nu", cfg.nu, "complex scale 're,im' with rational parts");
    ell->add_option("--tau", cfg.tau, "modulus 're,im', Im > 0");
    auto* acc = sub("accept", "full acceptance suite");
    acc->add_option("--curve-dir", cfg.curve_dir, "directory holding airy/painleve1/finitepole.curve");
    acc->add_option("--only", cfg.criteria, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    // quantum-curve defaults to the Painleve convention
    if (qcurve->parsed() && qcurve->count("--convention") == 0) cfg.convention = "plus";
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        std::filesystem::path cached;
        if (!cfg.cache.empty()) {
            std::filesystem::create_directories(cfg.cache);
            cached = cache_file(cmd, cfg);
            if (std::filesystem::exists(cached)) {
                json body = json::parse(slurp(cached.string()));
                emit(body, cfg);
                return body.value("pass", false) ? 0 : 1;
            }
        }
        Report r = dispatch(cmd, cfg);
        emit(r.body, cfg);
        if (!cached.empty()) std::ofstream(cached) << r.body.dump(2) << "\n";
        return r.exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"schema", kSchema}, {"command", cmd}, {"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const CurveError& e) {
        std::cerr << json{{"schema", kSchema}, {"command", cmd}, {"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << json{{"schema", kSchema}, {"command", cmd}, {"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"schema", kSchema}, {"command", cmd}, {"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
