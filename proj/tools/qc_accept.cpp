#include <cstdio>

#include "qc/cli/acceptance.hpp"

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : QC_CURVE_DIR;
    int failed = 0;
    for (auto& c : qc::cli::run_acceptance(dir)) {
        std::printf("criterion %2d: %s  %s  (%.2f s, budget %.0f s)%s%s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                    c.budget_s, c.detail.empty() ? "" : "  ", c.detail.c_str());
        failed += !c.pass;
    }
    std::printf("%d of 13 criteria passed\n", 13 - failed);
    return failed ? 1 : 0;
}
