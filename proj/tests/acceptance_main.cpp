// Standalone acceptance runner for ctest.  --expect-fail inverts the
// exit code (used by the fault-injection test to assert that a broken
// reference distribution is actually noticed).

#include <iostream>

#include <CLI11.hpp>

#include "illiq/acceptance.hpp"
#include "illiq/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"illiq acceptance suite"};
    illiq::AcceptanceOptions opt;
    unsigned threads = 0;
    bool expect_fail = false;
    app.add_option("--out", opt.out_dir, "scratch/output directory");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--seed-offset", opt.seed_offset, "perturb the criterion seeds");
    app.add_option("--only", opt.only, "criterion ids to run")->delimiter(',');
    app.add_flag("--expect-fail", expect_fail, "succeed only if some criterion fails");
    CLI11_PARSE(app, argc, argv);

    opt.threads = illiq::resolve_threads(threads);
    const auto results = illiq::run_acceptance(opt);
    const int rc = illiq::report_acceptance(results, std::cout);
    if (expect_fail) return rc == 0 ? 1 : 0;
    return rc;
}
