// Command line entry point.
//
// Subcommands: simulate | premium | arbitrage | oracle | accept.
// Exit codes: 0 ok, 2 configuration error, 3 runtime error,
// 4 oracle violation, 5 acceptance failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "illiq/acceptance.hpp"
#include "illiq/config.hpp"
#include "illiq/parallel.hpp"
#include "illiq/pipeline.hpp"
#include "illiq/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitOracle = 4;
constexpr int kExitAcceptance = 5;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    unsigned threads = 0;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t n_paths = 0;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool needs_config = true) {
    auto* c = cmd->add_option("--config", fl.config_path, "scenario configuration file");
    if (needs_config) c->required();
    cmd->add_option("--out", fl.out_dir, "output directory");
    cmd->add_option("--threads", fl.threads,
                    "worker threads (fallback: ILLIQ_THREADS, default 1)");
    cmd->add_option("--ci-level", fl.ci_level, "confidence level for reported intervals");
    cmd->add_option("--seed", fl.seed, "override the configured seed")
        ->each([&fl](const std::string&) { fl.seed_set = true; });
    cmd->add_option("--paths", fl.n_paths, "override the configured path count");
}

illiq::RunOptions to_options(const CommonFlags& fl) {
    illiq::RunOptions opt;
    opt.out_dir = fl.out_dir;
    opt.threads = illiq::resolve_threads(fl.threads);
    opt.ci_level = fl.ci_level;
    opt.seed = fl.seed;
    opt.seed_set = fl.seed_set;
    opt.n_paths = fl.n_paths;
    return opt;
}

illiq::ScenarioSpec load_spec(const CommonFlags& fl, const illiq::RunOptions& opt) {
    return illiq::apply_overrides(illiq::ScenarioSpec::from_file(fl.config_path), opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint-based illiquidity simulator"};
    app.require_subcommand(1);

    CommonFlags sim_fl, prem_fl, arb_fl;
    std::vector<double> t_list{0.0};
    std::vector<double> T_list{1.0};
    std::string measure_str = "Q";
    std::string tree_path;
    CommonFlags accept_fl;
    accept_fl.out_dir.clear();  // default to a temp scratch directory
    std::uint64_t accept_seed_offset = 0;

    auto* sim = app.add_subcommand("simulate", "simulate a scenario and dump path sets");
    add_common(sim, sim_fl);

    auto* prem = app.add_subcommand("premium", "estimate the illiquidity premium surface");
    add_common(prem, prem_fl);
    prem->add_option("--t-list", t_list, "evaluation times t")->delimiter(',');
    prem->add_option("--T-list", T_list, "maturities T")->delimiter(',');

    auto* arb = app.add_subcommand("arbitrage", "run the explicit replication experiment");
    add_common(arb, arb_fl);
    arb->add_option("--measure", measure_str, "simulation measure: Q or Qcheck");

    auto* oracle = app.add_subcommand("oracle", "verify measure-change identities on a tree");
    oracle->add_option("tree", tree_path, "tree description file")->required();

    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    accept->add_option("--out", accept_fl.out_dir, "scratch/output directory");
    accept->add_option("--threads", accept_fl.threads, "worker threads");
    accept->add_option("--seed-offset", accept_seed_offset,
                       "perturb the acceptance seeds (criteria are tolerance-based)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            const auto opt = to_options(sim_fl);
            const auto spec = load_spec(sim_fl, opt);
            const auto files = illiq::run_simulate(spec, opt);
            for (const auto& f : files) std::cout << "wrote " << f << '\n';
            return kExitOk;
        }
        if (prem->parsed()) {
            const auto opt = to_options(prem_fl);
            const auto spec = load_spec(prem_fl, opt);
            const auto files = illiq::run_premium(spec, t_list, T_list, opt);
            for (const auto& f : files) std::cout << "wrote " << f << '\n';
            return kExitOk;
        }
        if (arb->parsed()) {
            const auto opt = to_options(arb_fl);
            const auto spec = load_spec(arb_fl, opt);
            illiq::Measure m;
            if (measure_str == "Q") {
                m = illiq::Measure::Q;
            } else if (measure_str == "Qcheck") {
                m = illiq::Measure::Qcheck;
            } else {
                std::cerr << "error: --measure must be Q or Qcheck\n";
                return kExitConfig;
            }
            const auto files = illiq::run_arbitrage(spec, m, opt);
            for (const auto& f : files) std::cout << "wrote " << f << '\n';
            return kExitOk;
        }
        if (oracle->parsed()) {
            const auto outcome = illiq::run_oracle(tree_path);
            std::cout << outcome.report;
            return outcome.ok ? kExitOk : kExitOracle;
        }
        if (accept->parsed()) {
            illiq::AcceptanceOptions opt;
            opt.out_dir = accept_fl.out_dir;
            opt.threads = illiq::resolve_threads(accept_fl.threads);
            opt.seed_offset = accept_seed_offset;
            const auto results = illiq::run_acceptance(opt);
            return illiq::report_acceptance(results, std::cout) == 0 ? kExitOk
                                                                     : kExitAcceptance;
        }
    } catch (const illiq::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
