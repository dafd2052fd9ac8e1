#include "illiq/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "illiq/dtree.hpp"
#include "illiq/hedge.hpp"
#include "illiq/report.hpp"
#include "illiq/term.hpp"

namespace illiq {

namespace {

namespace fs = std::filesystem;

TimeGrid grid_from_spec(const ScenarioSpec& spec) {
    if (spec.grid_refine) {
        return TimeGrid::refined(spec.horizon, spec.grid_base_dt, spec.grid_eps_floor,
                                 spec.grid_tail_ratio);
    }
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::round(spec.horizon / spec.grid_base_dt)));
    return TimeGrid::uniform(spec.horizon, steps);
}

std::string grid_summary(const TimeGrid& g) {
    std::ostringstream os;
    os << g.size() << " points on [0," << fmt_double(g.horizon()) << "]";
    if (g.eps_floor()) os << ", geometric tail floor " << fmt_double(*g.eps_floor());
    return os.str();
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

void finalize_manifest(const std::string& command, const ScenarioSpec& spec,
                       const TimeGrid& grid, const std::vector<std::string>& outputs,
                       const RunOptions& opt, double seconds) {
    RunManifest man;
    man.command = command;
    man.library_version = library_version();
    man.seed = spec.seed;
    man.scenario_echo = spec_to_json(spec).dump();
    man.grid_summary = grid_summary(grid);
    man.outputs = outputs;
    man.wall_clock_seconds = seconds;
    man.append_to(opt.out_dir);
}

std::string out_path(const RunOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return (fs::path(opt.out_dir) / name).string();
}

nlohmann::json estimate_json(const MCEstimate& e) {
    return nlohmann::json{
        {"mean", e.mean}, {"se", e.stderr_}, {"n", e.n}, {"ci_level", e.ci_level}};
}

}  // namespace

ScenarioSpec apply_overrides(ScenarioSpec spec, const RunOptions& opt) {
    if (opt.seed_set) spec.seed = opt.seed;
    if (opt.n_paths > 0) spec.n_paths = opt.n_paths;
    spec.validate();
    return spec;
}

nlohmann::json spec_to_json(const ScenarioSpec& spec) {
    nlohmann::json j{{"schema_version", ScenarioSpec::kSchemaVersion},
                     {"kind", to_string(spec.kind)},
                     {"horizon", spec.horizon},
                     {"n_paths", spec.n_paths},
                     {"seed", spec.seed},
                     {"grid", {{"base_dt", spec.grid_base_dt},
                               {"refine", spec.grid_refine},
                               {"eps_floor", spec.grid_eps_floor},
                               {"tail_ratio", spec.grid_tail_ratio}}},
                     {"post_default",
                      {{"curve", spec.post_default == PostDefaultCurve::Flat ? "flat"
                                                                             : "deterministic"},
                       {"rate", spec.post_default_rate}}}};
    switch (spec.kind) {
        case Kind::Kind1: j["kind1"] = {{"volatility", spec.kind1_volatility}}; break;
        case Kind::Kind2Canonical: j["kind2"] = {{"z0", spec.kind2_z0}}; break;
        case Kind::Kind3Hyper: j["kind3"] = {{"x0", spec.kind3_x0}}; break;
        case Kind::Kind4Composite:
            j["kind4"] = {{"x0", spec.kind4_x0},
                          {"z0", spec.kind4_z0},
                          {"seed_offset", spec.kind4_seed_offset}};
            break;
        case Kind::PureIlliquidity:
            j["pure"] = {{"x", spec.pure_x},
                         {"f", spec.pure_f.type == FunctionSpec::Type::Constant ? "constant"
                                                                                : "exponential"},
                         {"f0", spec.pure_f.f0},
                         {"f_rate", spec.pure_f.rate}};
            break;
    }
    return j;
}

std::vector<std::string> run_simulate(const ScenarioSpec& spec, const RunOptions& opt) {
    const Stopwatch watch;
    const Scenario sc(spec);
    const TimeGrid grid = grid_from_spec(spec);

    std::vector<std::string> outputs;
    for (const Measure m : {Measure::Q, Measure::Qcheck}) {
        const MarketPaths run = sc.simulate(m, grid, spec.n_paths, spec.seed, opt.threads);
        std::ostringstream os;
        os << "path_id,absorbed,tau_time";
        for (double t : grid.times()) os << ",zcheck_" << fmt_double(t);
        os << '\n';
        for (std::size_t p = 0; p < run.n_paths; ++p) {
            const bool absorbed = !run.tau().never(p);
            os << p << ',' << (absorbed ? 1 : 0) << ','
               << (absorbed ? fmt_double(run.tau().tau_time[p]) : "inf");
            for (std::size_t i = 0; i < grid.size(); ++i) {
                os << ',' << fmt_double(run.density.zcheck_at(p, i));
            }
            os << '\n';
        }
        const std::string name =
            std::string("pathset_") + (m == Measure::Q ? "q" : "qcheck") + ".csv";
        const std::string path = out_path(opt, name);
        write_text_file(path, os.str());
        outputs.push_back(path);
    }
    finalize_manifest("simulate", spec, grid, outputs, opt, watch.seconds());
    return outputs;
}

std::vector<std::string> run_premium(const ScenarioSpec& spec, const std::vector<double>& t_list,
                                     const std::vector<double>& T_list, const RunOptions& opt) {
    const Stopwatch watch;
    if (t_list.empty() || T_list.empty()) {
        throw ConfigError("premium: t and T lists must be non-empty");
    }
    const Scenario sc(spec);
    std::vector<double> marks = t_list;
    marks.insert(marks.end(), T_list.begin(), T_list.end());
    const TwoPriceEngine engine(sc, marks, spec.n_paths, spec.seed, opt.threads);
    const PremiumSurface surface = engine.surface(t_list, T_list);

    const std::string csv_path = out_path(opt, "premium_surface.csv");
    write_text_file(csv_path, surface.to_csv());

    // JSON summary: rows, classification and the initial-time two-price
    // cross-check columns.
    const KindClassification cls =
        classify_kind(sc, *std::max_element(T_list.begin(), T_list.end()),
                      std::max<std::size_t>(spec.n_paths, 2), 0.99, spec.seed + 17, opt.threads);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : surface.rows) {
        rows.push_back({{"t", r.t},
                        {"T", r.T},
                        {"Q", estimate_json(r.q)},
                        {"Qcheck", estimate_json(r.qcheck)},
                        {"S", estimate_json(r.s)},
                        {"L", estimate_json(r.premium)},
                        {"Xi", estimate_json(r.xi)},
                        {"L_kurtosis", r.premium_kurtosis},
                        {"heavy_tail_warning", r.premium_kurtosis > 50.0}});
    }
    nlohmann::json shortcut = nlohmann::json::array();
    for (double T : T_list) {
        shortcut.push_back({{"T", T},
                            {"qcheck_shortcut", estimate_json(engine.qcheck_shortcut(T))},
                            {"qcheck_survival_conditional",
                             estimate_json(engine.qcheck_survival_conditional(T))}});
    }
    nlohmann::json summary{{"schema_version", 1},
                           {"scenario", spec_to_json(spec)},
                           {"seed", spec.seed},
                           {"ci_level", opt.ci_level},
                           {"rows", rows},
                           {"two_price_shortcut", shortcut},
                           {"market_kind", to_string(cls.cell)},
                           {"premium_sign_prediction", premium_sign_prediction(cls.cell)},
                           {"z_defect", estimate_json(cls.z_test.sample)},
                           {"pb_defect", estimate_json(cls.pb_test.sample)},
                           {"z_verdict", to_string(cls.z_test.verdict)},
                           {"pb_verdict", to_string(cls.pb_test.verdict)}};
    const std::string json_path = out_path(opt, "premium_summary.json");
    write_text_file(json_path, summary.dump(2) + "\n");

    const TimeGrid grid = engine.qcheck_run().grid;
    finalize_manifest("premium", spec, grid, {csv_path, json_path}, opt, watch.seconds());
    return {csv_path, json_path};
}

std::vector<std::string> run_arbitrage(const ScenarioSpec& spec, Measure measure,
                                       const RunOptions& opt) {
    const Stopwatch watch;
    if (spec.kind != Kind::Kind2Canonical || spec.kind2_z0 != 1.0) {
        throw ConfigError(
            "arbitrage: the explicit construction needs kind = kind2_canonical with z0 = 1");
    }
    if (!spec.grid_refine) {
        throw ConfigError("arbitrage: grid.refine with grid.eps_floor is required");
    }
    const TimeGrid grid = TimeGrid::refined(spec.horizon, spec.grid_base_dt,
                                            spec.grid_eps_floor, spec.grid_tail_ratio);
    const HedgeRun run = replicate(measure, spec.horizon, spec.n_paths, grid, spec.seed,
                                   opt.threads);

    const std::string csv_path = out_path(opt, "hedge_run.csv");
    write_text_file(csv_path, run.to_csv());

    nlohmann::json summary{{"schema_version", 1},
                           {"scenario", spec_to_json(spec)},
                           {"measure", to_string(measure)},
                           {"T", run.T},
                           {"a_T", run.a_T},
                           {"eps_floor", run.eps_floor},
                           {"n_paths", run.n_paths},
                           {"mean_V_T", run.mean_v},
                           {"rms_error", run.rms_error},
                           {"cluster_weight_survive", run.cluster_weight_survive},
                           {"cluster_weight_default", run.cluster_weight_default},
                           {"flagged_paths", run.flagged}};
    const std::string json_path = out_path(opt, "hedge_summary.json");
    write_text_file(json_path, summary.dump(2) + "\n");

    finalize_manifest("arbitrage", spec, grid, {csv_path, json_path}, opt, watch.seconds());
    return {csv_path, json_path};
}

OracleOutcome run_oracle(const std::string& tree_path) {
    const dtree::DiscreteMarket market = dtree::DiscreteMarket::parse_file(tree_path);
    OracleOutcome out;
    const auto identities = dtree::verify_foellmer_identities(market);
    const auto jump = dtree::classify_jump_to_zero(market);
    std::ostringstream os;
    os << "tree: depth " << market.depth() << ", " << market.nodes().size() << " nodes\n";
    os << "identities: " << (identities.ok ? "all hold exactly" : identities.violation) << " ("
       << identities.checked_atoms << " atoms, " << identities.checked_bayes
       << " Bayes cells)\n";
    os << "zero approach: " << to_string(jump.classification) << "; " << jump.note << '\n';
    out.ok = identities.ok;
    out.report = os.str();
    return out;
}

}  // namespace illiq
