#include "illiq/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "illiq/math.hpp"
#include "illiq/parallel.hpp"
#include "illiq/report.hpp"
#include "illiq/rng.hpp"
#include "illiq/stats.hpp"

namespace illiq {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028653559;
constexpr std::uint64_t kBridgeLane = 0x4000000000000000ull;

// One path state of the traded leg; exact transitions on both measures.
struct LegState {
    Measure measure;
    // Q: Bessel(3) components; Qcheck: scalar stopped Brownian motion.
    double y0 = 1.0, y1 = 0.0, y2 = 0.0;
    double w = 1.0;
    bool absorbed = false;

    double value() const {
        if (measure == Measure::Q) return std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
        return absorbed ? 0.0 : w;
    }

    void step(double dt, rng::PathStream& gen, rng::PathStream& bridge) {
        const double sdt = std::sqrt(dt);
        if (measure == Measure::Q) {
            y0 += sdt * gen.next_gaussian();
            y1 += sdt * gen.next_gaussian();
            y2 += sdt * gen.next_gaussian();
            return;
        }
        if (absorbed) return;
        const double next = w + sdt * gen.next_gaussian();
        if (next <= 0.0 || bridge.next_uniform() < std::exp(-2.0 * w * next / dt)) {
            absorbed = true;
            w = 0.0;
        } else {
            w = next;
        }
    }
};

}  // namespace

double conditional_default_prob(double z, double t, double T, bool absorbed) {
    if (absorbed) return 1.0;
    if (!(t < T)) throw std::invalid_argument("conditional_default_prob: requires t < T");
    if (!(z > 0.0)) throw std::invalid_argument("conditional_default_prob: requires z > 0");
    return 2.0 * normal_cdf(-z / std::sqrt(T - t));
}

double a_constant(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("a_constant: requires T > 0");
    return 1.0 / (2.0 * normal_cdf(-1.0 / std::sqrt(T))) - 1.0;
}

double delta_hedge(double z, double t, double T, double eps_floor, bool absorbed) {
    if (absorbed) return 0.0;
    if (!(eps_floor > 0.0)) throw std::invalid_argument("delta_hedge: eps_floor must be > 0");
    if (!(t < T)) throw std::invalid_argument("delta_hedge: requires t < T");
    const double dt = std::max(T - t, eps_floor);  // clamp inside the final window
    return (1.0 + a_constant(T)) * kSqrt2OverPi * std::exp(-0.5 * z * z / dt) / std::sqrt(dt);
}

std::string HedgeRun::to_csv() const {
    std::ostringstream os;
    os << "path_id,absorbed,tau_time,V_T,repl_error,min_V_Zunits,min_V_Bunits\n";
    for (std::size_t p = 0; p < n_paths; ++p) {
        os << p << ',' << static_cast<int>(absorbed[p]) << ','
           << (std::isfinite(tau_time[p]) ? fmt_double(tau_time[p]) : "inf") << ','
           << fmt_double(v_terminal[p]) << ',' << fmt_double(repl_error[p]) << ','
           << fmt_double(min_v_z[p]) << ',' << fmt_double(min_v_b[p]) << '\n';
    }
    return os.str();
}

HedgeRun replicate(Measure measure, double T, std::size_t n_paths, const TimeGrid& grid,
                   std::uint64_t seed, unsigned threads) {
    if (!grid.eps_floor()) {
        throw std::invalid_argument("replicate: grid must be geometrically refined (eps_floor)");
    }
    if (std::abs(grid.horizon() - T) > 1e-12) {
        throw std::invalid_argument("replicate: grid horizon must equal T");
    }
    if (n_paths == 0) throw std::invalid_argument("replicate: n_paths must be >= 1");

    HedgeRun run;
    run.measure = measure;
    run.T = T;
    run.a_T = a_constant(T);
    run.eps_floor = *grid.eps_floor();
    run.seed = seed;
    run.n_paths = n_paths;
    run.absorbed.assign(n_paths, 0);
    run.tau_time.assign(n_paths, std::numeric_limits<double>::infinity());
    run.v_terminal.assign(n_paths, 0.0);
    run.repl_error.assign(n_paths, 0.0);
    run.min_v_z.assign(n_paths, 0.0);
    run.min_v_b.assign(n_paths, 0.0);
    run.zcheck_terminal.assign(n_paths, 0.0);

    const auto& t = grid.times();
    const double eps = run.eps_floor;
    const double a_T = run.a_T;

    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            rng::PathStream gen(seed, p);
            rng::PathStream bridge(rng::mix64(seed), p | kBridgeLane);
            LegState leg{measure};
            double v = 0.0, min_z = 0.0, min_b = 0.0;
            for (std::size_t i = 0; i + 1 < t.size(); ++i) {
                if (leg.absorbed) break;
                const double z = leg.value();
                const double h = delta_hedge(z, t[i], T, eps);
                leg.step(t[i + 1] - t[i], gen, bridge);
                if (leg.absorbed) run.tau_time[p] = t[i + 1];
                const double znext = leg.value();
                v += h * (znext - z);
                min_z = std::min(min_z, v);
                if (!leg.absorbed) min_b = std::min(min_b, v / znext);
            }
            run.absorbed[p] = leg.absorbed ? 1 : 0;
            run.v_terminal[p] = v;
            run.min_v_z[p] = min_z;
            run.min_v_b[p] = min_b;
            run.zcheck_terminal[p] = leg.value();
            const double target = (measure == Measure::Q || !leg.absorbed) ? 1.0 : -a_T;
            run.repl_error[p] = v - target;
        }
    });

    const MCEstimate mv = mc_mean(run.v_terminal);
    run.mean_v = mv.mean;
    double sq = 0.0;
    for (double e : run.repl_error) sq += e * e;
    run.rms_error = std::sqrt(sq / static_cast<double>(n_paths));
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (std::abs(run.repl_error[p]) > 10.0 * run.rms_error) run.flagged.push_back(p);
    }
    std::size_t near_default = 0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (std::abs(run.v_terminal[p] + a_T) < std::abs(run.v_terminal[p] - 1.0)) {
            ++near_default;
        }
    }
    run.cluster_weight_default = static_cast<double>(near_default) / static_cast<double>(n_paths);
    run.cluster_weight_survive = 1.0 - run.cluster_weight_default;
    return run;
}

HedgeTrace replicate_path_trace(Measure measure, double T, const TimeGrid& grid,
                                std::uint64_t seed, std::size_t path_id) {
    if (!grid.eps_floor()) {
        throw std::invalid_argument("replicate_path_trace: grid must be refined");
    }
    HedgeTrace trace;
    const auto& t = grid.times();
    rng::PathStream gen(seed, path_id);
    rng::PathStream bridge(rng::mix64(seed), path_id | kBridgeLane);
    LegState leg{measure};
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (leg.absorbed) break;
        const double z = leg.value();
        const double h = delta_hedge(z, t[i], T, *grid.eps_floor());
        leg.step(t[i + 1] - t[i], gen, bridge);
        const double inc = h * (leg.value() - z);
        trace.increments.push_back(inc);
        v += inc;
    }
    trace.v_terminal = v;
    return trace;
}

TimeGrid replication_grid(double T, double eps_floor) {
    // Body resolution tied to the floor so that the floor is the single
    // refinement knob (quartering it halves the body-dominated RMS), and
    // a gentle tail ratio keeping the spacing small relative to the
    // remaining time, which caps the hedge jitter of paths that approach
    // the origin close to maturity.
    return TimeGrid::refined(T, 2.0 * eps_floor, eps_floor, 0.9375);
}

RefinementStudy replicate_refinement_study(double T, std::size_t n_paths,
                                           const std::vector<double>& eps_levels,
                                           std::uint64_t seed, unsigned threads) {
    if (eps_levels.empty()) {
        throw std::invalid_argument("refinement study: need at least one eps level");
    }
    std::vector<double> eps_sorted = eps_levels;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());

    RefinementStudy study;
    study.eps_levels = eps_sorted;
    for (const double eps : eps_sorted) {
        const HedgeRun run =
            replicate(Measure::Q, T, n_paths, replication_grid(T, eps), seed, threads);
        study.rms.push_back(run.rms_error);
        study.mean_v_finest = run.mean_v;
    }
    return study;
}

AdmissibilityReport admissibility_probe(const HedgeRun& q_run,
                                        const std::vector<std::size_t>& budgets,
                                        double tolerance) {
    if (q_run.measure != Measure::Q) {
        throw std::invalid_argument("admissibility_probe: needs a Q-measure run");
    }
    AdmissibilityReport rep;
    rep.z_floor = -q_run.a_T - tolerance;
    rep.min_z_overall = 0.0;
    for (double m : q_run.min_v_z) rep.min_z_overall = std::min(rep.min_z_overall, m);
    rep.z_floor_ok = rep.min_z_overall >= rep.z_floor;

    for (std::size_t b : budgets) {
        const std::size_t n = std::min(b, q_run.n_paths);
        double mn = 0.0;
        for (std::size_t p = 0; p < n; ++p) mn = std::min(mn, q_run.min_v_b[p]);
        rep.budgets.push_back(n);
        rep.min_b_by_budget.push_back(mn);
    }
    rep.b_min_decreasing = true;
    for (std::size_t i = 1; i < rep.min_b_by_budget.size(); ++i) {
        if (!(rep.min_b_by_budget[i] < rep.min_b_by_budget[i - 1])) rep.b_min_decreasing = false;
    }
    std::ostringstream os;
    os << "Zcheck-unit wealth floor " << rep.min_z_overall << " (required >= " << rep.z_floor
       << "); B-unit minima by budget:";
    for (std::size_t i = 0; i < rep.budgets.size(); ++i) {
        os << ' ' << rep.budgets[i] << "->" << rep.min_b_by_budget[i];
    }
    os << "; no empirical floor: " << (rep.b_min_decreasing ? "yes" : "no");
    rep.summary = os.str();
    return rep;
}

}  // namespace illiq
