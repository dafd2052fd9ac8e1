#include "illiq/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "illiq/math.hpp"
#include "illiq/parallel.hpp"
#include "illiq/rng.hpp"

namespace illiq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hitting probability of the origin by time T for Brownian motion at z.
double bm_default_prob(double z, double dt) {
    if (dt <= 0.0) return 0.0;
    return 2.0 * normal_cdf(-z / std::sqrt(dt));
}

// Absorption probability of a squared Bessel(0) process at n within dt.
double besq0_absorption_prob(double n, double dt) {
    if (dt <= 0.0) return 0.0;
    return std::exp(-0.5 * n / dt);
}

}  // namespace

const char* to_string(Kind k) {
    switch (k) {
        case Kind::Kind1: return "kind1";
        case Kind::Kind2Canonical: return "kind2_canonical";
        case Kind::Kind3Hyper: return "kind3_hyper";
        case Kind::Kind4Composite: return "kind4_composite";
        default: return "pure_illiquidity";
    }
}

Kind kind_from_string(const std::string& s) {
    if (s == "kind1") return Kind::Kind1;
    if (s == "kind2_canonical") return Kind::Kind2Canonical;
    if (s == "kind3_hyper") return Kind::Kind3Hyper;
    if (s == "kind4_composite") return Kind::Kind4Composite;
    if (s == "pure_illiquidity") return Kind::PureIlliquidity;
    throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

double FunctionSpec::operator()(double t) const {
    return type == Type::Constant ? f0 : f0 * std::exp(rate * t);
}

double ScenarioSpec::pure_norm_sq() const {
    return pure_x[0] * pure_x[0] + pure_x[1] * pure_x[1] + pure_x[2] * pure_x[2] +
           pure_x[3] * pure_x[3];
}

ScenarioSpec ScenarioSpec::from_config(const Config& cfg) {
    ScenarioSpec s;
    const auto version = cfg.get_int("schema_version");
    if (version != kSchemaVersion) {
        throw ConfigError(cfg.source_name() + ": unsupported schema_version " +
                          std::to_string(version));
    }
    s.kind = kind_from_string(cfg.get_string("kind"));
    s.horizon = cfg.get_double_or("horizon", s.horizon);
    s.n_paths = static_cast<std::size_t>(cfg.get_uint_or("n_paths", s.n_paths));
    s.seed = cfg.get_uint_or("seed", s.seed);

    s.grid_base_dt = cfg.get_double_or("grid.base_dt", s.grid_base_dt);
    s.grid_refine = cfg.get_bool_or("grid.refine", s.grid_refine);
    if (cfg.has("grid.eps_floor")) s.grid_eps_floor = cfg.get_double("grid.eps_floor");
    s.grid_tail_ratio = cfg.get_double_or("grid.tail_ratio", s.grid_tail_ratio);

    const std::string curve = cfg.get_string_or("post_default.curve", "flat");
    if (curve == "flat") {
        s.post_default = PostDefaultCurve::Flat;
    } else if (curve == "deterministic") {
        s.post_default = PostDefaultCurve::Deterministic;
    } else {
        throw ConfigError(cfg.source_name() + ": post_default.curve must be flat or "
                          "deterministic, got '" + curve + "'");
    }
    s.post_default_rate = cfg.get_double_or("post_default.rate", 0.0);

    switch (s.kind) {
        case Kind::Kind1:
            s.kind1_volatility = cfg.get_double_or("kind1.volatility", s.kind1_volatility);
            break;
        case Kind::Kind2Canonical:
            s.kind2_z0 = cfg.get_double_or("kind2.z0", s.kind2_z0);
            break;
        case Kind::Kind3Hyper:
            s.kind3_x0 = cfg.get_double_or("kind3.x0", s.kind3_x0);
            break;
        case Kind::Kind4Composite:
            s.kind4_x0 = cfg.get_double_or("kind4.x0", s.kind4_x0);
            s.kind4_z0 = cfg.get_double_or("kind4.z0", s.kind4_z0);
            s.kind4_seed_offset = cfg.get_uint_or("kind4.seed_offset", s.kind4_seed_offset);
            break;
        case Kind::PureIlliquidity: {
            if (cfg.has("pure.x")) {
                const auto xs = cfg.get_double_list("pure.x");
                if (xs.size() != 4) {
                    throw ConfigError(cfg.source_name() + ": pure.x must have 4 components");
                }
                for (std::size_t i = 0; i < 4; ++i) s.pure_x[i] = xs[i];
            }
            const std::string ftype = cfg.get_string_or("pure.f", "constant");
            if (ftype == "constant") {
                s.pure_f.type = FunctionSpec::Type::Constant;
            } else if (ftype == "exponential") {
                s.pure_f.type = FunctionSpec::Type::Exponential;
            } else {
                throw ConfigError(cfg.source_name() +
                                  ": pure.f must be constant or exponential, got '" + ftype +
                                  "'");
            }
            s.pure_f.f0 = cfg.get_double_or("pure.f0", 1.0);
            s.pure_f.rate = cfg.get_double_or("pure.f_rate", 0.0);
            break;
        }
    }
    cfg.reject_unconsumed();
    s.validate();
    return s;
}

ScenarioSpec ScenarioSpec::from_file(const std::string& path) {
    return from_config(Config::parse_file(path));
}

void ScenarioSpec::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("scenario: horizon must be > 0");
    if (n_paths == 0) throw std::invalid_argument("scenario: n_paths must be >= 1");
    if (!(grid_base_dt > 0.0)) throw std::invalid_argument("scenario: grid.base_dt must be > 0");
    if (grid_refine && !(grid_eps_floor > 0.0)) {
        throw std::invalid_argument("scenario: grid.eps_floor is required when grid.refine");
    }
    if (!(grid_tail_ratio > 0.0) || !(grid_tail_ratio < 1.0)) {
        throw std::invalid_argument("scenario: grid.tail_ratio must lie in (0,1)");
    }
    switch (kind) {
        case Kind::Kind1:
            if (!(kind1_volatility > 0.0) || kind1_volatility > 4.0) {
                throw std::invalid_argument("scenario: kind1.volatility must lie in (0, 4]");
            }
            break;
        case Kind::Kind2Canonical:
            if (!(kind2_z0 > 0.0)) throw std::invalid_argument("scenario: kind2.z0 must be > 0");
            break;
        case Kind::Kind3Hyper:
            if (!(kind3_x0 > 0.0)) throw std::invalid_argument("scenario: kind3.x0 must be > 0");
            break;
        case Kind::Kind4Composite:
            if (!(kind4_x0 > 0.0) || !(kind4_z0 > 0.0)) {
                throw std::invalid_argument("scenario: kind4 start levels must be > 0");
            }
            break;
        case Kind::PureIlliquidity:
            if (!(pure_norm_sq() > 0.0)) {
                throw std::invalid_argument("scenario: pure.x must be a nonzero vector");
            }
            if (!(pure_f.f0 > 0.0)) {
                throw std::invalid_argument("scenario: pure.f0 must be > 0");
            }
            break;
    }
}

void MarketPaths::check_invariants() const {
    const std::size_t nt = grid.size();
    auto fail = [](const std::string& what) { throw std::runtime_error("MarketPaths: " + what); };
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (std::abs(b_at(p, 0) - 1.0) > 1e-12) fail("B_0 != 1");
        if (std::abs(bcheck_at(p, 0) - 1.0) > 1e-12) fail("Bcheck_0 != 1");
        if (std::abs(density.z_at(p, 0) - 1.0) > 1e-12) fail("Z_0 != 1");
        for (std::size_t i = 0; i < nt; ++i) {
            const double s = s_at(p, i);
            if (!(s > 0.0) || s > 1.0 || !std::isfinite(s)) fail("S outside (0,1]");
            if (density.tau.alive_at(p, i)) {
                if (!(b_at(p, i) > 0.0) || !std::isfinite(b_at(p, i))) fail("B not positive");
                if (!(bcheck_at(p, i) > 0.0) || !std::isfinite(bcheck_at(p, i))) {
                    fail("Bcheck not positive");
                }
                if (!(density.z_at(p, i) > 0.0)) fail("Z not positive before tau");
            }
        }
    }
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

namespace {

AbsorptionInfo never_info(std::size_t n_paths) {
    AbsorptionInfo info;
    info.tau_index.assign(n_paths, AbsorptionInfo::kNever);
    info.tau_time.assign(n_paths, kInf);
    return info;
}

void fill_constant(std::vector<double>& a, std::size_t n, double v) { a.assign(n, v); }

}  // namespace

MarketPaths Scenario::simulate(Measure m, const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t seed, unsigned threads) const {
    MarketPaths out;
    out.grid = grid;
    out.measure = m;
    out.n_paths = n_paths;
    const std::size_t nt = grid.size();
    const std::size_t total = nt * n_paths;
    GeneralizedDensity& d = out.density;
    d.grid = grid;
    d.n_paths = n_paths;
    d.native = m;

    switch (spec_.kind) {
        case Kind::Kind1: {
            const double vol = spec_.kind1_volatility;
            const PathSet w = simulate_bm(grid, 1, n_paths, seed, 0, threads);
            fill_constant(out.S, total, 1.0);
            fill_constant(out.B, total, 1.0);
            out.Bcheck.resize(total);
            d.z.resize(total);
            d.zcheck.resize(total);
            d.tau = never_info(n_paths);
            for (std::size_t i = 0; i < nt; ++i) {
                const double drift = -0.5 * vol * vol * grid[i];
                for (std::size_t p = 0; p < n_paths; ++p) {
                    // Under Q the exponential martingale Z = exp(vol W - vol^2 t/2);
                    // under Qcheck the simulated Brownian motion plays the
                    // Girsanov-shifted role and 1/Z is the exponential martingale.
                    const double zval = (m == Measure::Q)
                                            ? std::exp(vol * w.value(p, i) + drift)
                                            : std::exp(vol * w.value(p, i) - drift);
                    d.z[i * n_paths + p] = zval;
                    d.zcheck[i * n_paths + p] = 1.0 / zval;
                    out.Bcheck[i * n_paths + p] = zval;
                }
            }
            break;
        }
        case Kind::Kind2Canonical: {
            const double z0 = spec_.kind2_z0;
            fill_constant(out.S, total, 1.0);
            fill_constant(out.B, total, 1.0);
            out.Bcheck.resize(total);
            d.z.resize(total);
            d.zcheck.resize(total);
            if (m == Measure::Q) {
                const PathSet x = simulate_bes3(grid, z0, n_paths, seed, 0, threads);
                d.tau = never_info(n_paths);
                for (std::size_t i = 0; i < nt * n_paths; ++i) {
                    const double zval = z0 / x.data[i];
                    d.z[i] = zval;
                    d.zcheck[i] = 1.0 / zval;
                    out.Bcheck[i] = zval;
                }
            } else {
                const auto res = simulate_stopped_bm(grid, z0, n_paths, seed, 0,
                                                     /*bridge=*/true, threads);
                d.tau = res.absorption;
                for (std::size_t i = 0; i < nt * n_paths; ++i) {
                    const double w = res.paths.data[i];
                    const double zval = (w > 0.0) ? z0 / w : 0.0;
                    d.z[i] = zval;
                    d.zcheck[i] = w / z0;
                    out.Bcheck[i] = zval;
                }
            }
            break;
        }
        case Kind::Kind3Hyper: {
            const double x0 = spec_.kind3_x0;
            const PathSet x = simulate_bes3(grid, x0, n_paths, seed, 0, threads);
            fill_constant(out.S, total, 1.0);
            out.B.resize(total);
            out.Bcheck.resize(total);
            fill_constant(d.z, total, 1.0);
            fill_constant(d.zcheck, total, 1.0);
            d.tau = never_info(n_paths);
            for (std::size_t i = 0; i < nt * n_paths; ++i) {
                const double b = x.data[i] / x0;
                out.B[i] = b;
                out.Bcheck[i] = b;
            }
            break;
        }
        case Kind::Kind4Composite: {
            const double x0 = spec_.kind4_x0;
            const double z0 = spec_.kind4_z0;
            const PathSet xp = simulate_bes3(grid, x0, n_paths, seed, 0, threads);
            fill_constant(out.S, total, 1.0);
            out.B.resize(total);
            out.Bcheck.resize(total);
            d.z.resize(total);
            d.zcheck.resize(total);
            for (std::size_t i = 0; i < nt * n_paths; ++i) out.B[i] = xp.data[i] / x0;
            if (m == Measure::Q) {
                const PathSet xz =
                    simulate_bes3(grid, z0, n_paths, seed, spec_.kind4_seed_offset, threads);
                d.tau = never_info(n_paths);
                for (std::size_t i = 0; i < nt * n_paths; ++i) {
                    const double zval = z0 / xz.data[i];
                    d.z[i] = zval;
                    d.zcheck[i] = 1.0 / zval;
                    out.Bcheck[i] = out.B[i] * zval;
                }
            } else {
                const auto res = simulate_stopped_bm(grid, z0, n_paths, seed,
                                                     spec_.kind4_seed_offset,
                                                     /*bridge=*/true, threads);
                d.tau = res.absorption;
                for (std::size_t i = 0; i < nt * n_paths; ++i) {
                    const double w = res.paths.data[i];
                    const double zval = (w > 0.0) ? z0 / w : 0.0;
                    d.z[i] = zval;
                    d.zcheck[i] = w / z0;
                    out.Bcheck[i] = out.B[i] * zval;
                }
            }
            break;
        }
        case Kind::PureIlliquidity: {
            const double n0 = spec_.pure_norm_sq();
            const FunctionSpec& f = spec_.pure_f;
            out.S.assign(total, 1.0);
            out.B.resize(total);
            out.Bcheck.resize(total);
            d.z.resize(total);
            d.zcheck.resize(total);
            const auto& t = grid.times();
            if (m == Measure::Q) {
                d.tau = never_info(n_paths);
                parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
                    for (std::size_t p = begin; p < end; ++p) {
                        rng::PathStream gen(seed, p);
                        double y0 = spec_.pure_x[0], y1 = spec_.pure_x[1];
                        double y2 = spec_.pure_x[2], y3 = spec_.pure_x[3];
                        for (std::size_t i = 0; i < nt; ++i) {
                            if (i > 0) {
                                const double sdt = std::sqrt(t[i] - t[i - 1]);
                                y0 += sdt * gen.next_gaussian();
                                y1 += sdt * gen.next_gaussian();
                                y2 += sdt * gen.next_gaussian();
                                y3 += sdt * gen.next_gaussian();
                            }
                            const double n4 = y0 * y0 + y1 * y1 + y2 * y2 + y3 * y3;
                            d.z[i * n_paths + p] = n0 / n4;
                            d.zcheck[i * n_paths + p] = n4 / n0;
                        }
                    }
                });
            } else {
                // Squared Bessel(0): exact Poisson-Gamma transitions, absorbed at 0.
                d.tau.tau_index.assign(n_paths, AbsorptionInfo::kNever);
                d.tau.tau_time.assign(n_paths, kInf);
                parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
                    for (std::size_t p = begin; p < end; ++p) {
                        rng::PathStream gen(seed, p);
                        double n4 = n0;
                        for (std::size_t i = 0; i < nt; ++i) {
                            if (i > 0 && n4 > 0.0) {
                                const double dt = t[i] - t[i - 1];
                                const auto k = gen.next_poisson(0.5 * n4 / dt);
                                n4 = (k == 0) ? 0.0
                                              : 2.0 * dt * gen.next_gamma(static_cast<double>(k));
                                if (n4 == 0.0) {
                                    d.tau.tau_index[p] = static_cast<std::int64_t>(i);
                                    d.tau.tau_time[p] = t[i];
                                }
                            }
                            d.z[i * n_paths + p] = (n4 > 0.0) ? n0 / n4 : 0.0;
                            d.zcheck[i * n_paths + p] = n4 / n0;
                        }
                    }
                });
            }
            for (std::size_t i = 0; i < nt; ++i) {
                const double ft = f(t[i]);
                const double bc = f(0.0) / ft;
                for (std::size_t p = 0; p < n_paths; ++p) {
                    const double n4 = n0 * d.zcheck[i * n_paths + p];
                    out.B[i * n_paths + p] = n4 * f(0.0) / (ft * n0);
                    out.Bcheck[i * n_paths + p] = bc;
                }
            }
            break;
        }
    }
    return out;
}

double Scenario::post_default_value(double t, double T) const {
    if (spec_.post_default == PostDefaultCurve::Flat) return 1.0;
    return std::exp(-spec_.post_default_rate * (T - t));
}

std::vector<double> Scenario::q_price(const MarketPaths& m, double t, double T) const {
    if (t > T) throw std::invalid_argument("q_price: t must not exceed T");
    const std::size_t it = m.grid.index_of(t);
    std::vector<double> out(m.n_paths, 1.0);
    switch (spec_.kind) {
        case Kind::Kind1:
        case Kind::Kind3Hyper:
            break;  // no default state
        case Kind::Kind2Canonical:
        case Kind::Kind4Composite:
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                if (!m.tau().alive_at(p, it)) out[p] = 0.0;
            }
            break;
        case Kind::PureIlliquidity: {
            const double n0 = spec_.pure_norm_sq();
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                const bool alive = m.tau().alive_at(p, it);
                if (t == T) {
                    out[p] = alive ? 1.0 : 0.0;
                } else {
                    const double n4 = n0 * m.density.zcheck_at(p, it);
                    out[p] = pure_illiquidity_price(t, T, n4, spec_.pure_f);
                }
            }
            break;
        }
    }
    return out;
}

std::vector<double> Scenario::qcheck_price(const MarketPaths& m, double t, double T) const {
    if (t > T) throw std::invalid_argument("qcheck_price: t must not exceed T");
    const std::size_t it = m.grid.index_of(t);
    std::vector<double> out(m.n_paths, 1.0);
    if (t == T) return out;  // empty discounting window
    const double dflt = post_default_value(t, T);
    const double dt = T - t;
    switch (spec_.kind) {
        case Kind::Kind1:
            break;  // ratio of a positive Qcheck-martingale: identically 1
        case Kind::Kind2Canonical: {
            const double z0 = spec_.kind2_z0;
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                if (m.tau().alive_at(p, it)) {
                    const double w = z0 * m.density.zcheck_at(p, it);
                    out[p] = 1.0 + dflt * bm_default_prob(w, dt);
                } else {
                    out[p] = dflt;
                }
            }
            break;
        }
        case Kind::Kind3Hyper: {
            const double x0 = spec_.kind3_x0;
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                out[p] = hyperliquidity_price(t, T, x0 * m.b_at(p, it));
            }
            break;
        }
        case Kind::Kind4Composite: {
            const double x0 = spec_.kind4_x0;
            const double z0 = spec_.kind4_z0;
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                const double xp = x0 * m.b_at(p, it);
                if (m.tau().alive_at(p, it)) {
                    const double w = z0 * m.density.zcheck_at(p, it);
                    out[p] = hyperliquidity_price(t, T, xp) + dflt * bm_default_prob(w, dt);
                } else {
                    out[p] = dflt;
                }
            }
            break;
        }
        case Kind::PureIlliquidity: {
            // Deterministic discount factors; the replacement account never
            // engages because the foreign account does not explode here.
            const double v = pure_fundamental_price(t, T, spec_.pure_f);
            std::fill(out.begin(), out.end(), v);
            break;
        }
    }
    return out;
}

std::vector<double> Scenario::default_prob(const MarketPaths& m, double t, double T) const {
    if (t > T) throw std::invalid_argument("default_prob: t must not exceed T");
    const std::size_t it = m.grid.index_of(t);
    std::vector<double> out(m.n_paths, 0.0);
    const double dt = T - t;
    switch (spec_.kind) {
        case Kind::Kind1:
        case Kind::Kind3Hyper:
            break;
        case Kind::Kind2Canonical:
        case Kind::Kind4Composite: {
            const double z0 =
                (spec_.kind == Kind::Kind2Canonical) ? spec_.kind2_z0 : spec_.kind4_z0;
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                out[p] = m.tau().alive_at(p, it)
                             ? bm_default_prob(z0 * m.density.zcheck_at(p, it), dt)
                             : 1.0;
            }
            break;
        }
        case Kind::PureIlliquidity: {
            const double n0 = spec_.pure_norm_sq();
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                out[p] = m.tau().alive_at(p, it)
                             ? besq0_absorption_prob(n0 * m.density.zcheck_at(p, it), dt)
                             : 1.0;
            }
            break;
        }
    }
    return out;
}

std::vector<double> Scenario::discount_factor(const MarketPaths& m, double t, double T) const {
    if (t > T) throw std::invalid_argument("discount_factor: t must not exceed T");
    const std::size_t it = m.grid.index_of(t);
    const std::size_t iT = m.grid.index_of(T);
    std::vector<double> out(m.n_paths);
    if (spec_.kind == Kind::PureIlliquidity) {
        std::fill(out.begin(), out.end(), pure_fundamental_price(t, T, spec_.pure_f));
        return out;
    }
    const double dflt = post_default_value(t, T);
    for (std::size_t p = 0; p < m.n_paths; ++p) {
        out[p] = m.tau().alive_at(p, iT) ? m.bcheck_at(p, it) / m.bcheck_at(p, iT) : dflt;
    }
    return out;
}

std::vector<double> Scenario::lower_bound(const MarketPaths& m, double t, double T) const {
    if (t > T) throw std::invalid_argument("lower_bound: t must not exceed T");
    const std::size_t it = m.grid.index_of(t);
    std::vector<double> out(m.n_paths, 1.0);
    if (t == T) return out;
    switch (spec_.kind) {
        case Kind::Kind1:
        case Kind::Kind2Canonical:
            break;  // B = 1, S_T = 1
        case Kind::Kind3Hyper: {
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                out[p] = hyperliquidity_price(t, T, spec_.kind3_x0 * m.b_at(p, it));
            }
            break;
        }
        case Kind::Kind4Composite: {
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                out[p] = hyperliquidity_price(t, T, spec_.kind4_x0 * m.b_at(p, it));
            }
            break;
        }
        case Kind::PureIlliquidity: {
            const double n0 = spec_.pure_norm_sq();
            for (std::size_t p = 0; p < m.n_paths; ++p) {
                const double n4 = n0 * m.density.zcheck_at(p, it);
                out[p] = pure_illiquidity_price(t, T, n4, spec_.pure_f);
            }
            break;
        }
    }
    return out;
}

double Scenario::q0(double T) const {
    if (spec_.kind == Kind::PureIlliquidity) {
        return pure_illiquidity_price(0.0, T, spec_.pure_norm_sq(), spec_.pure_f);
    }
    return 1.0;
}

double Scenario::qcheck0_closed(double T) const {
    const double dflt = post_default_value(0.0, T);
    switch (spec_.kind) {
        case Kind::Kind1: return 1.0;
        case Kind::Kind2Canonical: return 1.0 + dflt * bm_default_prob(spec_.kind2_z0, T);
        case Kind::Kind3Hyper: return hyperliquidity_price(0.0, T, spec_.kind3_x0);
        case Kind::Kind4Composite:
            return hyperliquidity_price(0.0, T, spec_.kind4_x0) +
                   dflt * bm_default_prob(spec_.kind4_z0, T);
        default: return pure_fundamental_price(0.0, T, spec_.pure_f);
    }
}

double Scenario::expected_deflator(double T) const {
    switch (spec_.kind) {
        case Kind::Kind1:
        case Kind::Kind3Hyper: return 1.0;
        case Kind::Kind2Canonical: return 1.0 - bm_default_prob(spec_.kind2_z0, T);
        case Kind::Kind4Composite: return 1.0 - bm_default_prob(spec_.kind4_z0, T);
        default: return 1.0 - besq0_absorption_prob(spec_.pure_norm_sq(), T);
    }
}

bool Scenario::z_true_martingale() const {
    return spec_.kind == Kind::Kind1 || spec_.kind == Kind::Kind3Hyper;
}

bool Scenario::pb_true_martingale() const {
    return spec_.kind == Kind::Kind1 || spec_.kind == Kind::Kind2Canonical ||
           spec_.kind == Kind::PureIlliquidity;
}

std::vector<double> Scenario::z_terminal(const MarketPaths& m, double T) const {
    const std::size_t iT = m.grid.index_of(T);
    const auto slice = m.density.z_slice(iT);
    return {slice.begin(), slice.end()};
}

std::vector<double> Scenario::pb_normalized_terminal(const MarketPaths& m, double T) const {
    if (m.measure != Measure::Q) {
        throw std::invalid_argument("pb_normalized_terminal: needs a Q-measure run");
    }
    const std::size_t iT = m.grid.index_of(T);
    std::vector<double> out(m.n_paths, 1.0);
    switch (spec_.kind) {
        case Kind::Kind1:
        case Kind::Kind2Canonical:
            break;  // discounted bond identically 1
        case Kind::Kind3Hyper:
        case Kind::Kind4Composite:
            for (std::size_t p = 0; p < m.n_paths; ++p) out[p] = 1.0 / m.b_at(p, iT);
            break;
        case Kind::PureIlliquidity: {
            const double p0 = q0(T);
            for (std::size_t p = 0; p < m.n_paths; ++p) out[p] = 1.0 / (m.b_at(p, iT) * p0);
            break;
        }
    }
    return out;
}

double Scenario::nested_qcheck(const MarketPaths& m, std::size_t p, double t, double T,
                               std::size_t n_inner, std::uint64_t seed) const {
    if (t > T) throw std::invalid_argument("nested_qcheck: t must not exceed T");
    if (t == T) return 1.0;
    if (n_inner == 0) throw std::invalid_argument("nested_qcheck: n_inner must be >= 1");
    if (spec_.kind == Kind::PureIlliquidity) {
        return pure_fundamental_price(t, T, spec_.pure_f);
    }
    const std::size_t it = m.grid.index_of(t);
    const double dt = T - t;
    const double sdt = std::sqrt(dt);
    const double dflt = post_default_value(t, T);
    rng::PathStream gen(rng::mix64(seed ^ rng::mix64(p + 1)), p);

    switch (spec_.kind) {
        case Kind::Kind1: {
            const double vol = spec_.kind1_volatility;
            double acc = 0.0;
            for (std::size_t k = 0; k < n_inner; ++k) {
                acc += std::exp(-vol * sdt * gen.next_gaussian() - 0.5 * vol * vol * dt);
            }
            return acc / static_cast<double>(n_inner);
        }
        case Kind::Kind2Canonical: {
            if (!m.tau().alive_at(p, it)) return dflt;
            const double w0 = spec_.kind2_z0 * m.density.zcheck_at(p, it);
            double acc = 0.0;
            for (std::size_t k = 0; k < n_inner; ++k) {
                const double w = w0 + sdt * gen.next_gaussian();
                if (w <= 0.0 || gen.next_uniform() < std::exp(-2.0 * w0 * w / dt)) {
                    acc += dflt;
                } else {
                    acc += w / w0;
                }
            }
            return acc / static_cast<double>(n_inner);
        }
        case Kind::Kind3Hyper: {
            const double x = spec_.kind3_x0 * m.b_at(p, it);
            double acc = 0.0;
            for (std::size_t k = 0; k < n_inner; ++k) {
                const double y0 = x + sdt * gen.next_gaussian();
                const double y1 = sdt * gen.next_gaussian();
                const double y2 = sdt * gen.next_gaussian();
                acc += x / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
            }
            return acc / static_cast<double>(n_inner);
        }
        case Kind::Kind4Composite: {
            const double xp = spec_.kind4_x0 * m.b_at(p, it);
            const bool alive = m.tau().alive_at(p, it);
            const double w0 = alive ? spec_.kind4_z0 * m.density.zcheck_at(p, it) : 0.0;
            double acc = 0.0;
            for (std::size_t k = 0; k < n_inner; ++k) {
                const double y0 = xp + sdt * gen.next_gaussian();
                const double y1 = sdt * gen.next_gaussian();
                const double y2 = sdt * gen.next_gaussian();
                const double xratio = xp / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
                if (!alive) {
                    acc += dflt;
                    continue;
                }
                const double w = w0 + sdt * gen.next_gaussian();
                if (w <= 0.0 || gen.next_uniform() < std::exp(-2.0 * w0 * w / dt)) {
                    acc += dflt;
                } else {
                    acc += xratio * (w / w0);
                }
            }
            return acc / static_cast<double>(n_inner);
        }
        default: return pure_fundamental_price(t, T, spec_.pure_f);
    }
}

NestedDeflatorSampler Scenario::make_deflator_sampler(const MarketPaths& m, double t,
                                                      double T) const {
    if (!(t < T)) throw std::invalid_argument("make_deflator_sampler: needs t < T");
    const std::size_t it = m.grid.index_of(t);
    const double dt = T - t;
    const double sdt = std::sqrt(dt);
    const Kind kind = spec_.kind;
    const ScenarioSpec spec = spec_;
    const MarketPaths* mp = &m;

    return [kind, spec, mp, it, dt, sdt](std::size_t p, rng::PathStream& gen) -> double {
        switch (kind) {
            case Kind::Kind1: {
                const double vol = spec.kind1_volatility;
                return std::exp(vol * sdt * gen.next_gaussian() - 0.5 * vol * vol * dt);
            }
            case Kind::Kind2Canonical:
            case Kind::Kind4Composite: {
                // Z = z0 / Bes3; one exact step of the Bessel leg.
                const double z0 =
                    (kind == Kind::Kind2Canonical) ? spec.kind2_z0 : spec.kind4_z0;
                const double x = z0 * mp->density.zcheck_at(p, it);
                const double y0 = x + sdt * gen.next_gaussian();
                const double y1 = sdt * gen.next_gaussian();
                const double y2 = sdt * gen.next_gaussian();
                return x / std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
            }
            case Kind::Kind3Hyper: return 1.0;
            default: {
                // Squared Bessel(4) step for the squared norm.
                const double n4 = spec.pure_norm_sq() * mp->density.zcheck_at(p, it);
                const double y0 = std::sqrt(n4) + sdt * gen.next_gaussian();
                const double y1 = sdt * gen.next_gaussian();
                const double y2 = sdt * gen.next_gaussian();
                const double y3 = sdt * gen.next_gaussian();
                return n4 / (y0 * y0 + y1 * y1 + y2 * y2 + y3 * y3);
            }
        }
    };
}

double hyperliquidity_price(double t, double T, double x) {
    if (!(t < T)) throw std::invalid_argument("hyperliquidity_price: requires t < T");
    if (!(x > 0.0)) throw std::invalid_argument("hyperliquidity_price: requires x > 0");
    return 1.0 - 2.0 * normal_cdf(-x / std::sqrt(T - t));
}

double pure_illiquidity_price(double t, double T, double norm_sq, const FunctionSpec& f,
                              bool at_maturity) {
    if (t == T) {
        if (at_maturity) return 1.0;
        throw std::invalid_argument(
            "pure_illiquidity_price: degenerate at t == T (pass at_maturity for the payoff)");
    }
    if (!(t < T)) throw std::invalid_argument("pure_illiquidity_price: requires t < T");
    if (norm_sq < 0.0) throw std::invalid_argument("pure_illiquidity_price: negative norm");
    return f(T) / f(t) * (1.0 - std::exp(-0.5 * norm_sq / (T - t)));
}

double pure_fundamental_price(double t, double T, const FunctionSpec& f) {
    if (!(t <= T)) throw std::invalid_argument("pure_fundamental_price: requires t <= T");
    return f(T) / f(t);
}

const char* to_string(MarketKindCell c) {
    switch (c) {
        case MarketKindCell::First: return "model of the 1st kind";
        case MarketKindCell::Second: return "model of the 2nd kind";
        case MarketKindCell::Third: return "model of the 3rd kind";
        case MarketKindCell::Fourth: return "model of the 4th kind";
        default: return "indeterminate";
    }
}

const char* premium_sign_prediction(MarketKindCell c) {
    switch (c) {
        case MarketKindCell::First: return "zero";
        case MarketKindCell::Second: return "non-negative";
        case MarketKindCell::Third: return "non-positive";
        case MarketKindCell::Fourth: return "state-dependent";
        default: return "unknown";
    }
}

KindClassification classify_kind(const Scenario& sc, double T_probe, std::size_t n_paths,
                                 double confidence, std::uint64_t seed, unsigned threads) {
    if (!(T_probe > 0.0)) throw std::invalid_argument("classify_kind: T_probe must be > 0");
    const TimeGrid grid = TimeGrid::from_times({0.0, T_probe});
    const MarketPaths run = sc.simulate(Measure::Q, grid, n_paths, seed, threads);

    KindClassification out;
    out.pb_test = defect_test(sc.pb_normalized_terminal(run, T_probe), 1.0, confidence,
                              sc.pb_true_martingale());
    out.z_test =
        defect_test(sc.z_terminal(run, T_probe), 1.0, confidence, sc.z_true_martingale());

    const Verdict pb = out.pb_test.verdict;
    const Verdict z = out.z_test.verdict;
    if (pb == Verdict::Inconclusive || z == Verdict::Inconclusive) {
        out.cell = MarketKindCell::Indeterminate;
    } else if (pb == Verdict::TrueMartingale && z == Verdict::TrueMartingale) {
        out.cell = MarketKindCell::First;
    } else if (pb == Verdict::TrueMartingale) {
        out.cell = MarketKindCell::Second;
    } else if (z == Verdict::TrueMartingale) {
        out.cell = MarketKindCell::Third;
    } else {
        out.cell = MarketKindCell::Fourth;
    }
    return out;
}

}  // namespace illiq
