#include "illiq/paths.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "illiq/parallel.hpp"
#include "illiq/rng.hpp"

namespace illiq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bridge uniforms live in their own lane so that toggling the
// correction does not shift the gaussian draws.
constexpr std::uint64_t kBridgeLane = 0x4000000000000000ull;

void check_counts(const TimeGrid& grid, std::size_t n_paths) {
    if (grid.size() < 1) throw std::invalid_argument("simulate: empty grid");
    if (n_paths == 0) throw std::invalid_argument("simulate: n_paths must be >= 1");
}

}  // namespace

const char* to_string(Measure m) { return m == Measure::Q ? "Q" : "Qcheck"; }

std::size_t AbsorptionInfo::n_absorbed_by(std::size_t t_index) const {
    std::size_t n = 0;
    for (std::size_t p = 0; p < tau_index.size(); ++p) {
        if (!alive_at(p, t_index)) ++n;
    }
    return n;
}

PathSet simulate_bm(const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                    std::uint64_t seed, std::uint64_t substream_offset, unsigned threads,
                    bool antithetic) {
    check_counts(grid, n_paths);
    if (dim == 0) throw std::invalid_argument("simulate_bm: dim must be >= 1");

    PathSet out;
    out.grid = grid;
    out.n_paths = n_paths;
    out.n_components = dim;
    out.seed = seed;
    out.substream_offset = substream_offset;
    out.data.assign(dim * grid.size() * n_paths, 0.0);

    const auto& t = grid.times();
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> state(dim);
        for (std::size_t p = begin; p < end; ++p) {
            // Antithetic pairs share the stream of their even member.
            const std::size_t src = antithetic ? (p & ~std::size_t{1}) : p;
            const double sign = (antithetic && (p & 1)) ? -1.0 : 1.0;
            rng::PathStream gen(seed, substream_offset + src);
            std::fill(state.begin(), state.end(), 0.0);
            for (std::size_t c = 0; c < dim; ++c) out.value(p, 0, c) = 0.0;
            for (std::size_t i = 1; i < t.size(); ++i) {
                const double sdt = std::sqrt(t[i] - t[i - 1]);
                for (std::size_t c = 0; c < dim; ++c) {
                    state[c] += sign * sdt * gen.next_gaussian();
                    out.value(p, i, c) = state[c];
                }
            }
        }
    });
    return out;
}

PathSet simulate_bes3(const TimeGrid& grid, double x0, std::size_t n_paths, std::uint64_t seed,
                      std::uint64_t substream_offset, unsigned threads) {
    check_counts(grid, n_paths);
    if (!(x0 > 0.0)) throw std::invalid_argument("simulate_bes3: x0 must be > 0");

    PathSet out;
    out.grid = grid;
    out.n_paths = n_paths;
    out.measure = Measure::Q;
    out.seed = seed;
    out.substream_offset = substream_offset;
    out.data.assign(grid.size() * n_paths, 0.0);

    const auto& t = grid.times();
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            rng::PathStream gen(seed, substream_offset + p);
            double y0 = x0, y1 = 0.0, y2 = 0.0;
            out.value(p, 0) = x0;
            for (std::size_t i = 1; i < t.size(); ++i) {
                const double sdt = std::sqrt(t[i] - t[i - 1]);
                y0 += sdt * gen.next_gaussian();
                y1 += sdt * gen.next_gaussian();
                y2 += sdt * gen.next_gaussian();
                out.value(p, i) = std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
            }
        }
    });
    return out;
}

StoppedBmResult simulate_stopped_bm(const TimeGrid& grid, double z0, std::size_t n_paths,
                                    std::uint64_t seed, std::uint64_t substream_offset,
                                    bool bridge_correction, unsigned threads) {
    check_counts(grid, n_paths);
    if (!(z0 > 0.0)) throw std::invalid_argument("simulate_stopped_bm: z0 must be > 0");

    StoppedBmResult res;
    PathSet& out = res.paths;
    out.grid = grid;
    out.n_paths = n_paths;
    out.measure = Measure::Qcheck;
    out.seed = seed;
    out.substream_offset = substream_offset;
    out.data.assign(grid.size() * n_paths, 0.0);

    AbsorptionInfo& abs = res.absorption;
    abs.tau_index.assign(n_paths, AbsorptionInfo::kNever);
    abs.tau_time.assign(n_paths, kInf);
    abs.bridge_corrected = bridge_correction;

    const auto& t = grid.times();
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            rng::PathStream gen(seed, substream_offset + p);
            rng::PathStream bridge(rng::mix64(seed), (substream_offset + p) | kBridgeLane);
            double z = z0;
            out.value(p, 0) = z0;
            bool absorbed = false;
            for (std::size_t i = 1; i < t.size(); ++i) {
                if (absorbed) {
                    out.value(p, i) = 0.0;
                    continue;
                }
                const double dt = t[i] - t[i - 1];
                const double w = z + std::sqrt(dt) * gen.next_gaussian();
                if (w <= 0.0) {
                    absorbed = true;
                } else if (bridge_correction &&
                           bridge.next_uniform() < std::exp(-2.0 * z * w / dt)) {
                    absorbed = true;
                }
                if (absorbed) {
                    abs.tau_index[p] = static_cast<std::int64_t>(i);
                    abs.tau_time[p] = t[i];
                    out.value(p, i) = 0.0;
                } else {
                    z = w;
                    out.value(p, i) = z;
                }
            }
        }
    });
    return res;
}

AbsorptionInfo detect_explosion(const PathSet& z_paths, std::span<const double> levels,
                                std::size_t comp) {
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        if (!(levels[k] < levels[k + 1])) {
            throw std::invalid_argument("detect_explosion: levels must be strictly increasing");
        }
    }
    for (double lv : levels) {
        if (!(lv > 0.0)) throw std::invalid_argument("detect_explosion: levels must be positive");
    }

    AbsorptionInfo info;
    info.tau_index.assign(z_paths.n_paths, AbsorptionInfo::kNever);
    info.tau_time.assign(z_paths.n_paths, kInf);
    if (levels.empty()) return info;

    const double top = levels.back();
    info.level_cap = top;
    const auto& t = z_paths.grid.times();
    for (std::size_t p = 0; p < z_paths.n_paths; ++p) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] > top) break;  // time cap of the top level
            if (z_paths.value(p, i, comp) > top) {
                info.tau_index[p] = static_cast<std::int64_t>(i);
                info.tau_time[p] = t[i];
                break;
            }
        }
    }
    return info;
}

std::vector<double> default_explosion_levels() {
    std::vector<double> lv(30);
    double v = 2.0;
    for (auto& x : lv) {
        x = v;
        v *= 2.0;
    }
    return lv;
}

}  // namespace illiq
