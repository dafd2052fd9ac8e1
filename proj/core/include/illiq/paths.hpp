// Exact-in-distribution simulation of the driving processes: Brownian
// motion, the three-dimensional Bessel process, and Brownian motion
// absorbed at the origin, plus hitting/explosion detection.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "illiq/grid.hpp"

namespace illiq {

enum class Measure { Q, Qcheck };

const char* to_string(Measure m);

// Sample paths of one (possibly multi-component) process on a shared
// grid.
//
// Storage is column-major in the (path x time) view: component c at
// grid index i occupies the contiguous block
//   data[(c * n_times + i) * n_paths + p],   p = 0..n_paths-1,
// which is the layout the CSV dumper documents and writes.
struct PathSet {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::size_t n_components = 1;
    Measure measure = Measure::Q;
    std::uint64_t seed = 0;
    std::uint64_t substream_offset = 0;
    std::vector<double> data;

    double value(std::size_t path, std::size_t t_index, std::size_t comp = 0) const {
        return data[(comp * grid.size() + t_index) * n_paths + path];
    }
    double& value(std::size_t path, std::size_t t_index, std::size_t comp = 0) {
        return data[(comp * grid.size() + t_index) * n_paths + path];
    }
    std::span<const double> at_time(std::size_t t_index, std::size_t comp = 0) const {
        return {data.data() + (comp * grid.size() + t_index) * n_paths, n_paths};
    }
};

// First absorption/explosion bookkeeping at grid resolution.
struct AbsorptionInfo {
    static constexpr std::int64_t kNever = -1;

    std::vector<std::int64_t> tau_index;  // grid index, or kNever
    std::vector<double> tau_time;         // grid time, or +infinity
    bool bridge_corrected = false;
    // Largest level of the detection ladder; "never" means the explosion
    // lies beyond this cap.
    double level_cap = std::numeric_limits<double>::infinity();

    bool never(std::size_t path) const { return tau_index[path] == kNever; }
    // True when the path is still alive at grid index i ("tau > t_i").
    bool alive_at(std::size_t path, std::size_t t_index) const {
        return never(path) || tau_index[path] > static_cast<std::int64_t>(t_index);
    }
    std::size_t n_absorbed_by(std::size_t t_index) const;
};

// dim-component standard Brownian motion started at the origin.
// antithetic: odd paths reuse the gaussians of the preceding even path
// with flipped sign.
PathSet simulate_bm(const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                    std::uint64_t seed, std::uint64_t substream_offset = 0,
                    unsigned threads = 1, bool antithetic = false);

// Bessel(3) process: Euclidean norm of a 3-d Brownian motion started at
// (x0, 0, 0).  Exact in distribution at the grid points.
PathSet simulate_bes3(const TimeGrid& grid, double x0, std::size_t n_paths,
                      std::uint64_t seed, std::uint64_t substream_offset = 0,
                      unsigned threads = 1);

// Brownian motion started at z0 > 0 and absorbed at the origin.  With
// bridge_correction an unobserved crossing between grid points i and
// i+1 is declared with probability exp(-2 z_i z_{i+1} / dt); the
// auxiliary uniforms come from a separate lane so that runs with the
// correction on and off share their gaussian increments.  Absorbed
// paths are frozen at 0, and the absorbed-by-T indicator is exact in
// distribution when the correction is on.
struct StoppedBmResult {
    PathSet paths;
    AbsorptionInfo absorption;
};
StoppedBmResult simulate_stopped_bm(const TimeGrid& grid, double z0, std::size_t n_paths,
                                    std::uint64_t seed, std::uint64_t substream_offset = 0,
                                    bool bridge_correction = true, unsigned threads = 1);

// Capped level-hitting times tau_n = n ^ inf{t : Z_t > n} for an
// increasing ladder of levels.  The reported time is the hitting time
// of the largest level when that hit occurs before its time cap;
// otherwise the path reports "never" (the explosion lies beyond the
// configured cap).
AbsorptionInfo detect_explosion(const PathSet& z_paths, std::span<const double> levels,
                                std::size_t comp = 0);

// Default level ladder {2^k : k = 1..30}.
std::vector<double> default_explosion_levels();

}  // namespace illiq
