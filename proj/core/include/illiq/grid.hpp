// Simulation time grids.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace illiq {

// Strictly increasing grid of observation times starting at 0.
//
// The refined factory produces the layout used by the hedging
// experiments: a uniform body with spacing ~base_dt followed by a
// geometric tail whose spacings shrink by tail_ratio per step towards
// the horizon, ending with one step of exactly eps_floor.
class TimeGrid {
  public:
    TimeGrid() : times_{0.0} {}  // trivial grid {0}

    static TimeGrid uniform(double horizon, std::size_t steps);
    static TimeGrid from_times(std::vector<double> times);
    static TimeGrid refined(double horizon, double base_dt, double eps_floor,
                            double tail_ratio = 0.5);

    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    const std::vector<double>& times() const { return times_; }
    double horizon() const { return times_.back(); }

    // Exact grid membership (tolerance 1e-12 absolute); throws
    // std::invalid_argument when t is not a grid point.
    std::size_t index_of(double t) const;
    bool contains(double t) const;

    // Floor of the geometric tail; unset for plain grids.
    std::optional<double> eps_floor() const { return eps_floor_; }

  private:
    explicit TimeGrid(std::vector<double> times, std::optional<double> eps_floor = {});
    void validate() const;

    std::vector<double> times_;
    std::optional<double> eps_floor_;
};

}  // namespace illiq
