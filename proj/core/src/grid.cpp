#include "illiq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illiq {

TimeGrid::TimeGrid(std::vector<double> times, std::optional<double> eps_floor)
    : times_(std::move(times)), eps_floor_(eps_floor) {
    validate();
}

void TimeGrid::validate() const {
    if (times_.empty()) throw std::invalid_argument("TimeGrid: empty grid");
    if (times_.front() != 0.0) throw std::invalid_argument("TimeGrid: times must start at 0");
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (!(times_[i] < times_[i + 1])) {
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
        }
    }
    if (!std::isfinite(times_.back())) throw std::invalid_argument("TimeGrid: non-finite time");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid::uniform: horizon must be > 0");
    if (steps == 0) throw std::invalid_argument("TimeGrid::uniform: steps must be >= 1");
    std::vector<double> t(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    }
    t.back() = horizon;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::from_times(std::vector<double> times) { return TimeGrid(std::move(times)); }

TimeGrid TimeGrid::refined(double horizon, double base_dt, double eps_floor,
                           double tail_ratio) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid::refined: horizon must be > 0");
    if (!(eps_floor > 0.0)) throw std::invalid_argument("TimeGrid::refined: eps_floor must be > 0");
    if (!(base_dt > eps_floor)) {
        throw std::invalid_argument("TimeGrid::refined: base_dt must exceed eps_floor");
    }
    if (!(tail_ratio > 0.0) || !(tail_ratio < 1.0)) {
        throw std::invalid_argument("TimeGrid::refined: tail_ratio must lie in (0,1)");
    }
    // Offsets from the horizon: one eps_floor step, then spacings growing
    // by 1/tail_ratio until they reach base_dt.
    std::vector<double> offsets{0.0, eps_floor};
    double gap = eps_floor / tail_ratio;
    while (gap < base_dt * (1.0 - 1e-12)) {
        offsets.push_back(offsets.back() + gap);
        gap /= tail_ratio;
    }
    const double tail_span = offsets.back();
    if (!(tail_span < horizon)) {
        throw std::invalid_argument("TimeGrid::refined: horizon too short for the tail");
    }

    const double body_end = horizon - tail_span;
    const auto body_steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(body_end / base_dt + 1e-12)));
    std::vector<double> t;
    t.reserve(body_steps + offsets.size());
    for (std::size_t i = 0; i < body_steps; ++i) {
        t.push_back(body_end * static_cast<double>(i) / static_cast<double>(body_steps));
    }
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
        t.push_back(horizon - *it);
    }
    return TimeGrid(std::move(t), eps_floor);
}

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-12);
    if (it == times_.end() || std::abs(*it - t) > 1e-12) {
        throw std::invalid_argument("TimeGrid: requested time is not a grid point");
    }
    return static_cast<std::size_t>(it - times_.begin());
}

bool TimeGrid::contains(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-12);
    return it != times_.end() && std::abs(*it - t) <= 1e-12;
}

}  // namespace illiq
