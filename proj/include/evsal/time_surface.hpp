#pragma once

#include "evsal/events.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace evsal {

/// Per-pixel latest-event store. Each cell holds the timestamp of the most
/// recent event applied at that pixel, with no decay; older events at the
/// same pixel are forgotten entirely.
class time_surface {
public:
    static constexpr std::uint64_t empty_cell = std::numeric_limits<std::uint64_t>::max();

    explicit time_surface(sensor_geometry geometry);

    const sensor_geometry& geometry() const noexcept { return geometry_; }
    std::uint64_t last_update() const noexcept { return last_update_; }
    std::size_t population() const noexcept { return population_; }

    std::uint64_t cell(std::uint16_t x, std::uint16_t y) const {
        return cells_[static_cast<std::size_t>(y) * geometry_.width + x];
    }

    /// Overwrites cell (e.x, e.y) with e.t. Events must arrive in
    /// non-decreasing timestamp order.
    void update(const event& e);

    /// Number of non-empty cells within Manhattan distance `radius` of
    /// (cx, cy) whose age satisfies t_now - t <= t_window. Cells beyond the
    /// sensor border contribute nothing. Both inequalities are closed.
    std::uint32_t count_in_window(std::uint16_t cx, std::uint16_t cy, std::uint32_t radius,
                                  std::uint64_t t_now, std::uint64_t t_window) const;

    const std::uint64_t* row(std::uint16_t y) const {
        return cells_.data() + static_cast<std::size_t>(y) * geometry_.width;
    }

private:
    sensor_geometry geometry_;
    std::vector<std::uint64_t> cells_;
    std::uint64_t last_update_ = 0;
    std::size_t population_ = 0;
};

} // namespace evsal
