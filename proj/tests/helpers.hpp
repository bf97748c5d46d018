#pragma once

#include "evsal/events.hpp"
#include "evsal/rng.hpp"

#include <cstdint>
#include <cstdlib>
#include <vector>

namespace evsal::testing {

/// Random in-bounds events with non-decreasing timestamps.
inline std::vector<event> random_events(rng& gen, sensor_geometry geometry, std::size_t count,
                                        std::uint64_t max_step_us = 2000) {
    std::vector<event> events;
    events.reserve(count);
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < count; ++i) {
        t += gen.below(max_step_us + 1);
        events.push_back({t, static_cast<std::uint16_t>(gen.below(geometry.width)),
                          static_cast<std::uint16_t>(gen.below(geometry.height)),
                          gen.below(2) == 1 ? polarity::on : polarity::off});
    }
    return events;
}

/// Reference latest-timestamp map, kept independent of the library types.
class naive_map {
public:
    explicit naive_map(sensor_geometry g)
        : geometry_(g), has_(g.pixel_count(), false), t_(g.pixel_count(), 0) {}

    void apply(const event& e) {
        const std::size_t i = static_cast<std::size_t>(e.y) * geometry_.width + e.x;
        has_[i] = true;
        t_[i] = e.t;
    }

    /// Counts by scanning the whole sensor with the textbook definition:
    /// Manhattan distance <= radius and age <= window, both closed, with
    /// anything at or after t_now counted as age zero.
    std::uint32_t count(std::uint16_t cx, std::uint16_t cy, std::uint32_t radius,
                        std::uint64_t t_now, std::uint64_t window) const {
        std::uint32_t n = 0;
        for (std::uint16_t y = 0; y < geometry_.height; ++y)
            for (std::uint16_t x = 0; x < geometry_.width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * geometry_.width + x;
                if (!has_[i])
                    continue;
                const std::uint32_t d =
                    static_cast<std::uint32_t>(std::abs(static_cast<int>(x) - cx)) +
                    static_cast<std::uint32_t>(std::abs(static_cast<int>(y) - cy));
                if (d > radius)
                    continue;
                const std::uint64_t age = t_[i] >= t_now ? 0 : t_now - t_[i];
                if (age <= window)
                    ++n;
            }
        return n;
    }

private:
    sensor_geometry geometry_;
    std::vector<bool> has_;
    std::vector<std::uint64_t> t_;
};

} // namespace evsal::testing
