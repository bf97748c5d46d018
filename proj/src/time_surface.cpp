#include "evsal/time_surface.hpp"

#include <algorithm>
#include <string>

namespace evsal {

time_surface::time_surface(sensor_geometry geometry)
    : geometry_(geometry), cells_(geometry.pixel_count(), empty_cell) {
    if (geometry.width == 0 || geometry.height == 0)
        throw validation_error("time surface geometry must be at least 1x1");
}

void time_surface::update(const event& e) {
    if (!geometry_.contains(e.x, e.y))
        throw validation_error("event pixel (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                               ") outside " + std::to_string(geometry_.width) + "x" +
                               std::to_string(geometry_.height) + " surface");
    if (e.t < last_update_)
        throw validation_error("event timestamp " + std::to_string(e.t) +
                               " regresses below surface time " + std::to_string(last_update_));
    if (e.t == empty_cell)
        throw validation_error("event timestamp equals the empty-cell sentinel");
    std::uint64_t& c = cells_[static_cast<std::size_t>(e.y) * geometry_.width + e.x];
    if (c == empty_cell)
        ++population_;
    c = e.t;
    last_update_ = e.t;
}

std::uint32_t time_surface::count_in_window(std::uint16_t cx, std::uint16_t cy,
                                            std::uint32_t radius, std::uint64_t t_now,
                                            std::uint64_t t_window) const {
    if (!geometry_.contains(cx, cy))
        throw validation_error("query center (" + std::to_string(cx) + "," + std::to_string(cy) +
                               ") outside surface");
    if (t_window == 0)
        throw validation_error("t_window must be positive");

    const std::int32_t r = static_cast<std::int32_t>(radius);
    const std::int32_t y_lo = std::max<std::int32_t>(0, static_cast<std::int32_t>(cy) - r);
    const std::int32_t y_hi =
        std::min<std::int32_t>(geometry_.height - 1, static_cast<std::int32_t>(cy) + r);

    std::uint32_t count = 0;
    for (std::int32_t y = y_lo; y <= y_hi; ++y) {
        const std::int32_t budget = r - std::abs(y - static_cast<std::int32_t>(cy));
        const std::int32_t x_lo = std::max<std::int32_t>(0, static_cast<std::int32_t>(cx) - budget);
        const std::int32_t x_hi =
            std::min<std::int32_t>(geometry_.width - 1, static_cast<std::int32_t>(cx) + budget);
        const std::uint64_t* cells = row(static_cast<std::uint16_t>(y));
        for (std::int32_t x = x_lo; x <= x_hi; ++x) {
            const std::uint64_t t = cells[x];
            if (t == empty_cell)
                continue;
            if (t >= t_now || t_now - t <= t_window)
                ++count;
        }
    }
    return count;
}

} // namespace evsal
