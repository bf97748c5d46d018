#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evsal {

/// Input data could not be decoded (bad magic, truncated record, bad CSV field).
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decoded data violates a semantic invariant (bounds, ordering, ranges).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined on this input (zero variance, empty sample set).
class degenerate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class polarity : std::uint8_t { off = 0, on = 1 };

struct sensor_geometry {
    std::uint16_t width = 304;
    std::uint16_t height = 240;

    bool contains(std::uint32_t x, std::uint32_t y) const noexcept {
        return x < width && y < height;
    }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width) * height;
    }
    friend bool operator==(const sensor_geometry&, const sensor_geometry&) = default;
};

/// One sensor event: a supra-threshold intensity change at pixel (x, y).
/// Timestamps are microseconds and non-decreasing within a stream.
struct event {
    std::uint64_t t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    polarity p = polarity::on;

    friend bool operator==(const event&, const event&) = default;
};

/// One gaze fixation from an eye-tracking log. Coordinates are in video
/// pixels and may lie outside the video area (an inattentive fixation).
struct fixation_record {
    std::string participant_id;
    std::string video_id;
    std::uint64_t t_start = 0;
    std::uint64_t t_end = 0;
    double x = 0;
    double y = 0;

    std::uint64_t duration() const noexcept { return t_end - t_start; }
    friend bool operator==(const fixation_record&, const fixation_record&) = default;
};

} // namespace evsal
