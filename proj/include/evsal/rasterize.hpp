#pragma once

#include "evsal/events.hpp"
#include "evsal/saliency.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace evsal {

/// One rasterized saliency map, sampled from the per-pixel score buffer at
/// a fixed timestamp. Values are row-major floats in [0, 1].
struct saliency_frame {
    std::uint64_t t = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<float> values;

    float at(std::uint16_t x, std::uint16_t y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    friend bool operator==(const saliency_frame&, const saliency_frame&) = default;
};

/// Staleness value meaning "never expire a score".
inline constexpr std::uint64_t no_staleness = std::numeric_limits<std::uint64_t>::max();

struct render_options {
    std::uint64_t frame_period_us = 10000; // 100 fps
    std::uint64_t staleness_us = 320000;   // largest default temporal window
    normalization norm = normalization::per_frame;
    std::uint64_t t_end_us = 0; // 0: use the last event timestamp
};

struct render_result {
    std::vector<saliency_frame> frames;
    std::size_t degenerate_frames = 0; // all-zero before normalization
    double max_raw_score = 0;          // over all frames, pre-normalization
};

/// Samples the scored stream at t = k * frame_period for k = 1..floor(t_end /
/// frame_period) (zero-order hold). Each pixel holds the most recent raw
/// score deposited at it no later than the frame time and no older than
/// `staleness_us`; unscored or expired pixels hold 0. Frames are then
/// normalized per `norm`, leaving all-zero frames untouched.
render_result render_frames(std::span<const scored_event> stream, sensor_geometry geometry,
                            const render_options& options = {});

// Binary frame file layout:
//   magic "SFR0" | width u16 LE | height u16 LE
//   | frame_period_us u32 LE | frame_count u32 LE
//   then per frame: t u64 LE, width*height float32 LE values, row-major.
inline constexpr std::array<char, 4> frame_magic = {'S', 'F', 'R', '0'};
inline constexpr std::size_t frame_header_size = 16;

struct frame_file {
    sensor_geometry geometry;
    std::uint32_t frame_period_us = 10000;
    std::vector<saliency_frame> frames;
};

/// Serializes to the binary layout above. Validates that every frame matches
/// the file geometry; the result round-trips bit-exactly through read_frames.
std::vector<std::byte> write_frames(const frame_file& file);
frame_file read_frames(std::span<const std::byte> source);

/// 8-bit binary graymap ("P5", maxval 255). Values map to bytes by
/// value * 255, rounded half up, clamped to [0, 255].
std::vector<std::byte> write_pgm(const saliency_frame& frame);

} // namespace evsal
