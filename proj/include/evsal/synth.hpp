#pragma once

#include "evsal/events.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace evsal {

enum class scene_kind { moving_dot, flicker_patch, poisson_noise, composite };

std::string_view to_string(scene_kind kind);

/// A synthetic scene: any combination of a bouncing dot, a flickering patch,
/// and uniform background noise. A stimulus is enabled by its size or rate
/// being nonzero; `kind` selects one stimulus or the composite of all
/// enabled ones.
struct scene_spec {
    scene_kind kind = scene_kind::composite;
    sensor_geometry geometry;
    std::uint64_t duration_us = 1000000;

    // Dot: Euclidean radius in pixels, bouncing horizontally at dot_speed
    // px/s between the sensor edges, vertically centered.
    double dot_radius = 0;
    double dot_speed = 0;

    // Patch: a rectangle whose pixels all flip polarity every period.
    std::uint16_t patch_x = 0;
    std::uint16_t patch_y = 0;
    std::uint16_t patch_w = 0;
    std::uint16_t patch_h = 0;
    std::uint64_t patch_period_us = 200000;

    // Noise: uniform random events per pixel per second.
    double noise_rate = 0;

    std::uint64_t seed = 1;

    bool dot_enabled() const noexcept { return dot_radius > 0; }
    bool patch_enabled() const noexcept { return patch_w > 0 && patch_h > 0; }
    bool noise_enabled() const noexcept { return noise_rate > 0; }

    void validate() const;
};

/// Deterministic event stream for the scene, sorted by timestamp; all
/// timestamps lie in [0, duration). The dot is sampled on a 1 ms grid and
/// emits ON events where it newly covers a pixel and OFF events where it
/// leaves one; the patch emits its whole area at every flip, alternating
/// from ON; noise arrivals follow exponential gaps from the seeded
/// generator.
std::vector<event> generate(const scene_spec& spec);

/// Analytic location of the attended stimulus at time t: the dot center
/// when a dot is enabled, else the patch center. Throws degenerate_error
/// when the scene has neither (pure noise).
std::pair<double, double> target_center(const scene_spec& spec, std::uint64_t t_us);

/// One fixation per frame timestamp k * frame_period (k >= 1, up to the
/// scene duration), pinned to the analytic target location.
std::vector<fixation_record> ground_truth_fixations(const scene_spec& spec,
                                                    std::uint64_t frame_period_us,
                                                    std::string_view video_id,
                                                    std::string_view participant_id = "synth");

// Scene file: one `key = value` per line, '#' comments. Keys: kind, width,
// height, duration_us, dot_radius, dot_speed, patch_x, patch_y, patch_w,
// patch_h, patch_period_us, noise_rate, seed.
scene_spec parse_scene_spec(std::string_view source);

} // namespace evsal
