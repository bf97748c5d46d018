#pragma once

#include "evsal/events.hpp"
#include "evsal/time_surface.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace evsal {

/// The spatiotemporal scale ladder: spatial radii in pixels and temporal
/// windows in microseconds, both strictly increasing. Defaults are six
/// octaves in each dimension: radii 2^v for v = 0..5 and windows
/// 10 * 2^u ms for u = 0..5.
struct scale_config {
    std::vector<std::uint32_t> radii{1, 2, 4, 8, 16, 32};
    std::vector<std::uint64_t> windows_us{10000, 20000, 40000, 80000, 160000, 320000};

    void validate() const;
    std::size_t n_radii() const noexcept { return radii.size(); }
    std::size_t n_windows() const noexcept { return windows_us.size(); }
};

/// Per-event neighborhood counts for every (window, radius) pair. Counts are
/// kept as exact integers; scores divide by the square window area (1+2r)^2
/// only when read out.
struct scale_grid {
    std::uint32_t n_windows = 0;
    std::uint32_t n_radii = 0;
    std::vector<std::uint32_t> counts; // row-major, window-index major

    std::uint32_t count(std::size_t u, std::size_t v) const {
        return counts[u * n_radii + v];
    }
    friend bool operator==(const scale_grid&, const scale_grid&) = default;
};

/// Normalizing area for one spatial scale: the square window of width 1+2r.
inline double scale_area(std::uint32_t radius) {
    const double w = 1.0 + 2.0 * radius;
    return w * w;
}

inline double single_scale_score(std::uint32_t count, std::uint32_t radius) {
    return count / scale_area(radius);
}

/// Score of the current event at one scale: the neighborhood count divided
/// by the square window area. The surface must already contain e.
double score_single_scale(const time_surface& surface, const event& e, std::uint32_t radius,
                          std::uint64_t window_us);

/// Reference scorer: one neighborhood query per (window, radius) pair.
scale_grid score_event(const time_surface& surface, const event& e, const scale_config& config);

/// Single-pass scorer, bit-identical to score_event: scans the largest
/// Manhattan ball once, buckets each cell by the smallest covering radius
/// and window, then accumulates the bucket grid.
scale_grid score_event_fast(const time_surface& surface, const event& e,
                            const scale_config& config);

double grid_score(const scale_grid& grid, const scale_config& config, std::size_t u,
                  std::size_t v);
double grid_raw_sum(const scale_grid& grid, const scale_config& config);
double grid_window_sum(const scale_grid& grid, const scale_config& config, std::size_t u);

/// Reusable fast scorer; owns the scratch buffers so per-event scoring does
/// not allocate.
class event_scorer {
public:
    explicit event_scorer(scale_config config);

    const scale_config& config() const noexcept { return config_; }

    /// Fills `out` with the counts for every (window, radius) pair.
    void score(const time_surface& surface, const event& e, scale_grid& out);

private:
    scale_config config_;
    std::vector<std::uint16_t> radius_bucket_; // Manhattan distance -> first covering radius
    std::vector<std::uint32_t> hist_;          // cells per (radius bucket, first window)
    std::vector<std::uint64_t> packs_;         // packed 9-bit histogram lanes per radius bucket
    std::vector<std::uint32_t> pack_cells_;    // cells folded into each pack so far
    std::vector<std::int64_t> cutoffs_;        // absolute stamp thresholds (wide-config path)
};

struct scored_event {
    event e;
    double score = 0; // raw, pre-normalization

    friend bool operator==(const scored_event&, const scored_event&) = default;
};

/// Per-pixel store of the last raw score computed at each pixel.
struct saliency_buffer {
    sensor_geometry geometry;
    std::vector<double> scores;
    std::vector<std::uint64_t> stamps; // time_surface::empty_cell until first score

    explicit saliency_buffer(sensor_geometry g)
        : geometry(g), scores(g.pixel_count(), 0.0), stamps(g.pixel_count(), time_surface::empty_cell) {}

    void deposit(std::uint16_t x, std::uint16_t y, std::uint64_t t, double raw) {
        const std::size_t i = static_cast<std::size_t>(y) * geometry.width + x;
        scores[i] = raw;
        stamps[i] = t;
    }
};

/// Updates the time surface with each event in order, then scores it. The
/// raw score is the all-scales sum, or the single-window row sum when
/// `fixed_window` selects a window index. Optionally exposes the final
/// per-pixel score buffer.
std::vector<scored_event> process_stream(std::span<const event> events, sensor_geometry geometry,
                                         const scale_config& config,
                                         std::optional<std::size_t> fixed_window = {},
                                         saliency_buffer* final_buffer = nullptr);

enum class normalization { global, per_frame };

struct normalize_stats {
    double max_value = 0;
    bool degenerate = false; // all-zero input, left untouched
};

/// Divides values by their maximum so the maximum maps to 1. An all-zero
/// input is left as zeros and flagged degenerate.
normalize_stats normalize_scores(std::span<float> values);
normalize_stats normalize_scores(std::span<double> values);

} // namespace evsal
