#include "evsal/saliency.hpp"

#include "evsal/event_io.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

namespace evsal {

void scale_config::validate() const {
    if (radii.empty() || windows_us.empty())
        throw validation_error("scale config needs at least one radius and one window");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw validation_error("radii must be strictly increasing");
    for (std::size_t i = 1; i < windows_us.size(); ++i)
        if (windows_us[i] <= windows_us[i - 1])
            throw validation_error("windows must be strictly increasing");
    if (windows_us.front() == 0)
        throw validation_error("windows must be positive");
}

double score_single_scale(const time_surface& surface, const event& e, std::uint32_t radius,
                          std::uint64_t window_us) {
    return single_scale_score(surface.count_in_window(e.x, e.y, radius, e.t, window_us), radius);
}

scale_grid score_event(const time_surface& surface, const event& e, const scale_config& config) {
    config.validate();
    scale_grid grid;
    grid.n_windows = static_cast<std::uint32_t>(config.n_windows());
    grid.n_radii = static_cast<std::uint32_t>(config.n_radii());
    grid.counts.resize(grid.n_windows * grid.n_radii);
    for (std::size_t u = 0; u < config.n_windows(); ++u)
        for (std::size_t v = 0; v < config.n_radii(); ++v)
            grid.counts[u * grid.n_radii + v] =
                surface.count_in_window(e.x, e.y, config.radii[v], e.t, config.windows_us[u]);
    return grid;
}

event_scorer::event_scorer(scale_config config) : config_(std::move(config)) {
    config_.validate();
    const std::uint32_t r_max = config_.radii.back();
    radius_bucket_.resize(r_max + 1);
    std::size_t v = 0;
    for (std::uint32_t d = 0; d <= r_max; ++d) {
        while (config_.radii[v] < d)
            ++v;
        radius_bucket_[d] = static_cast<std::uint16_t>(v);
    }
    const std::size_t nv = config_.n_radii();
    hist_.resize(nv * (config_.n_windows() + 1));
    packs_.resize(nv);
    pack_cells_.resize(nv);
    cutoffs_.resize(config_.n_windows());
}

void event_scorer::score(const time_surface& surface, const event& e, scale_grid& out) {
    const std::size_t nu = config_.n_windows();
    const std::size_t nv = config_.n_radii();
    out.n_windows = static_cast<std::uint32_t>(nu);
    out.n_radii = static_cast<std::uint32_t>(nv);
    out.counts.assign(nu * nv, 0);
    std::fill(hist_.begin(), hist_.end(), 0);
    std::fill(packs_.begin(), packs_.end(), 0);
    std::fill(pack_cells_.begin(), pack_cells_.end(), 0);

    const sensor_geometry& g = surface.geometry();
    if (!g.contains(e.x, e.y))
        throw validation_error("event pixel (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                               ") outside surface");

    // Absolute thresholds, compared as signed so the empty-cell sentinel
    // (UINT64_MAX, i.e. -1) sorts below every cutoff and lands in the dead
    // lane. Real stamps are assumed < 2^63 (microseconds for ~292k years).
    // A stamp within windows_us[k] of e.t satisfies t >= cutoff[k], which
    // also covers future stamps (age 0) for free. su below counts the
    // cutoffs above a stamp, i.e. the first window index that contains it;
    // su == nu means the cell is empty or older than every window.
    std::array<std::int64_t, 8> sc;
    sc.fill(std::numeric_limits<std::int64_t>::min()); // padding never matches
    const bool packed = nu <= 6;                       // 7 lanes * 9 bits fit in 64
    for (std::size_t k = 0; k < nu; ++k) {
        const std::int64_t cut =
            static_cast<std::int64_t>(e.t > config_.windows_us[k] ? e.t - config_.windows_us[k] : 0);
        cutoffs_[k] = cut;
        if (k < sc.size())
            sc[k] = cut;
    }

    // One pack per radius bucket accumulates its first-window histogram in
    // 9-bit lanes, so the hot loop touches no memory besides the stamp load:
    // per-cell counter increments in memory serialize on store-to-load
    // forwarding whenever neighbouring cells share a bucket, which is the
    // common case (runs of empty or stale cells).
    constexpr std::uint32_t pack_capacity = 480; // < 2^9 per lane, with margin
    static constexpr std::array<std::uint64_t, 7> lane_one = {
        std::uint64_t{1} << 0,  std::uint64_t{1} << 9,  std::uint64_t{1} << 18,
        std::uint64_t{1} << 27, std::uint64_t{1} << 36, std::uint64_t{1} << 45,
        std::uint64_t{1} << 54,
    };
    auto unpack = [&](std::size_t j) {
        for (std::size_t k = 0; k <= nu; ++k)
            hist_[j * (nu + 1) + k] += static_cast<std::uint32_t>((packs_[j] >> (9 * k)) & 0x1ff);
        packs_[j] = 0;
        pack_cells_[j] = 0;
    };

    const std::uint64_t* cells = nullptr;
    auto scan_packed = [&](std::int32_t xa, std::int32_t xb, std::size_t j) {
        std::uint64_t pack = packs_[j];
        std::uint32_t filled = pack_cells_[j];
        while (xa <= xb) {
            if (filled >= pack_capacity) {
                packs_[j] = pack;
                pack_cells_[j] = filled;
                unpack(j);
                pack = 0;
                filled = 0;
            }
            const std::int32_t n =
                std::min<std::int32_t>(xb - xa + 1,
                                       static_cast<std::int32_t>(pack_capacity - filled));
            for (std::int32_t x = xa; x < xa + n; ++x) {
                const std::int64_t ts = static_cast<std::int64_t>(cells[x]);
                std::size_t su = 0;
                for (std::size_t k = 0; k < sc.size(); ++k) // fixed trip: unrolls
                    su += static_cast<std::size_t>(ts < sc[k]);
                pack += lane_one[su];
            }
            filled += static_cast<std::uint32_t>(n);
            xa += n;
        }
        packs_[j] = pack;
        pack_cells_[j] = filled;
    };
    auto scan_wide = [&](std::int32_t xa, std::int32_t xb, std::size_t j) {
        for (std::int32_t x = xa; x <= xb; ++x) {
            const std::int64_t ts = static_cast<std::int64_t>(cells[x]);
            std::size_t su = 0;
            for (std::size_t k = 0; k < nu; ++k)
                su += static_cast<std::size_t>(ts < cutoffs_[k]);
            ++hist_[j * (nu + 1) + su];
        }
    };

    const std::int32_t ex = e.x;
    const std::int32_t ey = e.y;
    const std::int32_t r_max = static_cast<std::int32_t>(config_.radii.back());
    const std::int32_t y_lo = std::max<std::int32_t>(0, ey - r_max);
    const std::int32_t y_hi = std::min<std::int32_t>(g.height - 1, ey + r_max);

    for (std::int32_t y = y_lo; y <= y_hi; ++y) {
        const std::int32_t dy = std::abs(y - ey);
        cells = surface.row(static_cast<std::uint16_t>(y));
        // Walk the row one radius annulus at a time: within a run of x whose
        // Manhattan distance stays between consecutive radii, the radius
        // bucket is constant, so it never has to be looked up per cell.
        for (std::size_t j = radius_bucket_[dy]; j < nv; ++j) {
            const std::int32_t off_hi = static_cast<std::int32_t>(config_.radii[j]) - dy;
            const std::int32_t off_lo =
                j == radius_bucket_[dy]
                    ? 0
                    : static_cast<std::int32_t>(config_.radii[j - 1]) - dy + 1;
            const std::int32_t right_a = ex + off_lo;
            const std::int32_t right_b = std::min<std::int32_t>(ex + off_hi, g.width - 1);
            const std::int32_t left_a = std::max<std::int32_t>(ex - off_hi, 0);
            const std::int32_t left_b = ex - std::max<std::int32_t>(off_lo, 1);
            if (packed) {
                if (right_a <= right_b)
                    scan_packed(right_a, right_b, j);
                if (left_a <= left_b)
                    scan_packed(left_a, left_b, j);
            } else {
                if (right_a <= right_b)
                    scan_wide(right_a, right_b, j);
                if (left_a <= left_b)
                    scan_wide(left_a, left_b, j);
            }
        }
    }
    if (packed)
        for (std::size_t j = 0; j < nv; ++j)
            unpack(j);

    // counts(u,v) = cells whose first containing window is <= u and whose
    // first covering radius is <= v: prefix-sum the histogram both ways,
    // dropping the dead lane su == nu
    for (std::size_t j = 0; j < nv; ++j) {
        std::uint32_t running = 0;
        for (std::size_t k = 0; k < nu; ++k) {
            running += hist_[j * (nu + 1) + k];
            out.counts[k * nv + j] = running;
        }
    }
    for (std::size_t k = 0; k < nu; ++k)
        for (std::size_t j = 1; j < nv; ++j)
            out.counts[k * nv + j] += out.counts[k * nv + j - 1];
}

scale_grid score_event_fast(const time_surface& surface, const event& e,
                            const scale_config& config) {
    event_scorer scorer(config);
    scale_grid grid;
    scorer.score(surface, e, grid);
    return grid;
}

double grid_score(const scale_grid& grid, const scale_config& config, std::size_t u,
                  std::size_t v) {
    return single_scale_score(grid.count(u, v), config.radii[v]);
}

double grid_raw_sum(const scale_grid& grid, const scale_config& config) {
    double sum = 0;
    for (std::size_t u = 0; u < grid.n_windows; ++u)
        for (std::size_t v = 0; v < grid.n_radii; ++v)
            sum += grid.count(u, v) / scale_area(config.radii[v]);
    return sum;
}

double grid_window_sum(const scale_grid& grid, const scale_config& config, std::size_t u) {
    double sum = 0;
    for (std::size_t v = 0; v < grid.n_radii; ++v)
        sum += grid.count(u, v) / scale_area(config.radii[v]);
    return sum;
}

std::vector<scored_event> process_stream(std::span<const event> events, sensor_geometry geometry,
                                         const scale_config& config,
                                         std::optional<std::size_t> fixed_window,
                                         saliency_buffer* final_buffer) {
    config.validate();
    if (fixed_window && *fixed_window >= config.n_windows())
        throw validation_error("fixed window index " + std::to_string(*fixed_window) +
                               " out of range (config has " + std::to_string(config.n_windows()) +
                               " windows)");
    validate_events(geometry, events);

    const std::size_t nv = config.n_radii();
    std::vector<double> inv_area(nv);
    for (std::size_t v = 0; v < nv; ++v)
        inv_area[v] = 1.0 / scale_area(config.radii[v]);

    time_surface surface(geometry);
    event_scorer scorer(config);
    scale_grid grid;
    saliency_buffer local(geometry);
    saliency_buffer& buffer = final_buffer ? *final_buffer : local;
    if (final_buffer)
        *final_buffer = saliency_buffer(geometry);

    std::vector<scored_event> scored;
    scored.reserve(events.size());
    for (const event& e : events) {
        surface.update(e);
        scorer.score(surface, e, grid);
        double raw = 0;
        if (fixed_window) {
            const std::size_t u = *fixed_window;
            for (std::size_t v = 0; v < nv; ++v)
                raw += grid.counts[u * nv + v] * inv_area[v];
        } else {
            for (std::size_t u = 0; u < grid.n_windows; ++u)
                for (std::size_t v = 0; v < nv; ++v)
                    raw += grid.counts[u * nv + v] * inv_area[v];
        }
        scored.push_back({e, raw});
        buffer.deposit(e.x, e.y, e.t, raw);
    }
    return scored;
}

namespace {

// Plain division so the maximum maps to exactly 1.
template <typename T>
normalize_stats normalize_span(std::span<T> values) {
    normalize_stats stats;
    for (T v : values)
        stats.max_value = std::max(stats.max_value, static_cast<double>(v));
    if (stats.max_value <= 0) {
        stats.degenerate = true;
        return stats;
    }
    for (T& v : values)
        v = static_cast<T>(v / stats.max_value);
    return stats;
}

} // namespace

normalize_stats normalize_scores(std::span<float> values) { return normalize_span(values); }
normalize_stats normalize_scores(std::span<double> values) { return normalize_span(values); }

} // namespace evsal
