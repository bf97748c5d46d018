#include "evsal/synth.hpp"

#include "evsal/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace evsal {

namespace {

constexpr std::uint64_t dot_tick_us = 1000;

/// Folds s into [lo, hi] by reflection at both ends (triangle wave).
double reflect(double s, double lo, double hi) {
    if (hi <= lo)
        return lo;
    const double range = hi - lo;
    double u = std::fmod(s - lo, 2.0 * range);
    if (u < 0)
        u += 2.0 * range;
    return lo + (u <= range ? u : 2.0 * range - u);
}

std::pair<double, double> dot_center(const scene_spec& spec, std::uint64_t t_us) {
    const double r = spec.dot_radius;
    const double travel = r + spec.dot_speed * (static_cast<double>(t_us) * 1e-6);
    const double x = reflect(travel, r, static_cast<double>(spec.geometry.width - 1) - r);
    const double y = (static_cast<double>(spec.geometry.height) - 1.0) / 2.0;
    return {x, y};
}

/// Pixels within Euclidean distance dot_radius of the center, sorted (y, x).
std::vector<std::uint32_t> dot_occupancy(const scene_spec& spec, std::uint64_t t_us) {
    const auto [cx, cy] = dot_center(spec, t_us);
    const double r = spec.dot_radius;
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y_hi = std::min(spec.geometry.height - 1, static_cast<int>(std::ceil(cy + r)));
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x_hi = std::min(spec.geometry.width - 1, static_cast<int>(std::ceil(cx + r)));
    std::vector<std::uint32_t> cells;
    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y - cy;
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - cx;
            if (dx * dx + dy * dy <= r * r)
                cells.push_back(static_cast<std::uint32_t>(y) << 16 |
                                static_cast<std::uint32_t>(x));
        }
    }
    return cells;
}

void emit_cell(std::vector<event>& events, std::uint64_t t, std::uint32_t cell, polarity p) {
    events.push_back({t, static_cast<std::uint16_t>(cell & 0xffff),
                      static_cast<std::uint16_t>(cell >> 16), p});
}

std::vector<event> generate_dot(const scene_spec& spec) {
    std::vector<event> events;
    std::vector<std::uint32_t> previous;
    for (std::uint64_t t = 0; t < spec.duration_us; t += dot_tick_us) {
        const std::vector<std::uint32_t> current = dot_occupancy(spec, t);
        // Both lists are (y, x)-sorted; a merge walk keeps the emission
        // order deterministic. Newly covered pixels go ON, vacated go OFF.
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < previous.size() || j < current.size()) {
            if (j == current.size() || (i < previous.size() && previous[i] < current[j])) {
                emit_cell(events, t, previous[i], polarity::off);
                ++i;
            } else if (i == previous.size() || current[j] < previous[i]) {
                emit_cell(events, t, current[j], polarity::on);
                ++j;
            } else {
                ++i;
                ++j;
            }
        }
        previous = current;
    }
    return events;
}

std::vector<event> generate_patch(const scene_spec& spec) {
    std::vector<event> events;
    polarity p = polarity::on;
    for (std::uint64_t t = 0; t < spec.duration_us; t += spec.patch_period_us) {
        for (std::uint16_t y = spec.patch_y; y < spec.patch_y + spec.patch_h; ++y)
            for (std::uint16_t x = spec.patch_x; x < spec.patch_x + spec.patch_w; ++x)
                events.push_back({t, x, y, p});
        p = p == polarity::on ? polarity::off : polarity::on;
    }
    return events;
}

std::vector<event> generate_noise(const scene_spec& spec) {
    std::vector<event> events;
    if (spec.noise_rate <= 0)
        return events;
    rng generator(spec.seed);
    const double rate_per_us =
        spec.noise_rate * static_cast<double>(spec.geometry.pixel_count()) * 1e-6;
    double t = 0;
    while (true) {
        t += generator.exponential(rate_per_us);
        if (!(t < static_cast<double>(spec.duration_us)))
            break;
        const std::uint16_t x = static_cast<std::uint16_t>(generator.below(spec.geometry.width));
        const std::uint16_t y = static_cast<std::uint16_t>(generator.below(spec.geometry.height));
        const polarity p = generator.below(2) == 1 ? polarity::on : polarity::off;
        events.push_back({static_cast<std::uint64_t>(t), x, y, p});
    }
    return events;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && (s[begin] == ' ' || s[begin] == '\t'))
        ++begin;
    while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r'))
        --end;
    return std::string(s.substr(begin, end - begin));
}

template <typename T>
T parse_value(const std::string& value, std::size_t line_no, const std::string& key) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty())
        throw format_error("line " + std::to_string(line_no) + ": bad value for " + key +
                           ": '" + value + "'");
    return out;
}

} // namespace

std::string_view to_string(scene_kind kind) {
    switch (kind) {
    case scene_kind::moving_dot:
        return "moving_dot";
    case scene_kind::flicker_patch:
        return "flicker_patch";
    case scene_kind::poisson_noise:
        return "poisson_noise";
    case scene_kind::composite:
        return "composite";
    }
    return "composite";
}

void scene_spec::validate() const {
    if (geometry.width == 0 || geometry.height == 0)
        throw validation_error("scene: geometry has zero extent");
    if (duration_us == 0)
        throw validation_error("scene: duration must be positive");
    if (dot_radius < 0 || dot_speed < 0 || noise_rate < 0)
        throw validation_error("scene: negative stimulus parameter");
    if (dot_enabled() &&
        (2.0 * dot_radius >= geometry.width - 1 || 2.0 * dot_radius >= geometry.height - 1))
        throw validation_error("scene: dot does not fit the sensor");
    if (patch_enabled()) {
        if (patch_x + patch_w > geometry.width || patch_y + patch_h > geometry.height)
            throw validation_error("scene: patch exceeds the sensor");
        if (patch_period_us == 0)
            throw validation_error("scene: patch period must be positive");
    }
    if (kind == scene_kind::moving_dot && !dot_enabled())
        throw validation_error("scene: moving_dot needs dot_radius > 0");
    if (kind == scene_kind::flicker_patch && !patch_enabled())
        throw validation_error("scene: flicker_patch needs a patch area");
}

std::vector<event> generate(const scene_spec& spec) {
    spec.validate();
    switch (spec.kind) {
    case scene_kind::moving_dot:
        return generate_dot(spec);
    case scene_kind::flicker_patch:
        return generate_patch(spec);
    case scene_kind::poisson_noise:
        return generate_noise(spec);
    case scene_kind::composite:
        break;
    }
    std::vector<event> events;
    if (spec.dot_enabled()) {
        std::vector<event> dot = generate_dot(spec);
        events.insert(events.end(), dot.begin(), dot.end());
    }
    if (spec.patch_enabled()) {
        std::vector<event> patch = generate_patch(spec);
        events.insert(events.end(), patch.begin(), patch.end());
    }
    if (spec.noise_enabled()) {
        std::vector<event> noise = generate_noise(spec);
        events.insert(events.end(), noise.begin(), noise.end());
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const event& a, const event& b) { return a.t < b.t; });
    return events;
}

std::pair<double, double> target_center(const scene_spec& spec, std::uint64_t t_us) {
    const bool dot = spec.kind == scene_kind::moving_dot ||
                     (spec.kind == scene_kind::composite && spec.dot_enabled());
    if (dot)
        return dot_center(spec, t_us);
    const bool patch = spec.kind == scene_kind::flicker_patch ||
                       (spec.kind == scene_kind::composite && spec.patch_enabled());
    if (patch)
        return {spec.patch_x + (spec.patch_w - 1) / 2.0, spec.patch_y + (spec.patch_h - 1) / 2.0};
    throw degenerate_error("scene has no attended target");
}

std::vector<fixation_record> ground_truth_fixations(const scene_spec& spec,
                                                    std::uint64_t frame_period_us,
                                                    std::string_view video_id,
                                                    std::string_view participant_id) {
    spec.validate();
    if (frame_period_us == 0)
        throw validation_error("ground truth: frame period must be positive");
    target_center(spec, 0); // reject targetless scenes up front

    std::vector<fixation_record> records;
    const std::uint64_t n_frames = spec.duration_us / frame_period_us;
    records.reserve(n_frames);
    for (std::uint64_t k = 1; k <= n_frames; ++k) {
        const std::uint64_t t = k * frame_period_us;
        const auto [x, y] = target_center(spec, t);
        records.push_back({std::string(participant_id), std::string(video_id), t, t, x, y});
    }
    return records;
}

scene_spec parse_scene_spec(std::string_view source) {
    scene_spec spec;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const std::size_t nl = source.find('\n', pos);
        const std::string_view raw =
            source.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;

        std::string_view body = raw.substr(0, raw.find('#'));
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            if (!trim(body).empty())
                throw format_error("line " + std::to_string(line_no) +
                                   ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw format_error("line " + std::to_string(line_no) + ": empty key");

        if (key == "kind") {
            if (value == "moving_dot")
                spec.kind = scene_kind::moving_dot;
            else if (value == "flicker_patch")
                spec.kind = scene_kind::flicker_patch;
            else if (value == "poisson_noise")
                spec.kind = scene_kind::poisson_noise;
            else if (value == "composite")
                spec.kind = scene_kind::composite;
            else
                throw format_error("line " + std::to_string(line_no) + ": unknown kind '" +
                                   value + "'");
        } else if (key == "width") {
            spec.geometry.width = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "height") {
            spec.geometry.height = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "duration_us") {
            spec.duration_us = parse_value<std::uint64_t>(value, line_no, key);
        } else if (key == "dot_radius") {
            spec.dot_radius = parse_value<double>(value, line_no, key);
        } else if (key == "dot_speed") {
            spec.dot_speed = parse_value<double>(value, line_no, key);
        } else if (key == "patch_x") {
            spec.patch_x = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "patch_y") {
            spec.patch_y = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "patch_w") {
            spec.patch_w = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "patch_h") {
            spec.patch_h = parse_value<std::uint16_t>(value, line_no, key);
        } else if (key == "patch_period_us") {
            spec.patch_period_us = parse_value<std::uint64_t>(value, line_no, key);
        } else if (key == "noise_rate") {
            spec.noise_rate = parse_value<double>(value, line_no, key);
        } else if (key == "seed") {
            spec.seed = parse_value<std::uint64_t>(value, line_no, key);
        } else {
            throw format_error("line " + std::to_string(line_no) + ": unknown key '" + key +
                               "'");
        }
    }
    spec.validate();
    return spec;
}

} // namespace evsal
