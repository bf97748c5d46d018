#include "evsal/rasterize.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

namespace evsal {

namespace {

std::uint16_t load_u16(const std::byte* p) {
    return static_cast<std::uint16_t>(std::to_integer<std::uint16_t>(p[0]) |
                                      std::to_integer<std::uint16_t>(p[1]) << 8);
}

std::uint32_t load_u32(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = v << 8 | std::to_integer<std::uint32_t>(p[i]);
    return v;
}

std::uint64_t load_u64(const std::byte* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = v << 8 | std::to_integer<std::uint64_t>(p[i]);
    return v;
}

void store_u16(std::vector<std::byte>& out, std::uint16_t v) {
    out.push_back(static_cast<std::byte>(v & 0xff));
    out.push_back(static_cast<std::byte>(v >> 8));
}

void store_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::byte>(v >> (8 * i) & 0xff));
}

void store_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::byte>(v >> (8 * i) & 0xff));
}

void store_f32(std::vector<std::byte>& out, float v) {
    store_u32(out, std::bit_cast<std::uint32_t>(v));
}

float load_f32(const std::byte* p) {
    return std::bit_cast<float>(load_u32(p));
}

} // namespace

render_result render_frames(std::span<const scored_event> stream, sensor_geometry geometry,
                            const render_options& options) {
    if (geometry.width == 0 || geometry.height == 0)
        throw validation_error("render_frames: geometry has zero extent");
    if (options.frame_period_us == 0)
        throw validation_error("render_frames: frame period must be positive");

    render_result result;
    if (stream.empty() && options.t_end_us == 0)
        return result;

    const std::uint64_t t_end = options.t_end_us != 0 ? options.t_end_us
                                                      : stream.back().e.t;
    const std::uint64_t n_frames = t_end / options.frame_period_us;
    result.frames.reserve(n_frames);

    saliency_buffer buffer(geometry);
    std::size_t next = 0;
    for (std::uint64_t k = 1; k <= n_frames; ++k) {
        const std::uint64_t t_frame = k * options.frame_period_us;
        for (; next < stream.size() && stream[next].e.t <= t_frame; ++next) {
            const scored_event& s = stream[next];
            if (next > 0 && s.e.t < stream[next - 1].e.t)
                throw validation_error("render_frames: stream not time-ordered at record " +
                                       std::to_string(next));
            if (!geometry.contains(s.e.x, s.e.y))
                throw validation_error("render_frames: record " + std::to_string(next) +
                                       " out of bounds");
            buffer.deposit(s.e.x, s.e.y, s.e.t, s.score);
        }

        saliency_frame frame;
        frame.t = t_frame;
        frame.width = geometry.width;
        frame.height = geometry.height;
        frame.values.resize(geometry.pixel_count(), 0.0f);
        bool any = false;
        for (std::size_t i = 0; i < frame.values.size(); ++i) {
            const std::uint64_t stamp = buffer.stamps[i];
            if (stamp == time_surface::empty_cell || t_frame - stamp > options.staleness_us)
                continue;
            frame.values[i] = static_cast<float>(buffer.scores[i]);
            if (frame.values[i] > 0)
                any = true;
        }
        if (!any)
            ++result.degenerate_frames;
        for (float v : frame.values)
            result.max_raw_score = std::max(result.max_raw_score, static_cast<double>(v));
        result.frames.push_back(std::move(frame));
    }

    if (options.norm == normalization::per_frame) {
        for (saliency_frame& frame : result.frames)
            normalize_scores(std::span<float>(frame.values));
    } else if (result.max_raw_score > 0) {
        for (saliency_frame& frame : result.frames)
            for (float& v : frame.values)
                v = static_cast<float>(v / result.max_raw_score);
    }
    return result;
}

std::vector<std::byte> write_frames(const frame_file& file) {
    if (file.geometry.width == 0 || file.geometry.height == 0)
        throw validation_error("frame file: geometry has zero extent");
    if (file.frame_period_us == 0)
        throw validation_error("frame file: frame period must be positive");
    if (file.frames.size() > std::numeric_limits<std::uint32_t>::max())
        throw validation_error("frame file: too many frames");
    for (std::size_t i = 0; i < file.frames.size(); ++i) {
        const saliency_frame& frame = file.frames[i];
        if (frame.width != file.geometry.width || frame.height != file.geometry.height ||
            frame.values.size() != file.geometry.pixel_count())
            throw validation_error("frame " + std::to_string(i) +
                                   ": dimensions do not match the file geometry");
    }

    std::vector<std::byte> out;
    out.reserve(frame_header_size +
                file.frames.size() * (8 + file.geometry.pixel_count() * 4));
    for (char c : frame_magic)
        out.push_back(static_cast<std::byte>(c));
    store_u16(out, file.geometry.width);
    store_u16(out, file.geometry.height);
    store_u32(out, file.frame_period_us);
    store_u32(out, static_cast<std::uint32_t>(file.frames.size()));
    for (const saliency_frame& frame : file.frames) {
        store_u64(out, frame.t);
        for (float v : frame.values)
            store_f32(out, v);
    }
    return out;
}

frame_file read_frames(std::span<const std::byte> source) {
    if (source.size() < frame_header_size)
        throw format_error("frame file: truncated header");
    if (std::memcmp(source.data(), frame_magic.data(), frame_magic.size()) != 0)
        throw format_error("frame file: bad magic");

    frame_file file;
    file.geometry.width = load_u16(source.data() + 4);
    file.geometry.height = load_u16(source.data() + 6);
    file.frame_period_us = load_u32(source.data() + 8);
    const std::uint32_t count = load_u32(source.data() + 12);
    if (file.geometry.width == 0 || file.geometry.height == 0)
        throw validation_error("frame file: geometry has zero extent");
    if (file.frame_period_us == 0)
        throw validation_error("frame file: frame period must be positive");

    const std::size_t frame_bytes = 8 + file.geometry.pixel_count() * 4;
    if (source.size() - frame_header_size != count * frame_bytes)
        throw format_error("frame file: body size does not match frame count");

    file.frames.reserve(count);
    const std::byte* p = source.data() + frame_header_size;
    for (std::uint32_t i = 0; i < count; ++i) {
        saliency_frame frame;
        frame.t = load_u64(p);
        p += 8;
        frame.width = file.geometry.width;
        frame.height = file.geometry.height;
        frame.values.resize(file.geometry.pixel_count());
        for (float& v : frame.values) {
            v = load_f32(p);
            p += 4;
        }
        file.frames.push_back(std::move(frame));
    }
    return file;
}

std::vector<std::byte> write_pgm(const saliency_frame& frame) {
    if (frame.width == 0 || frame.height == 0 ||
        frame.values.size() != static_cast<std::size_t>(frame.width) * frame.height)
        throw validation_error("graymap: frame dimensions are inconsistent");

    const std::string header = "P5\n" + std::to_string(frame.width) + " " +
                               std::to_string(frame.height) + "\n255\n";
    std::vector<std::byte> out;
    out.reserve(header.size() + frame.values.size());
    for (char c : header)
        out.push_back(static_cast<std::byte>(c));
    for (float v : frame.values) {
        const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
        const double clamped = std::min(255.0, std::max(0.0, scaled));
        out.push_back(static_cast<std::byte>(static_cast<std::uint8_t>(clamped)));
    }
    return out;
}

} // namespace evsal
