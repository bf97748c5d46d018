#include "evsal/event_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>

namespace evsal {

namespace {

std::uint16_t load_u16(const std::byte* p) {
    return static_cast<std::uint16_t>(std::to_integer<std::uint16_t>(p[0]) |
                                      std::to_integer<std::uint16_t>(p[1]) << 8);
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

void store_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::byte>(v >> (8 * i) & 0xff));
}

// Splits into lines, tolerating trailing '\r' and a final newline.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* column) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range)
        throw format_error("line " + std::to_string(line_no) + ": " + column +
                           " out of range: '" + std::string(field) + "'");
    if (ec != std::errc() || ptr != last || field.empty())
        throw format_error("line " + std::to_string(line_no) + ": " + column +
                           " is not numeric: '" + std::string(field) + "'");
    return value;
}

bool looks_binary(std::span<const std::byte> source) {
    return source.size() >= event_magic.size() &&
           std::memcmp(source.data(), event_magic.data(), event_magic.size()) == 0;
}

event_stream read_event_binary(std::span<const std::byte> source) {
    if (source.size() < event_header_size)
        throw format_error("event stream shorter than 8-byte header");
    event_stream stream;
    stream.geometry.width = load_u16(source.data() + 4);
    stream.geometry.height = load_u16(source.data() + 6);
    if (stream.geometry.width == 0 || stream.geometry.height == 0)
        throw validation_error("event stream header has zero width or height");

    std::size_t body = source.size() - event_header_size;
    if (body % event_record_size != 0)
        throw format_error("event stream body is not a multiple of the 16-byte record size");

    std::size_t n = body / event_record_size;
    stream.events.reserve(n);
    const std::byte* p = source.data() + event_header_size;
    for (std::size_t i = 0; i < n; ++i, p += event_record_size) {
        event e;
        e.t = load_u64(p);
        e.x = load_u16(p + 8);
        e.y = load_u16(p + 10);
        auto pol = std::to_integer<std::uint8_t>(p[12]);
        if (pol > 1)
            throw format_error("record " + std::to_string(i) + ": polarity byte is " +
                               std::to_string(pol) + ", expected 0 or 1");
        if (std::to_integer<std::uint8_t>(p[13]) || std::to_integer<std::uint8_t>(p[14]) ||
            std::to_integer<std::uint8_t>(p[15]))
            throw format_error("record " + std::to_string(i) + ": reserved bytes are not zero");
        e.p = static_cast<polarity>(pol);
        stream.events.push_back(e);
    }
    return stream;
}

event_stream read_event_csv(std::string_view text, sensor_geometry geometry) {
    constexpr std::string_view header = "t_us,x,y,polarity";
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != header)
        throw format_error("event CSV must start with header '" + std::string(header) + "'");

    event_stream stream;
    stream.geometry = geometry;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 4)
            throw format_error("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
        event e;
        e.t = parse_number<std::uint64_t>(fields[0], line_no, "t_us");
        e.x = parse_number<std::uint16_t>(fields[1], line_no, "x");
        e.y = parse_number<std::uint16_t>(fields[2], line_no, "y");
        auto pol = parse_number<std::uint16_t>(fields[3], line_no, "polarity");
        if (pol > 1)
            throw format_error("line " + std::to_string(line_no) + ": polarity must be 0 or 1");
        e.p = static_cast<polarity>(pol);
        stream.events.push_back(e);
    }
    return stream;
}

// Applies bounds validation, then the timestamp ordering policy in place.
std::size_t check_and_repair(event_stream& stream, timestamp_mode mode) {
    const auto& g = stream.geometry;
    std::size_t clamped = 0;
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        event& e = stream.events[i];
        if (!g.contains(e.x, e.y))
            throw validation_error("record " + std::to_string(i) + ": pixel (" +
                                   std::to_string(e.x) + "," + std::to_string(e.y) +
                                   ") outside " + std::to_string(g.width) + "x" +
                                   std::to_string(g.height) + " sensor");
        if (i > 0 && e.t < prev) {
            if (mode == timestamp_mode::strict)
                throw validation_error("record " + std::to_string(i) + ": timestamp " +
                                       std::to_string(e.t) + " regresses below " +
                                       std::to_string(prev));
            e.t = prev;
            ++clamped;
        }
        prev = e.t;
    }
    return clamped;
}

} // namespace

event_stream read_event_stream(std::span<const std::byte> source, timestamp_mode mode,
                               sensor_geometry csv_geometry) {
    event_stream stream;
    if (looks_binary(source)) {
        stream = read_event_binary(source);
    } else {
        std::string_view text(reinterpret_cast<const char*>(source.data()), source.size());
        stream = read_event_csv(text, csv_geometry);
    }
    stream.clamped_timestamps = check_and_repair(stream, mode);
    return stream;
}

void validate_events(const sensor_geometry& geometry, std::span<const event> events,
                     timestamp_mode mode) {
    const auto& g = geometry;
    if (g.width == 0 || g.height == 0)
        throw validation_error("sensor geometry must be at least 1x1");
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const event& e = events[i];
        if (!g.contains(e.x, e.y))
            throw validation_error("record " + std::to_string(i) + ": pixel (" +
                                   std::to_string(e.x) + "," + std::to_string(e.y) +
                                   ") outside " + std::to_string(g.width) + "x" +
                                   std::to_string(g.height) + " sensor");
        if (i > 0 && e.t < prev && mode == timestamp_mode::strict)
            throw validation_error("record " + std::to_string(i) + ": timestamp " +
                                   std::to_string(e.t) + " regresses below " +
                                   std::to_string(prev));
        prev = std::max(prev, e.t);
    }
}

std::vector<std::byte> write_event_stream(const sensor_geometry& geometry,
                                          std::span<const event> events) {
    validate_events(geometry, events);
    std::vector<std::byte> out;
    out.reserve(event_header_size + events.size() * event_record_size);
    for (char c : event_magic)
        out.push_back(static_cast<std::byte>(c));
    store_u16(out, geometry.width);
    store_u16(out, geometry.height);
    for (const event& e : events) {
        store_u64(out, e.t);
        store_u16(out, e.x);
        store_u16(out, e.y);
        out.push_back(static_cast<std::byte>(e.p));
        out.insert(out.end(), 3, std::byte{0});
    }
    return out;
}

std::string write_event_csv(std::span<const event> events) {
    std::string out = "t_us,x,y,polarity\n";
    for (const event& e : events) {
        out += std::to_string(e.t);
        out += ',';
        out += std::to_string(e.x);
        out += ',';
        out += std::to_string(e.y);
        out += ',';
        out += e.p == polarity::on ? '1' : '0';
        out += '\n';
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

std::vector<fixation_record> read_fixations(std::string_view source) {
    constexpr std::string_view header = "participant_id,video_id,t_start_us,t_end_us,x,y";
    auto lines = split_lines(source);
    if (lines.empty() || lines[0] != header)
        throw format_error("fixation CSV must start with header '" + std::string(header) + "'");

    std::vector<fixation_record> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 6)
            throw format_error("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                               std::to_string(fields.size()));
        fixation_record r;
        r.participant_id = std::string(fields[0]);
        r.video_id = std::string(fields[1]);
        r.t_start = parse_number<std::uint64_t>(fields[2], line_no, "t_start_us");
        r.t_end = parse_number<std::uint64_t>(fields[3], line_no, "t_end_us");
        r.x = parse_number<double>(fields[4], line_no, "x");
        r.y = parse_number<double>(fields[5], line_no, "y");
        if (r.t_end < r.t_start)
            throw validation_error("line " + std::to_string(line_no) + ": t_end " +
                                   std::to_string(r.t_end) + " precedes t_start " +
                                   std::to_string(r.t_start));
        records.push_back(std::move(r));
    }
    return records;
}

std::string write_fixations(std::span<const fixation_record> records) {
    std::string out = "participant_id,video_id,t_start_us,t_end_us,x,y\n";
    for (const fixation_record& r : records) {
        if (r.t_end < r.t_start)
            throw validation_error("fixation for '" + r.participant_id + "'/'" + r.video_id +
                                   "': t_end precedes t_start");
        out += r.participant_id;
        out += ',';
        out += r.video_id;
        out += ',';
        out += std::to_string(r.t_start);
        out += ',';
        out += std::to_string(r.t_end);
        out += ',';
        out += format_double(r.x);
        out += ',';
        out += format_double(r.y);
        out += '\n';
    }
    return out;
}

std::vector<std::byte> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::vector<std::byte> data;
    in.seekg(0, std::ios::end);
    data.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!in && data.size() > 0)
        throw std::runtime_error("error while reading '" + path.string() + "'");
    return data;
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::byte> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw std::runtime_error("error while writing '" + path.string() + "'");
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    write_binary_file(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::string read_text_file(const std::filesystem::path& path) {
    auto bytes = read_binary_file(path);
    return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

} // namespace evsal
