#pragma once

#include "evsal/events.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evsal {

/// How to treat a timestamp regression while reading a stream.
/// strict rejects the stream; lenient clamps t_i := max(t_i, t_{i-1})
/// and reports how many records were repaired.
enum class timestamp_mode { strict, lenient };

struct event_stream {
    sensor_geometry geometry;
    std::vector<event> events;
    std::size_t clamped_timestamps = 0; // lenient-mode repairs, 0 in strict mode
};

// Binary event stream layout:
//   magic "EVS0" | width u16 LE | height u16 LE
//   then per event, 16 bytes:
//   t u64 LE (us) | x u16 LE | y u16 LE | polarity u8 (0/1) | 3 zero bytes
inline constexpr std::array<char, 4> event_magic = {'E', 'V', 'S', '0'};
inline constexpr std::size_t event_header_size = 8;
inline constexpr std::size_t event_record_size = 16;

/// Parses a byte sequence holding either the binary format above or CSV with
/// header "t_us,x,y,polarity". CSV carries no geometry, so `csv_geometry`
/// supplies it (binary input ignores the argument).
event_stream read_event_stream(std::span<const std::byte> source,
                               timestamp_mode mode = timestamp_mode::strict,
                               sensor_geometry csv_geometry = {});

/// Serializes to the binary format. Validates invariants first; the result
/// round-trips bit-exactly through read_event_stream.
std::vector<std::byte> write_event_stream(const sensor_geometry& geometry,
                                          std::span<const event> events);

std::string write_event_csv(std::span<const event> events);

// Fixation CSV: header "participant_id,video_id,t_start_us,t_end_us,x,y".
// Coordinate bounds are deliberately not checked here; off-video fixations
// are meaningful (they mark inattention).
std::vector<fixation_record> read_fixations(std::string_view source);
std::string write_fixations(std::span<const fixation_record> records);

/// Throws validation_error (naming the first offending index) if any event is
/// out of bounds or, in strict mode, if timestamps regress.
void validate_events(const sensor_geometry& geometry, std::span<const event> events,
                     timestamp_mode mode = timestamp_mode::strict);

std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::byte> data);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace evsal
