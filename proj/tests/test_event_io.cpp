#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evsal/event_io.hpp"
#include "helpers.hpp"

#include <cstring>
#include <filesystem>
#include <string>

using namespace evsal;

namespace {

std::vector<std::byte> to_bytes(std::string_view text) {
    std::vector<std::byte> out(text.size());
    std::memcpy(out.data(), text.data(), text.size());
    return out;
}

} // namespace

TEST_CASE("binary stream round-trips bit-exactly") {
    rng gen(42);
    const sensor_geometry geometry{17, 9};
    const std::vector<event> events = testing::random_events(gen, geometry, 500);

    const std::vector<std::byte> bytes = write_event_stream(geometry, events);
    CHECK(bytes.size() == event_header_size + events.size() * event_record_size);

    const event_stream back = read_event_stream(bytes);
    CHECK(back.geometry == geometry);
    CHECK(back.events == events);
    CHECK(back.clamped_timestamps == 0);

    CHECK(write_event_stream(back.geometry, back.events) == bytes);
}

TEST_CASE("binary stream with zero events is just the header") {
    const std::vector<std::byte> bytes = write_event_stream({4, 4}, {});
    CHECK(bytes.size() == event_header_size);
    const event_stream back = read_event_stream(bytes);
    CHECK(back.events.empty());
    CHECK(back.geometry == sensor_geometry{4, 4});
}

TEST_CASE("binary header and record validation") {
    std::vector<std::byte> good = write_event_stream({4, 4}, std::vector<event>{{100, 1, 2, polarity::on}});

    SUBCASE("bad magic") {
        std::vector<std::byte> bad = good;
        bad[0] = std::byte{'X'};
        // Without the magic the bytes are treated as CSV, which they are not.
        CHECK_THROWS_AS(read_event_stream(bad), format_error);
    }
    SUBCASE("truncated header") {
        std::vector<std::byte> bad(good.begin(), good.begin() + 6);
        CHECK_THROWS_AS(read_event_stream(bad), format_error);
    }
    SUBCASE("body not a multiple of the record size") {
        std::vector<std::byte> bad = good;
        bad.pop_back();
        CHECK_THROWS_AS(read_event_stream(bad), format_error);
    }
    SUBCASE("zero geometry") {
        std::vector<std::byte> bad = good;
        bad[4] = bad[5] = std::byte{0};
        CHECK_THROWS_AS(read_event_stream(bad), validation_error);
    }
    SUBCASE("polarity byte out of range") {
        std::vector<std::byte> bad = good;
        bad[event_header_size + 12] = std::byte{2};
        CHECK_THROWS_AS(read_event_stream(bad), format_error);
    }
    SUBCASE("reserved bytes must be zero") {
        std::vector<std::byte> bad = good;
        bad[event_header_size + 14] = std::byte{7};
        CHECK_THROWS_AS(read_event_stream(bad), format_error);
    }
    SUBCASE("out-of-bounds pixel names the record") {
        std::vector<std::byte> bad = good;
        bad[event_header_size + 8] = std::byte{9}; // x = 9 on a 4x4 sensor
        try {
            read_event_stream(bad);
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find("record 0") != std::string::npos);
        }
    }
}

TEST_CASE("timestamp regression policy") {
    const sensor_geometry geometry{4, 4};
    const std::vector<event> events = {{100, 0, 0, polarity::on},
                                       {50, 1, 1, polarity::off},
                                       {60, 2, 2, polarity::on}};
    std::vector<std::byte> bytes = write_event_stream(geometry, std::vector<event>{{0, 0, 0, polarity::on}});
    bytes.resize(event_header_size); // keep only the header
    for (const event& e : events) {
        std::vector<std::byte> one = write_event_stream(geometry, std::vector<event>{{e.t, e.x, e.y, e.p}});
        bytes.insert(bytes.end(), one.begin() + event_header_size, one.end());
    }

    CHECK_THROWS_AS(read_event_stream(bytes, timestamp_mode::strict), validation_error);

    const event_stream repaired = read_event_stream(bytes, timestamp_mode::lenient);
    CHECK(repaired.clamped_timestamps == 2);
    CHECK(repaired.events[0].t == 100);
    CHECK(repaired.events[1].t == 100);
    CHECK(repaired.events[2].t == 100);
}

TEST_CASE("event CSV round-trips through the reader") {
    rng gen(7);
    const sensor_geometry geometry{31, 23};
    const std::vector<event> events = testing::random_events(gen, geometry, 200);

    const std::string csv = write_event_csv(events);
    const event_stream back = read_event_stream(to_bytes(csv), timestamp_mode::strict, geometry);
    CHECK(back.events == events);
    CHECK(back.geometry == geometry);
}

TEST_CASE("event CSV validation") {
    const sensor_geometry geometry{8, 8};
    SUBCASE("header is required") {
        CHECK_THROWS_AS(
            read_event_stream(to_bytes("time,x,y,p\n1,2,3,1\n"), timestamp_mode::strict, geometry),
            format_error);
    }
    SUBCASE("field count is checked") {
        CHECK_THROWS_AS(read_event_stream(to_bytes("t_us,x,y,polarity\n1,2,3\n"),
                                          timestamp_mode::strict, geometry),
                        format_error);
    }
    SUBCASE("numeric fields name the line") {
        try {
            read_event_stream(to_bytes("t_us,x,y,polarity\n1,2,3,1\nx,2,3,1\n"),
                              timestamp_mode::strict, geometry);
            FAIL("expected format_error");
        } catch (const format_error& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("polarity range is checked") {
        CHECK_THROWS_AS(read_event_stream(to_bytes("t_us,x,y,polarity\n1,2,3,2\n"),
                                          timestamp_mode::strict, geometry),
                        format_error);
    }
    SUBCASE("bounds come from the supplied geometry") {
        CHECK_THROWS_AS(read_event_stream(to_bytes("t_us,x,y,polarity\n1,9,3,1\n"),
                                          timestamp_mode::strict, geometry),
                        validation_error);
    }
    SUBCASE("crlf and blank lines are tolerated") {
        const event_stream s = read_event_stream(to_bytes("t_us,x,y,polarity\r\n1,2,3,1\r\n\n"),
                                                 timestamp_mode::strict, geometry);
        CHECK(s.events.size() == 1);
        CHECK(s.events[0] == event{1, 2, 3, polarity::on});
    }
}

TEST_CASE("writer validates before serializing") {
    CHECK_THROWS_AS(write_event_stream({4, 4}, std::vector<event>{{0, 9, 0, polarity::on}}), validation_error);
    CHECK_THROWS_AS(write_event_stream({0, 4}, {}), validation_error);
    CHECK_THROWS_AS(
        write_event_stream({4, 4}, std::vector<event>{{10, 0, 0, polarity::on}, {5, 1, 1, polarity::on}}),
        validation_error);
}

TEST_CASE("fixation CSV round-trips including fractional coordinates") {
    const std::vector<fixation_record> records = {
        {"p01", "dot_a", 0, 413000, 151.25, 119.5},
        {"p01", "dot_a", 413000, 800000, -3.5, 240.0},
        {"p02", "street_x", 10, 10, 0.0, 0.0},
    };
    const std::string csv = write_fixations(records);
    CHECK(read_fixations(csv) == records);
}

TEST_CASE("fixation CSV validation") {
    SUBCASE("header is required") {
        CHECK_THROWS_AS(read_fixations("a,b,c,d,e,f\n"), format_error);
    }
    SUBCASE("t_end before t_start names the line") {
        const std::string csv =
            "participant_id,video_id,t_start_us,t_end_us,x,y\np,v,100,50,1,1\n";
        try {
            read_fixations(csv);
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("field count is checked") {
        CHECK_THROWS_AS(
            read_fixations("participant_id,video_id,t_start_us,t_end_us,x,y\np,v,1,2,3\n"),
            format_error);
    }
}

TEST_CASE("file helpers round-trip") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "evsal_io_test";
    std::filesystem::create_directories(dir);
    const std::filesystem::path bin = dir / "data.bin";
    const std::filesystem::path txt = dir / "data.txt";

    const std::vector<std::byte> payload = {std::byte{0}, std::byte{255}, std::byte{'\n'}};
    write_binary_file(bin, payload);
    CHECK(read_binary_file(bin) == payload);

    write_text_file(txt, "line one\nline two\n");
    CHECK(read_text_file(txt) == "line one\nline two\n");

    CHECK_THROWS(read_binary_file(dir / "missing.bin"));
    std::filesystem::remove_all(dir);
}
