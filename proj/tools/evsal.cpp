// Command-line front end: score event streams into saliency frames, evaluate
// them against fixation data, sweep temporal windows, benchmark the scorers,
// and generate synthetic scenes.
//
// Exit codes: 0 success, 2 usage error, 3 data or validation error,
// 4 result degenerate (every requested metric undefined, or a degenerate
// request such as ground truth for a targetless scene).

#include "evsal/event_io.hpp"
#include "evsal/metrics.hpp"
#include "evsal/rasterize.hpp"
#include "evsal/saliency.hpp"
#include "evsal/synth.hpp"
#include "evsal/time_surface.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace evsal;

std::uint64_t parse_duration_us(std::string_view text) {
    std::string_view digits = text;
    double mult = 1.0;
    auto ends_with = [&](std::string_view suffix) {
        return digits.size() > suffix.size() &&
               digits.substr(digits.size() - suffix.size()) == suffix;
    };
    if (ends_with("us")) {
        digits.remove_suffix(2);
    } else if (ends_with("ms")) {
        mult = 1e3;
        digits.remove_suffix(2);
    } else if (ends_with("s")) {
        mult = 1e6;
        digits.remove_suffix(1);
    }
    double value = 0;
    const char* last = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), last, value);
    if (digits.empty() || ec != std::errc() || ptr != last || value < 0 ||
        !std::isfinite(value))
        throw format_error("bad duration '" + std::string(text) +
                           "' (examples: 10000us, 10ms, 1s)");
    return static_cast<std::uint64_t>(std::llround(value * mult));
}

std::uint64_t parse_staleness_us(std::string_view text) {
    if (text == "inf" || text == "none")
        return no_staleness;
    return parse_duration_us(text);
}

std::string format_duration(std::uint64_t us) {
    if (us % 1000 == 0 && us > 0)
        return std::to_string(us / 1000) + "ms";
    return std::to_string(us) + "us";
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_cell(double v) {
    if (std::isnan(v))
        return "-";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
    return std::string(buf, ptr);
}

const CLI::Validator duration_check(
    [](std::string& input) -> std::string {
        try {
            parse_duration_us(input);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return {};
    },
    "DURATION");

const CLI::Validator staleness_check(
    [](std::string& input) -> std::string {
        try {
            parse_staleness_us(input);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return {};
    },
    "DURATION|inf");

struct scale_options {
    std::vector<std::uint32_t> radii;
    std::vector<std::string> windows;

    scale_config build() const {
        scale_config config;
        if (!radii.empty())
            config.radii = radii;
        if (!windows.empty()) {
            config.windows_us.clear();
            for (const std::string& w : windows)
                config.windows_us.push_back(parse_duration_us(w));
        }
        config.validate();
        return config;
    }
};

void add_scale_options(CLI::App* cmd, scale_options& opts) {
    cmd->add_option("--radii", opts.radii, "Spatial radii in pixels (default 1,2,4,8,16,32)")
        ->delimiter(',');
    cmd->add_option("--windows", opts.windows,
                    "Temporal windows (default 10ms,20ms,40ms,80ms,160ms,320ms)")
        ->delimiter(',')
        ->check(duration_check);
}

struct render_cli_options {
    std::string frame_period = "10ms";
    std::string staleness = "320ms";
    std::string norm = "per-frame";
    std::string t_end;

    render_options build() const {
        render_options opts;
        opts.frame_period_us = parse_duration_us(frame_period);
        opts.staleness_us = parse_staleness_us(staleness);
        opts.norm = norm == "global" ? normalization::global : normalization::per_frame;
        if (!t_end.empty())
            opts.t_end_us = parse_duration_us(t_end);
        return opts;
    }
};

void add_render_options(CLI::App* cmd, render_cli_options& opts) {
    cmd->add_option("--frame-period", opts.frame_period, "Frame period (default 10ms, 100 fps)")
        ->check(duration_check);
    cmd->add_option("--staleness", opts.staleness,
                    "Score expiry age; 'inf' keeps scores forever (default 320ms)")
        ->check(staleness_check);
    cmd->add_option("--norm", opts.norm, "Frame normalization (default per-frame)")
        ->check(CLI::IsMember({"per-frame", "global"}));
    cmd->add_option("--t-end", opts.t_end,
                    "Override the stream end time (default: last event timestamp)")
        ->check(duration_check);
}

event_stream load_events(const std::string& path, bool lenient, std::uint16_t width,
                         std::uint16_t height) {
    const std::vector<std::byte> bytes = read_binary_file(path);
    const timestamp_mode mode = lenient ? timestamp_mode::lenient : timestamp_mode::strict;
    event_stream stream = read_event_stream(bytes, mode, sensor_geometry{width, height});
    if (stream.clamped_timestamps > 0)
        std::cerr << "note: clamped " << stream.clamped_timestamps
                  << " regressing timestamps\n";
    return stream;
}

std::size_t fixed_window_index(const scale_config& config, const std::string& text) {
    const std::uint64_t window = parse_duration_us(text);
    for (std::size_t u = 0; u < config.windows_us.size(); ++u)
        if (config.windows_us[u] == window)
            return u;
    throw validation_error("--fixed-window " + text + " is not one of the configured windows");
}

// ---------------------------------------------------------------- saliency

struct saliency_args {
    std::string input;
    std::string output;
    std::uint16_t width = 304;
    std::uint16_t height = 240;
    bool lenient = false;
    scale_options scales;
    std::string fixed_window;
    render_cli_options render;
    std::string pgm_dir;
};

int cmd_saliency(const saliency_args& args) {
    const event_stream stream = load_events(args.input, args.lenient, args.width, args.height);
    const scale_config config = args.scales.build();
    std::optional<std::size_t> fixed;
    if (!args.fixed_window.empty())
        fixed = fixed_window_index(config, args.fixed_window);

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<scored_event> scored =
        process_stream(stream.events, stream.geometry, config, fixed);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const render_options ropts = args.render.build();
    if (ropts.frame_period_us > std::numeric_limits<std::uint32_t>::max())
        throw validation_error("frame period does not fit the frame file header");
    render_result rendered = render_frames(scored, stream.geometry, ropts);

    frame_file file;
    file.geometry = stream.geometry;
    file.frame_period_us = static_cast<std::uint32_t>(ropts.frame_period_us);
    file.frames = std::move(rendered.frames);
    write_binary_file(args.output, write_frames(file));

    if (!args.pgm_dir.empty()) {
        std::filesystem::create_directories(args.pgm_dir);
        char name[32];
        for (std::size_t i = 0; i < file.frames.size(); ++i) {
            std::snprintf(name, sizeof name, "frame_%06zu.pgm", i + 1);
            write_binary_file(std::filesystem::path(args.pgm_dir) / name,
                              write_pgm(file.frames[i]));
        }
    }

    if (stream.events.empty())
        std::cerr << "warning: empty event stream, wrote a frame file with 0 frames\n";
    std::cout << "events: " << stream.events.size() << "\n"
              << "frames: " << file.frames.size() << " (" << rendered.degenerate_frames
              << " degenerate)\n"
              << "events/sec: "
              << format_double(seconds > 0 ? stream.events.size() / seconds : 0.0) << "\n"
              << "wrote " << args.output << "\n";
    return 0;
}

// ----------------------------------------------------------------- metrics

struct metric_args {
    std::vector<std::string> inputs; // "<video_id>=<frames path>" or a bare path
    std::string video_id;
    std::string fixations;
    std::string negatives;
    double attention_threshold = 0.9;
    double sigma = default_fixation_sigma_px();
    std::size_t negative_cap = 0;
    std::uint64_t seed = 1;
    std::uint16_t width = 0; // 0: take the frame file's geometry
    std::uint16_t height = 0;
    std::string output;
};

struct video_input {
    std::string id;
    frame_file file;
};

std::vector<video_input> load_frame_inputs(const metric_args& args) {
    std::vector<video_input> inputs;
    for (const std::string& entry : args.inputs) {
        const std::size_t eq = entry.find('=');
        std::string id;
        std::string path;
        if (eq != std::string::npos && eq > 0) {
            id = entry.substr(0, eq);
            path = entry.substr(eq + 1);
        } else {
            if (args.video_id.empty() || args.inputs.size() != 1)
                throw validation_error(
                    "frame inputs must be <video_id>=<path>, or a single path with --video-id");
            id = args.video_id;
            path = entry;
        }
        inputs.push_back({std::move(id), read_frames(read_binary_file(path))});
    }
    for (std::size_t i = 1; i < inputs.size(); ++i)
        if (!(inputs[i].file.geometry == inputs[0].file.geometry))
            throw validation_error("frame files disagree on geometry");
    if (args.width != 0 || args.height != 0) {
        const sensor_geometry expected{args.width, args.height};
        if (!(inputs[0].file.geometry == expected))
            throw validation_error(
                "frame file geometry does not match the requested --width/--height");
    }
    return inputs;
}

struct report_row {
    std::string video_id; // empty for category rows
    std::string category;
    std::string metric;
    double value = 0;
    std::size_t n_frames = 0;
    std::size_t n_excluded = 0;
};

std::string render_report(std::span<const report_row> rows) {
    std::string out = "video_id,category,metric,value,n_frames,n_excluded\n";
    for (const report_row& row : rows) {
        out += row.video_id + "," + row.category + "," + row.metric + "," +
               format_double(row.value) + "," + std::to_string(row.n_frames) + "," +
               std::to_string(row.n_excluded) + "\n";
    }
    return out;
}

struct metric_accumulator {
    double weighted_sum = 0;
    std::size_t n_valid = 0;
    std::size_t n_excluded = 0;

    void add(const metric_summary& s) {
        if (s.n_valid > 0)
            weighted_sum += s.mean * static_cast<double>(s.n_valid);
        n_valid += s.n_valid;
        n_excluded += s.n_excluded;
    }
    metric_summary summary() const {
        metric_summary s;
        s.n_valid = n_valid;
        s.n_excluded = n_excluded;
        s.mean = n_valid > 0 ? weighted_sum / static_cast<double>(n_valid)
                             : std::numeric_limits<double>::quiet_NaN();
        return s;
    }
};

void print_evaluation_line(const std::string& label, const video_evaluation& eval) {
    std::cout << label << ": frames " << eval.n_frames << " | nss "
              << format_cell(eval.nss.mean) << " | sauc " << format_cell(eval.sauc.mean)
              << " | sim " << format_cell(eval.sim.mean) << " | cc "
              << format_cell(eval.cc.mean) << "\n";
}

bool all_degenerate(const video_evaluation& eval) {
    return eval.nss.n_valid == 0 && eval.sauc.n_valid == 0 && eval.sim.n_valid == 0 &&
           eval.cc.n_valid == 0;
}

int cmd_metrics(const metric_args& args) {
    const std::vector<video_input> inputs = load_frame_inputs(args);
    const sensor_geometry geometry = inputs[0].file.geometry;

    const std::vector<fixation_record> records = read_fixations(read_text_file(args.fixations));
    const filtered_dataset filtered =
        filter_dataset(records, geometry, args.attention_threshold);
    for (const auto& [category, retention] : filtered.by_category)
        std::cout << "attention filter: category " << category << " kept " << retention.kept
                  << "/" << retention.total << " participant-video pairs\n";

    std::vector<fixation_record> negative_file_pool;
    if (!args.negatives.empty())
        negative_file_pool = read_fixations(read_text_file(args.negatives));

    const evaluation_options options{args.sigma, args.negative_cap, args.seed};

    std::vector<report_row> rows;
    struct category_totals {
        metric_accumulator nss, sauc, sim, cc;
        std::size_t n_frames = 0;
    };
    std::map<std::string, category_totals> categories;
    bool any_valid = false;
    for (const video_input& input : inputs) {
        std::vector<fixation_record> positives;
        std::vector<fixation_record> others;
        for (const fixation_record& r : filtered.records)
            (r.video_id == input.id ? positives : others).push_back(r);
        const std::span<const fixation_record> negatives =
            args.negatives.empty() ? std::span<const fixation_record>(others)
                                   : std::span<const fixation_record>(negative_file_pool);

        const video_evaluation eval = evaluate_video(input.file, positives, negatives, options);
        const std::string category(category_of(input.id));
        print_evaluation_line("video " + input.id + " (" + category + ")", eval);
        if (!all_degenerate(eval))
            any_valid = true;

        const std::pair<const char*, const metric_summary*> metrics[] = {
            {"nss", &eval.nss}, {"sauc", &eval.sauc}, {"sim", &eval.sim}, {"cc", &eval.cc}};
        for (const auto& [name, summary] : metrics)
            rows.push_back({input.id, category, name, summary->mean, eval.n_frames,
                            summary->n_excluded});

        category_totals& totals = categories[category];
        totals.nss.add(eval.nss);
        totals.sauc.add(eval.sauc);
        totals.sim.add(eval.sim);
        totals.cc.add(eval.cc);
        totals.n_frames += eval.n_frames;
    }

    for (const auto& [category, totals] : categories) {
        const std::pair<const char*, metric_summary> metrics[] = {
            {"nss", totals.nss.summary()},
            {"sauc", totals.sauc.summary()},
            {"sim", totals.sim.summary()},
            {"cc", totals.cc.summary()}};
        for (const auto& [name, summary] : metrics)
            rows.push_back({"", category, name, summary.mean, totals.n_frames,
                            summary.n_excluded});
    }

    const std::string report = render_report(rows);
    if (!args.output.empty()) {
        write_text_file(args.output, report);
        std::cout << "wrote " << args.output << "\n";
    } else {
        std::cout << report;
    }

    if (!any_valid) {
        std::cerr << "error: every metric is degenerate on this input\n";
        return 4;
    }
    return 0;
}

// ------------------------------------------------------------------- sweep

struct sweep_args {
    std::string input;
    std::string fixations;
    std::string video_id;
    std::string negatives;
    std::uint16_t width = 304;
    std::uint16_t height = 240;
    bool lenient = false;
    scale_options scales;
    render_cli_options render;
    double attention_threshold = 0.9;
    double sigma = default_fixation_sigma_px();
    std::size_t negative_cap = 0;
    std::uint64_t seed = 1;
    std::string output;
};

int cmd_sweep(const sweep_args& args) {
    const event_stream stream = load_events(args.input, args.lenient, args.width, args.height);
    const scale_config config = args.scales.build();
    const render_options ropts = args.render.build();
    if (ropts.frame_period_us > std::numeric_limits<std::uint32_t>::max())
        throw validation_error("frame period does not fit the frame file header");

    const std::vector<fixation_record> records = read_fixations(read_text_file(args.fixations));
    const filtered_dataset filtered =
        filter_dataset(records, stream.geometry, args.attention_threshold);
    std::vector<fixation_record> positives;
    std::vector<fixation_record> others;
    for (const fixation_record& r : filtered.records)
        (r.video_id == args.video_id ? positives : others).push_back(r);
    std::vector<fixation_record> negative_file_pool;
    if (!args.negatives.empty())
        negative_file_pool = read_fixations(read_text_file(args.negatives));
    const std::span<const fixation_record> negatives =
        args.negatives.empty() ? std::span<const fixation_record>(others)
                               : std::span<const fixation_record>(negative_file_pool);

    const evaluation_options options{args.sigma, args.negative_cap, args.seed};
    auto evaluate_setting = [&](std::optional<std::size_t> fixed) {
        const std::vector<scored_event> scored =
            process_stream(stream.events, stream.geometry, config, fixed);
        render_result rendered = render_frames(scored, stream.geometry, ropts);
        frame_file file;
        file.geometry = stream.geometry;
        file.frame_period_us = static_cast<std::uint32_t>(ropts.frame_period_us);
        file.frames = std::move(rendered.frames);
        return evaluate_video(file, positives, negatives, options);
    };

    std::vector<std::pair<std::string, video_evaluation>> table;
    for (std::size_t u = 0; u < config.n_windows(); ++u)
        table.emplace_back(format_duration(config.windows_us[u]), evaluate_setting(u));
    table.emplace_back("evst", evaluate_setting(std::nullopt));

    std::cout << "setting    nss      sauc     sim      cc       frames\n";
    bool any_valid = false;
    std::string csv = "setting,metric,value,n_frames,n_excluded\n";
    for (const auto& [label, eval] : table) {
        std::printf("%-10s %-8s %-8s %-8s %-8s %zu\n", label.c_str(),
                    format_cell(eval.nss.mean).c_str(), format_cell(eval.sauc.mean).c_str(),
                    format_cell(eval.sim.mean).c_str(), format_cell(eval.cc.mean).c_str(),
                    eval.n_frames);
        if (!all_degenerate(eval))
            any_valid = true;
        const std::pair<const char*, const metric_summary*> metrics[] = {
            {"nss", &eval.nss}, {"sauc", &eval.sauc}, {"sim", &eval.sim}, {"cc", &eval.cc}};
        for (const auto& [name, summary] : metrics)
            csv += label + "," + name + "," + format_double(summary->mean) + "," +
                   std::to_string(eval.n_frames) + "," + std::to_string(summary->n_excluded) +
                   "\n";
    }
    if (!args.output.empty()) {
        write_text_file(args.output, csv);
        std::cout << "wrote " << args.output << "\n";
    }
    if (!any_valid) {
        std::cerr << "error: every metric is degenerate on this input\n";
        return 4;
    }
    return 0;
}

// ------------------------------------------------------------------- bench

struct bench_args {
    std::string input;
    std::string synth_spec;
    std::uint16_t width = 304;
    std::uint16_t height = 240;
    bool lenient = false;
    scale_options scales;
    std::size_t oracle_cap = 2000;
};

int cmd_bench(const bench_args& args) {
    std::vector<event> events;
    sensor_geometry geometry{args.width, args.height};
    if (!args.input.empty()) {
        event_stream stream = load_events(args.input, args.lenient, args.width, args.height);
        events = std::move(stream.events);
        geometry = stream.geometry;
    } else if (!args.synth_spec.empty()) {
        const scene_spec spec = parse_scene_spec(read_text_file(args.synth_spec));
        geometry = spec.geometry;
        events = generate(spec);
    } else {
        throw validation_error("bench needs --input or --synth");
    }

    const scale_config config = args.scales.build();
    nlohmann::json config_json;
    config_json["radii"] = config.radii;
    config_json["windows_us"] = config.windows_us;

    auto run = [&](const char* name, std::size_t count, auto&& score) {
        time_surface surface(geometry);
        scale_grid grid;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < count; ++i) {
            surface.update(events[i]);
            score(surface, events[i], grid);
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double rate = seconds > 0 ? static_cast<double>(count) / seconds : 0.0;
        nlohmann::json line;
        line["scorer"] = name;
        line["events"] = count;
        line["seconds"] = seconds;
        line["events_per_sec"] = rate;
        line["config"] = config_json;
        std::cout << line.dump() << "\n";
        return rate;
    };

    event_scorer fast(config);
    const double fast_rate = run("fast", events.size(),
                                 [&](const time_surface& surface, const event& e,
                                     scale_grid& grid) { fast.score(surface, e, grid); });
    const std::size_t oracle_count =
        args.oracle_cap == 0 ? events.size() : std::min(events.size(), args.oracle_cap);
    const double oracle_rate =
        run("oracle", oracle_count,
            [&](const time_surface& surface, const event& e, scale_grid& grid) {
                grid = score_event(surface, e, config);
            });

    nlohmann::json comparison;
    comparison["speedup"] = oracle_rate > 0 ? fast_rate / oracle_rate : 0.0;
    std::cout << comparison.dump() << "\n";
    return 0;
}

// ------------------------------------------------------------------- synth

struct synth_args {
    std::string spec_path;
    std::string output;
    std::string text_output;
    std::string fixations;
    std::string video_id;
    std::string frame_period = "10ms";
    std::optional<std::uint64_t> seed;
};

int cmd_synth(const synth_args& args) {
    scene_spec spec = parse_scene_spec(read_text_file(args.spec_path));
    if (args.seed)
        spec.seed = *args.seed;

    const std::vector<event> events = generate(spec);
    write_binary_file(args.output, write_event_stream(spec.geometry, events));
    if (!args.text_output.empty())
        write_text_file(args.text_output, write_event_csv(events));

    if (!args.fixations.empty()) {
        const std::string video_id =
            args.video_id.empty() ? std::string(to_string(spec.kind)) : args.video_id;
        const std::vector<fixation_record> records =
            ground_truth_fixations(spec, parse_duration_us(args.frame_period), video_id);
        write_text_file(args.fixations, write_fixations(records));
    }

    std::cout << "scene: " << to_string(spec.kind) << " " << spec.geometry.width << "x"
              << spec.geometry.height << ", duration " << format_duration(spec.duration_us)
              << ", seed " << spec.seed << "\n"
              << "events: " << events.size() << "\n"
              << "wrote " << args.output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-event multi-scale spatiotemporal saliency for event-camera streams"};
    app.require_subcommand(1);

    saliency_args sal;
    CLI::App* sal_cmd =
        app.add_subcommand("saliency", "Score an event stream and write saliency frames");
    sal_cmd->add_option("--input,-i", sal.input, "Event file (binary or CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    sal_cmd->add_option("--output,-o", sal.output, "Frame file to write")->required();
    sal_cmd->add_option("--width", sal.width, "Sensor width for CSV input (default 304)");
    sal_cmd->add_option("--height", sal.height, "Sensor height for CSV input (default 240)");
    sal_cmd->add_flag("--lenient", sal.lenient, "Clamp regressing timestamps instead of failing");
    add_scale_options(sal_cmd, sal.scales);
    sal_cmd->add_option("--fixed-window", sal.fixed_window,
                        "Score with one temporal window (e.g. 320ms) instead of all scales")
        ->check(duration_check);
    add_render_options(sal_cmd, sal.render);
    sal_cmd->add_option("--pgm-dir", sal.pgm_dir, "Also write one graymap per frame here");

    metric_args met;
    CLI::App* met_cmd =
        app.add_subcommand("metrics", "Evaluate saliency frames against fixations");
    met_cmd->add_option("--frames,-f", met.inputs,
                        "Frame files, each as <video_id>=<path> (or one path with --video-id)")
        ->required();
    met_cmd->add_option("--fixations", met.fixations, "Fixation CSV")
        ->required()
        ->check(CLI::ExistingFile);
    met_cmd->add_option("--video-id", met.video_id, "Video id for a bare --frames path");
    met_cmd->add_option("--negatives", met.negatives,
                        "Fixation CSV supplying the negative pool (default: other videos)")
        ->check(CLI::ExistingFile);
    met_cmd->add_option("--attention-threshold", met.attention_threshold,
                        "Minimum attention score per participant-video pair (default 0.9)")
        ->check(CLI::Range(0.0, 1.0));
    met_cmd->add_option("--sigma", met.sigma,
                        "Fixation map Gaussian sigma in pixels; 0 keeps impulses");
    met_cmd->add_option("--negative-cap", met.negative_cap,
                        "Subsample the negative pool to this many locations (0: all)");
    met_cmd->add_option("--seed", met.seed, "Seed for negative subsampling");
    met_cmd->add_option("--width", met.width, "Expected frame width (checked against the file)");
    met_cmd->add_option("--height", met.height,
                        "Expected frame height (checked against the file)");
    met_cmd->add_option("--output,-o", met.output, "Report CSV path (default: print to stdout)");

    sweep_args swp;
    CLI::App* swp_cmd = app.add_subcommand(
        "sweep", "Evaluate each temporal window alone, then the full multi-scale model");
    swp_cmd->add_option("--input,-i", swp.input, "Event file (binary or CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    swp_cmd->add_option("--fixations", swp.fixations, "Fixation CSV")
        ->required()
        ->check(CLI::ExistingFile);
    swp_cmd->add_option("--video-id", swp.video_id, "Video id of this stream's fixations")
        ->required();
    swp_cmd->add_option("--negatives", swp.negatives,
                        "Fixation CSV supplying the negative pool (default: other videos)")
        ->check(CLI::ExistingFile);
    swp_cmd->add_option("--width", swp.width, "Sensor width for CSV input (default 304)");
    swp_cmd->add_option("--height", swp.height, "Sensor height for CSV input (default 240)");
    swp_cmd->add_flag("--lenient", swp.lenient, "Clamp regressing timestamps instead of failing");
    add_scale_options(swp_cmd, swp.scales);
    add_render_options(swp_cmd, swp.render);
    swp_cmd->add_option("--attention-threshold", swp.attention_threshold,
                        "Minimum attention score per participant-video pair (default 0.9)")
        ->check(CLI::Range(0.0, 1.0));
    swp_cmd->add_option("--sigma", swp.sigma,
                        "Fixation map Gaussian sigma in pixels; 0 keeps impulses");
    swp_cmd->add_option("--negative-cap", swp.negative_cap,
                        "Subsample the negative pool to this many locations (0: all)");
    swp_cmd->add_option("--seed", swp.seed, "Seed for negative subsampling");
    swp_cmd->add_option("--output,-o", swp.output, "Sweep CSV path");

    bench_args ben;
    CLI::App* ben_cmd =
        app.add_subcommand("bench", "Measure fast and reference scorer throughput");
    CLI::Option* ben_input =
        ben_cmd->add_option("--input,-i", ben.input, "Event file (binary or CSV)")
            ->check(CLI::ExistingFile);
    ben_cmd->add_option("--synth", ben.synth_spec, "Scene file to generate events from")
        ->check(CLI::ExistingFile)
        ->excludes(ben_input);
    ben_cmd->add_option("--width", ben.width, "Sensor width for CSV input (default 304)");
    ben_cmd->add_option("--height", ben.height, "Sensor height for CSV input (default 240)");
    ben_cmd->add_flag("--lenient", ben.lenient, "Clamp regressing timestamps instead of failing");
    add_scale_options(ben_cmd, ben.scales);
    ben_cmd->add_option("--oracle-cap", ben.oracle_cap,
                        "Events to run through the reference scorer (0: all; default 2000)");

    synth_args syn;
    CLI::App* syn_cmd = app.add_subcommand("synth", "Generate a synthetic event stream");
    syn_cmd->add_option("--spec", syn.spec_path, "Scene file (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    syn_cmd->add_option("--output,-o", syn.output, "Event file to write")->required();
    syn_cmd->add_option("--text", syn.text_output, "Also write the stream as CSV here");
    syn_cmd->add_option("--fixations", syn.fixations, "Write ground-truth fixations here");
    syn_cmd->add_option("--video-id", syn.video_id,
                        "Video id for the fixation records (default: the scene kind)");
    syn_cmd->add_option("--frame-period", syn.frame_period,
                        "Frame period for ground-truth fixations (default 10ms)")
        ->check(duration_check);
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = syn_cmd->add_option("--seed", seed_value, "Override the scene seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(sal_cmd))
            return cmd_saliency(sal);
        if (app.got_subcommand(met_cmd))
            return cmd_metrics(met);
        if (app.got_subcommand(swp_cmd))
            return cmd_sweep(swp);
        if (app.got_subcommand(ben_cmd))
            return cmd_bench(ben);
        if (app.got_subcommand(syn_cmd)) {
            if (seed_opt->count() > 0)
                syn.seed = seed_value;
            return cmd_synth(syn);
        }
    } catch (const degenerate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
