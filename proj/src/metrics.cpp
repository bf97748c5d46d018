#include "evsal/metrics.hpp"

#include "evsal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace evsal {

namespace {

constexpr double quiet_nan = std::numeric_limits<double>::quiet_NaN();

struct pixel {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
};

/// The pixel under a fixation is (floor(x), floor(y)); false when that pixel
/// lies outside the video area.
bool sample_pixel(double x, double y, sensor_geometry geometry, pixel& out) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    if (!(fx >= 0) || !(fy >= 0) || fx >= geometry.width || fy >= geometry.height)
        return false;
    out.x = static_cast<std::uint16_t>(fx);
    out.y = static_cast<std::uint16_t>(fy);
    return true;
}

struct moments {
    double mean = 0;
    double stddev = 0; // population
};

template <typename T>
moments compute_moments(std::span<const T> values) {
    moments m;
    double total = 0;
    for (T v : values)
        total += v;
    m.mean = total / values.size();
    double ss = 0;
    for (T v : values) {
        const double d = v - m.mean;
        ss += d * d;
    }
    m.stddev = std::sqrt(ss / values.size());
    return m;
}

template <typename F>
double nan_on_degenerate(F&& f) {
    try {
        return f();
    } catch (const degenerate_error&) {
        return quiet_nan;
    }
}

} // namespace

double nss(const saliency_frame& frame, std::span<const fixation_sample> fixations) {
    if (fixations.empty())
        throw degenerate_error("nss: empty fixation list");
    if (frame.values.empty())
        throw degenerate_error("nss: empty map");
    const moments m = compute_moments(std::span<const float>(frame.values));
    if (m.stddev == 0)
        throw degenerate_error("nss: zero-variance map");
    const sensor_geometry geometry{frame.width, frame.height};
    double acc = 0;
    for (const fixation_sample& f : fixations) {
        pixel p;
        if (!sample_pixel(f.x, f.y, geometry, p))
            throw validation_error("nss: fixation outside the video area");
        acc += (frame.at(p.x, p.y) - m.mean) / m.stddev;
    }
    return acc / static_cast<double>(fixations.size());
}

double sauc(const saliency_frame& frame, std::span<const fixation_sample> positives,
            std::span<const fixation_sample> negatives) {
    if (positives.empty() || negatives.empty())
        throw degenerate_error("sauc: needs at least one positive and one negative");
    const sensor_geometry geometry{frame.width, frame.height};
    std::vector<std::pair<double, bool>> scored; // (saliency, is_positive)
    scored.reserve(positives.size() + negatives.size());
    auto push = [&](std::span<const fixation_sample> samples, bool is_positive) {
        for (const fixation_sample& f : samples) {
            pixel p;
            if (!sample_pixel(f.x, f.y, geometry, p))
                throw validation_error("sauc: fixation outside the video area");
            scored.emplace_back(frame.at(p.x, p.y), is_positive);
        }
    };
    push(positives, true);
    push(negatives, false);

    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Mann-Whitney with average ranks, so tied values earn half credit.
    double positive_rank_sum = 0;
    std::size_t i = 0;
    while (i < scored.size()) {
        std::size_t j = i;
        while (j < scored.size() && scored[j].first == scored[i].first)
            ++j;
        const double average_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (scored[k].second)
                positive_rank_sum += average_rank;
        i = j;
    }
    const double np = static_cast<double>(positives.size());
    const double nn = static_cast<double>(negatives.size());
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double sim(std::span<const double> s, std::span<const double> fm) {
    if (s.size() != fm.size() || s.empty())
        throw validation_error("sim: distributions differ in size");
    auto check_sum = [](std::span<const double> d, const char* name) {
        double total = 0;
        for (double v : d)
            total += v;
        if (std::abs(total - 1.0) > 1e-6)
            throw validation_error(std::string("sim: ") + name + " does not sum to 1");
    };
    check_sum(s, "first argument");
    check_sum(fm, "second argument");
    double acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc += std::min(s[i], fm[i]);
    return acc;
}

double cc(std::span<const double> s, std::span<const double> fm) {
    if (s.size() != fm.size() || s.empty())
        throw validation_error("cc: inputs differ in size");
    const moments ms = compute_moments(s);
    const moments mf = compute_moments(fm);
    if (ms.stddev == 0 || mf.stddev == 0)
        throw degenerate_error("cc: zero-variance input");
    double cov = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        cov += (s[i] - ms.mean) * (fm[i] - mf.mean);
    cov /= static_cast<double>(s.size());
    return std::clamp(cov / (ms.stddev * mf.stddev), -1.0, 1.0);
}

std::vector<double> to_distribution(const saliency_frame& frame) {
    double total = 0;
    for (float v : frame.values)
        total += v;
    if (total <= 0)
        throw degenerate_error("to_distribution: all-zero frame");
    std::vector<double> out(frame.values.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = frame.values[i] / total;
    return out;
}

fixation_map build_fixation_map(std::span<const fixation_sample> fixations,
                                sensor_geometry geometry, double sigma_px) {
    if (sigma_px < 0)
        throw validation_error("fixation map: sigma must be non-negative");
    if (geometry.width == 0 || geometry.height == 0)
        throw validation_error("fixation map: geometry has zero extent");

    fixation_map map;
    map.geometry = geometry;
    map.values.assign(geometry.pixel_count(), 0.0);

    std::size_t placed = 0;
    const int radius = sigma_px > 0 ? static_cast<int>(std::ceil(3.0 * sigma_px)) : 0;
    const double cutoff_sq = 9.0 * sigma_px * sigma_px;
    const double inv_two_sigma_sq = sigma_px > 0 ? 1.0 / (2.0 * sigma_px * sigma_px) : 0.0;
    for (const fixation_sample& f : fixations) {
        pixel p;
        if (!sample_pixel(f.x, f.y, geometry, p))
            continue;
        ++placed;
        if (sigma_px == 0) {
            map.values[static_cast<std::size_t>(p.y) * geometry.width + p.x] += 1.0;
            continue;
        }
        for (int dy = -radius; dy <= radius; ++dy) {
            const int y = p.y + dy;
            if (y < 0 || y >= geometry.height)
                continue;
            for (int dx = -radius; dx <= radius; ++dx) {
                const int x = p.x + dx;
                if (x < 0 || x >= geometry.width)
                    continue;
                const double dist_sq = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
                if (dist_sq > cutoff_sq)
                    continue;
                map.values[static_cast<std::size_t>(y) * geometry.width + x] +=
                    std::exp(-dist_sq * inv_two_sigma_sq);
            }
        }
    }
    if (placed == 0)
        throw degenerate_error("fixation map: no in-bounds fixations");

    double total = 0;
    for (double v : map.values)
        total += v;
    for (double& v : map.values)
        v /= total;
    map.normalized = true;
    return map;
}

double attention_score(std::span<const fixation_record> fixations, sensor_geometry geometry) {
    if (fixations.empty())
        throw degenerate_error("attention score: empty fixation list");
    std::size_t inside = 0;
    for (const fixation_record& r : fixations) {
        pixel p;
        if (sample_pixel(r.x, r.y, geometry, p))
            ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(fixations.size());
}

std::string_view category_of(std::string_view video_id) {
    const std::size_t underscore = video_id.find('_');
    return underscore == std::string_view::npos ? video_id : video_id.substr(0, underscore);
}

filtered_dataset filter_dataset(std::span<const fixation_record> records,
                                sensor_geometry geometry, double threshold) {
    // One attention tally per participant-video pair.
    std::map<std::pair<std::string_view, std::string_view>, retention_count> tallies;
    for (const fixation_record& r : records) {
        retention_count& tally = tallies[{r.participant_id, r.video_id}];
        ++tally.total; // fixations seen
        pixel p;
        if (sample_pixel(r.x, r.y, geometry, p))
            ++tally.kept; // fixations inside
    }

    filtered_dataset out;
    std::map<std::pair<std::string_view, std::string_view>, bool> keep;
    for (const auto& [key, tally] : tallies) {
        const double score = static_cast<double>(tally.kept) / static_cast<double>(tally.total);
        const bool kept = score >= threshold;
        keep[key] = kept;
        retention_count& category = out.by_category[std::string(category_of(key.second))];
        ++category.total;
        ++out.pairs.total;
        if (kept) {
            ++category.kept;
            ++out.pairs.kept;
        }
    }
    for (const fixation_record& r : records)
        if (keep[{r.participant_id, r.video_id}])
            out.records.push_back(r);
    return out;
}

metric_summary aggregate(std::span<const double> values) {
    metric_summary summary;
    double total = 0;
    for (double v : values) {
        if (std::isnan(v)) {
            ++summary.n_excluded;
            continue;
        }
        total += v;
        ++summary.n_valid;
    }
    summary.mean = summary.n_valid > 0 ? total / static_cast<double>(summary.n_valid)
                                       : quiet_nan;
    return summary;
}

double default_fixation_sigma_px() {
    const double distance_cm = 150.0;
    const double screen_width_cm = 168.0;
    const double screen_width_px = 1024.0;
    const double one_degree = std::numbers::pi / 180.0;
    return 2.0 * distance_cm * std::tan(one_degree / 2.0) * (screen_width_px / screen_width_cm);
}

std::vector<fixation_sample> assign_to_frames(std::span<const fixation_record> records,
                                              const frame_file& file) {
    const std::vector<saliency_frame>& frames = file.frames;
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].t < frames[i - 1].t)
            throw validation_error("frame timestamps are not sorted");

    std::vector<fixation_sample> samples;
    for (const fixation_record& r : records) {
        if (r.t_end < r.t_start)
            throw validation_error("fixation ends before it starts");
        pixel p;
        if (!sample_pixel(r.x, r.y, file.geometry, p))
            continue;
        auto first = std::lower_bound(frames.begin(), frames.end(), r.t_start,
                                      [](const saliency_frame& f, std::uint64_t t) {
                                          return f.t < t;
                                      });
        for (auto it = first; it != frames.end() && it->t <= r.t_end; ++it)
            samples.push_back({static_cast<std::size_t>(it - frames.begin()), r.x, r.y});
    }
    return samples;
}

video_evaluation evaluate_video(const frame_file& file,
                                std::span<const fixation_record> positives,
                                std::span<const fixation_record> negative_pool,
                                const evaluation_options& options) {
    video_evaluation out;

    std::vector<fixation_sample> negatives;
    negatives.reserve(negative_pool.size());
    for (const fixation_record& r : negative_pool) {
        pixel p;
        if (sample_pixel(r.x, r.y, file.geometry, p))
            negatives.push_back({0, r.x, r.y});
    }
    if (options.negative_cap > 0 && negatives.size() > options.negative_cap) {
        rng generator(options.seed);
        for (std::size_t i = 0; i < options.negative_cap; ++i) {
            const std::size_t j = i + generator.below(negatives.size() - i);
            std::swap(negatives[i], negatives[j]);
        }
        negatives.resize(options.negative_cap);
    }
    out.n_negatives = negatives.size();

    std::vector<std::vector<fixation_sample>> by_frame(file.frames.size());
    for (const fixation_sample& s : assign_to_frames(positives, file))
        by_frame[s.frame_index].push_back(s);

    std::vector<double> nss_values;
    std::vector<double> sauc_values;
    std::vector<double> sim_values;
    std::vector<double> cc_values;
    for (std::size_t i = 0; i < file.frames.size(); ++i) {
        if (by_frame[i].empty())
            continue;
        ++out.n_frames;
        const saliency_frame& frame = file.frames[i];
        const std::span<const fixation_sample> samples = by_frame[i];

        nss_values.push_back(nan_on_degenerate([&] { return nss(frame, samples); }));
        sauc_values.push_back(negatives.empty()
                                  ? quiet_nan
                                  : nan_on_degenerate([&] { return sauc(frame, samples, negatives); }));

        double sim_value = quiet_nan;
        double cc_value = quiet_nan;
        try {
            const fixation_map fm = build_fixation_map(samples, file.geometry, options.sigma_px);
            sim_value = nan_on_degenerate([&] { return sim(to_distribution(frame), fm.values); });
            const std::vector<double> s_map(frame.values.begin(), frame.values.end());
            cc_value = nan_on_degenerate([&] { return cc(s_map, fm.values); });
        } catch (const degenerate_error&) {
        }
        sim_values.push_back(sim_value);
        cc_values.push_back(cc_value);
    }
    out.nss = aggregate(nss_values);
    out.sauc = aggregate(sauc_values);
    out.sim = aggregate(sim_values);
    out.cc = aggregate(cc_values);
    return out;
}

} // namespace evsal
