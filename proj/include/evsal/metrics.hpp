#pragma once

#include "evsal/events.hpp"
#include "evsal/rasterize.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evsal {

/// One fixation location attached to one rendered frame. Coordinates are in
/// video pixels; the pixel under a fixation is (floor(x), floor(y)).
struct fixation_sample {
    std::size_t frame_index = 0;
    double x = 0;
    double y = 0;

    friend bool operator==(const fixation_sample&, const fixation_sample&) = default;
};

/// Spatial distribution of fixations. When `normalized`, values sum to 1.
struct fixation_map {
    sensor_geometry geometry;
    std::vector<double> values;
    bool normalized = false;
};

/// Mean z-scored saliency at the fixation pixels, using the population
/// standard deviation over the whole map. Invariant under positive affine
/// transforms of the map. Throws degenerate_error on a zero-variance map or
/// an empty fixation list, validation_error on an out-of-bounds fixation.
double nss(const saliency_frame& frame, std::span<const fixation_sample> fixations);

/// Shuffled AUC: Mann-Whitney area under the ROC separating saliency at
/// positive fixations from saliency at negative (other-video) fixations.
/// Ties earn half credit via average ranks, so a constant map scores 0.5.
double sauc(const saliency_frame& frame, std::span<const fixation_sample> positives,
            std::span<const fixation_sample> negatives);

/// Histogram intersection of two distributions that each sum to 1 (checked
/// to 1e-6; callers normalize explicitly).
double sim(std::span<const double> s, std::span<const double> fm);

/// Pearson correlation over all pixels, population standard deviation.
/// Throws degenerate_error if either input has zero variance.
double cc(std::span<const double> s, std::span<const double> fm);

/// Frame values rescaled to sum 1. Throws degenerate_error on an all-zero frame.
std::vector<double> to_distribution(const saliency_frame& frame);

/// Unit impulses at the fixation pixels convolved with an isotropic Gaussian
/// (truncated at 3 sigma), normalized to sum 1. sigma_px = 0 keeps pure
/// impulses. Out-of-bounds fixations are ignored; throws degenerate_error if
/// none are in bounds.
fixation_map build_fixation_map(std::span<const fixation_sample> fixations,
                                sensor_geometry geometry, double sigma_px);

/// Fraction of fixations whose pixel lies inside the video area (boundary
/// pixels count as inside). Throws degenerate_error on an empty list.
double attention_score(std::span<const fixation_record> fixations, sensor_geometry geometry);

/// Category label of a video id: the prefix before the first '_', or the
/// whole id when there is none.
std::string_view category_of(std::string_view video_id);

struct retention_count {
    std::size_t kept = 0;
    std::size_t total = 0;
};

struct filtered_dataset {
    std::vector<fixation_record> records;
    std::map<std::string, retention_count> by_category; // participant-video pairs
    retention_count pairs;
};

/// Drops every participant-video pair whose attention score is below the
/// threshold and reports retention counts per category.
filtered_dataset filter_dataset(std::span<const fixation_record> records,
                                sensor_geometry geometry, double threshold = 0.9);

/// NaN-excluding arithmetic mean. mean is NaN when no value is valid.
struct metric_summary {
    double mean = 0;
    std::size_t n_valid = 0;
    std::size_t n_excluded = 0;

    bool valid() const noexcept { return n_valid > 0; }
};

metric_summary aggregate(std::span<const double> values);

/// One degree of visual angle in video pixels under the recording setup this
/// model was evaluated with: a 168 cm wide, 1024 px wide screen viewed from
/// 1.5 m, video shown pixel-for-pixel.
double default_fixation_sigma_px();

struct evaluation_options {
    double sigma_px = default_fixation_sigma_px();
    std::size_t negative_cap = 0; // 0: use the whole negative pool
    std::uint64_t seed = 1;
};

/// Expands fixation records onto the frame timeline: a record contributes a
/// sample to every frame whose timestamp lies in [t_start, t_end]. Samples
/// whose pixel falls outside the video area are dropped.
std::vector<fixation_sample> assign_to_frames(std::span<const fixation_record> records,
                                              const frame_file& file);

struct video_evaluation {
    metric_summary nss;
    metric_summary sauc;
    metric_summary sim;
    metric_summary cc;
    std::size_t n_frames = 0;    // frames that carried at least one fixation
    std::size_t n_negatives = 0; // negative locations used for sauc
};

/// Per-frame NSS/sAUC/SIM/CC against the fixations of one video, aggregated
/// over frames. Negatives are the pooled locations of the negative records
/// (other videos), shared by every frame; a positive cap subsamples the pool
/// with the seeded generator. Frames without fixations are skipped; frames
/// where a metric is degenerate count into that metric's n_excluded.
video_evaluation evaluate_video(const frame_file& file,
                                std::span<const fixation_record> positives,
                                std::span<const fixation_record> negative_pool,
                                const evaluation_options& options = {});

} // namespace evsal
