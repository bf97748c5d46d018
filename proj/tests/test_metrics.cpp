#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evsal/metrics.hpp"
#include "evsal/rasterize.hpp"
#include "helpers.hpp"

#include <cmath>
#include <numeric>

using namespace evsal;

namespace {

saliency_frame make_frame(std::uint16_t w, std::uint16_t h, std::vector<float> values,
                          std::uint64_t t = 0) {
    saliency_frame f;
    f.t = t;
    f.width = w;
    f.height = h;
    f.values = std::move(values);
    return f;
}

// Textbook Pearson correlation, written independently of the library.
double pearson_reference(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

} // namespace

TEST_CASE("fixation z-score on a single hot pixel") {
    // values [0,0,0,1]: mean 1/4, population sd sqrt(3)/4, so z at the hot
    // pixel is (1 - 1/4) / (sqrt(3)/4) = sqrt(3).
    const saliency_frame frame = make_frame(2, 2, {0, 0, 0, 1});
    const std::vector<fixation_sample> at_hot = {{0, 1, 1}};
    CHECK(nss(frame, at_hot) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    const std::vector<fixation_sample> at_mean = {{0, 1, 0}};
    const saliency_frame graded = make_frame(2, 2, {0, 0.5f, 1, 0.5f});
    CHECK(nss(graded, at_mean) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fixation z-score averages over all fixations") {
    const saliency_frame frame = make_frame(2, 2, {0, 0, 0, 1});
    const std::vector<fixation_sample> everywhere = {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1}};
    // mean of z over the whole population is 0 by construction
    CHECK(nss(frame, everywhere) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fixation z-score is invariant under affine rescaling") {
    rng gen(11);
    // coarse dyadic values keep the float affine map below exact, so the
    // two frames really are affine images of each other
    std::vector<float> values(64);
    for (float& v : values)
        v = static_cast<float>(gen.below(64) + 1) / 64.0f;
    const saliency_frame frame = make_frame(8, 8, values);
    std::vector<float> scaled(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        scaled[i] = 2.75f * values[i] + 0.375f;
    const saliency_frame frame_scaled = make_frame(8, 8, scaled);

    const std::vector<fixation_sample> fixations = {{0, 3, 4}, {0, 7, 0}, {0, 1, 6}};
    CHECK(nss(frame, fixations) ==
          doctest::Approx(nss(frame_scaled, fixations)).epsilon(1e-9));
}

TEST_CASE("fixation z-score error cases") {
    const saliency_frame frame = make_frame(2, 2, {0, 0, 0, 1});
    CHECK_THROWS_AS(nss(frame, {}), degenerate_error);
    const saliency_frame flat = make_frame(2, 2, {0.5f, 0.5f, 0.5f, 0.5f});
    const std::vector<fixation_sample> one = {{0, 0, 0}};
    CHECK_THROWS_AS(nss(flat, one), degenerate_error);
    const std::vector<fixation_sample> oob = {{0, 2, 0}};
    CHECK_THROWS_AS(nss(frame, oob), validation_error);
}

TEST_CASE("shuffled AUC on the 2x2 worked example") {
    // saliency rows y=0: [0.9, 0.1], y=1: [0.2, 0.8]; positives at (0,0) and
    // (1,1), negatives at (1,0) and (0,1). Every positive value (0.9, 0.8)
    // beats every negative value (0.1, 0.2), so the ranking is perfect.
    const saliency_frame frame = make_frame(2, 2, {0.9f, 0.1f, 0.2f, 0.8f});
    const std::vector<fixation_sample> pos = {{0, 0, 0}, {0, 1, 1}};
    const std::vector<fixation_sample> neg = {{0, 1, 0}, {0, 0, 1}};
    CHECK(sauc(frame, pos, neg) == doctest::Approx(1.0).epsilon(1e-12));
    // swapping the roles gives the complement
    CHECK(sauc(frame, neg, pos) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("shuffled AUC on a constant map is exactly one half") {
    const saliency_frame flat = make_frame(3, 3, std::vector<float>(9, 0.42f));
    std::vector<fixation_sample> pos, neg;
    for (int i = 0; i < 3; ++i) {
        pos.push_back({0, static_cast<double>(i), 0.0});
        neg.push_back({0, static_cast<double>(i), 2.0});
    }
    CHECK(sauc(flat, pos, neg) == 0.5);
}

TEST_CASE("shuffled AUC is invariant under monotone transforms") {
    rng gen(12);
    std::vector<float> values(100);
    for (float& v : values)
        v = static_cast<float>(gen.uniform());
    const saliency_frame frame = make_frame(10, 10, values);
    std::vector<float> warped(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        warped[i] = std::exp(4.0f * values[i]);
    const saliency_frame frame_warped = make_frame(10, 10, warped);

    std::vector<fixation_sample> pos, neg;
    for (int i = 0; i < 12; ++i) {
        pos.push_back({0, static_cast<double>(gen.below(10)),
                       static_cast<double>(gen.below(10))});
        neg.push_back({0, static_cast<double>(gen.below(10)),
                       static_cast<double>(gen.below(10))});
    }
    CHECK(sauc(frame, pos, neg) == doctest::Approx(sauc(frame_warped, pos, neg)).epsilon(1e-12));
}

TEST_CASE("shuffled AUC tie handling gives half credit") {
    // positive at value 0.5, negatives at 0.5 and 0.1: one tie (half credit)
    // and one win -> (0.5 + 1) / 2 = 0.75
    const saliency_frame frame = make_frame(3, 1, {0.5f, 0.5f, 0.1f});
    const std::vector<fixation_sample> pos = {{0, 0, 0}};
    const std::vector<fixation_sample> neg = {{0, 1, 0}, {0, 2, 0}};
    CHECK(sauc(frame, pos, neg) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("shuffled AUC error cases") {
    const saliency_frame frame = make_frame(2, 2, {0, 0, 0, 1});
    const std::vector<fixation_sample> pos = {{0, 0, 0}};
    CHECK_THROWS_AS(sauc(frame, pos, {}), degenerate_error);
    CHECK_THROWS_AS(sauc(frame, {}, pos), degenerate_error);
    const std::vector<fixation_sample> oob = {{0, 5, 5}};
    CHECK_THROWS_AS(sauc(frame, pos, oob), validation_error);
}

TEST_CASE("histogram intersection") {
    const std::vector<double> s = {0.25, 0.25, 0.25, 0.25};
    CHECK(sim(s, s) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> left = {1, 0, 0, 0};
    const std::vector<double> right = {0, 0, 0, 1};
    CHECK(sim(left, right) == 0.0);

    const std::vector<double> a = {0.5, 0.5};
    const std::vector<double> b = {0.25, 0.75};
    CHECK(sim(a, b) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(sim(b, a) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("histogram intersection rejects non-distributions") {
    const std::vector<double> good = {0.5, 0.5};
    const std::vector<double> short_one = {1.0};
    CHECK_THROWS_AS(sim(good, short_one), validation_error);
    const std::vector<double> unnormalized = {0.5, 0.6};
    CHECK_THROWS_AS(sim(good, unnormalized), validation_error);
    CHECK_THROWS_AS(sim(unnormalized, good), validation_error);
}

TEST_CASE("linear correlation") {
    const std::vector<double> a = {1, 2, 3, 4};
    const std::vector<double> b = {1, 2, 3, 5};
    CHECK(cc(a, b) == doctest::Approx(pearson_reference(a, b)).epsilon(1e-12));
    CHECK(cc(a, b) == doctest::Approx(0.9827076).epsilon(1e-6));
    CHECK(cc(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> negated(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        negated[i] = 7.0 - a[i];
    CHECK(cc(a, negated) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cc(b, a) == doctest::Approx(cc(a, b)).epsilon(1e-15));

    std::vector<double> affine(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        affine[i] = 2.5 * a[i] + 13.0;
    CHECK(cc(a, affine) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> flat = {3, 3, 3, 3};
    CHECK_THROWS_AS(cc(a, flat), degenerate_error);
    const std::vector<double> short_one = {1, 2};
    CHECK_THROWS_AS(cc(a, short_one), validation_error);
}

TEST_CASE("linear correlation agrees with the reference on random data") {
    rng gen(13);
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = gen.uniform();
        b[i] = 0.3 * a[i] + gen.uniform();
    }
    CHECK(cc(a, b) == doctest::Approx(pearson_reference(a, b)).epsilon(1e-12));
}

TEST_CASE("frame to distribution") {
    const saliency_frame frame = make_frame(2, 2, {1, 1, 0, 2});
    const std::vector<double> dist = to_distribution(frame);
    REQUIRE(dist.size() == 4);
    CHECK(dist[0] == doctest::Approx(0.25));
    CHECK(dist[3] == doctest::Approx(0.5));
    CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    const saliency_frame zero = make_frame(2, 2, {0, 0, 0, 0});
    CHECK_THROWS_AS(to_distribution(zero), degenerate_error);
}

TEST_CASE("fixation map construction") {
    const sensor_geometry geometry{9, 9};

    SUBCASE("zero sigma is an impulse") {
        const std::vector<fixation_sample> one = {{0, 4, 4}};
        const fixation_map map = build_fixation_map(one, geometry, 0.0);
        CHECK(map.values[4 * 9 + 4] == 1.0);
        double total = std::accumulate(map.values.begin(), map.values.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("two fixations at one pixel equal one after normalization") {
        const std::vector<fixation_sample> two = {{0, 4, 4}, {1, 4, 4}};
        const std::vector<fixation_sample> one = {{0, 4, 4}};
        const fixation_map a = build_fixation_map(two, geometry, 1.5);
        const fixation_map b = build_fixation_map(one, geometry, 1.5);
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t i = 0; i < a.values.size(); ++i)
            CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
    }

    SUBCASE("blurred map sums to one and peaks at the fixation") {
        const std::vector<fixation_sample> one = {{0, 3, 5}};
        const fixation_map map = build_fixation_map(one, geometry, 2.0);
        const double total = std::accumulate(map.values.begin(), map.values.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        std::size_t argmax = 0;
        for (std::size_t i = 1; i < map.values.size(); ++i)
            if (map.values[i] > map.values[argmax])
                argmax = i;
        CHECK(argmax == 5 * 9 + 3);
    }

    SUBCASE("kernel is cut off at three sigma") {
        const std::vector<fixation_sample> one = {{0, 4, 4}};
        const fixation_map map = build_fixation_map(one, geometry, 1.0);
        CHECK(map.values[4 * 9 + 7] > 0.0); // distance 3 = 3 sigma, inside
        CHECK(map.values[4 * 9 + 8] == 0.0); // distance 4, cut off
        CHECK(map.values[0 * 9 + 1] == 0.0); // distance 5 on the diagonal
    }

    SUBCASE("no in-bounds fixation is degenerate") {
        const std::vector<fixation_sample> outside = {{0, 100, 100}};
        CHECK_THROWS_AS(build_fixation_map(outside, geometry, 1.0), degenerate_error);
        CHECK_THROWS_AS(build_fixation_map({}, geometry, 1.0), degenerate_error);
    }

    SUBCASE("negative sigma is invalid") {
        const std::vector<fixation_sample> one = {{0, 4, 4}};
        CHECK_THROWS_AS(build_fixation_map(one, geometry, -1.0), validation_error);
    }
}

TEST_CASE("attention score counts in-bounds fixations") {
    const sensor_geometry geometry{304, 240};
    std::vector<fixation_record> records = {
        {"p1", "v1", 0, 100, 10.0, 10.0},
        {"p1", "v1", 100, 200, 303.0, 239.0}, // boundary pixel, inside
        {"p1", "v1", 200, 300, 304.0, 100.0}, // x == width, outside
        {"p1", "v1", 300, 400, -1.0, 50.0},   // negative, outside
    };
    CHECK(attention_score(records, geometry) == doctest::Approx(0.5));
    // no samples -> no defined in-bounds fraction
    CHECK_THROWS_AS(attention_score({}, geometry), degenerate_error);

    records.resize(2);
    CHECK(attention_score(records, geometry) == doctest::Approx(1.0));
}

TEST_CASE("attention filtering drops inattentive participant-video pairs") {
    const sensor_geometry geometry{100, 100};
    std::vector<fixation_record> records;
    // pair (p1, dot_a): 9 of 10 inside -> 0.9, kept at threshold 0.9
    for (int i = 0; i < 9; ++i)
        records.push_back({"p1", "dot_a", static_cast<std::uint64_t>(i * 100),
                           static_cast<std::uint64_t>(i * 100 + 50), 50.0, 50.0});
    records.push_back({"p1", "dot_a", 900, 950, 500.0, 50.0});
    // pair (p2, dot_a): 8 of 10 inside -> 0.8, dropped
    for (int i = 0; i < 8; ++i)
        records.push_back({"p2", "dot_a", static_cast<std::uint64_t>(i * 100),
                           static_cast<std::uint64_t>(i * 100 + 50), 20.0, 20.0});
    for (int i = 0; i < 2; ++i)
        records.push_back({"p2", "dot_a", static_cast<std::uint64_t>(800 + i * 100),
                           static_cast<std::uint64_t>(850 + i * 100), -5.0, 20.0});
    // pair (p1, noise_b): all inside -> 1.0, kept
    for (int i = 0; i < 4; ++i)
        records.push_back({"p1", "noise_b", static_cast<std::uint64_t>(i * 100),
                           static_cast<std::uint64_t>(i * 100 + 50), 10.0, 90.0});

    const filtered_dataset filtered = filter_dataset(records, geometry, 0.9);
    CHECK(filtered.records.size() == 14);
    for (const fixation_record& r : filtered.records)
        CHECK(r.participant_id != std::string("p2"));

    REQUIRE(filtered.by_category.count("dot"));
    REQUIRE(filtered.by_category.count("noise"));
    CHECK(filtered.by_category.at("dot").kept == 1);
    CHECK(filtered.by_category.at("dot").total == 2);
    CHECK(filtered.by_category.at("noise").kept == 1);
    CHECK(filtered.by_category.at("noise").total == 1);
    CHECK(filtered.pairs.kept == 2);
    CHECK(filtered.pairs.total == 3);

    // threshold 0 keeps everything; threshold 1 keeps only perfect attention
    CHECK(filter_dataset(records, geometry, 0.0).records.size() == records.size());
    const filtered_dataset strict = filter_dataset(records, geometry, 1.0);
    CHECK(strict.records.size() == 4);
    for (const fixation_record& r : strict.records)
        CHECK(r.video_id == std::string("noise_b"));
}

TEST_CASE("category is the video id prefix") {
    CHECK(category_of("dot_slow_01") == "dot");
    CHECK(category_of("noise") == "noise");
    CHECK(category_of("_x") == "");
}

TEST_CASE("aggregation skips undefined values") {
    const std::vector<double> clean = {1, 1, 1};
    metric_summary s = aggregate(clean);
    CHECK(s.mean == doctest::Approx(1.0));
    CHECK(s.n_valid == 3);
    CHECK(s.n_excluded == 0);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> mixed = {1, nan, 3};
    s = aggregate(mixed);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.n_valid == 2);
    CHECK(s.n_excluded == 1);

    const std::vector<double> broken = {nan, nan};
    s = aggregate(broken);
    CHECK(s.n_valid == 0);
    CHECK(!s.valid());
}

TEST_CASE("fixations map onto the frames whose timestamps they cover") {
    frame_file file;
    file.geometry = {10, 10};
    file.frame_period_us = 10000;
    for (int k = 1; k <= 5; ++k) {
        saliency_frame f;
        f.t = static_cast<std::uint64_t>(k) * 10000;
        f.width = 10;
        f.height = 10;
        f.values.assign(100, 0.0f);
        file.frames.push_back(std::move(f));
    }

    const std::vector<fixation_record> records = {
        {"p1", "v1", 15000, 30000, 3.0, 4.0},   // covers frames at 20000 and 30000
        {"p1", "v1", 20000, 20000, 5.0, 5.0},   // exactly one frame instant
        {"p1", "v1", 90000, 95000, 1.0, 1.0},   // past the last frame
        {"p1", "v1", 15000, 30000, 200.0, 4.0}, // outside the video area
    };
    const std::vector<fixation_sample> samples = assign_to_frames(records, file);
    REQUIRE(samples.size() == 3);
    CHECK(samples[0] == fixation_sample{1, 3, 4});
    CHECK(samples[1] == fixation_sample{2, 3, 4});
    CHECK(samples[2] == fixation_sample{1, 5, 5});

    const std::vector<fixation_record> backwards = {{"p1", "v1", 30000, 15000, 3.0, 4.0}};
    CHECK_THROWS_AS(assign_to_frames(backwards, file), validation_error);
}

TEST_CASE("video evaluation produces per-frame means") {
    frame_file file;
    file.geometry = {4, 4};
    file.frame_period_us = 10000;
    // one informative frame and one constant frame
    saliency_frame hot;
    hot.t = 10000;
    hot.width = 4;
    hot.height = 4;
    hot.values.assign(16, 0.0f);
    hot.values[1 * 4 + 1] = 1.0f;
    file.frames.push_back(hot);
    saliency_frame flat = hot;
    flat.t = 20000;
    flat.values.assign(16, 0.25f);
    file.frames.push_back(flat);

    const std::vector<fixation_record> positives = {
        {"p1", "v1", 10000, 10000, 1.0, 1.0},
        {"p1", "v1", 20000, 20000, 1.0, 1.0},
    };
    const std::vector<fixation_record> negatives = {
        {"p9", "other", 0, 0, 3.0, 3.0},
        {"p9", "other", 0, 0, 0.0, 3.0},
    };

    evaluation_options opts;
    opts.sigma_px = 0.0;
    const video_evaluation eval = evaluate_video(file, positives, negatives, opts);
    CHECK(eval.n_frames == 2);

    // frame 1: fixation on the unique hot pixel
    // nss = sqrt(15) there; frame 2 is constant -> undefined, excluded
    CHECK(eval.nss.n_valid == 1);
    CHECK(eval.nss.n_excluded == 1);
    CHECK(eval.nss.mean == doctest::Approx(std::sqrt(15.0)));

    // sauc: frame 1 perfect separation -> 1, frame 2 all tied -> 0.5
    CHECK(eval.sauc.n_valid == 2);
    CHECK(eval.sauc.mean == doctest::Approx(0.75));

    // sim: frame 1 identical impulse distributions -> 1; frame 2 uniform vs
    // impulse -> 1/16
    CHECK(eval.sim.n_valid == 2);
    CHECK(eval.sim.mean == doctest::Approx(0.5 * (1.0 + 1.0 / 16.0)));

    // cc: frame 1 exactly 1; frame 2 constant -> undefined, excluded
    CHECK(eval.cc.n_valid == 1);
    CHECK(eval.cc.mean == doctest::Approx(1.0));
}

TEST_CASE("default blur width matches the recording geometry") {
    const double sigma = default_fixation_sigma_px();
    CHECK(sigma > 15.9);
    CHECK(sigma < 16.0);
}
