// Copyright 2026 The docqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "docqa/error.hpp"
#include "docqa/font.hpp"
#include "docqa/imgproc.hpp"
#include "docqa/synth.hpp"
#include "test_support.hpp"

namespace docqa {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("docqa_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------- labels

TEST(QualityLabel, DefaultGroupValues) {
    EXPECT_DOUBLE_EQ(quality_label(0.5), 1.0);
    EXPECT_NEAR(quality_label(1.5), 1.0 / 1.115, 1e-15);
    EXPECT_NEAR(quality_label(2.5), 1.0 / 1.34, 1e-15);
    EXPECT_NEAR(quality_label(2.5), 0.7463, 5e-5);
    EXPECT_NEAR(quality_label(3.5), 0.3503, 5e-5);
    EXPECT_EQ(quality_label(4.5), 0.05);
    EXPECT_NEAR(quality_label(3.0), 1.0 / (1.34 + 0.5 * 1.515), 1e-15);
}

TEST(QualityLabel, ContinuousAtKnotsForAllPresets) {
    for (auto name : LabelFnConfig::preset_names()) {
        const auto cfg = LabelFnConfig::preset(name);
        for (std::size_t i = 1; i + 1 < kLabelKnots.size(); ++i) {
            const double k = kLabelKnots[i];
            const double left = quality_label(std::nextafter(k, 0.0), cfg);
            const double right = quality_label(std::nextafter(k, 10.0), cfg);
            EXPECT_NEAR(left, quality_label(k, cfg), 1e-12) << name << " knot " << k;
            EXPECT_NEAR(right, quality_label(k, cfg), 1e-12) << name << " knot " << k;
        }
    }
}

TEST(QualityLabel, StrictlyDecreasing) {
    for (auto name : LabelFnConfig::preset_names()) {
        const auto cfg = LabelFnConfig::preset(name);
        double prev = 2.0;
        for (double s = 0.5; s <= 4.5; s += 0.01) {
            const double q = quality_label(s, cfg);
            EXPECT_LT(q, prev);
            prev = q;
        }
        EXPECT_NEAR(quality_label(4.5, cfg), cfg.min_label(), 1e-15);
    }
}

TEST(QualityLabel, RejectsOutOfDomain) {
    EXPECT_THROW(quality_label(0.49), DomainError);
    EXPECT_THROW(quality_label(4.51), DomainError);
    EXPECT_THROW(quality_label(std::nan("")), DomainError);
}

TEST(QualityLabel, InverseRoundTrip) {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double s = rng.uniform(0.5, 4.5);
        EXPECT_NEAR(invert_label(quality_label(s)), s, 1e-12);
    }
    EXPECT_THROW(invert_label(0.01), DomainError);
    EXPECT_THROW(invert_label(1.01), DomainError);
}

TEST(LabelFnConfig, PresetsMatchPublishedTable) {
    EXPECT_EQ(LabelFnConfig::preset("G1").s, (std::array<double, 4>{0.25, 0.5, 3.25, 15}));
    EXPECT_EQ(LabelFnConfig::preset("G2").s, LabelFnConfig{}.s);
    EXPECT_EQ(LabelFnConfig::preset("G6").s, (std::array<double, 4>{0.25, 1.25, 7.5, 90}));
    EXPECT_THROW(LabelFnConfig::preset("G7"), ParameterError);
    EXPECT_NEAR(LabelFnConfig::preset("G6").min_label(), 1.0 / 100.0, 1e-15);
}

TEST(LabelFnConfig, ValidationAndOrdering) {
    EXPECT_NO_THROW(LabelFnConfig{}.validate());
    EXPECT_TRUE(LabelFnConfig{}.follows_recommended_ordering());
    EXPECT_FALSE(LabelFnConfig::preset("G4").follows_recommended_ordering());
    EXPECT_FALSE(LabelFnConfig::preset("G6").follows_recommended_ordering());
    for (auto name : LabelFnConfig::preset_names()) EXPECT_NO_THROW(LabelFnConfig::preset(name).validate());
    EXPECT_THROW((LabelFnConfig{{0.1, 0.0, 1.5, 2.0}}.validate()), ParameterError);
    EXPECT_THROW((LabelFnConfig{{0.1, -0.2, 1.5, 2.0}}.validate()), ParameterError);
    EXPECT_THROW((LabelFnConfig{{0.1, 0.2, INFINITY, 2.0}}.validate()), ParameterError);
}

// ---------------------------------------------------------------- fonts

TEST(Fonts, Utf8RoundTrip) {
    const std::u32string text = U"aé中\U0001F600";
    EXPECT_EQ(utf8_decode(utf8_encode(text)), text);
    EXPECT_EQ(utf8_encode(U"中"), "\xe4\xb8\xad");
    EXPECT_THROW(utf8_decode("\xe4\xb8"), DataError);
}

TEST(Fonts, TrueTypeGlyphsHaveOutlines) {
    const auto font = load_font(default_font_ids().front());
    ASSERT_TRUE(font->has_glyph(U'A'));
    const auto g = font->glyph(U'A');
    EXPECT_FALSE(g.contours.empty());
    EXPECT_GT(g.advance, 0.3);
    EXPECT_LT(g.advance, 1.0);
    EXPECT_FALSE(font->has_glyph(U'中'));
    EXPECT_THROW(load_font("/nonexistent.ttf"), DataError);
}

TEST(Fonts, StrokeFontCoversIdeographsDeterministically) {
    StrokeFont font;
    EXPECT_TRUE(font.has_glyph(U'中'));
    EXPECT_FALSE(font.has_glyph(U'A'));
    const auto a = font.glyph(U'中');
    const auto b = font.glyph(U'中');
    ASSERT_EQ(a.contours.size(), b.contours.size());
    EXPECT_GE(a.contours.size(), 4u);
    const auto c = font.glyph(U'丁');
    const bool same = c.contours.size() == a.contours.size() &&
                      c.contours.front().front().x == a.contours.front().front().x &&
                      c.contours.front().front().y == a.contours.front().front().y;
    EXPECT_FALSE(same);
}

TEST(Fonts, CoverageOfUnitSquare) {
    // a 4x4 pixel square covering exactly pixels [2,6) x [2,6)
    GlyphOutline square;
    square.contours.push_back({{0, 0, true}, {1, 0, true}, {1, 1, true}, {0, 1, true}});
    CoverageCanvas canvas(8, 8);
    canvas.fill(square, 4.0, 2.0, 6.0);
    const auto cov = canvas.coverage();
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const bool inside = x >= 2 && x < 6 && y >= 2 && y < 6;
            EXPECT_NEAR(cov[static_cast<std::size_t>(y * 8 + x)], inside ? 1.0F : 0.0F, 1e-5) << x << "," << y;
        }
    }
}

// ---------------------------------------------------------------- synthesis

TEST(Synthesis, DeterministicPerSeed) {
    const auto& synth = testing::synthesizer();
    const auto a = synth.render(42);
    const auto b = synth.render(42);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.spec.text, b.spec.text);
    EXPECT_EQ(a.label, b.label);
    EXPECT_NE(synth.render(43).image, a.image);
}

TEST(Synthesis, SamplesRespectConfiguration) {
    const auto& synth = testing::synthesizer();
    const auto& cfg = synth.config();
    std::set<int> backgrounds(cfg.backgrounds.begin(), cfg.backgrounds.end());
    int chinese = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = synth.render(seed);
        EXPECT_EQ(s.image.width(), 400);
        EXPECT_EQ(s.image.height(), 40);
        EXPECT_GE(s.sigma(), 0.5);
        EXPECT_LE(s.sigma(), 4.5);
        EXPECT_EQ(s.label, quality_label(s.sigma()));
        EXPECT_TRUE(backgrounds.contains(s.spec.background));
        EXPECT_GE(s.spec.ink, 0);
        EXPECT_LE(s.spec.ink, 60);
        if (s.spec.script == Script::Chinese) {
            ++chinese;
            EXPECT_GE(s.spec.font_size, 28);
            EXPECT_LE(s.spec.font_size, 35);
            EXPECT_LE(std::abs(s.spec.angle), 2.0);
            EXPECT_LE(utf8_decode(s.spec.text).size(), 11u);
        } else {
            EXPECT_GE(s.spec.font_size, 35);
            EXPECT_LE(s.spec.font_size, 45);
            EXPECT_LE(std::abs(s.spec.angle), 1.0);
        }
        // dark text on a light background
        const auto px = s.image.pixels();
        EXPECT_LT(*std::min_element(px.begin(), px.end()), s.spec.background);
        EXPECT_EQ(*std::max_element(px.begin(), px.end()), s.spec.background);
    }
    EXPECT_GT(chinese, 70);
    EXPECT_LT(chinese, 130);
}

TEST(Synthesis, LabelSplitFollowsUniformSigma) {
    const auto& synth = testing::synthesizer();
    int high = 0, low = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const double q = quality_label(synth.sample_spec(static_cast<std::uint64_t>(i)).sigma);
        high += q > 0.7463;
        low += q < 0.3503;
    }
    EXPECT_NEAR(high / double(n), 0.496, 0.03);
    EXPECT_NEAR(low / double(n), 0.252, 0.03);
}

TEST(Synthesis, ParallelGenerationMatchesSerial) {
    const auto& synth = testing::synthesizer();
    const auto serial = generate_samples(synth, 12, 99, 1);
    const auto parallel = generate_samples(synth, 12, 99, 3);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].image, parallel[i].image);
}

TEST(Synthesis, InvalidConfigurationIsRejected) {
    SynthConfig cfg;
    cfg.sigma = {0.2, 4.5};
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = {};
    cfg.kernel_size = 10;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = {};
    cfg.fonts.clear();
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = {};
    cfg.chinese_fraction = 1.5;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = {};
    cfg.chinese_corpus = "/nonexistent/corpus.txt";
    EXPECT_THROW(LineSynthesizer(cfg, {}), DataError);
}

TEST(Synthesis, UnderfillLeavesBlankSpace) {
    const auto& synth = testing::synthesizer();
    int underfilled = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto spec = synth.sample_spec(seed);
        const auto words = spec.script == Script::Chinese ? utf8_decode(spec.text).size()
                                                          : static_cast<std::size_t>(std::count(spec.text.begin(), spec.text.end(), ' ') + 1);
        underfilled += words <= (spec.script == Script::Chinese ? 5u : 2u);
    }
    EXPECT_GT(underfilled, 10);
    EXPECT_LT(underfilled, 60);
}

// ---------------------------------------------------------------- datasets

TEST(Dataset, ReproducibleManifestAndImages) {
    const auto a = scratch_dir("ds_a");
    const auto b = scratch_dir("ds_b");
    const SynthConfig cfg;
    generate_dataset(8, cfg, {}, 7, a);
    generate_dataset(8, cfg, {}, 7, b, 2);
    EXPECT_EQ(slurp(a / kManifestFileName), slurp(b / kManifestFileName));
    for (int i = 0; i < 8; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "images/%08d.pgm", i);
        EXPECT_EQ(slurp(a / name), slurp(b / name));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Dataset, ManifestLoadsBack) {
    const auto dir = scratch_dir("ds_load");
    const auto written = generate_dataset(5, SynthConfig{}, LabelFnConfig::preset("G3"), 11, dir);
    const auto loaded = load_manifest(dir / kManifestFileName);
    ASSERT_EQ(loaded.records.size(), 5u);
    EXPECT_EQ(loaded.seed, 11u);
    EXPECT_EQ(loaded.label_config.s, LabelFnConfig::preset("G3").s);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(loaded.records[i].label, written.records[i].label);
        EXPECT_EQ(loaded.records[i].spec.text, written.records[i].spec.text);
        EXPECT_EQ(loaded.records[i].spec.sigma, written.records[i].spec.sigma);
        const auto img = read_pgm(loaded.image_path(loaded.records[i]));
        EXPECT_EQ(img, testing::synthesizer().render(written.records[i].spec).image);
    }
    EXPECT_EQ(manifest_to_jsonl(loaded), slurp(dir / kManifestFileName));

    fs::remove(dir / "images/00000002.pgm");
    EXPECT_THROW(load_manifest(dir / kManifestFileName), DataError);
    fs::remove_all(dir);
}

TEST(Dataset, RejectsBadRequests) {
    const auto dir = scratch_dir("ds_bad");
    EXPECT_THROW(generate_dataset(0, SynthConfig{}, {}, 1, dir), ParameterError);
    EXPECT_THROW(load_manifest(dir / kManifestFileName), DataError);
    fs::create_directories(dir);
    std::ofstream(dir / kManifestFileName) << "{not json\n";
    EXPECT_THROW(load_manifest(dir / kManifestFileName), DataError);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- pages

TEST(Pages, GroundTruthIsAreaWeightedLabel) {
    const auto page = compose_page(testing::synthesizer(), PageConfig{}, 2.0, 5);
    ASSERT_GE(page.lines.size(), 3u);
    ASSERT_LE(page.lines.size(), 8u);
    for (const auto& l : page.lines) {
        EXPECT_EQ(l.label, quality_label(2.0));
        EXPECT_TRUE(l.extent.inside(page.image.width(), page.image.height()));
    }
    EXPECT_NEAR(page.ground_truth, quality_label(2.0), 1e-12);
    EXPECT_EQ(compose_page(testing::synthesizer(), PageConfig{}, 2.0, 5).image, page.image);
}

TEST(Pages, InkExtent) {
    GrayImage img(20, 10, 250);
    img.at(3, 2) = 10;
    img.at(12, 7) = 10;
    img.at(15, 5) = 240;  // faint, below the fraction
    EXPECT_EQ(ink_extent(img, 250), (BoundingBox{3, 2, 10, 6}));
    EXPECT_EQ(ink_extent(GrayImage(5, 5, 250), 250).w, 0);
}

}  // namespace
}  // namespace docqa
