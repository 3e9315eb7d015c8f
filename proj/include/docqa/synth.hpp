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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "docqa/font.hpp"
#include "docqa/geometry.hpp"
#include "docqa/gray_image.hpp"

namespace docqa {

// ---------------------------------------------------------------------------
// Quality label function
// ---------------------------------------------------------------------------

// Knots of the piecewise label function, in blur standard deviations.
inline constexpr std::array<double, 5> kLabelKnots{0.5, 1.5, 2.5, 3.5, 4.5};

// Scaling factors of the piecewise label function. Each factor sets the slope
// of 1/q on one unit interval between knots.
struct LabelFnConfig {
    std::array<double, 4> s{0.115, 0.225, 1.515, 17.145};

    // Every factor finite and strictly positive.
    void validate() const;
    // The recommended ordering s1 < s2 < 1 < s3 < s4. Not all published
    // presets follow it, so it is reported rather than enforced.
    bool follows_recommended_ordering() const;

    // Running sum of the first `i` factors (cumulative offset of 1/q - 1 at knot i).
    double cumulative(int i) const;
    double min_label() const { return 1.0 / (1.0 + cumulative(4)); }

    // "G1" .. "G6"; G2 is the default.
    static LabelFnConfig preset(std::string_view name);
    static const std::array<std::string_view, 6>& preset_names();
};

// Label of a line blurred with standard deviation `sigma` in [0.5, 4.5].
// Throws DomainError outside the interval.
double quality_label(double sigma, const LabelFnConfig& cfg = {});

// Unique sigma with quality_label(sigma) == q, for q in [min_label, 1].
double invert_label(double q, const LabelFnConfig& cfg = {});

// ---------------------------------------------------------------------------
// Text corpus
// ---------------------------------------------------------------------------

struct TextCorpus {
    std::vector<char32_t> chinese;     // one ideograph per entry
    std::vector<std::string> english;  // one word per entry

    static TextCorpus load(const std::filesystem::path& chinese_file,
                           const std::filesystem::path& english_file);
    static std::filesystem::path default_chinese_path();
    static std::filesystem::path default_english_path();
};

// ---------------------------------------------------------------------------
// Line synthesis
// ---------------------------------------------------------------------------

enum class Script { Chinese, English };

std::string_view to_string(Script script);
Script parse_script(std::string_view name);

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct SynthConfig {
    std::vector<std::string> fonts = default_font_ids();
    std::vector<int> backgrounds{205, 213, 221, 229, 237, 246, 255};
    int image_width = 400;
    int image_height = 40;
    RealRange sigma{0.5, 4.5};
    IntRange font_size_cn{28, 35};
    IntRange font_size_en{35, 45};
    RealRange angle_cn{-2.0, 2.0};
    RealRange angle_en{-1.0, 1.0};
    int chars_per_line_cn = 10;
    int words_per_line_en = 5;
    double underfill_probability = 0.15;
    double chinese_fraction = 0.5;
    IntRange ink{0, 60};
    int kernel_size = 11;
    std::filesystem::path chinese_corpus = TextCorpus::default_chinese_path();
    std::filesystem::path english_corpus = TextCorpus::default_english_path();

    void validate() const;
};

// Font sizes are quoted for a 50-pixel reference line; the em size in pixels
// is font_size * line_height / 50.
inline constexpr double kReferenceLineHeight = 50.0;

// Every attribute needed to render one line deterministically.
struct LineSpec {
    Script script = Script::English;
    std::string text;  // UTF-8
    std::string font;
    int font_size = 40;
    int background = 255;
    int ink = 0;
    double angle = 0.0;
    double sigma = 0.5;
    int width = 400;
    int height = 40;
    double x_offset = 4.0;
    double y_jitter = 0.0;
    int kernel_size = 11;
};

struct TextLineSample {
    GrayImage image{1, 1};
    LineSpec spec;
    double label = 1.0;

    double sigma() const { return spec.sigma; }
};

// Immutable set of loaded fonts, shareable across threads.
class FontSet {
public:
    explicit FontSet(const std::vector<std::string>& ids);

    const Font& get(const std::string& id) const;
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
    std::vector<std::unique_ptr<Font>> fonts_;
};

// Rasterises `spec.text` (dark ink on a solid background), rotates, then
// blurs. Throws ParameterError if the font lacks a glyph.
GrayImage render_line(const LineSpec& spec, const FontSet& fonts);

class LineSynthesizer {
public:
    LineSynthesizer(SynthConfig cfg, LabelFnConfig label_cfg);

    const SynthConfig& config() const noexcept { return cfg_; }
    const LabelFnConfig& label_config() const noexcept { return label_cfg_; }
    const FontSet& fonts() const noexcept { return fonts_; }
    const TextCorpus& corpus() const noexcept { return corpus_; }

    // Samples every attribute from `seed` and renders the line. Deterministic.
    TextLineSample render(std::uint64_t seed) const;

    // Attribute sampling only; the caller may adjust the spec before rendering.
    LineSpec sample_spec(std::uint64_t seed) const;

    TextLineSample render(const LineSpec& spec) const;

private:
    SynthConfig cfg_;
    LabelFnConfig label_cfg_;
    TextCorpus corpus_;
    FontSet fonts_;
};

// Samples `n` lines in memory; sample i uses derive_seed(seed, i).
std::vector<TextLineSample> generate_samples(const LineSynthesizer& synth, std::size_t n,
                                             std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------------------
// Dataset manifest
// ---------------------------------------------------------------------------

struct ManifestRecord {
    std::string path;  // relative to the manifest directory
    LineSpec spec;
    double label = 1.0;
};

struct DatasetManifest {
    SynthConfig config;
    LabelFnConfig label_config;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::vector<ManifestRecord> records;
    std::filesystem::path root;  // directory holding the manifest file

    std::filesystem::path image_path(const ManifestRecord& record) const { return root / record.path; }
};

inline constexpr std::string_view kManifestFileName = "manifest.jsonl";

// Writes `n` PGM images plus manifest.jsonl into `out_dir`. On failure every
// file this call created is removed before the error propagates.
DatasetManifest generate_dataset(std::size_t n, const SynthConfig& cfg,
                                 const LabelFnConfig& label_cfg, std::uint64_t seed,
                                 const std::filesystem::path& out_dir, int jobs = 1);

// Serialised manifest text (header line plus one line per record).
std::string manifest_to_jsonl(const DatasetManifest& manifest);

// Reads a manifest and checks that every image exists with the recorded size.
DatasetManifest load_manifest(const std::filesystem::path& manifest_file);

// ---------------------------------------------------------------------------
// Synthetic pages
// ---------------------------------------------------------------------------

struct PageConfig {
    int width = 1000;
    int height = 0;  // 0: fit the stacked lines
    int min_lines = 3;
    int max_lines = 8;
    int line_gap = 20;
    int margin = 30;
    // Line canvas size relative to the synthesiser's image size.
    RealRange line_scale{1.0, 1.0};
    int background = 255;
};

struct ComposedLine {
    BoundingBox canvas;  // where the line canvas was pasted
    BoundingBox extent;  // ink extent inside the page
    double sigma = 0.5;
    double label = 1.0;
};

struct ComposedPage {
    GrayImage image{1, 1};
    std::vector<ComposedLine> lines;
    // Ink-extent-area weighted mean of line labels.
    double ground_truth = 1.0;
};

// Stacks lines top to bottom; every line is blurred with `sigma`.
ComposedPage compose_page(const LineSynthesizer& synth, const PageConfig& cfg, double sigma,
                          std::uint64_t seed);

// Bounding box of pixels differing from `background` by at least `fraction`
// of the largest deviation; nullopt-like {0,0,0,0} when nothing qualifies.
BoundingBox ink_extent(const GrayImage& img, int background, double fraction = 0.33);

}  // namespace docqa
