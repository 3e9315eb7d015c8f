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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace docqa {

// Outline point in em units (1.0 = one em), y pointing up. Consecutive
// off-curve points never occur: implied on-curve midpoints are made explicit.
struct OutlinePoint {
    double x = 0.0;
    double y = 0.0;
    bool on_curve = true;
};

using Contour = std::vector<OutlinePoint>;

struct GlyphOutline {
    std::vector<Contour> contours;
    double advance = 0.0;
};

// A source of glyph outlines.
class Font {
public:
    virtual ~Font() = default;

    virtual const std::string& id() const = 0;
    virtual bool has_glyph(char32_t cp) const = 0;
    // Throws ParameterError if the code point is not covered.
    virtual GlyphOutline glyph(char32_t cp) const = 0;
    virtual double ascent() const = 0;
    virtual double descent() const = 0;
};

// Glyph outlines read from a TrueType (glyf-flavoured) font file.
class TrueTypeFont final : public Font {
public:
    static std::unique_ptr<TrueTypeFont> load(const std::filesystem::path& path);

    const std::string& id() const override { return id_; }
    bool has_glyph(char32_t cp) const override;
    GlyphOutline glyph(char32_t cp) const override;
    double ascent() const override { return ascent_; }
    double descent() const override { return descent_; }

private:
    TrueTypeFont(std::string id, std::vector<std::uint8_t> data);

    std::uint32_t glyph_index(char32_t cp) const;
    void append_glyph(std::uint32_t index, const double transform[6], int depth,
                      std::vector<Contour>& out) const;
    double advance_of(std::uint32_t index) const;

    std::string id_;
    std::vector<std::uint8_t> data_;
    std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> tables_;
    double units_per_em_ = 1000.0;
    double ascent_ = 0.8;
    double descent_ = 0.2;
    int index_to_loc_format_ = 0;
    std::uint32_t num_glyphs_ = 0;
    std::uint32_t num_hmetrics_ = 0;
    std::uint32_t cmap_offset_ = 0;
    int cmap_format_ = 0;
};

// Procedural ideograph-like glyphs for the CJK Unified Ideographs blocks.
// Each code point maps deterministically to a square glyph made of 4-11
// horizontal, vertical, slanted and dot strokes. Stands in for a CJK font
// where none is installed; the predictor only sees stroke statistics.
class StrokeFont final : public Font {
public:
    static constexpr std::string_view kId = "builtin:strokes";

    const std::string& id() const override { return id_; }
    bool has_glyph(char32_t cp) const override;
    GlyphOutline glyph(char32_t cp) const override;
    double ascent() const override { return 0.88; }
    double descent() const override { return 0.12; }

private:
    std::string id_{kId};
};

// "builtin:strokes" or a TrueType file path.
std::unique_ptr<Font> load_font(const std::string& id);

// DejaVu faces found on this system followed by the builtin stroke font.
std::vector<std::string> default_font_ids();

// Area-coverage polygon rasteriser. Coverage accumulates across all filled
// outlines and saturates at 1.
class CoverageCanvas {
public:
    CoverageCanvas(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    // Places the outline with its origin at pixel (origin_x, baseline_y);
    // `scale` is pixels per em.
    void fill(const GlyphOutline& outline, double scale, double origin_x, double baseline_y);

    // Per-pixel coverage in [0, 1], row-major.
    std::vector<float> coverage() const;

private:
    void add_line(double x0, double y0, double x1, double y1);

    int width_;
    int height_;
    std::vector<float> accum_;
};

std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

}  // namespace docqa
