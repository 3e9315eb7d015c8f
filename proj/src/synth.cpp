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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "docqa/error.hpp"
#include "docqa/imgproc.hpp"
#include "docqa/random.hpp"
#include "docqa/synth.hpp"
#include "docqa/parallel.hpp"

namespace docqa {

namespace {

constexpr int kMaxTextAttempts = 16;

void check_range(const RealRange& r, const char* name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ParameterError(std::string("invalid range for ") + name);
    }
}

void check_range(const IntRange& r, const char* name) {
    if (r.lo > r.hi) throw ParameterError(std::string("invalid range for ") + name);
}

bool font_covers(const Font& font, const std::u32string& text) {
    return std::all_of(text.begin(), text.end(), [&](char32_t cp) { return font.has_glyph(cp); });
}

TextCorpus validated_corpus(const SynthConfig& cfg, const LabelFnConfig& label_cfg) {
    cfg.validate();
    label_cfg.validate();
    return TextCorpus::load(cfg.chinese_corpus, cfg.english_corpus);
}

}  // namespace

std::string_view to_string(Script script) {
    return script == Script::Chinese ? "chinese" : "english";
}

Script parse_script(std::string_view name) {
    if (name == "chinese") return Script::Chinese;
    if (name == "english") return Script::English;
    throw DataError("unknown script '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
    if (fonts.empty()) throw ParameterError("at least one font is required");
    if (backgrounds.empty()) throw ParameterError("at least one background intensity is required");
    for (int b : backgrounds) {
        if (b < 0 || b > 255) throw ParameterError("background intensities must lie in [0, 255]");
    }
    if (image_width < 1 || image_height < 1) throw ParameterError("image size must be positive");
    check_range(sigma, "sigma");
    if (sigma.lo < kLabelKnots.front() || sigma.hi > kLabelKnots.back()) {
        throw ParameterError("sigma range must lie within [0.5, 4.5]");
    }
    check_range(font_size_cn, "Chinese font size");
    check_range(font_size_en, "English font size");
    if (font_size_cn.lo < 1 || font_size_en.lo < 1) throw ParameterError("font sizes must be positive");
    check_range(angle_cn, "Chinese rotation angle");
    check_range(angle_en, "English rotation angle");
    for (const auto* r : {&angle_cn, &angle_en}) {
        if (std::abs(r->lo) > 45.0 || std::abs(r->hi) > 45.0) {
            throw ParameterError("rotation angles must lie within [-45, 45] degrees");
        }
    }
    if (chars_per_line_cn < 1 || words_per_line_en < 1) {
        throw ParameterError("line length targets must be positive");
    }
    if (!(underfill_probability >= 0.0 && underfill_probability <= 1.0)) {
        throw ParameterError("underfill probability must lie in [0, 1]");
    }
    if (!(chinese_fraction >= 0.0 && chinese_fraction <= 1.0)) {
        throw ParameterError("Chinese fraction must lie in [0, 1]");
    }
    check_range(ink, "ink intensity");
    if (ink.lo < 0 || ink.hi > 255) throw ParameterError("ink intensity must lie in [0, 255]");
    BlurSpec{1.0, kernel_size}.validate();
}

FontSet::FontSet(const std::vector<std::string>& ids) : ids_(ids) {
    for (const auto& id : ids_) fonts_.push_back(load_font(id));
}

const Font& FontSet::get(const std::string& id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] == id) return *fonts_[i];
    }
    throw ParameterError("font '" + id + "' is not loaded");
}

GrayImage render_line(const LineSpec& spec, const FontSet& fonts) {
    if (spec.width < 1 || spec.height < 1) throw ParameterError("line canvas must be positive");
    if (spec.font_size < 1) throw ParameterError("font size must be positive");
    if (spec.background < 0 || spec.background > 255 || spec.ink < 0 || spec.ink > 255) {
        throw ParameterError("intensities must lie in [0, 255]");
    }
    const Font& font = fonts.get(spec.font);
    const std::u32string text = utf8_decode(spec.text);

    struct Placed {
        GlyphOutline outline;
        double x;
    };
    const double scale = spec.font_size * spec.height / kReferenceLineHeight;
    std::vector<Placed> placed;
    double pen = spec.x_offset;
    double ymin = std::numeric_limits<double>::max();
    double ymax = std::numeric_limits<double>::lowest();
    for (char32_t cp : text) {
        if (!font.has_glyph(cp)) {
            throw ParameterError("font " + font.id() + " cannot render U+" +
                                 std::to_string(static_cast<unsigned>(cp)));
        }
        GlyphOutline g = font.glyph(cp);
        for (const auto& contour : g.contours) {
            for (const auto& p : contour) {
                ymin = std::min(ymin, p.y);
                ymax = std::max(ymax, p.y);
            }
        }
        const double advance = g.advance;
        placed.push_back({std::move(g), pen});
        pen += advance * scale;
        if (pen > spec.width + scale) break;  // the rest is clipped anyway
    }

    GrayImage img(spec.width, spec.height, static_cast<std::uint8_t>(spec.background));
    if (ymin <= ymax) {
        const double baseline = 0.5 * spec.height + 0.5 * (ymin + ymax) * scale + spec.y_jitter;
        CoverageCanvas canvas(spec.width, spec.height);
        for (const auto& p : placed) canvas.fill(p.outline, scale, p.x, baseline);
        const auto cov = canvas.coverage();
        auto pixels = img.pixels();
        for (std::size_t i = 0; i < cov.size(); ++i) {
            const double v = spec.background + (spec.ink - spec.background) * static_cast<double>(cov[i]);
            pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    if (spec.angle != 0.0) img = rotate(img, spec.angle, static_cast<std::uint8_t>(spec.background));
    return gaussian_blur(img, BlurSpec{spec.sigma, spec.kernel_size});
}

LineSynthesizer::LineSynthesizer(SynthConfig cfg, LabelFnConfig label_cfg)
    : cfg_(std::move(cfg)),
      label_cfg_(label_cfg),
      corpus_(validated_corpus(cfg_, label_cfg_)),
      fonts_(cfg_.fonts) {}

LineSpec LineSynthesizer::sample_spec(std::uint64_t seed) const {
    Rng rng(seed);
    LineSpec spec;
    spec.width = cfg_.image_width;
    spec.height = cfg_.image_height;
    spec.kernel_size = cfg_.kernel_size;
    spec.script = rng.bernoulli(cfg_.chinese_fraction) ? Script::Chinese : Script::English;
    const bool chinese = spec.script == Script::Chinese;

    bool found = false;
    for (int attempt = 0; attempt < kMaxTextAttempts && !found; ++attempt) {
        int count = chinese ? cfg_.chars_per_line_cn : cfg_.words_per_line_en;
        count = std::max(1, count + static_cast<int>(rng.uniform_int(-1, 1)));
        if (rng.bernoulli(cfg_.underfill_probability)) {
            count = static_cast<int>(rng.uniform_int(1, std::max(1, count / 2)));
        }
        std::u32string text;
        for (int i = 0; i < count; ++i) {
            if (chinese) {
                text.push_back(corpus_.chinese[rng.index(corpus_.chinese.size())]);
            } else {
                if (i > 0) text.push_back(U' ');
                text += utf8_decode(corpus_.english[rng.index(corpus_.english.size())]);
            }
        }
        std::vector<const std::string*> usable;
        for (const auto& id : fonts_.ids()) {
            if (font_covers(fonts_.get(id), text)) usable.push_back(&id);
        }
        if (usable.empty()) continue;
        spec.text = utf8_encode(text);
        spec.font = *usable[rng.index(usable.size())];
        found = true;
    }
    if (!found) {
        throw DataError(std::string("no configured font can render sampled ") +
                        std::string(to_string(spec.script)) + " text");
    }

    const IntRange& sizes = chinese ? cfg_.font_size_cn : cfg_.font_size_en;
    spec.font_size = static_cast<int>(rng.uniform_int(sizes.lo, sizes.hi));
    spec.background = cfg_.backgrounds[rng.index(cfg_.backgrounds.size())];
    spec.ink = static_cast<int>(rng.uniform_int(cfg_.ink.lo, cfg_.ink.hi));
    const double unit = spec.height / 40.0;
    spec.x_offset = rng.uniform(2.0, 10.0) * unit;
    spec.y_jitter = rng.uniform(-1.5, 1.5) * unit;
    const RealRange& angles = chinese ? cfg_.angle_cn : cfg_.angle_en;
    spec.angle = rng.uniform(angles.lo, angles.hi);
    spec.sigma = rng.uniform(cfg_.sigma.lo, cfg_.sigma.hi);
    return spec;
}

TextLineSample LineSynthesizer::render(const LineSpec& spec) const {
    TextLineSample sample;
    sample.image = render_line(spec, fonts_);
    sample.spec = spec;
    sample.label = quality_label(spec.sigma, label_cfg_);
    return sample;
}

TextLineSample LineSynthesizer::render(std::uint64_t seed) const {
    return render(sample_spec(seed));
}

std::vector<TextLineSample> generate_samples(const LineSynthesizer& synth, std::size_t n,
                                             std::uint64_t seed, int jobs) {
    std::vector<TextLineSample> samples(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        samples[i] = synth.render(derive_seed(seed, i));
    });
    return samples;
}

}  // namespace docqa
