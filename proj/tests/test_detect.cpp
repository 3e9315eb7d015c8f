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

#include "docqa/detect.hpp"
#include "docqa/error.hpp"
#include "test_support.hpp"

namespace docqa {
namespace {

ComposedPage five_line_page(double sigma, std::uint64_t seed) {
    PageConfig cfg;
    cfg.width = 500;
    cfg.min_lines = cfg.max_lines = 5;
    return compose_page(testing::synthesizer(), cfg, sigma, seed);
}

TEST(Otsu, SeparatesTwoLevels) {
    GrayImage img(10, 10, 200);
    for (int x = 0; x < 10; ++x) img.at(x, 3) = 20;
    const int t = otsu_threshold(img);
    EXPECT_GE(t, 20);
    EXPECT_LT(t, 200);
    EXPECT_EQ(otsu_threshold(GrayImage(4, 4, 9)), -1);
}

TEST(Binarize, LowContrastIsBlank) {
    GrayImage img(20, 20, 200);
    img.at(4, 4) = 190;
    for (auto v : binarize(img, {})) EXPECT_EQ(v, 0);
    img.at(4, 4) = 20;
    const auto mask = binarize(img, {});
    EXPECT_EQ(mask[4 * 20 + 4], 1);
    EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 1);
}

TEST(Binarize, AdaptiveHandlesShadedBackground) {
    GrayImage img(120, 30);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 120; ++x) img.at(x, y) = static_cast<std::uint8_t>(120 + x);
    }
    for (int x = 10; x < 110; x += 20) {
        for (int y = 10; y < 20; ++y) img.at(x, y) = static_cast<std::uint8_t>(img.at(x, y) - 60);
    }
    DetectorParams p;
    p.binarization = Binarization::AdaptiveMean;
    const auto mask = binarize(img, p);
    for (int x = 0; x < 120; ++x) EXPECT_EQ(mask[15 * 120 + x], (x - 10) % 20 == 0 && x >= 10 && x < 110 ? 1 : 0) << x;
}

TEST(Smear, FillsOnlyShortInteriorGaps) {
    std::vector<std::uint8_t> row{0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
    auto a = row;
    smear_rows(a, 12, 1, 3);
    EXPECT_EQ(a, (std::vector<std::uint8_t>{0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0}));
    auto b = row;
    smear_rows(b, 12, 1, 4);
    EXPECT_EQ(b, (std::vector<std::uint8_t>{0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0}));
}

TEST(Detect, BlankImageHasNoLines) {
    EXPECT_TRUE(detect(GrayImage(400, 600, 255)).empty());
    EXPECT_TRUE(detect_with_dividing(GrayImage(400, 600, 255), {4, 6}).empty());
    EXPECT_TRUE(detect_resized(GrayImage(400, 600, 255), 200, 300).empty());
}

TEST(Detect, FiveLinePageYieldsFiveMatchingBoxes) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const double sigma = 0.5 + 0.25 * static_cast<double>(seed - 1);
        const auto page = five_line_page(sigma, seed);
        ASSERT_EQ(page.lines.size(), 5u);
        const auto found = detect(page.image);
        ASSERT_EQ(found.size(), 5u) << "seed " << seed;
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_GE(iou(found[i].box, page.lines[i].extent), 0.7) << "seed " << seed << " line " << i;
            EXPECT_EQ(found[i].crop, page.image.crop(found[i].box.x, found[i].box.y, found[i].box.w, found[i].box.h));
        }
    }
}

TEST(Detect, SingleLineAtKnownOffset) {
    const auto sample = testing::synthesizer().render(17);
    GrayImage page(600, 300, static_cast<std::uint8_t>(sample.spec.background));
    page.paste(sample.image, 50, 100);
    const auto found = detect(page);
    ASSERT_EQ(found.size(), 1u);
    BoundingBox truth = ink_extent(sample.image, sample.spec.background);
    truth.x += 50;
    truth.y += 100;
    EXPECT_GE(iou(found[0].box, truth), 0.7);
    EXPECT_TRUE(found[0].box.inside(600, 300));
}

TEST(Detect, OrderedTopToBottomLeftToRight) {
    const auto page = five_line_page(1.0, 3);
    const auto found = detect(page.image);
    for (std::size_t i = 1; i < found.size(); ++i) {
        const auto& a = found[i - 1].box;
        const auto& b = found[i].box;
        EXPECT_TRUE(a.y < b.y || (a.y == b.y && a.x <= b.x));
    }
}

TEST(Detect, FiltersSpecklesAndRules) {
    GrayImage img(300, 200, 255);
    img.at(10, 10) = 0;                                       // speck
    for (int x = 20; x < 280; ++x) img.at(x, 100) = 0;        // 1 px rule
    for (int y = 0; y < 200; ++y) img.at(150, y) = 0;         // tall vertical line
    EXPECT_TRUE(detect(img).empty());
}

TEST(Detect, ParameterValidation) {
    DetectorParams p;
    p.min_height_px = 200;
    EXPECT_THROW(detect(GrayImage(10, 10), p), ParameterError);
    p = {};
    p.binarization = Binarization::AdaptiveMean;
    p.adaptive_window = 4;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.min_fill_ratio = 1.5;
    EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Dividing, IdentityGridMatchesDetect) {
    const auto page = five_line_page(1.5, 4);
    const auto plain = detect(page.image);
    const auto divided = detect_with_dividing(page.image, {1, 1});
    ASSERT_EQ(plain.size(), divided.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        EXPECT_EQ(plain[i].box, divided[i].box);
        EXPECT_EQ(plain[i].crop, divided[i].crop);
        EXPECT_FALSE(divided[i].source_segment.has_value());
    }
}

TEST(Dividing, LineAcrossSegmentBordersIsSplitButCovered) {
    auto spec = testing::synthesizer().sample_spec(8);
    spec.script = Script::English;
    spec.text = "boundary crossing text line sample";
    spec.font = default_font_ids().front();
    spec.font_size = 40;
    spec.angle = 0.0;
    spec.sigma = 1.0;
    spec.background = 255;
    const auto line = testing::synthesizer().render(spec);
    GrayImage page(800, 240, 255);
    page.paste(line.image, 100, 40);  // spans columns 0..2 of a 4x6 grid, inside row 1
    BoundingBox truth = ink_extent(line.image, 255);
    truth.x += 100;
    truth.y += 40;

    const auto found = detect_with_dividing(page, {4, 6});
    ASSERT_GE(found.size(), 2u);
    long covered = 0;
    for (int y = truth.y; y < truth.bottom(); ++y) {
        for (int x = truth.x; x < truth.right(); ++x) {
            for (const auto& f : found) {
                if (x >= f.box.x && x < f.box.right() && y >= f.box.y && y < f.box.bottom()) {
                    ++covered;
                    break;
                }
            }
        }
    }
    EXPECT_GE(static_cast<double>(covered), 0.8 * static_cast<double>(truth.area()));
    for (const auto& f : found) {
        ASSERT_TRUE(f.source_segment.has_value());
        EXPECT_EQ(*f.source_segment / 4, 1);
    }
}

TEST(Resized, BoxesMapBackToOriginalCoordinates) {
    const auto page = five_line_page(1.0, 6);
    const auto native = detect(page.image);
    const auto resized = detect_resized(page.image, page.image.width() / 2, page.image.height() / 2);
    ASSERT_EQ(native.size(), resized.size());
    for (std::size_t i = 0; i < native.size(); ++i) {
        EXPECT_GE(iou(native[i].box, resized[i].box), 0.6);
        EXPECT_TRUE(resized[i].box.inside(page.image.width(), page.image.height()));
    }
    EXPECT_THROW(detect_resized(page.image, 0, 10), ParameterError);
}

TEST(Resized, SmallTextDisappears) {
    PageConfig cfg;
    cfg.width = 1200;
    cfg.height = 1800;
    cfg.line_scale = {0.25, 0.28};
    const auto page = compose_page(testing::synthesizer(), cfg, 1.0, 2);
    EXPECT_FALSE(detect(page.image).empty());
    EXPECT_FALSE(detect_with_dividing(page.image, {4, 6}).empty());
    EXPECT_TRUE(detect_resized(page.image, 600, 900).empty());
}

TEST(DetectionMode, DescribesPath) {
    EXPECT_EQ(DetectionMode::native().describe(), "native");
    EXPECT_EQ(DetectionMode::divided({4, 6}).describe(), "divided 4x6");
    EXPECT_EQ(DetectionMode::resized(600, 900).describe(), "resized 600x900");
    const auto page = five_line_page(1.0, 7);
    EXPECT_EQ(make_baseline_detector({}, DetectionMode::native())(page.image).size(), detect(page.image).size());
}

}  // namespace
}  // namespace docqa
