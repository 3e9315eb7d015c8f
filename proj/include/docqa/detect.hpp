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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "docqa/geometry.hpp"
#include "docqa/gray_image.hpp"
#include "docqa/imgproc.hpp"

namespace docqa {

struct DetectedLine {
    BoundingBox box;
    GrayImage crop{1, 1};
    std::optional<int> source_segment;  // row-major segment index when dividing
};

enum class Binarization { OtsuGlobal, AdaptiveMean };

// Parameters of the classical baseline detector.
struct DetectorParams {
    Binarization binarization = Binarization::OtsuGlobal;
    int adaptive_window = 31;  // odd
    int adaptive_offset = 10;  // ink must be this much darker than the local mean
    int smear_gap_px = 12;
    int min_height_px = 8;
    int max_height_px = 120;
    int min_width_px = 16;
    double min_fill_ratio = 0.05;
    // Below this intensity spread an image is treated as blank.
    int min_contrast = 16;

    void validate() const;
};

// Any text-line detector: image in, boxes with crops out. External detectors
// plug in through this signature.
using Detector = std::function<std::vector<DetectedLine>(const GrayImage&)>;

// Global Otsu threshold; pixels <= threshold are ink. Returns -1 when the
// histogram has a single occupied level.
int otsu_threshold(const GrayImage& img);

// Ink mask (1 = ink) under the configured binarisation.
std::vector<std::uint8_t> binarize(const GrayImage& img, const DetectorParams& params);

// Fills background runs of at most `max_gap` pixels lying between two ink
// pixels on the same row.
void smear_rows(std::vector<std::uint8_t>& mask, int width, int height, int max_gap);

// Binarise, smear horizontally, label 8-connected components, group
// components sharing a text row, filter by size and fill ratio, then sort
// top-to-bottom and left-to-right.
std::vector<DetectedLine> detect(const GrayImage& img, const DetectorParams& params = {});

// Runs `detect` on every grid segment and translates boxes back into image
// coordinates. Lines cut by segment borders stay cut.
std::vector<DetectedLine> detect_with_dividing(const GrayImage& img, const GridSpec& grid,
                                               const DetectorParams& params = {});

// Resizes the whole image to the target first, then scales boxes back.
std::vector<DetectedLine> detect_resized(const GrayImage& img, int target_width,
                                         int target_height, const DetectorParams& params = {});

struct DetectionMode {
    enum class Kind { Native, Divided, Resized };
    Kind kind = Kind::Native;
    GridSpec grid;
    int target_width = 600;
    int target_height = 900;

    static DetectionMode native() { return {}; }
    static DetectionMode divided(GridSpec g) { return {Kind::Divided, g, 600, 900}; }
    static DetectionMode resized(int w, int h) { return {Kind::Resized, {}, w, h}; }

    // "native", "divided 4x6" or "resized 600x900".
    std::string describe() const;
};

Detector make_baseline_detector(const DetectorParams& params, const DetectionMode& mode = {});

}  // namespace docqa
