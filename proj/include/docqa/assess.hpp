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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docqa/detect.hpp"
#include "docqa/predict.hpp"

namespace docqa {

enum class PoolingStrategy { WeightedPool, Median };

std::string_view to_string(PoolingStrategy strategy);
PoolingStrategy parse_strategy(std::string_view name);

struct LineAssessment {
    BoundingBox box;
    QualityScore score;
    double weight = 0.0;  // area ratio
};

enum class AssessmentStatus { Ok, NoText };

struct AssessmentResult {
    std::vector<LineAssessment> lines;
    double overall_wp = 0.0;
    double overall_median = 0.0;
    PoolingStrategy strategy = PoolingStrategy::WeightedPool;
    AssessmentStatus status = AssessmentStatus::NoText;
    std::string detection = "native";

    // Pooled value under `strategy`; only meaningful when status is Ok.
    double overall() const {
        return strategy == PoolingStrategy::Median ? overall_median : overall_wp;
    }

    // {"status","strategy","detection","overall","overall_wp","overall_median",
    //  "lines":[{"x","y","w","h","score","weight"}]}; overall fields are null
    // for no_text.
    std::string to_json() const;
};

// Area ratios R(j) / sum_k R(k).
std::vector<double> area_weights(std::span<const double> areas);

// sum_j w_j q(j) with area-ratio weights.
double weighted_pool(std::span<const double> scores, std::span<const double> areas);

// Median; the mean of the two middle values for even counts.
double median_pool(std::span<const double> scores);

// Detect, score each crop, pool. Crops the predictor rejects as carrying no
// signal are dropped; if nothing remains the status is NoText.
AssessmentResult assess_document(const GrayImage& img, const Detector& detector,
                                 const LinePredictor& predictor, PoolingStrategy strategy,
                                 std::string detection_label = "native");

// Baseline detector, dividing with `grid` when given.
AssessmentResult assess_document(const GrayImage& img, const DetectorParams& params,
                                 const LinePredictor& predictor, PoolingStrategy strategy,
                                 const std::optional<GridSpec>& grid);

}  // namespace docqa
