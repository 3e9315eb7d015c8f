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

#include "docqa/assess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "docqa/error.hpp"

namespace docqa {

std::string_view to_string(PoolingStrategy strategy) {
    return strategy == PoolingStrategy::Median ? "median" : "wp";
}

PoolingStrategy parse_strategy(std::string_view name) {
    if (name == "wp" || name == "weighted") return PoolingStrategy::WeightedPool;
    if (name == "median") return PoolingStrategy::Median;
    throw ParameterError("unknown pooling strategy '" + std::string(name) + "'");
}

std::vector<double> area_weights(std::span<const double> areas) {
    if (areas.empty()) throw NoTextError("no lines to pool");
    double total = 0.0;
    for (double a : areas) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw ParameterError("line areas must be finite and non-negative");
        total += a;
    }
    if (total <= 0.0) throw ParameterError("total line area is zero");
    std::vector<double> w(areas.size());
    for (std::size_t i = 0; i < areas.size(); ++i) w[i] = areas[i] / total;
    return w;
}

double weighted_pool(std::span<const double> scores, std::span<const double> areas) {
    if (scores.size() != areas.size()) throw ParameterError("scores and areas differ in length");
    const auto w = area_weights(areas);
    double acc = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) acc += w[i] * scores[i];
    return acc;
}

double median_pool(std::span<const double> scores) {
    if (scores.empty()) throw NoTextError("no lines to pool");
    std::vector<double> v(scores.begin(), scores.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

AssessmentResult assess_document(const GrayImage& img, const Detector& detector,
                                 const LinePredictor& predictor, PoolingStrategy strategy,
                                 std::string detection_label) {
    AssessmentResult result;
    result.strategy = strategy;
    result.detection = std::move(detection_label);

    std::vector<double> scores, areas;
    for (const auto& line : detector(img)) {
        QualityScore s;
        try {
            s = predictor.score(line.crop);
        } catch (const NoSignalError&) {
            continue;
        }
        result.lines.push_back({line.box, s, 0.0});
        scores.push_back(s.value);
        areas.push_back(static_cast<double>(line.box.area()));
    }
    if (result.lines.empty()) {
        result.status = AssessmentStatus::NoText;
        return result;
    }
    const auto w = area_weights(areas);
    for (std::size_t i = 0; i < w.size(); ++i) result.lines[i].weight = w[i];
    result.overall_wp = weighted_pool(scores, areas);
    result.overall_median = median_pool(scores);
    result.status = AssessmentStatus::Ok;
    return result;
}

AssessmentResult assess_document(const GrayImage& img, const DetectorParams& params,
                                 const LinePredictor& predictor, PoolingStrategy strategy,
                                 const std::optional<GridSpec>& grid) {
    const DetectionMode mode = grid ? DetectionMode::divided(*grid) : DetectionMode::native();
    return assess_document(img, make_baseline_detector(params, mode), predictor, strategy,
                           mode.describe());
}

std::string AssessmentResult::to_json() const {
    nlohmann::ordered_json j;
    const bool ok = status == AssessmentStatus::Ok;
    j["status"] = ok ? "ok" : "no_text";
    j["strategy"] = std::string(to_string(strategy));
    j["detection"] = detection;
    if (ok) {
        j["overall"] = overall();
        j["overall_wp"] = overall_wp;
        j["overall_median"] = overall_median;
    } else {
        j["overall"] = nullptr;
        j["overall_wp"] = nullptr;
        j["overall_median"] = nullptr;
    }
    auto arr = nlohmann::ordered_json::array();
    for (const auto& l : lines) {
        arr.push_back({{"x", l.box.x}, {"y", l.box.y}, {"w", l.box.w}, {"h", l.box.h},
                       {"score", l.score.value}, {"raw", l.score.raw}, {"weight", l.weight}});
    }
    j["lines"] = std::move(arr);
    return j.dump();
}

}  // namespace docqa
