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

#include <cmath>
#include <string>

#include "docqa/error.hpp"
#include "docqa/synth.hpp"

namespace docqa {

namespace {

// Table of the six published scaling-factor groups.
constexpr std::array<std::array<double, 4>, 6> kPresets{{
    {0.25, 0.5, 3.25, 15.0},
    {0.115, 0.225, 1.515, 17.145},
    {0.175, 0.365, 1.8, 16.65},
    {0.325, 0.215, 2.46, 16.0},
    {0.325, 0.675, 1.335, 16.665},
    {0.25, 1.25, 7.5, 90.0},
}};

constexpr std::array<std::string_view, 6> kPresetNames{"G1", "G2", "G3", "G4", "G5", "G6"};

}  // namespace

void LabelFnConfig::validate() const {
    for (double v : s) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw ParameterError("label scaling factors must be finite and positive");
        }
    }
}

bool LabelFnConfig::follows_recommended_ordering() const {
    return s[0] < s[1] && s[1] < 1.0 && 1.0 < s[2] && s[2] < s[3];
}

double LabelFnConfig::cumulative(int i) const {
    double p = 0.0;
    for (int k = 0; k < i; ++k) p += s[static_cast<std::size_t>(k)];
    return p;
}

LabelFnConfig LabelFnConfig::preset(std::string_view name) {
    for (std::size_t i = 0; i < kPresetNames.size(); ++i) {
        if (kPresetNames[i] == name) return LabelFnConfig{kPresets[i]};
    }
    throw ParameterError("unknown scaling group '" + std::string(name) + "' (expected G1..G6)");
}

const std::array<std::string_view, 6>& LabelFnConfig::preset_names() { return kPresetNames; }

double quality_label(double sigma, const LabelFnConfig& cfg) {
    if (!(sigma >= kLabelKnots.front() && sigma <= kLabelKnots.back())) {
        throw DomainError("sigma " + std::to_string(sigma) + " outside [0.5, 4.5]");
    }
    // piece i covers [knot_i, knot_{i+1}); the last piece is closed
    int piece = static_cast<int>(std::floor(sigma - kLabelKnots.front()));
    if (piece > 3) piece = 3;
    const double offset = cfg.cumulative(piece);
    return 1.0 / (1.0 + offset + (sigma - kLabelKnots[static_cast<std::size_t>(piece)]) *
                                     cfg.s[static_cast<std::size_t>(piece)]);
}

double invert_label(double q, const LabelFnConfig& cfg) {
    if (!(q >= cfg.min_label() && q <= 1.0)) {
        throw DomainError("quality " + std::to_string(q) + " outside label range");
    }
    const double excess = 1.0 / q - 1.0;
    int piece = 0;
    while (piece < 3 && excess >= cfg.cumulative(piece + 1)) ++piece;
    const double sigma = kLabelKnots[static_cast<std::size_t>(piece)] +
                         (excess - cfg.cumulative(piece)) / cfg.s[static_cast<std::size_t>(piece)];
    return std::min(sigma, kLabelKnots.back());
}

}  // namespace docqa
