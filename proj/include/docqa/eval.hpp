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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace docqa {

// Pearson linear correlation coefficient. Throws DegenerateError when either
// input is constant, ParameterError on length mismatch or n < 2.
double pearson_lcc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank-order correlation: Pearson correlation of average ranks.
double spearman_srocc(std::span<const double> x, std::span<const double> y);

struct EvalPair {
    std::string id;
    double predicted = 0.0;
    double ground_truth = 0.0;
};

struct EvalReport {
    std::size_t n = 0;
    double lcc = 0.0;
    double srocc = 0.0;

    std::string to_json() const;
};

// One pooled LCC and SROCC over all pairs.
EvalReport evaluate(std::span<const EvalPair> pairs);

// Element-wise mean across engines; every engine must list the same number
// of documents.
std::vector<double> average_ground_truth(const std::map<std::string, std::vector<double>>& per_engine);

// `id,score` with a header row.
std::map<std::string, double> read_predictions_csv(const std::filesystem::path& path);

// `id,engine,accuracy` with a header row; returns the per-document mean over
// engines. Every engine must cover every document.
std::map<std::string, double> read_ground_truth_csv(const std::filesystem::path& path);

// Pairs every prediction with its ground truth; ids missing from either side
// raise DataError.
std::vector<EvalPair> join_pairs(const std::map<std::string, double>& predictions,
                                 const std::map<std::string, double>& ground_truth);

}  // namespace docqa
