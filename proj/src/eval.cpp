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

#include "docqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "docqa/error.hpp"

namespace docqa {

double pearson_lcc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterError("correlation inputs differ in length");
    if (x.size() < 2) throw ParameterError("correlation needs at least two samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DegenerateError("correlation undefined for constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman_srocc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterError("correlation inputs differ in length");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson_lcc(rx, ry);
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j{{"n", n}, {"lcc", lcc}, {"srocc", srocc}};
    return j.dump();
}

EvalReport evaluate(std::span<const EvalPair> pairs) {
    std::vector<double> p, g;
    p.reserve(pairs.size());
    g.reserve(pairs.size());
    for (const auto& e : pairs) {
        p.push_back(e.predicted);
        g.push_back(e.ground_truth);
    }
    return {pairs.size(), pearson_lcc(p, g), spearman_srocc(p, g)};
}

std::vector<double> average_ground_truth(const std::map<std::string, std::vector<double>>& per_engine) {
    if (per_engine.empty()) throw DataError("no OCR engines given");
    const std::size_t n = per_engine.begin()->second.size();
    std::vector<double> mean(n, 0.0);
    for (const auto& [engine, acc] : per_engine) {
        if (acc.size() != n) throw DataError("engine '" + engine + "' covers a different number of documents");
        for (std::size_t i = 0; i < n; ++i) mean[i] += acc[i];
    }
    for (double& m : mean) m /= static_cast<double>(per_engine.size());
    return mean;
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (fields.size() != columns) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(columns) + " columns");
        }
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(std::move(fields));
    }
    if (header) throw DataError(path.string() + " is empty");
    return rows;
}

double parse_number(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(path.string() + ": not a number: '" + s + "'");
    }
}

}  // namespace

std::map<std::string, double> read_predictions_csv(const std::filesystem::path& path) {
    std::map<std::string, double> out;
    for (const auto& r : read_csv(path, 2)) {
        if (!out.emplace(r[0], parse_number(r[1], path)).second) {
            throw DataError(path.string() + ": duplicate id '" + r[0] + "'");
        }
    }
    return out;
}

std::map<std::string, double> read_ground_truth_csv(const std::filesystem::path& path) {
    std::map<std::string, std::map<std::string, double>> by_engine;
    std::set<std::string> ids;
    for (const auto& r : read_csv(path, 3)) {
        const double acc = parse_number(r[2], path);
        if (acc < 0.0 || acc > 1.0) throw DataError(path.string() + ": accuracy outside [0, 1]");
        if (!by_engine[r[1]].emplace(r[0], acc).second) {
            throw DataError(path.string() + ": duplicate row for '" + r[0] + "', engine '" + r[1] + "'");
        }
        ids.insert(r[0]);
    }
    std::map<std::string, std::vector<double>> per_engine;
    for (const auto& [engine, rows] : by_engine) {
        auto& v = per_engine[engine];
        for (const auto& id : ids) {
            const auto it = rows.find(id);
            if (it == rows.end()) throw DataError("engine '" + engine + "' has no accuracy for '" + id + "'");
            v.push_back(it->second);
        }
    }
    const auto mean = average_ground_truth(per_engine);
    std::map<std::string, double> out;
    std::size_t i = 0;
    for (const auto& id : ids) out[id] = mean[i++];
    return out;
}

std::vector<EvalPair> join_pairs(const std::map<std::string, double>& predictions,
                                 const std::map<std::string, double>& ground_truth) {
    std::vector<EvalPair> pairs;
    for (const auto& [id, p] : predictions) {
        const auto it = ground_truth.find(id);
        if (it == ground_truth.end()) throw DataError("no ground truth for '" + id + "'");
        pairs.push_back({id, p, it->second});
    }
    for (const auto& [id, g] : ground_truth) {
        if (!predictions.contains(id)) throw DataError("no prediction for '" + id + "'");
    }
    return pairs;
}

}  // namespace docqa
