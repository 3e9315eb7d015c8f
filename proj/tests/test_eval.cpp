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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "docqa/error.hpp"
#include "docqa/eval.hpp"
#include "docqa/random.hpp"
#include "metric_oracles.hpp"
#include "test_support.hpp"

namespace docqa {
namespace {

namespace fs = std::filesystem;

using testing::oracle_pearson;
using testing::oracle_ranks;
using testing::oracle_spearman;

bool constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

TEST(Correlation, IdenticalAndReversed) {
    const std::vector<double> x{0.1, 0.5, 0.3, 0.9};
    EXPECT_NEAR(pearson_lcc(x, x), 1.0, 1e-15);
    EXPECT_NEAR(spearman_srocc(x, x), 1.0, 1e-15);
    const std::vector<double> rev{0.9, 0.5, 0.7, 0.1};
    EXPECT_NEAR(spearman_srocc(x, rev), -1.0, 1e-15);
}

TEST(Correlation, Errors) {
    const std::vector<double> x{1, 2, 3};
    EXPECT_THROW(pearson_lcc(x, std::vector<double>{1, 1, 1}), DegenerateError);
    EXPECT_THROW(spearman_srocc(std::vector<double>{2, 2, 2}, x), DegenerateError);
    EXPECT_THROW(pearson_lcc(x, std::vector<double>{1, 2}), ParameterError);
    EXPECT_THROW(pearson_lcc(std::vector<double>{1}, std::vector<double>{1}), ParameterError);
}

TEST(Ranks, AverageOverTies) {
    EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
    EXPECT_EQ(average_ranks(std::vector<double>{7, 7, 7}), (std::vector<double>{2, 2, 2}));
}

TEST(Correlation, RandomVectorsMatchOracles) {
    Rng rng(99);
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(2, 50));
        auto x = testing::random_vector(n, rng);
        auto y = testing::random_vector(n, rng);
        for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
        EXPECT_NEAR(pearson_lcc(x, y), oracle_pearson(x, y), 1e-12);
        EXPECT_NEAR(spearman_srocc(x, y), oracle_spearman(x, y), 1e-12);
        EXPECT_EQ(average_ranks(x), oracle_ranks(x));
        // symmetry and bounds
        EXPECT_NEAR(pearson_lcc(x, y), pearson_lcc(y, x), 1e-15);
        EXPECT_LE(std::abs(spearman_srocc(x, y)), 1.0);
    }
}

TEST(Correlation, SpearmanInvariantUnderMonotoneMaps) {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(3, 40));
        auto x = testing::random_vector(n, rng);
        auto y = testing::random_vector(n, rng);
        const double a = rng.uniform(0.5, 3.0);
        auto fx = x;
        for (auto& v : fx) v = std::exp(a * v) + v * v * v;
        EXPECT_NEAR(spearman_srocc(fx, y), spearman_srocc(x, y), 1e-12);
    }
}

TEST(Correlation, ExhaustiveTiesOverThreeValues) {
    for (std::size_t n = 2; n <= 6; ++n) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 3;
        std::vector<std::vector<double>> all;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> v(n);
            std::size_t c = code;
            for (auto& e : v) e = static_cast<double>(c % 3), c /= 3;
            all.push_back(v);
        }
        for (const auto& x : all) {
            for (const auto& y : all) {
                if (constant(x) || constant(y)) {
                    EXPECT_THROW(spearman_srocc(x, y), DegenerateError);
                    continue;
                }
                ASSERT_NEAR(spearman_srocc(x, y), oracle_spearman(x, y), 1e-12);
                ASSERT_NEAR(pearson_lcc(x, y), oracle_pearson(x, y), 1e-12);
            }
        }
    }
}

TEST(Evaluate, ReportsBothMetrics) {
    const std::vector<EvalPair> pairs{{"a", 0.1, 0.2}, {"b", 0.4, 0.3}, {"c", 0.8, 0.9}};
    const auto r = evaluate(pairs);
    EXPECT_EQ(r.n, 3u);
    EXPECT_NEAR(r.srocc, 1.0, 1e-15);
    EXPECT_NEAR(r.lcc, oracle_pearson({0.1, 0.4, 0.8}, {0.2, 0.3, 0.9}), 1e-12);
    EXPECT_EQ(r.to_json().substr(0, 7), R"({"n":3,)");
}

TEST(GroundTruth, AveragesEngines) {
    EXPECT_EQ(average_ground_truth({{"e1", {0.5, 0.25}}}), (std::vector<double>{0.5, 0.25}));
    EXPECT_DOUBLE_EQ(average_ground_truth({{"e1", {0.8}}, {"e2", {0.6}}})[0], 0.7);
    EXPECT_DOUBLE_EQ(average_ground_truth({{"a", {0.9}}, {"b", {0.6}}, {"c", {0.0}}})[0], 0.5);
    EXPECT_THROW(average_ground_truth({{"a", {0.9}}, {"b", {}}}), DataError);
}

class CsvTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / "docqa_eval_csv";
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path write(const std::string& name, const std::string& text) {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }
    fs::path dir_;
};

TEST_F(CsvTest, MixedEngineGroundTruthIsAveraged) {
    const auto gt = read_ground_truth_csv(write("gt.csv", "id,engine,accuracy\nd1,a,0.8\nd1,b,0.6\nd2,a,0.2\nd2,b,0.4\n"));
    EXPECT_DOUBLE_EQ(gt.at("d1"), 0.7);
    EXPECT_DOUBLE_EQ(gt.at("d2"), 0.3);
    const auto pred = read_predictions_csv(write("p.csv", "id,score\nd1,0.9\nd2,0.1\n"));
    const auto pairs = join_pairs(pred, gt);
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(pairs[0].id, "d1");
}

TEST_F(CsvTest, MalformedFilesAreDataErrors) {
    EXPECT_THROW(read_predictions_csv(dir_ / "missing.csv"), DataError);
    EXPECT_THROW(read_predictions_csv(write("a.csv", "id,score\nd1\n")), DataError);
    EXPECT_THROW(read_predictions_csv(write("b.csv", "id,score\nd1,abc\n")), DataError);
    EXPECT_THROW(read_predictions_csv(write("c.csv", "id,score\nd1,0.1\nd1,0.2\n")), DataError);
    EXPECT_THROW(read_ground_truth_csv(write("d.csv", "id,engine,accuracy\nd1,a,0.5\nd2,b,0.5\n")), DataError);
    EXPECT_THROW(read_ground_truth_csv(write("e.csv", "id,engine,accuracy\nd1,a,1.5\n")), DataError);
    EXPECT_THROW(read_predictions_csv(write("f.csv", "")), DataError);
    EXPECT_THROW(join_pairs({{"x", 0.1}}, {{"y", 0.2}}), DataError);
}

}  // namespace
}  // namespace docqa
