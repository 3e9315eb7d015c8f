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

#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "docqa/error.hpp"
#include "docqa/random.hpp"
#include "docqa/synth.hpp"
#include "docqa/parallel.hpp"

namespace docqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;

json synth_to_json(const SynthConfig& c) {
    return json{
        {"fonts", c.fonts},
        {"backgrounds", c.backgrounds},
        {"image_size", {c.image_width, c.image_height}},
        {"sigma_range", {c.sigma.lo, c.sigma.hi}},
        {"font_size_cn", {c.font_size_cn.lo, c.font_size_cn.hi}},
        {"font_size_en", {c.font_size_en.lo, c.font_size_en.hi}},
        {"angle_cn", {c.angle_cn.lo, c.angle_cn.hi}},
        {"angle_en", {c.angle_en.lo, c.angle_en.hi}},
        {"chars_per_line_cn", c.chars_per_line_cn},
        {"words_per_line_en", c.words_per_line_en},
        {"underfill_probability", c.underfill_probability},
        {"chinese_fraction", c.chinese_fraction},
        {"ink", {c.ink.lo, c.ink.hi}},
        {"kernel_size", c.kernel_size},
        {"chinese_corpus", c.chinese_corpus.string()},
        {"english_corpus", c.english_corpus.string()},
    };
}

SynthConfig synth_from_json(const json& j) {
    SynthConfig c;
    c.fonts = j.at("fonts").get<std::vector<std::string>>();
    c.backgrounds = j.at("backgrounds").get<std::vector<int>>();
    c.image_width = j.at("image_size").at(0).get<int>();
    c.image_height = j.at("image_size").at(1).get<int>();
    c.sigma = {j.at("sigma_range").at(0).get<double>(), j.at("sigma_range").at(1).get<double>()};
    c.font_size_cn = {j.at("font_size_cn").at(0).get<int>(), j.at("font_size_cn").at(1).get<int>()};
    c.font_size_en = {j.at("font_size_en").at(0).get<int>(), j.at("font_size_en").at(1).get<int>()};
    c.angle_cn = {j.at("angle_cn").at(0).get<double>(), j.at("angle_cn").at(1).get<double>()};
    c.angle_en = {j.at("angle_en").at(0).get<double>(), j.at("angle_en").at(1).get<double>()};
    c.chars_per_line_cn = j.at("chars_per_line_cn").get<int>();
    c.words_per_line_en = j.at("words_per_line_en").get<int>();
    c.underfill_probability = j.at("underfill_probability").get<double>();
    c.chinese_fraction = j.at("chinese_fraction").get<double>();
    c.ink = {j.at("ink").at(0).get<int>(), j.at("ink").at(1).get<int>()};
    c.kernel_size = j.at("kernel_size").get<int>();
    c.chinese_corpus = j.at("chinese_corpus").get<std::string>();
    c.english_corpus = j.at("english_corpus").get<std::string>();
    return c;
}

json record_to_json(const ManifestRecord& r) {
    const LineSpec& s = r.spec;
    return json{
        {"path", r.path},
        {"sigma", s.sigma},
        {"label", r.label},
        {"text", s.text},
        {"font", s.font},
        {"font_size", s.font_size},
        {"background", s.background},
        {"ink", s.ink},
        {"angle", s.angle},
        {"script", std::string(to_string(s.script))},
        {"width", s.width},
        {"height", s.height},
        {"x_offset", s.x_offset},
        {"y_jitter", s.y_jitter},
        {"kernel_size", s.kernel_size},
    };
}

ManifestRecord record_from_json(const json& j) {
    ManifestRecord r;
    r.path = j.at("path").get<std::string>();
    r.label = j.at("label").get<double>();
    LineSpec& s = r.spec;
    s.sigma = j.at("sigma").get<double>();
    s.text = j.at("text").get<std::string>();
    s.font = j.at("font").get<std::string>();
    s.font_size = j.at("font_size").get<int>();
    s.background = j.at("background").get<int>();
    s.ink = j.value("ink", 0);
    s.angle = j.at("angle").get<double>();
    s.script = parse_script(j.at("script").get<std::string>());
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.x_offset = j.value("x_offset", 0.0);
    s.y_jitter = j.value("y_jitter", 0.0);
    s.kernel_size = j.value("kernel_size", 11);
    return r;
}

std::string image_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "images/%08zu.pgm", index);
    return buf;
}

// Removes everything a failed generation run created.
class OutputGuard {
public:
    explicit OutputGuard(fs::path out_dir) : out_dir_(std::move(out_dir)) {}
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;

    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) fs::remove(*it, ec);
    }

    void make_dir(const fs::path& dir) {
        if (fs::exists(dir)) return;
        if (dir.has_parent_path() && dir.parent_path() != dir) make_dir(dir.parent_path());
        std::error_code ec;
        if (!fs::create_directory(dir, ec) && !fs::is_directory(dir)) {
            throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
        }
        dirs_.push_back(dir);
    }

    void track(const fs::path& file) {
        std::lock_guard lock(mutex_);
        files_.push_back(file);
    }

    void commit() { committed_ = true; }

private:
    fs::path out_dir_;
    std::vector<fs::path> files_;
    std::vector<fs::path> dirs_;
    std::mutex mutex_;
    bool committed_ = false;
};

void write_file_atomically(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot move " + tmp.string() + " into place");
    }
}

}  // namespace

std::string manifest_to_jsonl(const DatasetManifest& manifest) {
    std::string out;
    const json header{{"kind", "header"},
                      {"format", kManifestFormat},
                      {"seed", manifest.seed},
                      {"count", manifest.count},
                      {"synth", synth_to_json(manifest.config)},
                      {"label_fn", {{"s", manifest.label_config.s}}}};
    out += header.dump();
    out += '\n';
    for (const auto& r : manifest.records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

DatasetManifest generate_dataset(std::size_t n, const SynthConfig& cfg,
                                 const LabelFnConfig& label_cfg, std::uint64_t seed,
                                 const fs::path& out_dir, int jobs) {
    if (n < 1) throw ParameterError("dataset size must be at least 1");
    const LineSynthesizer synth(cfg, label_cfg);

    DatasetManifest manifest;
    manifest.config = cfg;
    manifest.label_config = label_cfg;
    manifest.seed = seed;
    manifest.count = n;
    manifest.root = out_dir;
    manifest.records.resize(n);

    OutputGuard guard(out_dir);
    guard.make_dir(out_dir / "images");
    parallel_for(n, jobs, [&](std::size_t i) {
        const TextLineSample sample = synth.render(derive_seed(seed, i));
        ManifestRecord& record = manifest.records[i];
        record.path = image_name(i);
        record.spec = sample.spec;
        record.label = sample.label;
        const auto path = out_dir / record.path;
        guard.track(path);
        const auto bytes = encode_pgm(sample.image);
        write_file_atomically(path, std::string(bytes.begin(), bytes.end()));
    });
    const auto manifest_path = out_dir / kManifestFileName;
    guard.track(manifest_path);
    write_file_atomically(manifest_path, manifest_to_jsonl(manifest));
    guard.commit();
    return manifest;
}

DatasetManifest load_manifest(const fs::path& manifest_file) {
    std::ifstream in(manifest_file);
    if (!in) throw DataError("cannot open manifest " + manifest_file.string());
    DatasetManifest manifest;
    manifest.root = manifest_file.parent_path();
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json j = json::parse(line);
            if (!have_header) {
                if (j.value("kind", "") != "header") throw DataError("missing manifest header");
                manifest.seed = j.at("seed").get<std::uint64_t>();
                manifest.count = j.at("count").get<std::size_t>();
                manifest.config = synth_from_json(j.at("synth"));
                const auto s = j.at("label_fn").at("s").get<std::vector<double>>();
                if (s.size() != 4) throw DataError("label_fn.s must hold four factors");
                std::copy(s.begin(), s.end(), manifest.label_config.s.begin());
                have_header = true;
                continue;
            }
            manifest.records.push_back(record_from_json(j));
        }
    } catch (const json::exception& e) {
        throw DataError(manifest_file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) throw DataError("empty manifest " + manifest_file.string());
    if (manifest.records.size() != manifest.count) {
        throw DataError("manifest count " + std::to_string(manifest.count) + " does not match " +
                        std::to_string(manifest.records.size()) + " records");
    }
    for (const auto& r : manifest.records) {
        const auto path = manifest.image_path(r);
        if (!fs::exists(path)) throw DataError("missing image " + path.string());
        const GrayImage img = read_pgm(path);
        if (img.width() != r.spec.width || img.height() != r.spec.height) {
            throw DataError("image " + path.string() + " does not match recorded dimensions");
        }
    }
    return manifest;
}

}  // namespace docqa
