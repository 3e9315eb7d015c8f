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

// Command-line front end: dataset synthesis, training, document assessment,
// benchmark evaluation and detector inspection.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "docqa/assess.hpp"
#include "docqa/detect.hpp"
#include "docqa/error.hpp"
#include "docqa/eval.hpp"
#include "docqa/parallel.hpp"
#include "docqa/predict.hpp"
#include "docqa/synth.hpp"

namespace fs = std::filesystem;
using namespace docqa;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

void write_atomically(const fs::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << text;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move output into " + path.string());
}

// "4x6" -> {4, 6}
std::pair<int, int> parse_pair(const std::string& text, const std::string& what) {
    const auto x = text.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument(text);
        std::size_t used_a = 0, used_b = 0;
        const int a = std::stoi(text.substr(0, x), &used_a);
        const std::string rest = text.substr(x + 1);
        const int b = std::stoi(rest, &used_b);
        if (used_a != x || used_b != rest.size() || a < 1 || b < 1) throw std::invalid_argument(text);
        return {a, b};
    } catch (const std::exception&) {
        throw ParameterError(what + " must look like WxH with positive integers, got '" + text + "'");
    }
}

struct LabelOptions {
    std::string group = "G2";
    std::vector<double> factors;

    LabelFnConfig resolve() const {
        LabelFnConfig cfg = LabelFnConfig::preset(group);
        if (!factors.empty()) {
            if (factors.size() != 4) throw ParameterError("--label-factors takes exactly four values");
            std::copy(factors.begin(), factors.end(), cfg.s.begin());
        }
        cfg.validate();
        if (!cfg.follows_recommended_ordering()) {
            std::cerr << "note: label factors do not follow s1 < s2 < 1 < s3 < s4\n";
        }
        return cfg;
    }
};

void add_label_options(CLI::App* cmd, LabelOptions& opt) {
    cmd->add_option("--scaling-group", opt.group, "Label-function preset G1..G6")
        ->capture_default_str()
        ->check(CLI::IsMember({"G1", "G2", "G3", "G4", "G5", "G6"}));
    cmd->add_option("--label-factors", opt.factors, "Explicit s1 s2 s3 s4 (overrides the preset)")
        ->expected(4);
}

struct DetectOptions {
    std::string grid;
    bool no_divide = false;
    std::string resize;
    std::string binarization = "otsu";
    int smear_gap = DetectorParams{}.smear_gap_px;
    int min_height = DetectorParams{}.min_height_px;
    int max_height = DetectorParams{}.max_height_px;

    DetectorParams params() const {
        DetectorParams p;
        p.binarization = binarization == "adaptive" ? Binarization::AdaptiveMean : Binarization::OtsuGlobal;
        p.smear_gap_px = smear_gap;
        p.min_height_px = min_height;
        p.max_height_px = max_height;
        p.validate();
        return p;
    }

    DetectionMode mode() const {
        const int chosen = !grid.empty() + no_divide + !resize.empty();
        if (chosen > 1) throw ParameterError("--grid, --no-divide and --resize are mutually exclusive");
        if (!grid.empty()) {
            const auto [nx, ny] = parse_pair(grid, "--grid");
            return DetectionMode::divided({nx, ny});
        }
        if (!resize.empty()) {
            const auto [w, h] = parse_pair(resize, "--resize");
            return DetectionMode::resized(w, h);
        }
        return DetectionMode::native();
    }
};

void add_detect_options(CLI::App* cmd, DetectOptions& opt) {
    cmd->add_option("--grid", opt.grid, "Divide the page into NxM segments before detection (e.g. 4x6)");
    cmd->add_flag("--no-divide", opt.no_divide, "Detect on the whole page at native resolution (default)");
    cmd->add_option("--resize", opt.resize, "Resize the page to WxH before detection (e.g. 600x900)");
    cmd->add_option("--binarization", opt.binarization, "otsu or adaptive")
        ->capture_default_str()
        ->check(CLI::IsMember({"otsu", "adaptive"}));
    cmd->add_option("--smear-gap", opt.smear_gap, "Horizontal smearing gap in pixels")->capture_default_str();
    cmd->add_option("--min-line-height", opt.min_height, "Smallest accepted line height")->capture_default_str();
    cmd->add_option("--max-line-height", opt.max_height, "Largest accepted line height")->capture_default_str();
}

std::vector<fs::path> collect_images(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".pgm") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            throw DataError("no such file or directory: " + in);
        }
    }
    if (files.empty()) throw DataError("no .pgm images found");
    return files;
}

// ------------------------------------------------------------------ synth

struct SynthOptions {
    std::size_t n = 0;
    std::string out;
    std::uint64_t seed = 1;
    int jobs = 1;
    LabelOptions label;
    double chinese_fraction = SynthConfig{}.chinese_fraction;
    double underfill = SynthConfig{}.underfill_probability;
    std::vector<std::string> fonts;
    std::string chinese_corpus;
    std::string english_corpus;
};

int run_synth(const SynthOptions& o) {
    if (o.n == 0) throw ParameterError("--n must be at least 1");
    SynthConfig cfg;
    cfg.chinese_fraction = o.chinese_fraction;
    cfg.underfill_probability = o.underfill;
    if (!o.fonts.empty()) cfg.fonts = o.fonts;
    if (!o.chinese_corpus.empty()) cfg.chinese_corpus = o.chinese_corpus;
    if (!o.english_corpus.empty()) cfg.english_corpus = o.english_corpus;
    cfg.validate();
    const auto label = o.label.resolve();
    const auto manifest = generate_dataset(o.n, cfg, label, o.seed, o.out, o.jobs);
    const auto path = fs::path(o.out) / kManifestFileName;
    std::cout << nlohmann::json{{"manifest", path.string()}, {"count", manifest.records.size()}}.dump() << "\n";
    std::cerr << "wrote " << manifest.records.size() << " lines to " << o.out << "\n";
    return kOk;
}

// ------------------------------------------------------------------ train

struct TrainOptions {
    std::string manifest;
    std::string out;
    std::string log;
    TrainConfig cfg;
};

int run_train(const TrainOptions& o) {
    o.cfg.validate();
    if (o.out.empty()) throw ParameterError("--out is required");
    const auto manifest = load_manifest(o.manifest);
    std::ofstream log_file;
    if (!o.log.empty()) {
        log_file.open(o.log, std::ios::trunc);
        if (!log_file) throw DataError("cannot write " + o.log);
    }
    const auto result = train(manifest, o.cfg, [&](const EpochLog& e) {
        const auto line = e.to_json();
        std::cout << line << "\n" << std::flush;
        if (log_file) log_file << line << "\n" << std::flush;
        std::cerr << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << "\n";
    });
    save_model(result.model, o.out);
    std::cerr << "best epoch " << result.best_epoch << ", checkpoint " << o.out << "\n";
    return kOk;
}

// ------------------------------------------------------------------ assess

struct AssessOptions {
    std::vector<std::string> inputs;
    std::string model;
    std::string predictor = "cnn";
    std::string strategy = "wp";
    DetectOptions detect;
    LabelOptions label;
    std::string no_text_policy = "score";
    double no_text_score = 0.0;
    std::string out_dir;
    std::string csv;
    int jobs = 1;
};

int run_assess(const AssessOptions& o) {
    const auto strategy = parse_strategy(o.strategy);
    const auto params = o.detect.params();
    const auto mode = o.detect.mode();
    if (!(o.no_text_score >= 0.0 && o.no_text_score <= 1.0)) {
        throw ParameterError("--no-text-score must lie in [0, 1]");
    }
    std::unique_ptr<LinePredictor> predictor;
    if (o.predictor == "analytic") {
        if (!o.model.empty()) throw ParameterError("--model cannot be combined with --predictor analytic");
        predictor = std::make_unique<AnalyticPredictor>(o.label.resolve());
    } else {
        if (o.model.empty()) throw ParameterError("--model is required unless --predictor analytic is given");
        predictor = std::make_unique<CnnPredictor>(load_model(o.model));
    }
    const auto files = collect_images(o.inputs);
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);

    const Detector detector = make_baseline_detector(params, mode);
    std::vector<nlohmann::ordered_json> reports(files.size());
    std::vector<double> scores(files.size(), 0.0);
    std::vector<bool> missing(files.size(), false);
    parallel_for(files.size(), o.jobs, [&](std::size_t i) {
        const auto result = assess_document(read_pgm(files[i]), detector, *predictor, strategy, mode.describe());
        auto j = nlohmann::ordered_json::parse(result.to_json());
        nlohmann::ordered_json report;
        report["id"] = files[i].stem().string();
        report["file"] = files[i].string();
        report["predictor"] = predictor->name();
        for (auto& [k, v] : j.items()) report[k] = v;
        if (result.status == AssessmentStatus::NoText) {
            missing[i] = true;
            if (o.no_text_policy == "score") report["overall"] = o.no_text_score;
        }
        scores[i] = report["overall"].is_number() ? report["overall"].get<double>() : 0.0;
        if (!o.out_dir.empty()) {
            write_atomically(fs::path(o.out_dir) / (files[i].stem().string() + ".json"), report.dump() + "\n");
        }
        reports[i] = std::move(report);
    });

    for (const auto& r : reports) std::cout << r.dump() << "\n";
    if (!o.csv.empty()) {
        std::string text = "id,score\n";
        for (std::size_t i = 0; i < files.size(); ++i) {
            if (missing[i] && o.no_text_policy == "error") continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
            text += files[i].stem().string() + "," + buf + "\n";
        }
        write_atomically(o.csv, text);
    }
    const auto no_text = static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true));
    std::cerr << "assessed " << files.size() << " image(s) via " << mode.describe() << " detection";
    if (no_text) std::cerr << ", " << no_text << " without text";
    std::cerr << "\n";
    if (no_text && o.no_text_policy == "error") {
        std::cerr << "error: no text detected in " << no_text << " image(s)\n";
        return kData;
    }
    return kOk;
}

// ------------------------------------------------------------------ eval

struct EvalOptions {
    std::string predictions;
    std::string ground_truth;
};

int run_eval(const EvalOptions& o) {
    const auto pairs = join_pairs(read_predictions_csv(o.predictions), read_ground_truth_csv(o.ground_truth));
    const auto report = evaluate(pairs);
    std::cout << report.to_json() << "\n";
    std::cerr << "n=" << report.n << " LCC=" << report.lcc << " SROCC=" << report.srocc << "\n";
    return kOk;
}

// ------------------------------------------------------------------ detect-debug

struct DetectDebugOptions {
    std::string input;
    std::string overlay;
    DetectOptions detect;
};

void draw_box(GrayImage& img, const BoundingBox& b) {
    const auto mark = [&](int x, int y) {
        if (x >= 0 && y >= 0 && x < img.width() && y < img.height()) img.at(x, y) = img.at(x, y) > 127 ? 0 : 255;
    };
    for (int x = b.x; x < b.right(); ++x) {
        mark(x, b.y);
        mark(x, b.bottom() - 1);
    }
    for (int y = b.y + 1; y + 1 < b.bottom(); ++y) {
        mark(b.x, y);
        mark(b.right() - 1, y);
    }
}

int run_detect_debug(const DetectDebugOptions& o) {
    const auto params = o.detect.params();
    const auto mode = o.detect.mode();
    auto img = read_pgm(o.input);
    const auto lines = make_baseline_detector(params, mode)(img);
    nlohmann::ordered_json boxes = nlohmann::ordered_json::array();
    for (const auto& l : lines) {
        nlohmann::ordered_json b{{"x", l.box.x}, {"y", l.box.y}, {"w", l.box.w}, {"h", l.box.h}};
        if (l.source_segment) b["segment"] = *l.source_segment;
        boxes.push_back(std::move(b));
        draw_box(img, l.box);
    }
    nlohmann::ordered_json out{{"file", o.input}, {"detection", mode.describe()}, {"lines", std::move(boxes)}};
    std::cout << out.dump() << "\n";
    if (!o.overlay.empty()) {
        const auto bytes = encode_pgm(img);
        write_atomically(o.overlay, std::string(bytes.begin(), bytes.end()));
    }
    std::cerr << lines.size() << " line(s) via " << mode.describe() << " detection\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document image quality assessment toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; sections are named after subcommands");
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic text-line dataset");
    synth_cmd->add_option("--n", synth.n, "Number of lines")->required();
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
    synth_cmd->add_option("--jobs", synth.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--chinese-fraction", synth.chinese_fraction, "Share of Chinese lines")->capture_default_str();
    synth_cmd->add_option("--underfill", synth.underfill, "Probability of a short line")->capture_default_str();
    synth_cmd->add_option("--fonts", synth.fonts, "Font files (or builtin:strokes)");
    synth_cmd->add_option("--chinese-corpus", synth.chinese_corpus, "Chinese character list");
    synth_cmd->add_option("--english-corpus", synth.english_corpus, "English word list");
    add_label_options(synth_cmd, synth.label);

    TrainOptions trn;
    auto* train_cmd = app.add_subcommand("train", "Train the line-quality network");
    train_cmd->add_option("--manifest", trn.manifest, "Dataset manifest (manifest.jsonl)")->required();
    train_cmd->add_option("--out", trn.out, "Checkpoint path")->required();
    train_cmd->add_option("--log", trn.log, "Also write the epoch log to this file");
    train_cmd->add_option("--lr", trn.cfg.learning_rate, "Learning rate")->capture_default_str();
    train_cmd->add_option("--weight-decay", trn.cfg.weight_decay, "L2 weight decay")->capture_default_str();
    train_cmd->add_option("--batch-size", trn.cfg.batch_size, "Minibatch size")->capture_default_str();
    train_cmd->add_option("--epochs", trn.cfg.epochs, "Epochs")->capture_default_str();
    train_cmd->add_option("--seed", trn.cfg.seed, "Seed for split, init and shuffling")->capture_default_str();
    train_cmd->add_option("--val-fraction", trn.cfg.val_fraction, "Validation share")->capture_default_str();

    AssessOptions asmt;
    auto* assess_cmd = app.add_subcommand("assess", "Score document images");
    assess_cmd->add_option("inputs", asmt.inputs, "PGM files or directories")->required();
    assess_cmd->add_option("--model", asmt.model, "Checkpoint from `train`");
    assess_cmd->add_option("--predictor", asmt.predictor, "cnn or analytic")
        ->capture_default_str()
        ->check(CLI::IsMember({"cnn", "analytic"}));
    assess_cmd->add_option("--strategy", asmt.strategy, "wp (area-weighted) or median")
        ->capture_default_str()
        ->check(CLI::IsMember({"wp", "median"}));
    assess_cmd->add_option("--no-text-policy", asmt.no_text_policy, "score: report --no-text-score; error: exit 2")
        ->capture_default_str()
        ->check(CLI::IsMember({"score", "error"}));
    assess_cmd->add_option("--no-text-score", asmt.no_text_score, "Overall score for pages without text")
        ->capture_default_str();
    assess_cmd->add_option("--out-dir", asmt.out_dir, "Write one JSON report per image here");
    assess_cmd->add_option("--csv", asmt.csv, "Write id,score rows for `eval`");
    assess_cmd->add_option("--jobs", asmt.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    add_detect_options(assess_cmd, asmt.detect);
    add_label_options(assess_cmd, asmt.label);

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "LCC and SROCC of predictions against ground truth");
    eval_cmd->add_option("--pred", ev.predictions, "CSV with id,score")->required();
    eval_cmd->add_option("--gt", ev.ground_truth, "CSV with id,engine,accuracy")->required();

    DetectDebugOptions dbg;
    auto* debug_cmd = app.add_subcommand("detect-debug", "Show detected text-line boxes");
    debug_cmd->add_option("input", dbg.input, "PGM image")->required();
    debug_cmd->add_option("--overlay", dbg.overlay, "Write the image with boxes drawn");
    add_detect_options(debug_cmd, dbg.detect);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*train_cmd) return run_train(trn);
        if (*assess_cmd) return run_assess(asmt);
        if (*eval_cmd) return run_eval(ev);
        if (*debug_cmd) return run_detect_debug(dbg);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
