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

#include <fstream>
#include <string>

#include "docqa/error.hpp"
#include "docqa/synth.hpp"

namespace docqa {

namespace {

std::vector<std::string> read_entries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file " + path.string());
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        entries.push_back(line.substr(first));
    }
    return entries;
}

}  // namespace

TextCorpus TextCorpus::load(const std::filesystem::path& chinese_file,
                            const std::filesystem::path& english_file) {
    TextCorpus corpus;
    for (const auto& entry : read_entries(chinese_file)) {
        for (char32_t cp : utf8_decode(entry)) {
            if (cp != U' ') corpus.chinese.push_back(cp);
        }
    }
    corpus.english = read_entries(english_file);
    if (corpus.chinese.empty()) throw DataError("Chinese corpus is empty: " + chinese_file.string());
    if (corpus.english.empty()) throw DataError("English corpus is empty: " + english_file.string());
    return corpus;
}

std::filesystem::path TextCorpus::default_chinese_path() {
    return std::filesystem::path(DOCQA_DEFAULT_DATA_DIR) / "corpus" / "zh_chars.txt";
}

std::filesystem::path TextCorpus::default_english_path() {
    return std::filesystem::path(DOCQA_DEFAULT_DATA_DIR) / "corpus" / "en_words.txt";
}

}  // namespace docqa
