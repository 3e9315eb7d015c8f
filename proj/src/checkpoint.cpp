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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "docqa/error.hpp"
#include "docqa/predict.hpp"

namespace docqa {

namespace {

constexpr char kMagic[4] = {'D', 'I', 'Q', 'M'};
constexpr std::uint32_t kMaxBlocks = 64;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t read(int width) {
        if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw DataError("truncated checkpoint");
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(read(4)); }
    std::uint64_t u64() { return read(8); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

int to_int(std::uint32_t v) {
    if (v > 1u << 20) throw DataError("implausible checkpoint dimension");
    return static_cast<int>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const PredictorModel& model) {
    model.validate();
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, model.version);
    put_u32(out, static_cast<std::uint32_t>(model.arch.in_channels));
    put_u32(out, static_cast<std::uint32_t>(model.arch.in_height));
    put_u32(out, static_cast<std::uint32_t>(model.arch.in_width));
    put_u32(out, static_cast<std::uint32_t>(model.arch.conv_channels.size()));
    for (int c : model.arch.conv_channels) put_u32(out, static_cast<std::uint32_t>(c));
    put_u64(out, model.params.size());
    for (float p : model.params) put_u32(out, std::bit_cast<std::uint32_t>(p));
    return out;
}

PredictorModel deserialize_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DataError("not a model checkpoint (bad magic)");
    }
    ByteReader in(bytes.subspan(4));
    PredictorModel model;
    model.version = in.u32();
    if (model.version != PredictorModel::kFormatVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(model.version));
    }
    model.arch.in_channels = to_int(in.u32());
    model.arch.in_height = to_int(in.u32());
    model.arch.in_width = to_int(in.u32());
    const std::uint32_t blocks = in.u32();
    if (blocks == 0 || blocks > kMaxBlocks) throw DataError("implausible block count in checkpoint");
    model.arch.conv_channels.clear();
    for (std::uint32_t i = 0; i < blocks; ++i) model.arch.conv_channels.push_back(to_int(in.u32()));
    const std::uint64_t count = in.u64();
    if (count > in.remaining() / 4) throw DataError("truncated checkpoint parameters");
    model.params.resize(count);
    for (auto& p : model.params) p = std::bit_cast<float>(in.u32());
    if (in.remaining() != 0) throw DataError("trailing bytes in checkpoint");
    try {
        model.validate();
    } catch (const ParameterError& e) {
        throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
    return model;
}

void save_model(const PredictorModel& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move checkpoint into " + path.string());
}

PredictorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace docqa
