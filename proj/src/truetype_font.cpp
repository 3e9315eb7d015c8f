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

#include <algorithm>
#include <fstream>
#include <iterator>

#include "docqa/error.hpp"
#include "docqa/font.hpp"

namespace docqa {

namespace {

constexpr int kMaxCompositeDepth = 8;

struct Reader {
    const std::vector<std::uint8_t>& data;

    void require(std::size_t offset, std::size_t count) const {
        if (offset + count > data.size()) throw DataError("truncated TrueType data");
    }
    std::uint8_t u8(std::size_t offset) const {
        require(offset, 1);
        return data[offset];
    }
    std::uint16_t u16(std::size_t offset) const {
        require(offset, 2);
        return static_cast<std::uint16_t>(data[offset] << 8 | data[offset + 1]);
    }
    std::int16_t i16(std::size_t offset) const { return static_cast<std::int16_t>(u16(offset)); }
    std::uint32_t u32(std::size_t offset) const {
        require(offset, 4);
        return static_cast<std::uint32_t>(data[offset]) << 24 |
               static_cast<std::uint32_t>(data[offset + 1]) << 16 |
               static_cast<std::uint32_t>(data[offset + 2]) << 8 | data[offset + 3];
    }
    double f2dot14(std::size_t offset) const { return i16(offset) / 16384.0; }
};

// Glyph flag bits.
constexpr std::uint8_t kOnCurve = 0x01;
constexpr std::uint8_t kXShort = 0x02;
constexpr std::uint8_t kYShort = 0x04;
constexpr std::uint8_t kRepeat = 0x08;
constexpr std::uint8_t kXSame = 0x10;
constexpr std::uint8_t kYSame = 0x20;

// Component flag bits.
constexpr std::uint16_t kArgsAreWords = 0x0001;
constexpr std::uint16_t kArgsAreXY = 0x0002;
constexpr std::uint16_t kHaveScale = 0x0008;
constexpr std::uint16_t kMoreComponents = 0x0020;
constexpr std::uint16_t kHaveXYScale = 0x0040;
constexpr std::uint16_t kHaveTwoByTwo = 0x0080;

// Inserts implied on-curve midpoints between consecutive off-curve points and
// rotates the contour so that it starts on-curve.
Contour normalise_contour(const std::vector<OutlinePoint>& raw) {
    Contour out;
    if (raw.empty()) return out;
    const std::size_t n = raw.size();
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i].on_curve) {
            start = i;
            break;
        }
    }
    std::vector<OutlinePoint> pts;
    if (start == n) {
        // all off-curve: begin at the midpoint of the first two
        const auto& a = raw[0];
        const auto& b = raw[1 % n];
        pts.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y), true});
        for (std::size_t i = 1; i <= n; ++i) pts.push_back(raw[i % n]);
    } else {
        for (std::size_t i = 0; i < n; ++i) pts.push_back(raw[(start + i) % n]);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!out.empty() && !p.on_curve && !out.back().on_curve) {
            const auto& q = out.back();
            out.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y), true});
        }
        out.push_back(p);
    }
    if (!out.back().on_curve && !out.front().on_curve) {
        // cannot happen: contour starts on-curve
        throw DataError("malformed contour");
    }
    return out;
}

}  // namespace

std::unique_ptr<TrueTypeFont> TrueTypeFont::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open font " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return std::unique_ptr<TrueTypeFont>(new TrueTypeFont(path.string(), std::move(data)));
}

TrueTypeFont::TrueTypeFont(std::string id, std::vector<std::uint8_t> data)
    : id_(std::move(id)), data_(std::move(data)) {
    const Reader r{data_};
    const std::uint32_t version = r.u32(0);
    if (version != 0x00010000 && version != 0x74727565) {
        throw DataError(id_ + ": not a TrueType outline font");
    }
    const std::uint16_t num_tables = r.u16(4);
    for (std::uint16_t i = 0; i < num_tables; ++i) {
        const std::size_t rec = 12 + 16 * static_cast<std::size_t>(i);
        r.require(rec, 16);
        const std::string tag(reinterpret_cast<const char*>(&data_[rec]), 4);
        tables_[tag] = {r.u32(rec + 8), r.u32(rec + 12)};
    }
    for (const char* tag : {"head", "maxp", "cmap", "loca", "glyf", "hhea", "hmtx"}) {
        if (!tables_.contains(tag)) throw DataError(id_ + ": missing table " + tag);
    }
    const auto head = tables_.at("head").first;
    units_per_em_ = r.u16(head + 18);
    if (units_per_em_ <= 0) throw DataError(id_ + ": invalid unitsPerEm");
    index_to_loc_format_ = r.i16(head + 50);
    num_glyphs_ = r.u16(tables_.at("maxp").first + 4);
    const auto hhea = tables_.at("hhea").first;
    ascent_ = r.i16(hhea + 4) / units_per_em_;
    descent_ = -r.i16(hhea + 6) / units_per_em_;
    num_hmetrics_ = r.u16(hhea + 34);

    // Prefer a full-repertoire Unicode map (format 12), else the BMP map (format 4).
    const auto cmap = tables_.at("cmap").first;
    const std::uint16_t num_subtables = r.u16(cmap + 2);
    for (std::uint16_t i = 0; i < num_subtables; ++i) {
        const std::size_t rec = cmap + 4 + 8 * static_cast<std::size_t>(i);
        const std::uint16_t platform = r.u16(rec);
        const std::uint16_t encoding = r.u16(rec + 2);
        const std::uint32_t offset = cmap + r.u32(rec + 4);
        const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
        if (!unicode) continue;
        const std::uint16_t format = r.u16(offset);
        if (format == 12 && cmap_format_ != 12) {
            cmap_format_ = 12;
            cmap_offset_ = offset;
        } else if (format == 4 && cmap_format_ == 0) {
            cmap_format_ = 4;
            cmap_offset_ = offset;
        }
    }
    if (cmap_format_ == 0) throw DataError(id_ + ": no supported Unicode cmap");
}

std::uint32_t TrueTypeFont::glyph_index(char32_t cp) const {
    const Reader r{data_};
    const auto code = static_cast<std::uint32_t>(cp);
    if (cmap_format_ == 12) {
        const std::uint32_t groups = r.u32(cmap_offset_ + 12);
        std::uint32_t lo = 0;
        std::uint32_t hi = groups;
        while (lo < hi) {
            const std::uint32_t mid = (lo + hi) / 2;
            const std::size_t g = cmap_offset_ + 16 + 12 * static_cast<std::size_t>(mid);
            const std::uint32_t start = r.u32(g);
            const std::uint32_t end = r.u32(g + 4);
            if (code < start) {
                hi = mid;
            } else if (code > end) {
                lo = mid + 1;
            } else {
                return r.u32(g + 8) + (code - start);
            }
        }
        return 0;
    }
    if (code > 0xFFFF) return 0;
    const std::uint16_t seg_count = r.u16(cmap_offset_ + 6) / 2;
    const std::size_t end_codes = cmap_offset_ + 14;
    const std::size_t start_codes = end_codes + 2 * static_cast<std::size_t>(seg_count) + 2;
    const std::size_t deltas = start_codes + 2 * static_cast<std::size_t>(seg_count);
    const std::size_t range_offsets = deltas + 2 * static_cast<std::size_t>(seg_count);
    for (std::uint16_t i = 0; i < seg_count; ++i) {
        const std::uint16_t end = r.u16(end_codes + 2 * i);
        if (code > end) continue;
        const std::uint16_t start = r.u16(start_codes + 2 * i);
        if (code < start) return 0;
        const std::uint16_t delta = r.u16(deltas + 2 * i);
        const std::uint16_t range_offset = r.u16(range_offsets + 2 * i);
        if (range_offset == 0) return static_cast<std::uint16_t>(code + delta);
        const std::size_t addr = range_offsets + 2 * i + range_offset + 2 * (code - start);
        const std::uint16_t glyph = r.u16(addr);
        return glyph == 0 ? 0 : static_cast<std::uint16_t>(glyph + delta);
    }
    return 0;
}

bool TrueTypeFont::has_glyph(char32_t cp) const {
    if (cp == U' ') return true;
    const auto index = glyph_index(cp);
    return index != 0 && index < num_glyphs_;
}

double TrueTypeFont::advance_of(std::uint32_t index) const {
    const Reader r{data_};
    const auto hmtx = tables_.at("hmtx").first;
    const std::uint32_t i = std::min(index, num_hmetrics_ - 1);
    return r.u16(hmtx + 4 * static_cast<std::size_t>(i)) / units_per_em_;
}

void TrueTypeFont::append_glyph(std::uint32_t index, const double t[6], int depth,
                                std::vector<Contour>& out) const {
    if (depth > kMaxCompositeDepth) throw DataError(id_ + ": composite glyph nesting too deep");
    if (index >= num_glyphs_) throw DataError(id_ + ": glyph index out of range");
    const Reader r{data_};
    const auto loca = tables_.at("loca").first;
    std::uint32_t begin;
    std::uint32_t end;
    if (index_to_loc_format_ == 0) {
        begin = 2U * r.u16(loca + 2 * static_cast<std::size_t>(index));
        end = 2U * r.u16(loca + 2 * static_cast<std::size_t>(index) + 2);
    } else {
        begin = r.u32(loca + 4 * static_cast<std::size_t>(index));
        end = r.u32(loca + 4 * static_cast<std::size_t>(index) + 4);
    }
    if (end <= begin) return;  // empty glyph, e.g. space
    const std::size_t g = tables_.at("glyf").first + begin;
    const std::int16_t num_contours = r.i16(g);

    auto apply = [&](double x, double y, bool on) {
        return OutlinePoint{(t[0] * x + t[2] * y + t[4]) / units_per_em_,
                            (t[1] * x + t[3] * y + t[5]) / units_per_em_, on};
    };

    if (num_contours >= 0) {
        const std::size_t ends = g + 10;
        std::vector<std::uint16_t> end_points(static_cast<std::size_t>(num_contours));
        for (int i = 0; i < num_contours; ++i) end_points[i] = r.u16(ends + 2 * i);
        if (num_contours == 0) return;
        const std::size_t point_count = end_points.back() + 1U;
        const std::size_t instr_len = r.u16(ends + 2 * num_contours);
        std::size_t pos = ends + 2 * num_contours + 2 + instr_len;

        std::vector<std::uint8_t> flags;
        flags.reserve(point_count);
        while (flags.size() < point_count) {
            const std::uint8_t f = r.u8(pos++);
            flags.push_back(f);
            if (f & kRepeat) {
                const std::uint8_t count = r.u8(pos++);
                for (int k = 0; k < count && flags.size() < point_count; ++k) flags.push_back(f);
            }
        }
        std::vector<int> xs(point_count);
        std::vector<int> ys(point_count);
        int value = 0;
        for (std::size_t i = 0; i < point_count; ++i) {
            if (flags[i] & kXShort) {
                const int d = r.u8(pos++);
                value += (flags[i] & kXSame) ? d : -d;
            } else if (!(flags[i] & kXSame)) {
                value += r.i16(pos);
                pos += 2;
            }
            xs[i] = value;
        }
        value = 0;
        for (std::size_t i = 0; i < point_count; ++i) {
            if (flags[i] & kYShort) {
                const int d = r.u8(pos++);
                value += (flags[i] & kYSame) ? d : -d;
            } else if (!(flags[i] & kYSame)) {
                value += r.i16(pos);
                pos += 2;
            }
            ys[i] = value;
        }
        std::size_t first = 0;
        for (auto last : end_points) {
            if (last < first || last >= point_count) throw DataError(id_ + ": bad contour bounds");
            std::vector<OutlinePoint> raw;
            for (std::size_t i = first; i <= last; ++i) {
                raw.push_back(apply(xs[i], ys[i], (flags[i] & kOnCurve) != 0));
            }
            if (raw.size() >= 2) out.push_back(normalise_contour(raw));
            first = last + 1U;
        }
        return;
    }

    std::size_t pos = g + 10;
    std::uint16_t flags;
    do {
        flags = r.u16(pos);
        const std::uint16_t component = r.u16(pos + 2);
        pos += 4;
        double dx = 0;
        double dy = 0;
        if (flags & kArgsAreWords) {
            if (flags & kArgsAreXY) {
                dx = r.i16(pos);
                dy = r.i16(pos + 2);
            }
            pos += 4;
        } else {
            if (flags & kArgsAreXY) {
                dx = static_cast<std::int8_t>(r.u8(pos));
                dy = static_cast<std::int8_t>(r.u8(pos + 1));
            }
            pos += 2;
        }
        // point-matching placement (args not xy) is left at zero offset
        double a = 1, b = 0, c = 0, d = 1;
        if (flags & kHaveScale) {
            a = d = r.f2dot14(pos);
            pos += 2;
        } else if (flags & kHaveXYScale) {
            a = r.f2dot14(pos);
            d = r.f2dot14(pos + 2);
            pos += 4;
        } else if (flags & kHaveTwoByTwo) {
            a = r.f2dot14(pos);
            b = r.f2dot14(pos + 2);
            c = r.f2dot14(pos + 4);
            d = r.f2dot14(pos + 6);
            pos += 8;
        }
        // compose: parent(t) after child(a b c d dx dy)
        const double m[6] = {t[0] * a + t[2] * b,  t[1] * a + t[3] * b,
                             t[0] * c + t[2] * d,  t[1] * c + t[3] * d,
                             t[0] * dx + t[2] * dy + t[4], t[1] * dx + t[3] * dy + t[5]};
        append_glyph(component, m, depth + 1, out);
    } while (flags & kMoreComponents);
}

GlyphOutline TrueTypeFont::glyph(char32_t cp) const {
    const std::uint32_t index = glyph_index(cp);
    if (cp != U' ' && (index == 0 || index >= num_glyphs_)) {
        throw ParameterError(id_ + ": no glyph for U+" + std::to_string(static_cast<unsigned>(cp)));
    }
    GlyphOutline outline;
    if (index == 0) {
        outline.advance = 0.3;
        return outline;
    }
    const double identity[6] = {1, 0, 0, 1, 0, 0};
    append_glyph(index, identity, 0, outline.contours);
    outline.advance = advance_of(index);
    return outline;
}

std::unique_ptr<Font> load_font(const std::string& id) {
    if (id == StrokeFont::kId) return std::make_unique<StrokeFont>();
    return TrueTypeFont::load(id);
}

std::vector<std::string> default_font_ids() {
    std::vector<std::string> ids;
    const std::filesystem::path dir = "/usr/share/fonts/truetype/dejavu";
    for (const char* name : {"DejaVuSans.ttf", "DejaVuSans-Bold.ttf", "DejaVuSerif.ttf",
                             "DejaVuSerif-Bold.ttf", "DejaVuSansMono.ttf",
                             "DejaVuSansMono-Bold.ttf"}) {
        if (std::filesystem::exists(dir / name)) ids.push_back((dir / name).string());
    }
    ids.emplace_back(StrokeFont::kId);
    return ids;
}

}  // namespace docqa
