#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Two on-disk forms of a FeatureSet.
//
// Binary ("CSAL"): magic "CSAL", then little-endian u32 version (1), n, d, C,
// has_labels (0/1), n*d float32 row-major, then n u32 labels if present.
//
// CSV: header f0,...,f{d-1}[,label], one row per point. C is taken as
// max(label) + 1.
namespace coreset::harness {

inline constexpr char kMagic[4] = {'C', 'S', 'A', 'L'};
inline constexpr std::uint32_t kFormatVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t& pos) {
    require(pos + 4 <= in.size(), ErrorCode::kFormat, "truncated dataset file");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
    pos += 4;
    return v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

inline bool ends_with_csv(std::string_view path) {
    if (path.size() < 4) return false;
    std::string ext(path.substr(path.size() - 4));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv";
}

template <class T>
void append_number(std::string& out, T v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

template <class T>
T parse_field(std::string_view field, std::size_t line_no) {
    T v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
    return v;
}

}  // namespace detail

inline std::string encode_binary(const FeatureSet& fs) {
    std::string out(kMagic, 4);
    detail::put_u32(out, kFormatVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(fs.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(fs.dim()));
    detail::put_u32(out, fs.num_classes());
    detail::put_u32(out, fs.has_labels() ? 1u : 0u);
    for (float v : fs.values()) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
    if (fs.has_labels())
        for (Label y : fs.labels()) detail::put_u32(out, y);
    return out;
}

inline FeatureSet decode_binary(std::string_view bytes) {
    require(bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorCode::kFormat,
            "bad magic: not a CSAL dataset");
    std::size_t pos = 4;
    const auto version = detail::get_u32(bytes, pos);
    require(version == kFormatVersion, ErrorCode::kFormat, "unsupported dataset format version");
    const std::size_t n = detail::get_u32(bytes, pos), d = detail::get_u32(bytes, pos);
    const auto C = detail::get_u32(bytes, pos);
    const auto has_labels = detail::get_u32(bytes, pos);
    require(has_labels <= 1, ErrorCode::kFormat, "has_labels must be 0 or 1");
    require(n >= 1 && d >= 1, ErrorCode::kFormat, "dataset needs n >= 1 and d >= 1");
    const std::size_t expected = 24 + 4 * (n * d + (has_labels ? n : 0));
    require(bytes.size() >= expected, ErrorCode::kFormat, "truncated dataset file");
    require(bytes.size() == expected, ErrorCode::kFormat, "trailing bytes after dataset");

    std::vector<float> values(n * d);
    for (auto& v : values) {
        v = std::bit_cast<float>(detail::get_u32(bytes, pos));
        require(std::isfinite(v), ErrorCode::kFormat, "non-finite feature value");
    }
    std::optional<std::vector<Label>> labels;
    if (has_labels) {
        labels.emplace(n);
        for (auto& y : *labels) {
            y = detail::get_u32(bytes, pos);
            require(y < C, ErrorCode::kFormat, "label >= num_classes");
        }
    }
    return FeatureSet(n, d, std::move(values), std::move(labels), C);
}

inline std::string encode_csv(const FeatureSet& fs) {
    std::string out;
    for (std::size_t j = 0; j < fs.dim(); ++j) {
        if (j) out.push_back(',');
        out += "f" + std::to_string(j);
    }
    if (fs.has_labels()) out += ",label";
    out.push_back('\n');
    for (Index i = 0; i < fs.size(); ++i) {
        const auto r = fs.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out.push_back(',');
            detail::append_number(out, r[j]);
        }
        if (fs.has_labels()) {
            out.push_back(',');
            detail::append_number(out, fs.labels()[i]);
        }
        out.push_back('\n');
    }
    return out;
}

inline FeatureSet decode_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    require(!lines.empty(), ErrorCode::kFormat, "empty CSV file");

    const auto header = detail::split_fields(lines[0]);
    const bool has_labels = header.back() == "label";
    const std::size_t d = header.size() - (has_labels ? 1 : 0);
    require(d >= 1, ErrorCode::kFormat, "CSV has no feature columns");
    for (std::size_t j = 0; j < d; ++j)
        require(header[j] == "f" + std::to_string(j), ErrorCode::kFormat, "CSV header must be f0,...,f{d-1}[,label]");
    require(lines.size() >= 2, ErrorCode::kFormat, "CSV has no data rows");

    const std::size_t n = lines.size() - 1;
    std::vector<float> values;
    values.reserve(n * d);
    std::optional<std::vector<Label>> labels;
    if (has_labels) labels.emplace();
    std::uint32_t C = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = detail::split_fields(lines[r]);
        if (fields.size() != header.size())
            fail(ErrorCode::kFormat, "line " + std::to_string(r + 1) + ": expected " +
                                         std::to_string(header.size()) + " fields");
        for (std::size_t j = 0; j < d; ++j) {
            const float v = detail::parse_field<float>(fields[j], r + 1);
            if (!std::isfinite(v)) fail(ErrorCode::kFormat, "line " + std::to_string(r + 1) + ": non-finite feature");
            values.push_back(v);
        }
        if (has_labels) {
            const auto y = detail::parse_field<std::uint32_t>(fields[d], r + 1);
            require(y < std::numeric_limits<std::uint32_t>::max(), ErrorCode::kFormat, "label too large");
            labels->push_back(y);
            C = std::max(C, y + 1);
        }
    }
    return FeatureSet(n, d, std::move(values), std::move(labels), C);
}

// Format chosen by content: the CSAL magic means binary, anything else is
// parsed as CSV when the path ends in .csv and rejected otherwise.
inline FeatureSet load_dataset(const std::string& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_binary(bytes);
    if (detail::ends_with_csv(path)) return decode_csv(bytes);
    fail(ErrorCode::kFormat, "bad magic: '" + path + "' is not a CSAL dataset");
}

// Writes CSV for a .csv path, the binary format otherwise.
inline void save_dataset(const std::string& path, const FeatureSet& fs) {
    detail::write_file(path, detail::ends_with_csv(path) ? encode_csv(fs) : encode_binary(fs));
}

}  // namespace coreset::harness
