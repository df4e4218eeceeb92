#include "gravphase/report.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "gravphase/errors.hpp"

namespace gravphase {

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                         std::chars_format::general, 17);
    if (ec != std::errc{}) throw NumericError("format_double: conversion failed");
    return std::string(buffer, ptr);
}

namespace {

// Compact SHA-1; only used for content-addressing config files.
struct Sha1 {
    std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                   0xC3D2E1F0u};

    static std::uint32_t rol(std::uint32_t v, int bits) {
        return (v << bits) | (v >> (32 - bits));
    }

    void process(const std::uint8_t* block) {
        std::array<std::uint32_t, 80> w{};
        for (int i = 0; i < 16; ++i)
            w[static_cast<std::size_t>(i)] =
                (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 80; ++i)
            w[static_cast<std::size_t>(i)] =
                rol(w[static_cast<std::size_t>(i - 3)] ^ w[static_cast<std::size_t>(i - 8)] ^
                        w[static_cast<std::size_t>(i - 14)] ^ w[static_cast<std::size_t>(i - 16)],
                    1);
        auto [a, b, c, d, e] = std::tuple{h[0], h[1], h[2], h[3], h[4]};
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) { f = (b & c) | (~b & d); k = 0x5A827999u; }
            else if (i < 40) { f = b ^ c ^ d; k = 0x6ED9EBA1u; }
            else if (i < 60) { f = (b & c) | (b & d) | (c & d); k = 0x8F1BBCDCu; }
            else { f = b ^ c ^ d; k = 0xCA62C1D6u; }
            const std::uint32_t temp = rol(a, 5) + f + e + k + w[static_cast<std::size_t>(i)];
            e = d; d = c; c = rol(b, 30); b = a; a = temp;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e;
    }

    std::string digest(const std::string& data) {
        const std::uint64_t bit_len = std::uint64_t(data.size()) * 8;
        std::string padded = data;
        padded.push_back(static_cast<char>(0x80));
        while (padded.size() % 64 != 56) padded.push_back('\0');
        for (int i = 7; i >= 0; --i)
            padded.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xFF));
        for (std::size_t off = 0; off < padded.size(); off += 64)
            process(reinterpret_cast<const std::uint8_t*>(padded.data() + off));
        std::ostringstream out;
        out << std::hex << std::setfill('0');
        for (std::uint32_t v : h) out << std::setw(8) << v;
        return out.str();
    }
};

}  // namespace

std::string git_blob_sha1(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;
    return Sha1{}.digest(blob);
}

CsvWriter::CsvWriter(std::string config_hash, std::vector<std::string> columns)
    : hash_(std::move(config_hash)), columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw ValidationError("CsvWriter: row width mismatch");
    rows_.push_back(cells);
}

std::string CsvWriter::str() const {
    std::string out = "# config_hash=" + hash_ + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out.push_back(',');
        out += columns_[i];
    }
    out.push_back('\n');
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += row[i];
        }
        out.push_back('\n');
    }
    return out;
}

void CsvWriter::write_file(const std::string& path) const {
    write_text_file(path, str());
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

}  // namespace

void FlatReport::set(const std::string& key, const std::string& value) {
    entries_[key] = "\"" + json_escape(value) + "\"";
}

void FlatReport::set(const std::string& key, double value) {
    entries_[key] = format_double(value);
}

void FlatReport::set(const std::string& key, int value) {
    entries_[key] = std::to_string(value);
}

void FlatReport::set(const std::string& key, bool value) {
    entries_[key] = value ? "true" : "false";
}

void FlatReport::set_list(const std::string& key, const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    out += "]";
    entries_[key] = out;
}

std::string FlatReport::str() const {
    std::string out = "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : entries_) {
        out += "  \"" + json_escape(key) + "\": " + value;
        if (++i != entries_.size()) out += ",";
        out += "\n";
    }
    out += "}\n";
    return out;
}

void FlatReport::write_file(const std::string& path) const {
    write_text_file(path, str());
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ValidationError("cannot create directory '" + path + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << content;
}

}  // namespace gravphase
