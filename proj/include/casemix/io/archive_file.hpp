// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Archive files. One header line, then one point per line:
//
//   # casemix-archive v1 K=3 N=2 labels=CARD,ENDO,ENT alg=prcecm01 I=2000 J=4 S=50 proximity=0 seed=7
//   2420.72 0 13.5
//   ...
//
// Coordinates are written in shortest round-trip form, so reading a file
// back reproduces every double exactly.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "casemix/archive/archive.hpp"
#include "casemix/common.hpp"

namespace casemix::io {

struct ArchiveHeader {
    std::vector<std::string> labels;  // one per objective
    std::string algorithm{"none"};
    std::uint64_t total_points{0};    // I
    std::uint64_t threads{0};         // J
    std::uint64_t stage_size{0};      // S
    double proximity{0.0};
    std::uint64_t seed{0};
};

struct ArchiveFile {
    ArchiveHeader header;
    Archive archive;
};

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string> default_labels(std::size_t dims) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < dims; ++k) out.push_back("g" + std::to_string(k + 1));
    return out;
}

namespace detail {

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError(where + ": bad number '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t parse_count(std::string_view s, const std::string& where) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError(where + ": bad integer '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace detail

inline std::string serialize_archive(const Archive& archive, ArchiveHeader header) {
    if (header.labels.empty()) header.labels = default_labels(archive.dimension());
    if (header.labels.size() != archive.dimension())
        throw InputError("archive has " + std::to_string(archive.dimension()) + " objectives but " +
                         std::to_string(header.labels.size()) + " labels");
    for (const auto& l : header.labels)
        if (l.empty() || l.find_first_of(", \t\r\n=") != std::string::npos)
            throw InputError("label '" + l + "' must be non-empty without spaces, commas or '='");
    std::string out = "# casemix-archive v1 K=" + std::to_string(archive.dimension()) +
                      " N=" + std::to_string(archive.size()) + " labels=";
    for (std::size_t k = 0; k < header.labels.size(); ++k) out += (k ? "," : "") + header.labels[k];
    out += " alg=" + header.algorithm + " I=" + std::to_string(header.total_points) + " J=" +
           std::to_string(header.threads) + " S=" + std::to_string(header.stage_size) +
           " proximity=" + format_double(header.proximity) + " seed=" + std::to_string(header.seed) + "\n";
    for (const auto& p : archive.points()) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k) out += ' ';
            out += format_double(p[k]);
        }
        out += '\n';
    }
    return out;
}

/// Parses an archive document and rebuilds a balanced tree. Any
/// inconsistency (header, dimension, point count) is a FormatError.
inline ArchiveFile parse_archive(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("archive: empty file");
    const auto head = detail::split_ws(line);
    if (head.size() < 3 || head[0] != "#" || head[1] != "casemix-archive" || head[2] != "v1")
        throw FormatError("archive line 1: expected '# casemix-archive v1' header");
    std::map<std::string, std::string, std::less<>> fields;
    for (std::size_t i = 3; i < head.size(); ++i) {
        const auto eq = head[i].find('=');
        if (eq == std::string_view::npos) throw FormatError("archive line 1: malformed field '" + std::string(head[i]) + "'");
        fields[std::string(head[i].substr(0, eq))] = std::string(head[i].substr(eq + 1));
    }
    auto field = [&](const char* key) -> const std::string& {
        const auto it = fields.find(key);
        if (it == fields.end()) throw FormatError(std::string("archive line 1: missing ") + key + "=");
        return it->second;
    };
    ArchiveFile file;
    const std::uint64_t dims = detail::parse_count(field("K"), "archive line 1 K");
    const std::uint64_t count = detail::parse_count(field("N"), "archive line 1 N");
    if (dims == 0) throw FormatError("archive line 1: K must be positive");
    {
        std::string_view labels = field("labels");
        while (!labels.empty()) {
            const auto comma = labels.find(',');
            file.header.labels.emplace_back(labels.substr(0, comma));
            if (comma == std::string_view::npos) break;
            labels.remove_prefix(comma + 1);
        }
        if (file.header.labels.size() != dims)
            throw FormatError("archive line 1: " + std::to_string(file.header.labels.size()) + " labels for K=" +
                              std::to_string(dims));
    }
    if (fields.count("alg")) file.header.algorithm = fields["alg"];
    if (fields.count("I")) file.header.total_points = detail::parse_count(fields["I"], "archive line 1 I");
    if (fields.count("J")) file.header.threads = detail::parse_count(fields["J"], "archive line 1 J");
    if (fields.count("S")) file.header.stage_size = detail::parse_count(fields["S"], "archive line 1 S");
    if (fields.count("proximity")) file.header.proximity = detail::parse_double(fields["proximity"], "archive line 1 proximity");
    if (fields.count("seed")) file.header.seed = detail::parse_count(fields["seed"], "archive line 1 seed");

    std::vector<Point> points;
    points.reserve(count);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        const std::string where = "archive line " + std::to_string(line_no);
        if (tok.size() != dims)
            throw FormatError(where + ": " + std::to_string(tok.size()) + " values, expected " + std::to_string(dims));
        Point p;
        p.reserve(dims);
        for (auto t : tok) {
            p.push_back(detail::parse_double(t, where));
            if (!std::isfinite(p.back())) throw FormatError(where + ": non-finite value");
        }
        points.push_back(std::move(p));
    }
    if (points.size() != count)
        throw FormatError("archive: header declares " + std::to_string(count) + " points but " +
                          std::to_string(points.size()) + " were read");
    file.archive = Archive::make(std::move(points));
    if (count == 0) file.archive = Archive(dims);
    return file;
}

inline ArchiveFile load_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_archive(ss.str());
}

/// Writes to a temporary file and renames it into place, so readers never
/// see a half-written archive.
inline void save_archive(const Archive& archive, const ArchiveHeader& header, const std::string& path) {
    const std::string text = serialize_archive(archive, header);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write '" + tmp + "'");
        out << text;
        out.flush();
        if (!out) throw FormatError("write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw FormatError("cannot replace '" + path + "'");
}

}  // namespace casemix::io
