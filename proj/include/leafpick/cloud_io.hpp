#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "leafpick/cloud.hpp"

namespace leafpick {

enum class CloudFormat { pcd_ascii, pcd_binary, ply_ascii, ply_binary };
enum class FormatHint { pcd, ply, auto_detect };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed header or body; byte_offset points at the offending data.
struct FormatError : IoError {
    FormatError(const std::string& msg, std::size_t offset)
        : IoError(msg + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

struct UnsupportedFormatError : IoError {
    using IoError::IoError;
};

/// Body shorter than the header promised.
struct TruncationError : IoError {
    TruncationError(std::size_t expected_pts, std::size_t found_pts)
        : IoError("truncated body: expected " + std::to_string(expected_pts) +
                  " points, found " + std::to_string(found_pts)),
          expected(expected_pts), found(found_pts) {}
    std::size_t expected;
    std::size_t found;
};

struct ParseResult {
    PointCloud cloud;
    std::size_t dropped_non_finite = 0;  // NaN/Inf points removed on ingest
};

/// Parses PCD v0.7 or PLY (ascii / binary_little_endian). Points with any
/// non-finite coordinate are dropped and counted, never stored.
ParseResult parse_cloud(const std::vector<std::byte>& bytes,
                        FormatHint hint = FormatHint::auto_detect);

/// Serializes a cloud; binary bodies are little-endian 32-bit floats.
/// parse_cloud(write_cloud(c, f)) reproduces the float32-quantized
/// coordinates bit-exactly for the binary formats.
std::vector<std::byte> write_cloud(const PointCloud& cloud, CloudFormat format);

ParseResult load_cloud_file(const std::string& path,
                            FormatHint hint = FormatHint::auto_detect);
void save_cloud_file(const std::string& path, const PointCloud& cloud,
                     CloudFormat format);

}  // namespace leafpick
