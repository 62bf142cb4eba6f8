#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dataprog {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs, then renames over `path`, so a crash
// leaves either the old or the new content, never a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Appends one line (newline added) and fsyncs. Used for append-only logs.
void append_line_durable(const std::filesystem::path& path, std::string_view line);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace dataprog
