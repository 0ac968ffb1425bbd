// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptctl {

// Locale-independent number formatting (std::to_chars shortest round-trip).
// Every file this project writes goes through these two functions so that
// identical inputs produce byte-identical artifacts.
std::string format_double(double value);
std::string format_int(std::int64_t value);

std::optional<double> try_parse_double(std::string_view text);
std::optional<std::int64_t> try_parse_int(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split_tokens(std::string_view line);
std::string_view trim(std::string_view text);

// FNV-1a 64-bit, hex encoded; used for dataset provenance hashes.
std::string fnv1a64_hex(std::string_view bytes);

// Every persistent artifact starts with "# adaptctl <kind> v1".
std::string artifact_header(std::string_view kind);

struct TextFileLine {
  std::size_t number;  // 1-based line number in the file
  std::string text;
};

// Reads an artifact file, validates its header line against `expected_kind`,
// and returns the remaining non-empty, non-comment lines.
std::vector<TextFileLine> read_artifact_lines(const std::filesystem::path& path,
                                              std::string_view expected_kind);

// Header check on already-loaded content (first line). Throws IoError on
// kind or version mismatch.
void check_artifact_header(std::string_view first_line, std::string_view expected_kind,
                           const std::filesystem::path& path);

// The <kind> token of a file's header line, e.g. "dataset-enactor".
std::string artifact_kind(const std::filesystem::path& path);

}  // namespace adaptctl
