// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/textio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "adaptctl/errors.hpp"

namespace adaptctl {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> try_parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

std::optional<std::int64_t> try_parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading file: " + path.string());
  return std::move(buffer).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory: " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error while writing file: " + path.string());
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t' || text[begin] == '\r' ||
                         text[begin] == '\n'))
    ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' || text[end - 1] == '\r' ||
                         text[end - 1] == '\n'))
    --end;
  return text.substr(begin, end - begin);
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::string artifact_header(std::string_view kind) {
  return "# adaptctl " + std::string(kind) + " v1\n";
}

void check_artifact_header(std::string_view first_line, std::string_view expected_kind,
                           const std::filesystem::path& path) {
  auto tokens = split_tokens(first_line);
  if (tokens.size() != 4 || tokens[0] != "#" || tokens[1] != "adaptctl")
    throw IoError("missing adaptctl header in " + path.string());
  if (tokens[2] != expected_kind)
    throw IoError(path.string() + " holds a '" + tokens[2] + "' artifact, expected '" +
                  std::string(expected_kind) + "'");
  if (tokens[3] != "v1")
    throw IoError("unsupported " + std::string(expected_kind) + " version '" + tokens[3] +
                  "' in " + path.string());
}

std::string artifact_kind(const std::filesystem::path& path) {
  std::string content = read_text_file(path);
  std::size_t eol = content.find('\n');
  auto tokens = split_tokens(
      std::string_view(content).substr(0, eol == std::string::npos ? content.size() : eol));
  if (tokens.size() != 4 || tokens[0] != "#" || tokens[1] != "adaptctl")
    throw IoError("missing adaptctl header in " + path.string());
  return tokens[2];
}

std::vector<TextFileLine> read_artifact_lines(const std::filesystem::path& path,
                                              std::string_view expected_kind) {
  std::string content = read_text_file(path);
  std::vector<TextFileLine> lines;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view raw(content.data() + pos,
                         (eol == std::string::npos ? content.size() : eol) - pos);
    ++lineno;
    pos = (eol == std::string::npos) ? content.size() + 1 : eol + 1;
    std::string_view line = trim(raw);
    if (lineno == 1) {
      check_artifact_header(line, expected_kind, path);
      header_seen = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    lines.push_back({lineno, std::string(line)});
  }
  if (!header_seen) throw IoError("missing adaptctl header in " + path.string());
  return lines;
}

}  // namespace adaptctl
