// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"
#include "support/temp_dir.hpp"

using namespace adaptctl;
using testsupport::TempDir;

TEST_CASE("format_double survives a parse round trip") {
  // shortest round-trip formatting must reproduce the exact bits
  std::mt19937_64 gen(42);
  for (int i = 0; i < 2000; ++i) {
    double magnitude = std::ldexp(1.0, static_cast<int>(gen() % 64) - 32);
    double value = magnitude * (static_cast<double>(gen()) / 1e19 - 0.9);
    auto text = format_double(value);
    auto back = try_parse_double(text);
    REQUIRE(back.has_value());
    CHECK(*back == value);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.95) == "0.95");
  CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("format_int round trips across the integer range") {
  CHECK(format_int(0) == "0");
  CHECK(format_int(-7) == "-7");
  CHECK(format_int(std::numeric_limits<std::int64_t>::max()) == "9223372036854775807");
  CHECK(try_parse_int("9223372036854775807") == std::numeric_limits<std::int64_t>::max());
}

TEST_CASE("try_parse rejects trailing junk and garbage") {
  CHECK(!try_parse_double("1.5x").has_value());
  CHECK(!try_parse_double("").has_value());
  CHECK(!try_parse_double("nanx").has_value());
  CHECK(!try_parse_int("12.5").has_value());
  CHECK(!try_parse_int("abc").has_value());
  CHECK(try_parse_double("-0.125") == -0.125);
  CHECK(try_parse_int("-42") == -42);
}

TEST_CASE("split_tokens handles mixed whitespace") {
  auto tokens = split_tokens("  a\tb   c\r");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "a");
  CHECK(tokens[1] == "b");
  CHECK(tokens[2] == "c");
  CHECK(split_tokens("").empty());
  CHECK(split_tokens("   \t  ").empty());
}

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  x y \r\n") == "x y");
  CHECK(trim("") == "");
  CHECK(trim(" \t ") == "");
}

TEST_CASE("fnv1a64 matches published vectors") {
  // reference values for the 64-bit FNV-1a parameters
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a64_hex("hello") != fnv1a64_hex("hellp"));
}

TEST_CASE("text files write and read back exactly") {
  TempDir dir("textio");
  auto path = dir.file("nested/sub/out.txt");
  std::string content = "line1\nline2 with spaces\n# comment\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);

  CHECK_THROWS_AS(read_text_file(dir.file("missing.txt")), IoError);
  try {
    read_text_file(dir.file("missing.txt"));
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.txt") != std::string::npos);
  }
}

TEST_CASE("artifact headers are validated on read") {
  TempDir dir("artifact");
  auto path = dir.file("thing.txt");
  write_text_file(path, artifact_header("scenario") + "\nkey value\n# note\n");

  CHECK(artifact_kind(path) == "scenario");
  auto lines = read_artifact_lines(path, "scenario");
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].text == "key value");
  CHECK(lines[0].number == 3);

  CHECK_THROWS_AS(read_artifact_lines(path, "goals"), IoError);
  try {
    read_artifact_lines(path, "goals");
  } catch (const IoError& e) {
    std::string msg = e.what();
    CHECK(msg.find("scenario") != std::string::npos);
    CHECK(msg.find("goals") != std::string::npos);
  }

  write_text_file(path, "no header here\n");
  CHECK_THROWS_AS(artifact_kind(path), IoError);
  CHECK_THROWS_AS(read_artifact_lines(path, "scenario"), IoError);

  write_text_file(path, "# adaptctl scenario v9\n");
  CHECK_THROWS_AS(read_artifact_lines(path, "scenario"), IoError);
}

TEST_CASE("read_artifact_lines skips blanks and comments, keeps numbering") {
  TempDir dir("lines");
  auto path = dir.file("data.txt");
  write_text_file(path, artifact_header("goals") + "\n# comment\nfirst\n\n  second  \n");
  auto lines = read_artifact_lines(path, "goals");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].text == "first");
  CHECK(lines[0].number == 4);
  CHECK(lines[1].text == "second");
  CHECK(lines[1].number == 6);
}
