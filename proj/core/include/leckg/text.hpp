// Copyright 2026 The leckg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// UTF-8 and file helpers shared by every module. Offsets exposed by the
// library count Unicode scalar values, never bytes.

#ifndef LECKG_TEXT_HPP_
#define LECKG_TEXT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace leckg::text {

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view scalars);
std::string encode(char32_t scalar);

/// Number of Unicode scalar values in `utf8`.
std::size_t length(std::string_view utf8);

/// Byte offsets of every scalar boundary, including the end (size n+1).
std::vector<std::size_t> boundaries(std::string_view utf8);

std::string nfc(std::string_view utf8);
bool is_space(char32_t c);
std::string trim(std::string_view utf8);

/// Scalar offset of the first occurrence of `needle` at or after scalar
/// offset `from`, or npos. Both arguments are UTF-8.
std::size_t find(std::string_view haystack, std::string_view needle, std::size_t from = 0);

bool contains(std::string_view haystack, std::string_view needle);

/// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Parses a JSON document, mapping syntax errors to ErrorKind::kParse.
nlohmann::json parse_json(std::string_view content, std::string_view origin);
nlohmann::json read_json(const std::filesystem::path& path);

/// One JSON value per non-blank line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

std::string sha256_hex(std::string_view bytes);

}  // namespace leckg::text

#endif  // LECKG_TEXT_HPP_
