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

// Section-tagged binary container shared by model and alignment files.
//
//   "LECKGCK1" | u32 version | u32 section count |
//   repeated { 4-byte tag | u64 payload length | payload }
//
// All integers and floats are little-endian; floats are IEEE-754 binary64.

#ifndef LECKG_CHECKPOINT_HPP_
#define LECKG_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace leckg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class ByteWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void f64s(const std::vector<double>& values);
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

/// Throws Error{kParse} on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : buf_(bytes) {}
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s();
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::string_view take(std::size_t n);
  std::string_view buf_;
  std::size_t pos_ = 0;
};

class Checkpoint {
 public:
  /// Tags are exactly four bytes.
  void put(const std::string& tag, std::string payload);
  bool has(const std::string& tag) const { return sections_.contains(tag); }
  /// Throws Error{kParse} when the section is missing.
  const std::string& get(const std::string& tag) const;
  const std::map<std::string, std::string>& sections() const { return sections_; }

  std::string serialize() const;
  static Checkpoint deserialize(std::string_view bytes);

  void write(const std::filesystem::path& path) const;
  static Checkpoint read(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> sections_;
};

}  // namespace leckg

#endif  // LECKG_CHECKPOINT_HPP_
