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

#include "leckg/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "leckg/error.hpp"
#include "leckg/text.hpp"

namespace leckg {

namespace {

constexpr std::string_view kMagic = "LECKGCK1";

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return v;
}

}  // namespace

void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void ByteWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void ByteWriter::f64s(const std::vector<double>& values) {
  u64(values.size());
  for (double v : values) f64(v);
}

std::string_view ByteReader::take(std::size_t n) {
  if (buf_.size() - pos_ < n) throw Error(ErrorKind::kParse, "checkpoint payload truncated");
  const auto out = buf_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint32_t ByteReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t ByteReader::u64() { return get_le<std::uint64_t>(take(8)); }
double ByteReader::f64() { return std::bit_cast<double>(get_le<std::uint64_t>(take(8))); }

std::string ByteReader::str() {
  const auto n = u64();
  return std::string(take(n));
}

std::vector<double> ByteReader::f64s() {
  const auto n = u64();
  if (n > (buf_.size() - pos_) / 8) throw Error(ErrorKind::kParse, "checkpoint array length exceeds payload");
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

void Checkpoint::put(const std::string& tag, std::string payload) {
  if (tag.size() != 4) throw Error(ErrorKind::kInvalidParams, "checkpoint tag must be 4 bytes: '" + tag + "'");
  sections_[tag] = std::move(payload);
}

const std::string& Checkpoint::get(const std::string& tag) const {
  const auto it = sections_.find(tag);
  if (it == sections_.end()) throw Error(ErrorKind::kParse, "checkpoint lacks section '" + tag + "'");
  return it->second;
}

std::string Checkpoint::serialize() const {
  std::string out(kMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sections_.size()));
  for (const auto& [tag, payload] : sections_) {
    out += tag;
    put_le<std::uint64_t>(out, payload.size());
    out += payload;
  }
  return out;
}

Checkpoint Checkpoint::deserialize(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw Error(ErrorKind::kParse, "not a leckg checkpoint");
  ByteReader r(bytes.substr(kMagic.size()));
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kParse, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  const auto count = r.u32();
  std::size_t pos = kMagic.size() + 8;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (bytes.size() < pos + 12) throw Error(ErrorKind::kParse, "checkpoint section header truncated");
    std::string tag(bytes.substr(pos, 4));
    const auto len = get_le<std::uint64_t>(bytes.substr(pos + 4, 8));
    pos += 12;
    if (bytes.size() - pos < len) throw Error(ErrorKind::kParse, "checkpoint section '" + tag + "' truncated");
    ck.sections_[tag] = std::string(bytes.substr(pos, len));
    pos += len;
  }
  if (pos != bytes.size()) throw Error(ErrorKind::kParse, "trailing bytes after checkpoint sections");
  return ck;
}

void Checkpoint::write(const std::filesystem::path& path) const { text::write_file(path, serialize()); }

Checkpoint Checkpoint::read(const std::filesystem::path& path) { return deserialize(text::read_file(path)); }

}  // namespace leckg
