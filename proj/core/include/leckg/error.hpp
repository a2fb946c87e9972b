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

#ifndef LECKG_ERROR_HPP_
#define LECKG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace leckg {

/// Machine-readable failure category. The CLI prints `name(kind)` so callers
/// can dispatch on it without parsing messages.
enum class ErrorKind {
  kParse,
  kIntegrity,
  kUnknownCategory,
  kUnknownRelation,
  kUnknownEntity,
  kInvalidParams,
  kPromptConfig,
  kTransport,
  kAuth,
  kRateLimited,
  kEmptyTrainingSet,
  kInsufficientEntities,
  kShape,
  kEmptyScores,
  kEmptyInput,
  kEmptySeed,
  kIo,
  kUsage,
};

std::string_view name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace leckg

#endif  // LECKG_ERROR_HPP_
