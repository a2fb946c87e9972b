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

#include "leckg/error.hpp"

namespace leckg {

std::string_view name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kIntegrity: return "IntegrityError";
    case ErrorKind::kUnknownCategory: return "UnknownCategory";
    case ErrorKind::kUnknownRelation: return "UnknownRelation";
    case ErrorKind::kUnknownEntity: return "UnknownEntity";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kPromptConfig: return "PromptConfigError";
    case ErrorKind::kTransport: return "TransportError";
    case ErrorKind::kAuth: return "AuthError";
    case ErrorKind::kRateLimited: return "RateLimited";
    case ErrorKind::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::kInsufficientEntities: return "InsufficientEntities";
    case ErrorKind::kShape: return "ShapeError";
    case ErrorKind::kEmptyScores: return "EmptyScores";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kEmptySeed: return "EmptySeed";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kUsage: return "UsageError";
  }
  return "Error";
}

}  // namespace leckg
