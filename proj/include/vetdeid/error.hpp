// Copyright 2026 The vetdeid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VETDEID_ERROR_HPP_
#define VETDEID_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vetdeid {

enum class ErrorCode {
  // corpus
  kMalformedLine,
  kUnknownLabel,
  kOutOfBounds,
  kSurfaceMismatch,
  kOverlappingSpans,
  kDuplicateId,
  kProvenanceConflict,
  kIo,
  // templating
  kUnknownPlaceholder,
  kMalformedPlaceholder,
  kDuplicatePlaceholder,
  kIdentifierLikeContent,
  kLengthOutOfRange,
  kPoolExhausted,
  kMissingRole,
  // mixtures
  kInvalidSpec,
  kInsufficientPool,
  kInsufficientReal,
  kEmptySource,
  // metrics
  kLengthMismatch,
  kUnknownDocId,
  kEmptyInput,
  // diagnostics
  kEmptyCorpus,
  kNoPiiNotes,
  // tagger / config
  kGazetteerConflict,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries a machine-readable code plus
// optional location context (source line, document id).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  const std::optional<std::size_t>& line() const { return line_; }
  const std::optional<std::string>& doc_id() const { return doc_id_; }

  Error& with_line(std::size_t line) {
    line_ = line;
    return *this;
  }
  Error& with_doc(std::string id) {
    doc_id_ = std::move(id);
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::optional<std::string> doc_id_;
};

}  // namespace vetdeid

#endif  // VETDEID_ERROR_HPP_
