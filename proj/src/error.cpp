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

#include "vetdeid/error.hpp"

namespace vetdeid {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kSurfaceMismatch: return "SurfaceMismatch";
    case ErrorCode::kOverlappingSpans: return "OverlappingSpans";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kProvenanceConflict: return "ProvenanceConflict";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::kMalformedPlaceholder: return "MalformedPlaceholder";
    case ErrorCode::kDuplicatePlaceholder: return "DuplicatePlaceholder";
    case ErrorCode::kIdentifierLikeContent: return "IdentifierLikeContent";
    case ErrorCode::kLengthOutOfRange: return "LengthOutOfRange";
    case ErrorCode::kPoolExhausted: return "PoolExhausted";
    case ErrorCode::kMissingRole: return "MissingRole";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInsufficientPool: return "InsufficientPool";
    case ErrorCode::kInsufficientReal: return "InsufficientReal";
    case ErrorCode::kEmptySource: return "EmptySource";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownDocId: return "UnknownDocId";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kNoPiiNotes: return "NoPiiNotes";
    case ErrorCode::kGazetteerConflict: return "GazetteerConflict";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace vetdeid
