// Copyright 2026 The FERIVer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "feriver/error.h"

#include <string>

namespace feriver {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIllegalInstruction: return "IllegalInstruction";
    case ErrorCode::kImmediateOutOfRange: return "ImmediateOutOfRange";
    case ErrorCode::kInvalidField: return "InvalidField";
    case ErrorCode::kMisalignedAccess: return "MisalignedAccess";
    case ErrorCode::kMisalignedJump: return "MisalignedJump";
    case ErrorCode::kOutOfImage: return "OutOfImage";
    case ErrorCode::kHalted: return "Halted";
    case ErrorCode::kEmptyImage: return "EmptyImage";
    case ErrorCode::kInvalidFault: return "InvalidFault";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMisalignedDirective: return "MisalignedDirective";
    case ErrorCode::kFieldOutOfRange: return "FieldOutOfRange";
    case ErrorCode::kReservedBitsSet: return "ReservedBitsSet";
    case ErrorCode::kInvalidBlockType: return "InvalidBlockType";
    case ErrorCode::kEndOfRow: return "EndOfRow";
    case ErrorCode::kTooManyFrames: return "TooManyFrames";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kMissingFrame: return "MissingFrame";
    case ErrorCode::kMarkerNotFound: return "MarkerNotFound";
    case ErrorCode::kMarkerAmbiguous: return "MarkerAmbiguous";
    case ErrorCode::kLayoutOverflow: return "LayoutOverflow";
    case ErrorCode::kMarkerCheckFailed: return "MarkerCheckFailed";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOutOfOrderSubmission: return "OutOfOrderSubmission";
    case ErrorCode::kDuplicateIndex: return "DuplicateIndex";
    case ErrorCode::kIncompleteRendezvous: return "IncompleteRendezvous";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kNonReproducibleSession: return "NonReproducibleSession";
    case ErrorCode::kUncalibratedModel: return "UncalibratedModel";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      detail_(message) {}

Error Error::WithContext(const std::string& context) const {
  return Error(code_, context + ": " + detail_);
}

}  // namespace feriver
