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

#ifndef FERIVER_ERROR_H_
#define FERIVER_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace feriver {

enum class ErrorCode {
  // core-isa
  kIllegalInstruction,
  kImmediateOutOfRange,
  kInvalidField,
  kMisalignedAccess,
  kMisalignedJump,
  kOutOfImage,
  kHalted,
  // backends / workloads
  kEmptyImage,
  kInvalidFault,
  kParseError,
  kMisalignedDirective,
  // pcap
  kFieldOutOfRange,
  kReservedBitsSet,
  kInvalidBlockType,
  kEndOfRow,
  kTooManyFrames,
  kInvalidRequest,
  kMissingFrame,
  kMarkerNotFound,
  kMarkerAmbiguous,
  kLayoutOverflow,
  kMarkerCheckFailed,
  kLengthMismatch,
  // arbiter
  kOutOfOrderSubmission,
  kDuplicateIndex,
  kIncompleteRendezvous,
  // reconstructor
  kSchemaViolation,
  kNonReproducibleSession,
  // harness
  kUncalibratedModel,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All fatal diagnostics raised by the library. The message is prefixed with
// the code name so a bare what() is enough for CLI reporting.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // The message without the code-name prefix.
  const std::string& detail() const { return detail_; }

  // Same code, message prefixed with `context` (e.g. "strobe 12").
  Error WithContext(const std::string& context) const;

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace feriver

#endif  // FERIVER_ERROR_H_
