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

#ifndef FERIVER_CHECKPOINT_H_
#define FERIVER_CHECKPOINT_H_

// The record emitted for every register-state mismatch, and its canonical
// JSON form (checkpoint_<id>.json).

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "feriver/isa.h"

namespace feriver {

using GprSet = std::array<Word, kNumObservedRegs>;  // x1..x31

struct Checkpoint {
  uint64_t checkpoint_id = 0;
  uint64_t strobe_index = 0;
  Word pc = 0;  // golden pc of the last instruction before the boundary
  std::string mnemonic;
  GprSet gpr_bitstream{};  // DUT, as read back from the frames
  GprSet gpr_iss{};        // golden model
  std::vector<int> mismatched;  // register numbers, ascending
  Word dut_pc_raw = 0;          // DUT pc of its last instruction (auxiliary)

  bool operator==(const Checkpoint&) const = default;

  // Throws kSchemaViolation unless `mismatched` is exactly the (non-empty)
  // set of differing registers in ascending order.
  void Validate() const;
};

// "x1".."x31".
std::string RegName(int reg);
// Registers whose values differ, ascending.
std::vector<int> MismatchedRegs(const GprSet& a, const GprSet& b);

// Canonical JSON: fixed key order, "0x%08x" words, registers keyed x1..x31,
// two-space indentation, trailing newline. Validates first.
std::string SerializeCheckpoint(const Checkpoint& cp);

// Inverse of SerializeCheckpoint. Throws kSchemaViolation on malformed JSON,
// missing or unknown keys, bad hex, or an inconsistent mismatch list.
Checkpoint ParseCheckpoint(std::string_view text);

}  // namespace feriver

#endif  // FERIVER_CHECKPOINT_H_
