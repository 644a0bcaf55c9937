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

#ifndef FERIVER_ISA_H_
#define FERIVER_ISA_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace feriver {

// A 32-bit register or instruction value. Arithmetic wraps modulo 2^32;
// signed views are two's complement.
using Word = uint32_t;

inline constexpr int kNumRegs = 32;
// Registers observed by the verification flow: x1..x31 (x0 is hardwired).
inline constexpr int kNumObservedRegs = 31;

enum class Opcode : uint8_t {
  kLui, kAuipc, kJal, kJalr,
  kBeq, kBne, kBlt, kBge, kBltu, kBgeu,
  kLb, kLh, kLw, kLbu, kLhu,
  kSb, kSh, kSw,
  kAddi, kSlti, kSltiu, kXori, kOri, kAndi, kSlli, kSrli, kSrai,
  kAdd, kSub, kSll, kSlt, kSltu, kXor, kSrl, kSra, kOr, kAnd,
  kFence, kEcall, kEbreak,
};

inline constexpr int kNumOpcodes = static_cast<int>(Opcode::kEbreak) + 1;

std::string_view OpcodeName(Opcode op);

enum class Format : uint8_t { kR, kI, kShift, kS, kB, kU, kJ, kFence, kSystem };

Format FormatOf(Opcode op);

// True for instructions that architecturally write rd.
bool WritesRd(Opcode op);

// One decoded RV32I instruction. Fields an encoding does not use are zero.
// imm is the assembled, sign-extended immediate (B/J already scaled, U already
// shifted left by 12, shifts hold the shift amount).
struct DecodedInstr {
  Opcode op = Opcode::kAddi;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  int32_t imm = 0;
  Word raw = 0;

  bool operator==(const DecodedInstr&) const = default;
};

// Throws Error(kIllegalInstruction) for words outside the RV32I base set
// (FENCE, ECALL and EBREAK included).
DecodedInstr Decode(Word word);

// Exact inverse of Decode on valid instructions; instr.raw is ignored.
// Throws kInvalidField or kImmediateOutOfRange.
Word Encode(const DecodedInstr& instr);

// Lower-case mnemonic with numeric register names, e.g. "addi x1, x0, 5".
// Total: undecodable words render as "illegal(0x........)".
std::string Disassemble(Word word);

// "0x%08x".
std::string HexWord(Word w);

// Flat byte-addressable memory covering [base, base + size). The bounds are
// fixed when the image is loaded.
class Memory {
 public:
  Memory() = default;
  Memory(Word base, std::span<const Word> words);

  Word base() const { return base_; }
  uint32_t size() const { return static_cast<uint32_t>(bytes_.size()); }
  bool Contains(Word addr, uint32_t len) const;

  uint32_t Load(Word addr, int bytes) const;
  void Store(Word addr, int bytes, uint32_t value);
  Word LoadWord(Word addr) const { return Load(addr, 4); }

  bool operator==(const Memory&) const = default;

 private:
  Word base_ = 0;
  std::vector<uint8_t> bytes_;
};

struct ArchState {
  Word pc = 0;
  std::array<Word, kNumRegs> regs{};
  Memory mem;
  uint64_t retired = 0;
  bool halted = false;

  bool operator==(const ArchState&) const = default;
};

// What Step() retired.
struct Retirement {
  Word pc = 0;
  DecodedInstr instr;
  bool wrote_rd = false;
};

// Executes one already-decoded instruction in place. Throws kHalted,
// kMisalignedAccess, kMisalignedJump or kOutOfImage; state is untouched when
// an error is thrown.
Retirement Step(ArchState& state, const DecodedInstr& instr);

// Fetches the word at state.pc, decodes and executes it.
Retirement StepFetch(ArchState& state);

// Value-semantics form of Step.
ArchState Execute(ArchState state, const DecodedInstr& instr);

}  // namespace feriver

#endif  // FERIVER_ISA_H_
