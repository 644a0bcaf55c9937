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

#ifndef FERIVER_TESTS_TEST_UTIL_H_
#define FERIVER_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>

#include "feriver/isa.h"
#include "feriver/workloads.h"

namespace feriver::testing {

inline uint32_t Below(std::mt19937_64& rng, uint32_t n) {
  return static_cast<uint32_t>(rng() % n);
}

inline int32_t RandomSigned(std::mt19937_64& rng, int bits) {
  const int32_t lo = -(1 << (bits - 1));
  switch (Below(rng, 5)) {
    case 0: return lo;
    case 1: return -lo - 1;
    case 2: return 0;
    case 3: return -1;
    default: return lo + static_cast<int32_t>(Below(rng, 1u << bits));
  }
}

inline uint8_t RandomReg(std::mt19937_64& rng) {
  return static_cast<uint8_t>(Below(rng, kNumRegs));
}

// A random valid instruction in canonical form (unused fields zero).
inline DecodedInstr RandomInstr(std::mt19937_64& rng) {
  DecodedInstr d;
  d.op = static_cast<Opcode>(Below(rng, kNumOpcodes));
  switch (FormatOf(d.op)) {
    case Format::kR:
      d.rd = RandomReg(rng); d.rs1 = RandomReg(rng); d.rs2 = RandomReg(rng);
      break;
    case Format::kI:
    case Format::kFence:
      d.rd = RandomReg(rng); d.rs1 = RandomReg(rng);
      d.imm = RandomSigned(rng, 12);
      break;
    case Format::kShift:
      d.rd = RandomReg(rng); d.rs1 = RandomReg(rng);
      d.imm = static_cast<int32_t>(Below(rng, 32));
      break;
    case Format::kS:
      d.rs1 = RandomReg(rng); d.rs2 = RandomReg(rng);
      d.imm = RandomSigned(rng, 12);
      break;
    case Format::kB:
      d.rs1 = RandomReg(rng); d.rs2 = RandomReg(rng);
      d.imm = RandomSigned(rng, 13) & ~1;
      break;
    case Format::kU:
      d.rd = RandomReg(rng);
      d.imm = static_cast<int32_t>(static_cast<uint32_t>(rng()) & 0xfffff000u);
      break;
    case Format::kJ:
      d.rd = RandomReg(rng);
      d.imm = RandomSigned(rng, 21) & ~1;
      break;
    case Format::kSystem:
      break;
  }
  return d;
}

// A random terminating program: ALU operations, word loads/stores through a
// data pointer held in x31, and short forward branches, ending in EBREAK.
// Never traps on a correct core.
inline MemImage RandomProgram(std::mt19937_64& rng, int length) {
  ProgramBuilder b;
  auto data = b.AddData(std::vector<Word>(64, 0x9e3779b9u));
  b.La(31, data);
  struct Pending {
    ProgramBuilder::Label label;
    int remaining;
  };
  std::vector<Pending> pending;
  auto reg = [&] { return static_cast<int>(Below(rng, 31)); };  // never x31
  static const Opcode kAlu[] = {Opcode::kAdd, Opcode::kSub, Opcode::kSll, Opcode::kSlt,
                                Opcode::kSltu, Opcode::kXor, Opcode::kSrl, Opcode::kSra,
                                Opcode::kOr, Opcode::kAnd};
  static const Opcode kImm[] = {Opcode::kAddi, Opcode::kSlti, Opcode::kSltiu,
                                Opcode::kXori, Opcode::kOri, Opcode::kAndi};
  static const Opcode kShift[] = {Opcode::kSlli, Opcode::kSrli, Opcode::kSrai};
  static const Opcode kBranch[] = {Opcode::kBeq, Opcode::kBne, Opcode::kBlt,
                                   Opcode::kBge, Opcode::kBltu, Opcode::kBgeu};
  for (int i = 0; i < length; ++i) {
    switch (Below(rng, 8)) {
      case 0: case 1:
        b.R(kAlu[Below(rng, 10)], reg(), reg(), reg());
        break;
      case 2: case 3:
        b.I(kImm[Below(rng, 6)], reg(), reg(), RandomSigned(rng, 12));
        break;
      case 4:
        b.I(kShift[Below(rng, 3)], reg(), reg(), static_cast<int32_t>(Below(rng, 32)));
        break;
      case 5:
        b.Emit({.op = Below(rng, 2) ? Opcode::kLui : Opcode::kAuipc,
                .rd = static_cast<uint8_t>(reg()),
                .imm = static_cast<int32_t>(static_cast<uint32_t>(rng()) & 0xfffff000u)});
        break;
      case 6:
        if (Below(rng, 2)) {
          b.Load(Opcode::kLw, reg(), 4 * static_cast<int32_t>(Below(rng, 64)), 31);
        } else {
          b.Store(Opcode::kSw, reg(), 4 * static_cast<int32_t>(Below(rng, 64)), 31);
        }
        break;
      default: {
        auto target = b.NewLabel();
        b.Branch(kBranch[Below(rng, 6)], reg(), reg(), target);
        pending.push_back({target, 1 + static_cast<int>(Below(rng, 3))});
        break;
      }
    }
    for (auto it = pending.begin(); it != pending.end();) {
      if (--it->remaining == 0) {
        b.Bind(it->label);
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const Pending& p : pending) b.Bind(p.label);
  b.Ebreak();
  return b.Build();
}

}  // namespace feriver::testing

#endif  // FERIVER_TESTS_TEST_UTIL_H_
