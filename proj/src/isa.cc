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

#include "feriver/isa.h"

#include <cstdio>
#include <string>

#include "feriver/error.h"

namespace feriver {
namespace {

constexpr uint32_t kOpLui = 0x37;
constexpr uint32_t kOpAuipc = 0x17;
constexpr uint32_t kOpJal = 0x6f;
constexpr uint32_t kOpJalr = 0x67;
constexpr uint32_t kOpBranch = 0x63;
constexpr uint32_t kOpLoad = 0x03;
constexpr uint32_t kOpStore = 0x23;
constexpr uint32_t kOpImm = 0x13;
constexpr uint32_t kOpReg = 0x33;
constexpr uint32_t kOpMiscMem = 0x0f;
constexpr uint32_t kOpSystem = 0x73;

struct OpInfo {
  std::string_view name;
  Format format;
  uint32_t opcode;
  uint32_t funct3;
  uint32_t funct7;  // R-type and shifts only
};

constexpr std::array<OpInfo, kNumOpcodes> kOps = {{
    {"lui", Format::kU, kOpLui, 0, 0},
    {"auipc", Format::kU, kOpAuipc, 0, 0},
    {"jal", Format::kJ, kOpJal, 0, 0},
    {"jalr", Format::kI, kOpJalr, 0, 0},
    {"beq", Format::kB, kOpBranch, 0, 0},
    {"bne", Format::kB, kOpBranch, 1, 0},
    {"blt", Format::kB, kOpBranch, 4, 0},
    {"bge", Format::kB, kOpBranch, 5, 0},
    {"bltu", Format::kB, kOpBranch, 6, 0},
    {"bgeu", Format::kB, kOpBranch, 7, 0},
    {"lb", Format::kI, kOpLoad, 0, 0},
    {"lh", Format::kI, kOpLoad, 1, 0},
    {"lw", Format::kI, kOpLoad, 2, 0},
    {"lbu", Format::kI, kOpLoad, 4, 0},
    {"lhu", Format::kI, kOpLoad, 5, 0},
    {"sb", Format::kS, kOpStore, 0, 0},
    {"sh", Format::kS, kOpStore, 1, 0},
    {"sw", Format::kS, kOpStore, 2, 0},
    {"addi", Format::kI, kOpImm, 0, 0},
    {"slti", Format::kI, kOpImm, 2, 0},
    {"sltiu", Format::kI, kOpImm, 3, 0},
    {"xori", Format::kI, kOpImm, 4, 0},
    {"ori", Format::kI, kOpImm, 6, 0},
    {"andi", Format::kI, kOpImm, 7, 0},
    {"slli", Format::kShift, kOpImm, 1, 0x00},
    {"srli", Format::kShift, kOpImm, 5, 0x00},
    {"srai", Format::kShift, kOpImm, 5, 0x20},
    {"add", Format::kR, kOpReg, 0, 0x00},
    {"sub", Format::kR, kOpReg, 0, 0x20},
    {"sll", Format::kR, kOpReg, 1, 0x00},
    {"slt", Format::kR, kOpReg, 2, 0x00},
    {"sltu", Format::kR, kOpReg, 3, 0x00},
    {"xor", Format::kR, kOpReg, 4, 0x00},
    {"srl", Format::kR, kOpReg, 5, 0x00},
    {"sra", Format::kR, kOpReg, 5, 0x20},
    {"or", Format::kR, kOpReg, 6, 0x00},
    {"and", Format::kR, kOpReg, 7, 0x00},
    {"fence", Format::kFence, kOpMiscMem, 0, 0},
    {"ecall", Format::kSystem, kOpSystem, 0, 0},
    {"ebreak", Format::kSystem, kOpSystem, 0, 0},
}};

const OpInfo& Info(Opcode op) { return kOps[static_cast<size_t>(op)]; }

constexpr uint32_t Bits(uint32_t w, int hi, int lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr int32_t SignExtend(uint32_t value, int bits) {
  const uint32_t m = 1u << (bits - 1);
  return static_cast<int32_t>((value ^ m) - m);
}

int32_t ImmI(Word w) { return SignExtend(Bits(w, 31, 20), 12); }
int32_t ImmS(Word w) { return SignExtend(Bits(w, 31, 25) << 5 | Bits(w, 11, 7), 12); }
int32_t ImmB(Word w) {
  return SignExtend(Bits(w, 31, 31) << 12 | Bits(w, 7, 7) << 11 |
                        Bits(w, 30, 25) << 5 | Bits(w, 11, 8) << 1,
                    13);
}
int32_t ImmJ(Word w) {
  return SignExtend(Bits(w, 31, 31) << 20 | Bits(w, 19, 12) << 12 |
                        Bits(w, 20, 20) << 11 | Bits(w, 30, 21) << 1,
                    21);
}

[[noreturn]] void Illegal(Word w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", w);
  throw Error(ErrorCode::kIllegalInstruction, buf);
}

Opcode FindFunct3(Word w, uint32_t opcode, uint32_t funct3) {
  for (int i = 0; i < kNumOpcodes; ++i) {
    const OpInfo& info = kOps[i];
    if (info.opcode == opcode && info.funct3 == funct3 &&
        info.format != Format::kShift && info.format != Format::kR) {
      return static_cast<Opcode>(i);
    }
  }
  Illegal(w);
}

Opcode FindFunct7(Word w, uint32_t opcode, uint32_t funct3, uint32_t funct7) {
  for (int i = 0; i < kNumOpcodes; ++i) {
    const OpInfo& info = kOps[i];
    if (info.opcode == opcode && info.funct3 == funct3 &&
        info.funct7 == funct7 &&
        (info.format == Format::kShift || info.format == Format::kR)) {
      return static_cast<Opcode>(i);
    }
  }
  Illegal(w);
}

bool FitsSigned(int32_t v, int bits) {
  const int32_t lo = -(1 << (bits - 1));
  const int32_t hi = (1 << (bits - 1)) - 1;
  return v >= lo && v <= hi;
}

void CheckReg(uint8_t r) {
  if (r >= kNumRegs) {
    throw Error(ErrorCode::kInvalidField,
                "register index " + std::to_string(r) + " out of range");
  }
}

void RequireZero(uint8_t r, std::string_view field) {
  if (r != 0) {
    throw Error(ErrorCode::kInvalidField,
                std::string(field) + " is unused by this format and must be 0");
  }
}

[[noreturn]] void ImmRange(const DecodedInstr& in) {
  throw Error(ErrorCode::kImmediateOutOfRange,
              std::string(OpcodeName(in.op)) + " immediate " +
                  std::to_string(in.imm) + " not representable");
}

std::string Reg(int r) { return "x" + std::to_string(r); }

std::string FenceSet(uint32_t bits) {
  std::string s;
  if (bits & 8) s += 'i';
  if (bits & 4) s += 'o';
  if (bits & 2) s += 'r';
  if (bits & 1) s += 'w';
  return s;
}

}  // namespace

std::string HexWord(Word w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", w);
  return buf;
}

std::string_view OpcodeName(Opcode op) { return Info(op).name; }

Format FormatOf(Opcode op) { return Info(op).format; }

bool WritesRd(Opcode op) {
  switch (FormatOf(op)) {
    case Format::kS:
    case Format::kB:
    case Format::kFence:
    case Format::kSystem:
      return false;
    default:
      return true;
  }
}

DecodedInstr Decode(Word w) {
  DecodedInstr d;
  d.raw = w;
  const uint32_t opcode = Bits(w, 6, 0);
  const uint32_t funct3 = Bits(w, 14, 12);
  const uint8_t rd = static_cast<uint8_t>(Bits(w, 11, 7));
  const uint8_t rs1 = static_cast<uint8_t>(Bits(w, 19, 15));
  const uint8_t rs2 = static_cast<uint8_t>(Bits(w, 24, 20));
  switch (opcode) {
    case kOpLui:
    case kOpAuipc:
      d.op = opcode == kOpLui ? Opcode::kLui : Opcode::kAuipc;
      d.rd = rd;
      d.imm = static_cast<int32_t>(w & 0xfffff000u);
      return d;
    case kOpJal:
      d.op = Opcode::kJal;
      d.rd = rd;
      d.imm = ImmJ(w);
      return d;
    case kOpJalr:
      if (funct3 != 0) Illegal(w);
      d.op = Opcode::kJalr;
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = ImmI(w);
      return d;
    case kOpBranch:
      d.op = FindFunct3(w, opcode, funct3);
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = ImmB(w);
      return d;
    case kOpLoad:
      d.op = FindFunct3(w, opcode, funct3);
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = ImmI(w);
      return d;
    case kOpStore:
      d.op = FindFunct3(w, opcode, funct3);
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = ImmS(w);
      return d;
    case kOpImm:
      d.rd = rd;
      d.rs1 = rs1;
      if (funct3 == 1 || funct3 == 5) {
        d.op = FindFunct7(w, opcode, funct3, Bits(w, 31, 25));
        d.imm = static_cast<int32_t>(rs2);  // shamt
      } else {
        d.op = FindFunct3(w, opcode, funct3);
        d.imm = ImmI(w);
      }
      return d;
    case kOpReg:
      d.op = FindFunct7(w, opcode, funct3, Bits(w, 31, 25));
      d.rd = rd;
      d.rs1 = rs1;
      d.rs2 = rs2;
      return d;
    case kOpMiscMem:
      if (funct3 != 0) Illegal(w);  // FENCE.I is not part of the base ISA
      d.op = Opcode::kFence;
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = ImmI(w);
      return d;
    case kOpSystem:
      if (w == 0x00000073u) {
        d.op = Opcode::kEcall;
        return d;
      }
      if (w == 0x00100073u) {
        d.op = Opcode::kEbreak;
        return d;
      }
      Illegal(w);
    default:
      Illegal(w);
  }
}

Word Encode(const DecodedInstr& in) {
  if (static_cast<int>(in.op) >= kNumOpcodes) {
    throw Error(ErrorCode::kInvalidField, "unknown opcode");
  }
  const OpInfo& info = Info(in.op);
  CheckReg(in.rd);
  CheckReg(in.rs1);
  CheckReg(in.rs2);
  const uint32_t rd = uint32_t{in.rd} << 7;
  const uint32_t rs1 = uint32_t{in.rs1} << 15;
  const uint32_t rs2 = uint32_t{in.rs2} << 20;
  const uint32_t f3 = info.funct3 << 12;
  const uint32_t imm = static_cast<uint32_t>(in.imm);
  switch (info.format) {
    case Format::kR:
      if (in.imm != 0) ImmRange(in);
      return info.funct7 << 25 | rs2 | rs1 | f3 | rd | info.opcode;
    case Format::kI:
    case Format::kFence:
      RequireZero(in.rs2, "rs2");
      if (!FitsSigned(in.imm, 12)) ImmRange(in);
      return (imm & 0xfff) << 20 | rs1 | f3 | rd | info.opcode;
    case Format::kShift:
      RequireZero(in.rs2, "rs2");
      if (in.imm < 0 || in.imm > 31) ImmRange(in);
      return info.funct7 << 25 | imm << 20 | rs1 | f3 | rd | info.opcode;
    case Format::kS:
      RequireZero(in.rd, "rd");
      if (!FitsSigned(in.imm, 12)) ImmRange(in);
      return Bits(imm, 11, 5) << 25 | rs2 | rs1 | f3 | Bits(imm, 4, 0) << 7 |
             info.opcode;
    case Format::kB:
      RequireZero(in.rd, "rd");
      if (!FitsSigned(in.imm, 13) || (in.imm & 1) != 0) ImmRange(in);
      return Bits(imm, 12, 12) << 31 | Bits(imm, 10, 5) << 25 | rs2 | rs1 |
             f3 | Bits(imm, 4, 1) << 8 | Bits(imm, 11, 11) << 7 | info.opcode;
    case Format::kU:
      RequireZero(in.rs1, "rs1");
      RequireZero(in.rs2, "rs2");
      if ((imm & 0xfff) != 0) ImmRange(in);
      return imm | rd | info.opcode;
    case Format::kJ:
      RequireZero(in.rs1, "rs1");
      RequireZero(in.rs2, "rs2");
      if (!FitsSigned(in.imm, 21) || (in.imm & 1) != 0) ImmRange(in);
      return Bits(imm, 20, 20) << 31 | Bits(imm, 10, 1) << 21 |
             Bits(imm, 11, 11) << 20 | Bits(imm, 19, 12) << 12 | rd |
             info.opcode;
    case Format::kSystem:
      RequireZero(in.rd, "rd");
      RequireZero(in.rs1, "rs1");
      RequireZero(in.rs2, "rs2");
      if (in.imm != 0) ImmRange(in);
      return in.op == Opcode::kEcall ? 0x00000073u : 0x00100073u;
  }
  throw Error(ErrorCode::kInvalidField, "unknown format");
}

std::string Disassemble(Word word) {
  DecodedInstr d;
  try {
    d = Decode(word);
  } catch (const Error&) {
    return "illegal(" + HexWord(word) + ")";
  }
  const std::string name(OpcodeName(d.op));
  const std::string imm = std::to_string(d.imm);
  switch (FormatOf(d.op)) {
    case Format::kR:
      return name + " " + Reg(d.rd) + ", " + Reg(d.rs1) + ", " + Reg(d.rs2);
    case Format::kShift:
      return name + " " + Reg(d.rd) + ", " + Reg(d.rs1) + ", " + imm;
    case Format::kI:
      if (d.op == Opcode::kJalr || d.op <= Opcode::kLhu) {
        return name + " " + Reg(d.rd) + ", " + imm + "(" + Reg(d.rs1) + ")";
      }
      return name + " " + Reg(d.rd) + ", " + Reg(d.rs1) + ", " + imm;
    case Format::kS:
      return name + " " + Reg(d.rs2) + ", " + imm + "(" + Reg(d.rs1) + ")";
    case Format::kB:
      return name + " " + Reg(d.rs1) + ", " + Reg(d.rs2) + ", " + imm;
    case Format::kU:
      return name + " " + Reg(d.rd) + ", " +
             std::to_string(static_cast<uint32_t>(d.imm) >> 12);
    case Format::kJ:
      return name + " " + Reg(d.rd) + ", " + imm;
    case Format::kFence: {
      const uint32_t pred = Bits(word, 27, 24);
      const uint32_t succ = Bits(word, 23, 20);
      if (Bits(word, 31, 28) == 0 && d.rd == 0 && d.rs1 == 0 && pred != 0 &&
          succ != 0) {
        return name + " " + FenceSet(pred) + ", " + FenceSet(succ);
      }
      return "fence(" + HexWord(word) + ")";
    }
    case Format::kSystem:
      return name;
  }
  return "illegal(" + HexWord(word) + ")";
}

Memory::Memory(Word base, std::span<const Word> words)
    : base_(base), bytes_(words.size() * 4) {
  for (size_t i = 0; i < words.size(); ++i) {
    for (int b = 0; b < 4; ++b) {
      bytes_[i * 4 + b] = static_cast<uint8_t>(words[i] >> (8 * b));
    }
  }
}

bool Memory::Contains(Word addr, uint32_t len) const {
  const uint64_t lo = base_;
  const uint64_t hi = lo + bytes_.size();
  return addr >= lo && uint64_t{addr} + len <= hi;
}

uint32_t Memory::Load(Word addr, int bytes) const {
  if (!Contains(addr, bytes)) {
    throw Error(ErrorCode::kOutOfImage, "load at " + HexWord(addr));
  }
  const size_t off = addr - base_;
  uint32_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= uint32_t{bytes_[off + b]} << (8 * b);
  return v;
}

void Memory::Store(Word addr, int bytes, uint32_t value) {
  if (!Contains(addr, bytes)) {
    throw Error(ErrorCode::kOutOfImage, "store at " + HexWord(addr));
  }
  const size_t off = addr - base_;
  for (int b = 0; b < bytes; ++b) {
    bytes_[off + b] = static_cast<uint8_t>(value >> (8 * b));
  }
}

namespace {

int AccessSize(Opcode op) {
  switch (op) {
    case Opcode::kLb: case Opcode::kLbu: case Opcode::kSb: return 1;
    case Opcode::kLh: case Opcode::kLhu: case Opcode::kSh: return 2;
    default: return 4;
  }
}

Word CheckedAddress(const ArchState& s, const DecodedInstr& in) {
  const Word addr = s.regs[in.rs1] + static_cast<Word>(in.imm);
  const int size = AccessSize(in.op);
  if (addr % size != 0) {
    throw Error(ErrorCode::kMisalignedAccess,
                std::string(OpcodeName(in.op)) + " at " + HexWord(addr));
  }
  if (!s.mem.Contains(addr, size)) {
    throw Error(ErrorCode::kOutOfImage,
                std::string(OpcodeName(in.op)) + " at " + HexWord(addr));
  }
  return addr;
}

Word CheckedTarget(Word target) {
  if (target % 4 != 0) {
    throw Error(ErrorCode::kMisalignedJump, "target " + HexWord(target));
  }
  return target;
}

}  // namespace

Retirement Step(ArchState& s, const DecodedInstr& in) {
  if (s.halted) throw Error(ErrorCode::kHalted, "step on a halted hart");
  const Word a = s.regs[in.rs1];
  const Word b = s.regs[in.rs2];
  const Word imm = static_cast<Word>(in.imm);
  const auto sa = static_cast<int32_t>(a);
  const auto sb = static_cast<int32_t>(b);
  Word next_pc = s.pc + 4;
  Word result = 0;
  bool branch = false;

  switch (in.op) {
    case Opcode::kLui: result = imm; break;
    case Opcode::kAuipc: result = s.pc + imm; break;
    case Opcode::kJal:
      next_pc = CheckedTarget(s.pc + imm);
      result = s.pc + 4;
      break;
    case Opcode::kJalr:
      next_pc = CheckedTarget((a + imm) & ~1u);
      result = s.pc + 4;
      break;
    case Opcode::kBeq: branch = a == b; break;
    case Opcode::kBne: branch = a != b; break;
    case Opcode::kBlt: branch = sa < sb; break;
    case Opcode::kBge: branch = sa >= sb; break;
    case Opcode::kBltu: branch = a < b; break;
    case Opcode::kBgeu: branch = a >= b; break;
    case Opcode::kLb:
      result = static_cast<Word>(SignExtend(s.mem.Load(CheckedAddress(s, in), 1), 8));
      break;
    case Opcode::kLh:
      result = static_cast<Word>(SignExtend(s.mem.Load(CheckedAddress(s, in), 2), 16));
      break;
    case Opcode::kLw: result = s.mem.Load(CheckedAddress(s, in), 4); break;
    case Opcode::kLbu: result = s.mem.Load(CheckedAddress(s, in), 1); break;
    case Opcode::kLhu: result = s.mem.Load(CheckedAddress(s, in), 2); break;
    case Opcode::kSb:
    case Opcode::kSh:
    case Opcode::kSw:
      s.mem.Store(CheckedAddress(s, in), AccessSize(in.op), b);
      break;
    case Opcode::kAddi: result = a + imm; break;
    case Opcode::kSlti: result = sa < in.imm ? 1 : 0; break;
    case Opcode::kSltiu: result = a < imm ? 1 : 0; break;
    case Opcode::kXori: result = a ^ imm; break;
    case Opcode::kOri: result = a | imm; break;
    case Opcode::kAndi: result = a & imm; break;
    case Opcode::kSlli: result = a << (imm & 31); break;
    case Opcode::kSrli: result = a >> (imm & 31); break;
    case Opcode::kSrai: result = static_cast<Word>(sa >> (imm & 31)); break;
    case Opcode::kAdd: result = a + b; break;
    case Opcode::kSub: result = a - b; break;
    case Opcode::kSll: result = a << (b & 31); break;
    case Opcode::kSlt: result = sa < sb ? 1 : 0; break;
    case Opcode::kSltu: result = a < b ? 1 : 0; break;
    case Opcode::kXor: result = a ^ b; break;
    case Opcode::kSrl: result = a >> (b & 31); break;
    case Opcode::kSra: result = static_cast<Word>(sa >> (b & 31)); break;
    case Opcode::kOr: result = a | b; break;
    case Opcode::kAnd: result = a & b; break;
    case Opcode::kFence: break;
    case Opcode::kEcall:
    case Opcode::kEbreak:
      s.halted = true;
      break;
  }
  if (branch) next_pc = CheckedTarget(s.pc + imm);

  Retirement r{s.pc, in, WritesRd(in.op)};
  if (r.wrote_rd && in.rd != 0) s.regs[in.rd] = result;
  s.pc = next_pc;
  ++s.retired;
  return r;
}

Retirement StepFetch(ArchState& s) {
  if (s.halted) throw Error(ErrorCode::kHalted, "step on a halted hart");
  if (s.pc % 4 != 0) throw Error(ErrorCode::kMisalignedJump, "pc " + HexWord(s.pc));
  return Step(s, Decode(s.mem.LoadWord(s.pc)));
}

ArchState Execute(ArchState state, const DecodedInstr& instr) {
  Step(state, instr);
  return state;
}

}  // namespace feriver
