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

#include "feriver/workloads.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "feriver/error.h"

namespace feriver {
namespace {

constexpr uint64_t kMaxImageBytes = 64ull << 20;

[[noreturn]] void ParseFail(int line, const std::string& reason) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + reason);
}

bool ParseHex(std::string_view token, uint64_t& out) {
  if (token.empty() || token.size() > 16) return false;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out, 16);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ArchState LoadState(const MemImage& image) {
  if (image.words.empty()) throw Error(ErrorCode::kEmptyImage, "image has no words");
  ArchState s;
  s.mem = Memory(image.base, image.words);
  s.pc = image.entry;
  return s;
}

MemImage LoadMem(std::string_view text, MemAddressing addressing) {
  std::map<uint64_t, Word> placed;  // word address -> value
  uint64_t cursor = 0;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (size_t c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);

    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      const std::string_view token = line.substr(i, j - i);
      i = j;

      uint64_t value = 0;
      if (token.front() == '@') {
        if (!ParseHex(token.substr(1), value)) {
          ParseFail(line_no, "bad address directive '" + std::string(token) + "'");
        }
        if (addressing == MemAddressing::kByte) {
          if (value % 4 != 0) {
            throw Error(ErrorCode::kMisalignedDirective,
                        "line " + std::to_string(line_no) + ": byte address " +
                            std::string(token.substr(1)) + " is not word aligned");
          }
          value /= 4;
        }
        if (value > 0x3fffffffull) ParseFail(line_no, "address beyond 32-bit space");
        cursor = value;
        continue;
      }
      if (token.size() > 8 || !ParseHex(token, value)) {
        ParseFail(line_no, "expected a hex word, got '" + std::string(token) + "'");
      }
      if (cursor > 0x3fffffffull) ParseFail(line_no, "data beyond 32-bit space");
      placed[cursor++] = static_cast<Word>(value);
    }
    if (nl == text.size()) break;
  }
  if (placed.empty()) throw Error(ErrorCode::kEmptyImage, "memory file has no data words");

  const uint64_t first = placed.begin()->first;
  const uint64_t last = placed.rbegin()->first;
  if ((last - first + 1) * 4 > kMaxImageBytes) {
    throw Error(ErrorCode::kParseError, "image spans more than 64 MiB");
  }
  MemImage image;
  image.base = static_cast<Word>(first * 4);
  image.words.assign(last - first + 1, 0);
  for (const auto& [addr, w] : placed) image.words[addr - first] = w;
  image.entry = image.base;
  image.text_words = static_cast<uint32_t>(image.words.size());
  return image;
}

MemImage LoadBin(std::span<const uint8_t> bytes, Word base) {
  if (bytes.empty()) throw Error(ErrorCode::kEmptyImage, "binary image is empty");
  if (bytes.size() % 4 != 0) {
    throw Error(ErrorCode::kParseError, "binary image is not a whole number of words");
  }
  if (base % 4 != 0) throw Error(ErrorCode::kMisalignedDirective, "base not word aligned");
  MemImage image;
  image.base = base;
  image.words.resize(bytes.size() / 4);
  for (size_t i = 0; i < image.words.size(); ++i) {
    image.words[i] = Word{bytes[4 * i]} | Word{bytes[4 * i + 1]} << 8 |
                     Word{bytes[4 * i + 2]} << 16 | Word{bytes[4 * i + 3]} << 24;
  }
  image.entry = base;
  image.text_words = static_cast<uint32_t>(image.words.size());
  return image;
}

std::string ToMemText(const MemImage& image) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "@%08x\n", image.base / 4);
  std::string out = buf;
  for (Word w : image.words) {
    std::snprintf(buf, sizeof(buf), "%08x\n", w);
    out += buf;
  }
  return out;
}

ProgramBuilder::Label ProgramBuilder::NewLabel() {
  code_labels_.push_back(-1);
  return static_cast<Label>(code_labels_.size() - 1);
}

void ProgramBuilder::Bind(Label label) {
  code_labels_.at(label) = static_cast<int64_t>(code_.size());
}

ProgramBuilder::Label ProgramBuilder::AddData(std::vector<Word> words) {
  const Label label = NewLabel();
  data_[label] = std::move(words);
  data_order_.push_back(label);
  return label;
}

void ProgramBuilder::Emit(const DecodedInstr& instr) {
  Encode(instr);  // validate eagerly
  code_.push_back(instr);
}

void ProgramBuilder::R(Opcode op, int rd, int rs1, int rs2) {
  Emit({op, static_cast<uint8_t>(rd), static_cast<uint8_t>(rs1),
        static_cast<uint8_t>(rs2), 0});
}

void ProgramBuilder::I(Opcode op, int rd, int rs1, int32_t imm) {
  Emit({op, static_cast<uint8_t>(rd), static_cast<uint8_t>(rs1), 0, imm});
}

void ProgramBuilder::Load(Opcode op, int rd, int32_t offset, int rs1) {
  I(op, rd, rs1, offset);
}

void ProgramBuilder::Store(Opcode op, int rs2, int32_t offset, int rs1) {
  Emit({op, 0, static_cast<uint8_t>(rs1), static_cast<uint8_t>(rs2), offset});
}

void ProgramBuilder::Branch(Opcode op, int rs1, int rs2, Label target) {
  fixups_.push_back({code_.size(), FixupKind::kBranch, target});
  code_.push_back({op, 0, static_cast<uint8_t>(rs1), static_cast<uint8_t>(rs2), 0});
}

void ProgramBuilder::Jal(int rd, Label target) {
  fixups_.push_back({code_.size(), FixupKind::kJal, target});
  code_.push_back({Opcode::kJal, static_cast<uint8_t>(rd), 0, 0, 0});
}

void ProgramBuilder::Li(int rd, int32_t value) {
  if (value >= -2048 && value <= 2047) {
    I(Opcode::kAddi, rd, 0, value);
    return;
  }
  const auto v = static_cast<uint32_t>(value);
  const uint32_t hi = (v + 0x800u) & 0xfffff000u;
  const auto lo = static_cast<int32_t>(v - hi);
  Emit({Opcode::kLui, static_cast<uint8_t>(rd), 0, 0, static_cast<int32_t>(hi)});
  if (lo != 0) I(Opcode::kAddi, rd, rd, lo);
}

void ProgramBuilder::La(int rd, Label data) {
  fixups_.push_back({code_.size(), FixupKind::kAbsHi, data});
  code_.push_back({Opcode::kLui, static_cast<uint8_t>(rd), 0, 0, 0});
  fixups_.push_back({code_.size(), FixupKind::kAbsLo, data});
  code_.push_back({Opcode::kAddi, static_cast<uint8_t>(rd), static_cast<uint8_t>(rd), 0, 0});
}

MemImage ProgramBuilder::Build(Word base) const {
  std::map<Label, Word> address;
  for (size_t l = 0; l < code_labels_.size(); ++l) {
    if (code_labels_[l] >= 0) address[static_cast<Label>(l)] = base + 4 * code_labels_[l];
  }
  Word cursor = base + static_cast<Word>(4 * code_.size());
  for (Label l : data_order_) {
    address[l] = cursor;
    cursor += static_cast<Word>(4 * data_.at(l).size());
  }

  std::vector<DecodedInstr> code = code_;
  for (const Fixup& f : fixups_) {
    auto it = address.find(f.label);
    if (it == address.end()) {
      throw Error(ErrorCode::kInvalidField, "unbound label " + std::to_string(f.label));
    }
    const Word target = it->second;
    const Word pc = base + static_cast<Word>(4 * f.index);
    const Word hi = (target + 0x800u) & 0xfffff000u;
    switch (f.kind) {
      case FixupKind::kBranch:
      case FixupKind::kJal:
        code[f.index].imm = static_cast<int32_t>(target - pc);
        break;
      case FixupKind::kAbsHi:
        code[f.index].imm = static_cast<int32_t>(hi);
        break;
      case FixupKind::kAbsLo:
        code[f.index].imm = static_cast<int32_t>(target - hi);
        break;
    }
  }

  MemImage image;
  image.base = base;
  image.entry = base;
  for (const DecodedInstr& in : code) image.words.push_back(Encode(in));
  image.text_words = static_cast<uint32_t>(image.words.size());
  for (Label l : data_order_) {
    const std::vector<Word>& block = data_.at(l);
    image.words.insert(image.words.end(), block.begin(), block.end());
  }
  return image;
}

namespace {

using enum Opcode;

constexpr int kSortLength = 64;

std::vector<Word> MakeSortInput() {
  // Fixed LCG stream; mixes signs and duplicates.
  std::vector<Word> out(kSortLength);
  uint32_t x = 0x2545f491u;
  for (int i = 0; i < kSortLength; ++i) {
    x = x * 1664525u + 1013904223u;
    out[i] = (i % 9 == 0) ? out[i / 2] : static_cast<Word>(static_cast<int32_t>(x) >> 8);
  }
  return out;
}

std::vector<Word> MakeMd5Message() {
  std::vector<Word> out(16);
  const char text[] = "FERIVer fixture block: the quick brown fox jumps over it!";
  for (int i = 0; i < 64; ++i) {
    const auto byte = static_cast<uint8_t>(i < static_cast<int>(sizeof(text)) - 1 ? text[i] : i);
    out[i / 4] |= Word{byte} << (8 * (i % 4));
  }
  return out;
}

// x10 = djb2-style hash (h = h * 33 + a[i], h0 = 5381) over the sorted
// array, x11 = plain sum. Clobbers x12..x15.
void EmitSortDigest(ProgramBuilder& b, int array_reg) {
  auto loop = b.NewLabel();
  auto done = b.NewLabel();
  b.Li(10, 5381);
  b.Li(11, 0);
  b.Li(12, 0);
  b.Li(13, kSortLength);
  b.Bind(loop);
  b.Branch(kBge, 12, 13, done);
  b.I(kSlli, 14, 12, 2);
  b.R(kAdd, 14, array_reg, 14);
  b.Load(kLw, 15, 0, 14);
  b.I(kSlli, 14, 10, 5);
  b.R(kAdd, 10, 14, 10);
  b.R(kAdd, 10, 10, 15);
  b.R(kAdd, 11, 11, 15);
  b.I(kAddi, 12, 12, 1);
  b.J(loop);
  b.Bind(done);
}

MemImage BuildSelectionSort() {
  ProgramBuilder b;
  auto array = b.AddData(MakeSortInput());
  auto outer = b.NewLabel(), inner = b.NewLabel(), skip = b.NewLabel();
  auto swap = b.NewLabel(), done = b.NewLabel();

  b.La(5, array);
  b.Li(6, kSortLength);
  b.Li(7, 0);                        // i
  b.Bind(outer);
  b.I(kAddi, 8, 6, -1);
  b.Branch(kBge, 7, 8, done);
  b.Mv(9, 7);                        // min index
  b.I(kAddi, 10, 7, 1);              // j
  b.Bind(inner);
  b.Branch(kBge, 10, 6, swap);
  b.I(kSlli, 11, 10, 2);
  b.R(kAdd, 11, 5, 11);
  b.Load(kLw, 12, 0, 11);
  b.I(kSlli, 13, 9, 2);
  b.R(kAdd, 13, 5, 13);
  b.Load(kLw, 14, 0, 13);
  b.Branch(kBge, 12, 14, skip);
  b.Mv(9, 10);
  b.Bind(skip);
  b.I(kAddi, 10, 10, 1);
  b.J(inner);
  b.Bind(swap);
  b.I(kSlli, 11, 7, 2);
  b.R(kAdd, 11, 5, 11);
  b.I(kSlli, 13, 9, 2);
  b.R(kAdd, 13, 5, 13);
  b.Load(kLw, 12, 0, 11);
  b.Load(kLw, 14, 0, 13);
  b.Store(kSw, 14, 0, 11);
  b.Store(kSw, 12, 0, 13);
  b.I(kAddi, 7, 7, 1);
  b.J(outer);
  b.Bind(done);
  EmitSortDigest(b, 5);
  b.Ebreak();
  return b.Build();
}

MemImage BuildQuickSort() {
  ProgramBuilder b;
  auto input = b.AddData(MakeSortInput());
  auto work = b.AddData(std::vector<Word>(kSortLength, 0));
  // Worst case Lomuto keeps at most n + 1 pending (lo, hi) pairs.
  auto stack = b.AddData(std::vector<Word>(2 * (kSortLength + 2), 0));
  auto round = b.NewLabel(), copy = b.NewLabel(), pop = b.NewLabel();
  auto part = b.NewLabel(), next = b.NewLabel(), part_done = b.NewLabel();
  auto sorted = b.NewLabel(), finished = b.NewLabel();

  b.Li(26, kQsortFixtureRounds);
  b.Bind(round);
  // work := input
  b.La(27, input);
  b.La(5, work);
  b.Li(28, 0);
  b.Li(29, kSortLength);
  b.Bind(copy);
  b.I(kSlli, 30, 28, 2);
  b.R(kAdd, 31, 27, 30);
  b.Load(kLw, 31, 0, 31);
  b.R(kAdd, 30, 5, 30);
  b.Store(kSw, 31, 0, 30);
  b.I(kAddi, 28, 28, 1);
  b.Branch(kBlt, 28, 29, copy);

  b.La(21, stack);                   // stack base
  b.Mv(20, 21);                      // stack pointer
  b.Li(6, 0);
  b.Li(7, kSortLength - 1);
  b.Store(kSw, 6, 0, 20);
  b.Store(kSw, 7, 4, 20);
  b.I(kAddi, 20, 20, 8);
  b.Bind(pop);
  b.Branch(kBeq, 20, 21, sorted);
  b.I(kAddi, 20, 20, -8);
  b.Load(kLw, 6, 0, 20);             // lo
  b.Load(kLw, 7, 4, 20);             // hi
  b.Branch(kBge, 6, 7, pop);
  b.I(kSlli, 8, 7, 2);
  b.R(kAdd, 8, 5, 8);                // &a[hi]
  b.Load(kLw, 9, 0, 8);              // pivot
  b.I(kAddi, 10, 6, -1);             // i
  b.Mv(11, 6);                       // j
  b.Bind(part);
  b.Branch(kBge, 11, 7, part_done);
  b.I(kSlli, 12, 11, 2);
  b.R(kAdd, 12, 5, 12);
  b.Load(kLw, 13, 0, 12);
  b.Branch(kBlt, 9, 13, next);
  b.I(kAddi, 10, 10, 1);
  b.I(kSlli, 14, 10, 2);
  b.R(kAdd, 14, 5, 14);
  b.Load(kLw, 15, 0, 14);
  b.Store(kSw, 13, 0, 14);
  b.Store(kSw, 15, 0, 12);
  b.Bind(next);
  b.I(kAddi, 11, 11, 1);
  b.J(part);
  b.Bind(part_done);
  b.I(kAddi, 10, 10, 1);             // pivot slot
  b.I(kSlli, 14, 10, 2);
  b.R(kAdd, 14, 5, 14);
  b.Load(kLw, 15, 0, 14);
  b.Store(kSw, 9, 0, 14);
  b.Store(kSw, 15, 0, 8);
  b.I(kAddi, 16, 10, -1);
  b.Store(kSw, 6, 0, 20);
  b.Store(kSw, 16, 4, 20);
  b.I(kAddi, 20, 20, 8);
  b.I(kAddi, 16, 10, 1);
  b.Store(kSw, 16, 0, 20);
  b.Store(kSw, 7, 4, 20);
  b.I(kAddi, 20, 20, 8);
  b.J(pop);

  b.Bind(sorted);
  b.I(kAddi, 26, 26, -1);
  b.Branch(kBeq, 26, 0, finished);
  b.J(round);
  b.Bind(finished);
  EmitSortDigest(b, 5);
  b.Ebreak();
  return b.Build();
}

constexpr uint32_t kMd5Shift[4][4] = {
    {7, 12, 17, 22}, {5, 9, 14, 20}, {4, 11, 16, 23}, {6, 10, 15, 21}};

uint32_t Md5Constant(int i) {
  static constexpr uint32_t kK[64] = {
      0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a,
      0xa8304613, 0xfd469501, 0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be,
      0x6b901122, 0xfd987193, 0xa679438e, 0x49b40821, 0xf61e2562, 0xc040b340,
      0x265e5a51, 0xe9b6c7aa, 0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8,
      0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8,
      0x676f02d9, 0x8d2a4c8a, 0xfffa3942, 0x8771f681, 0x6d9d6122, 0xfde5380c,
      0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70, 0x289b7ec6, 0xeaa127fa,
      0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665,
      0xf4292244, 0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92,
      0xffeff47d, 0x85845dd1, 0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1,
      0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391};
  return kK[i];
}

// MD5 compression of one 64-byte block, chained kMd5FixturePasses times
// starting from the standard IV. Leaves A in x10 and B in x11.
MemImage BuildMd5() {
  ProgramBuilder b;
  std::vector<Word> k(64), s(64), g(64);
  for (int i = 0; i < 64; ++i) {
    const int r = i / 16;
    k[i] = Md5Constant(i);
    s[i] = kMd5Shift[r][i % 4];
    const int idx = r == 0 ? i : r == 1 ? (5 * i + 1) % 16 : r == 2 ? (3 * i + 5) % 16 : (7 * i) % 16;
    g[i] = static_cast<Word>(4 * idx);
  }
  auto msg = b.AddData(MakeMd5Message());
  auto ktab = b.AddData(k);
  auto stab = b.AddData(s);
  auto gtab = b.AddData(g);
  auto pass = b.NewLabel(), step = b.NewLabel(), f1 = b.NewLabel();
  auto f2 = b.NewLabel(), f3 = b.NewLabel(), mix = b.NewLabel();
  auto pass_done = b.NewLabel(), done = b.NewLabel();

  b.La(5, msg);
  b.La(6, ktab);
  b.La(7, stab);
  b.La(8, gtab);
  b.Li(18, 0x67452301);
  b.Li(19, static_cast<int32_t>(0xefcdab89));
  b.Li(20, static_cast<int32_t>(0x98badcfe));
  b.Li(21, 0x10325476);
  b.Li(26, kMd5FixturePasses);
  b.Li(27, 16);
  b.Li(28, 32);
  b.Li(29, 48);
  b.Li(30, 64);
  b.Bind(pass);
  b.Mv(22, 18);  // a
  b.Mv(23, 19);  // b
  b.Mv(24, 20);  // c
  b.Mv(25, 21);  // d
  b.Li(9, 0);    // i
  b.Bind(step);
  b.Branch(kBge, 9, 30, pass_done);
  b.Branch(kBge, 9, 27, f1);
  b.R(kAnd, 12, 23, 24);             // (b & c) | (~b & d)
  b.I(kXori, 13, 23, -1);
  b.R(kAnd, 13, 13, 25);
  b.R(kOr, 12, 12, 13);
  b.J(mix);
  b.Bind(f1);
  b.Branch(kBge, 9, 28, f2);
  b.R(kAnd, 12, 25, 23);             // (d & b) | (~d & c)
  b.I(kXori, 13, 25, -1);
  b.R(kAnd, 13, 13, 24);
  b.R(kOr, 12, 12, 13);
  b.J(mix);
  b.Bind(f2);
  b.Branch(kBge, 9, 29, f3);
  b.R(kXor, 12, 23, 24);             // b ^ c ^ d
  b.R(kXor, 12, 12, 25);
  b.J(mix);
  b.Bind(f3);
  b.I(kXori, 13, 25, -1);            // c ^ (b | ~d)
  b.R(kOr, 13, 23, 13);
  b.R(kXor, 12, 24, 13);
  b.Bind(mix);
  b.I(kSlli, 14, 9, 2);
  b.R(kAdd, 15, 6, 14);
  b.Load(kLw, 15, 0, 15);            // K[i]
  b.R(kAdd, 12, 12, 15);
  b.R(kAdd, 12, 12, 22);             // + a
  b.R(kAdd, 15, 8, 14);
  b.Load(kLw, 15, 0, 15);            // 4 * g
  b.R(kAdd, 15, 5, 15);
  b.Load(kLw, 15, 0, 15);            // M[g]
  b.R(kAdd, 12, 12, 15);
  b.R(kAdd, 15, 7, 14);
  b.Load(kLw, 15, 0, 15);            // s
  b.R(kSll, 16, 12, 15);
  b.R(kSub, 17, 28, 15);
  b.R(kSrl, 17, 12, 17);
  b.R(kOr, 16, 16, 17);              // rotl(F, s)
  b.Mv(22, 25);
  b.Mv(25, 24);
  b.Mv(24, 23);
  b.R(kAdd, 23, 23, 16);
  b.I(kAddi, 9, 9, 1);
  b.J(step);
  b.Bind(pass_done);
  b.R(kAdd, 18, 18, 22);
  b.R(kAdd, 19, 19, 23);
  b.R(kAdd, 20, 20, 24);
  b.R(kAdd, 21, 21, 25);
  b.I(kAddi, 26, 26, -1);
  b.Branch(kBeq, 26, 0, done);
  b.J(pass);
  b.Bind(done);
  b.Mv(10, 18);
  b.Mv(11, 19);
  b.Ebreak();
  return b.Build();
}

}  // namespace

std::span<const Word> SortFixtureInput() {
  static const std::vector<Word> input = MakeSortInput();
  return input;
}

std::span<const Word> Md5FixtureMessage() {
  static const std::vector<Word> message = MakeMd5Message();
  return message;
}

const std::map<std::string, MemImage>& BuiltinWorkloads() {
  static const std::map<std::string, MemImage> workloads = {
      {"ssort", BuildSelectionSort()},
      {"qsort", BuildQuickSort()},
      {"md5", BuildMd5()},
  };
  return workloads;
}

MemImage LoadWorkload(const std::string& spec, Word bin_base) {
  constexpr std::string_view kBuiltin = "builtin:";
  if (spec.starts_with(kBuiltin)) {
    const std::string name = spec.substr(kBuiltin.size());
    const auto& all = BuiltinWorkloads();
    auto it = all.find(name);
    if (it == all.end()) {
      throw Error(ErrorCode::kConfigError, "unknown builtin workload '" + name + "'");
    }
    return it->second;
  }
  if (BuiltinWorkloads().count(spec) != 0) return BuiltinWorkloads().at(spec);
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open workload '" + spec + "'");
  const std::string content{std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>()};
  if (spec.ends_with(".bin")) {
    return LoadBin({reinterpret_cast<const uint8_t*>(content.data()), content.size()},
                   bin_base);
  }
  return LoadMem(content);
}

}  // namespace feriver
