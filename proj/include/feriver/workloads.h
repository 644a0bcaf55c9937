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

#ifndef FERIVER_WORKLOADS_H_
#define FERIVER_WORKLOADS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "feriver/isa.h"

namespace feriver {

// A flat program image. words[i] lives at byte address base + 4 * i.
// text_words is the number of leading words that hold instructions; fault
// injection only touches those.
struct MemImage {
  Word base = 0;
  std::vector<Word> words;
  Word entry = 0;
  uint32_t text_words = 0;

  bool operator==(const MemImage&) const = default;
};

// Fresh hart state with the image loaded and pc at the entry point.
ArchState LoadState(const MemImage& image);

enum class MemAddressing {
  kWord,  // "@" directives give word addresses (readmemh on a 32-bit memory)
  kByte,  // "@" directives give byte addresses; must be 4-aligned
};

// Parses a hex memory file: whitespace-separated hex words, "@HEX" address
// directives and "//" comments. The image base is the lowest address written
// (0 when the file starts with data); gaps are zero-filled. Throws
// kParseError (message carries the line number), kMisalignedDirective,
// kEmptyImage.
MemImage LoadMem(std::string_view text,
                 MemAddressing addressing = MemAddressing::kWord);

// Raw little-endian 32-bit words. Throws kParseError, kEmptyImage.
MemImage LoadBin(std::span<const uint8_t> bytes, Word base);

// Renders an image back to .mem text (word-addressed).
std::string ToMemText(const MemImage& image);

// Minimal two-pass assembler used to build fixtures in code.
class ProgramBuilder {
 public:
  using Label = int;

  Label NewLabel();
  void Bind(Label label);

  // Data blocks are placed after the code, in creation order.
  Label AddData(std::vector<Word> words);

  void Emit(const DecodedInstr& instr);
  void R(Opcode op, int rd, int rs1, int rs2);
  void I(Opcode op, int rd, int rs1, int32_t imm);
  void Load(Opcode op, int rd, int32_t offset, int rs1);
  void Store(Opcode op, int rs2, int32_t offset, int rs1);
  void Branch(Opcode op, int rs1, int rs2, Label target);
  void Jal(int rd, Label target);
  void J(Label target) { Jal(0, target); }
  void Mv(int rd, int rs) { I(Opcode::kAddi, rd, rs, 0); }
  void Li(int rd, int32_t value);  // lui/addi pair or a single addi
  void La(int rd, Label data);     // always lui/addi
  void Ebreak() { Emit({Opcode::kEbreak}); }

  MemImage Build(Word base = 0) const;

 private:
  enum class FixupKind { kBranch, kJal, kAbsHi, kAbsLo };
  struct Fixup {
    size_t index;
    FixupKind kind;
    Label label;
  };

  std::vector<DecodedInstr> code_;
  std::vector<Fixup> fixups_;
  std::vector<int64_t> code_labels_;          // label -> code word index or -1
  std::map<Label, std::vector<Word>> data_;  // label -> block
  std::vector<Label> data_order_;
};

// Bundled fixtures: "ssort", "qsort", "md5". Each ends in EBREAK with a
// result digest in x10/x11.
const std::map<std::string, MemImage>& BuiltinWorkloads();

// The unsorted input shared by the sort fixtures.
std::span<const Word> SortFixtureInput();
// The 64-byte message block hashed by the md5 fixture, and its pass count.
std::span<const Word> Md5FixtureMessage();
inline constexpr int kMd5FixturePasses = 7;
// Times the qsort fixture re-sorts a fresh copy of the input.
inline constexpr int kQsortFixtureRounds = 3;

// Resolves "builtin:<name>" or a path to a .mem / .bin file.
MemImage LoadWorkload(const std::string& spec, Word bin_base = 0);

}  // namespace feriver

#endif  // FERIVER_WORKLOADS_H_
