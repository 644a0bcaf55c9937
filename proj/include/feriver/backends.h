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

#ifndef FERIVER_BACKENDS_H_
#define FERIVER_BACKENDS_H_

// The two lock-step execution sources: a golden instruction-set simulator and
// a DUT emulator whose register file lives in configuration frames and which
// can be made faulty.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "feriver/isa.h"
#include "feriver/pcap.h"
#include "feriver/workloads.h"

namespace feriver {

enum class Source { kIss, kDut };

// Architectural observation a source hands to the arbiter at a strobe
// boundary. pc/raw_instr describe the last retired instruction.
struct GprSnapshot {
  Source source = Source::kIss;
  uint64_t strobe_index = 0;
  uint64_t retired = 0;
  Word pc = 0;
  Word raw_instr = 0;
  bool halted = false;
  std::array<Word, kNumObservedRegs> regs{};  // x1..x31
};

// What the DUT announces when it pauses: everything except register values,
// which must be read back through the frame store.
struct FramesReadySignal {
  uint64_t strobe_index = 0;
  uint64_t retired = 0;
  Word pc = 0;
  Word raw_instr = 0;
  bool halted = false;
  // Set when the DUT hit a fatal ISA diagnostic (typically a consequence of
  // an injected fault); the DUT stays frozen until it is resynchronised.
  std::string trap;
};

std::array<Word, kNumObservedRegs> ObservedRegs(const ArchState& state);

// Runs up to k instructions (fewer on halt) and snapshots the boundary.
// Throws kConfigError for k == 0 and propagates ISA diagnostics.
GprSnapshot GoldenRunToStrobe(ArchState& state, uint64_t k, uint64_t strobe_index);

// Snapshot of `state` without executing anything.
GprSnapshot SnapshotOf(const ArchState& state, Source source, uint64_t strobe_index,
                       Word pc, Word raw_instr);

class GoldenBackend {
 public:
  explicit GoldenBackend(const MemImage& image);

  GprSnapshot RunToStrobe(uint64_t k);
  // Executes one instruction; returns false if already halted.
  bool StepOne();

  const ArchState& state() const { return state_; }
  uint64_t next_strobe() const { return next_strobe_; }
  Word last_pc() const { return last_pc_; }
  Word last_raw() const { return last_raw_; }
  void Restore(ArchState state, uint64_t next_strobe, Word last_pc, Word last_raw);

 private:
  ArchState state_;
  uint64_t next_strobe_ = 0;
  Word last_pc_ = 0;
  Word last_raw_ = 0;
};

enum class FaultMode { kStatic, kBernoulli };
enum class Mutation { kInstrBitFlip, kWrongRdResult };

std::string FaultModeName(FaultMode mode);
std::string MutationName(Mutation mutation);
// Accepts "static"/"bernoulli" and "bitflip"/"wrongrd". Throws kConfigError.
FaultMode ParseFaultMode(const std::string& text);
Mutation ParseMutation(const std::string& text);

struct FaultSite {
  uint64_t retired_index = 0;  // 1-based: the n-th retired instruction
  Word pc = 0;
  std::string description;

  bool operator==(const FaultSite&) const = default;
};

// Instruction-level fault model of the DUT.
//
// Static faults are fixed before the run: word_patches replace instruction
// words in the DUT's copy of the image (InstrBitFlip), word_sites mark
// instruction addresses whose every execution writes result+1 to rd
// (WrongRdResult), and retired_sites pin WrongRdResult/InstrBitFlip faults to
// individual dynamic instructions. Bernoulli faults fire independently on
// each retired instruction with probability `rate`.
struct FaultSpec {
  FaultMode mode = FaultMode::kStatic;
  double rate = 0.0;
  uint64_t seed = 0;
  Mutation mutation = Mutation::kWrongRdResult;

  std::vector<std::pair<Word, Word>> word_patches;  // (address, new word)
  std::vector<Word> word_sites;
  std::vector<uint64_t> retired_sites;

  // Faults that actually fired, in retirement order (filled by the DUT).
  std::vector<FaultSite> sites;

  // Throws kInvalidFault.
  void Validate() const;
  bool active() const;

  // Convenience: static faults on the given 1-based retired indices.
  static FaultSpec AtRetired(std::vector<uint64_t> indices,
                             Mutation mutation = Mutation::kWrongRdResult);
};

// Words eligible for a mutation: every text word for InstrBitFlip, text words
// that write a nonzero rd for WrongRdResult (so the fault is always visible).
std::vector<uint32_t> EligibleWords(const MemImage& image, Mutation mutation);

// Picks ceil(rate * eligible) distinct eligible words uniformly (seeded) and
// mutates them. Throws kEmptyImage, kInvalidFault.
std::pair<MemImage, FaultSpec> InjectStaticFaults(const MemImage& image, double rate,
                                                  uint64_t seed, Mutation mutation);

// Seeded generator whose draws are defined bit-for-bit on every platform.
class FaultRng {
 public:
  explicit FaultRng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, n) by rejection.
  uint64_t Below(uint64_t n);
  // Uniform in [0, 1) with 53 bits.
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool operator==(const FaultRng&) const = default;

 private:
  std::mt19937_64 engine_;
};

// Everything needed to resume a DUT run bit-exactly.
struct DutSnapshot {
  ArchState state;
  FaultRng rng;
  uint64_t next_strobe = 0;
  size_t fired = 0;
  Word last_pc = 0;
  Word last_raw = 0;
  std::string trap;
};

class DutBackend {
 public:
  // Installs the register layout in `store` and mirrors the initial registers.
  DutBackend(const MemImage& image, FaultSpec fault, FrameStore& store,
             const GprLayout& layout);

  DutBackend(const DutBackend&) = delete;
  DutBackend& operator=(const DutBackend&) = delete;

  // Executes up to k instructions, mirroring every register writeback into the
  // frame store. Returns the pause signal (no register values). ISA
  // diagnostics raised by the DUT freeze it and are reported in `trap`.
  FramesReadySignal RunToStrobe(uint64_t k);

  // Executes exactly one instruction; used by replay. Returns false if halted
  // or trapped. ISA diagnostics propagate (and leave the DUT trapped).
  bool StepOne();

  bool trapped() const { return !trap_.empty(); }
  const std::string& trap() const { return trap_; }

  // Overwrites architectural state from the golden model (resync).
  void Resync(const ArchState& golden);

  DutSnapshot Save() const;
  void Restore(const DutSnapshot& snapshot);

  const ArchState& state() const { return state_; }
  const FaultSpec& fault() const { return fault_; }
  const GprLayout& layout() const { return layout_; }
  uint64_t next_strobe() const { return next_strobe_; }
  Word last_pc() const { return last_pc_; }
  // The word actually executed last (after any transient bit flip).
  Word last_raw() const { return last_raw_; }

 private:
  void MirrorAll();
  void StepUnchecked();

  ArchState state_;
  FaultSpec fault_;
  FaultRng rng_;
  FrameStore& store_;
  GprLayout layout_;
  uint64_t next_strobe_ = 0;
  Word last_pc_ = 0;
  Word last_raw_ = 0;
  std::string trap_;
  std::vector<Word> word_sites_;        // sorted
  std::vector<uint64_t> retired_sites_;  // sorted
};

// The value a WrongRdResult fault writes instead of `correct`.
inline Word WrongRdValue(Word correct) { return correct + 1; }

}  // namespace feriver

#endif  // FERIVER_BACKENDS_H_
