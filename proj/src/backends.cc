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

#include "feriver/backends.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "feriver/error.h"

namespace feriver {
namespace {

void RequirePositiveStrobe(uint64_t k) {
  if (k == 0) throw Error(ErrorCode::kConfigError, "strobe interval must be >= 1");
}

// Raw word at pc if it can be fetched, 0 otherwise.
Word PeekWord(const ArchState& state) {
  if (state.pc % 4 != 0 || !state.mem.Contains(state.pc, 4)) return 0;
  return state.mem.LoadWord(state.pc);
}

}  // namespace

std::array<Word, kNumObservedRegs> ObservedRegs(const ArchState& state) {
  std::array<Word, kNumObservedRegs> out{};
  std::copy(state.regs.begin() + 1, state.regs.end(), out.begin());
  return out;
}

GprSnapshot SnapshotOf(const ArchState& state, Source source, uint64_t strobe_index,
                       Word pc, Word raw_instr) {
  GprSnapshot snap;
  snap.source = source;
  snap.strobe_index = strobe_index;
  snap.retired = state.retired;
  snap.pc = pc;
  snap.raw_instr = raw_instr;
  snap.halted = state.halted;
  snap.regs = ObservedRegs(state);
  return snap;
}

GprSnapshot GoldenRunToStrobe(ArchState& state, uint64_t k, uint64_t strobe_index) {
  RequirePositiveStrobe(k);
  Word pc = state.pc;
  Word raw = PeekWord(state);
  for (uint64_t i = 0; i < k && !state.halted; ++i) {
    pc = state.pc;
    raw = PeekWord(state);
    StepFetch(state);
  }
  return SnapshotOf(state, Source::kIss, strobe_index, pc, raw);
}

GoldenBackend::GoldenBackend(const MemImage& image) : state_(LoadState(image)) {}

GprSnapshot GoldenBackend::RunToStrobe(uint64_t k) {
  RequirePositiveStrobe(k);
  for (uint64_t i = 0; i < k; ++i) {
    if (!StepOne()) break;
  }
  return SnapshotOf(state_, Source::kIss, next_strobe_++, last_pc_, last_raw_);
}

bool GoldenBackend::StepOne() {
  if (state_.halted) return false;
  Word pc = state_.pc;
  Word raw = PeekWord(state_);
  StepFetch(state_);
  last_pc_ = pc;
  last_raw_ = raw;
  return true;
}

void GoldenBackend::Restore(ArchState state, uint64_t next_strobe, Word last_pc,
                            Word last_raw) {
  state_ = std::move(state);
  next_strobe_ = next_strobe;
  last_pc_ = last_pc;
  last_raw_ = last_raw;
}

std::string FaultModeName(FaultMode mode) {
  return mode == FaultMode::kStatic ? "static" : "bernoulli";
}

std::string MutationName(Mutation mutation) {
  return mutation == Mutation::kInstrBitFlip ? "bitflip" : "wrongrd";
}

FaultMode ParseFaultMode(const std::string& text) {
  if (text == "static") return FaultMode::kStatic;
  if (text == "bernoulli") return FaultMode::kBernoulli;
  throw Error(ErrorCode::kConfigError, "unknown fault mode '" + text + "'");
}

Mutation ParseMutation(const std::string& text) {
  if (text == "bitflip") return Mutation::kInstrBitFlip;
  if (text == "wrongrd") return Mutation::kWrongRdResult;
  throw Error(ErrorCode::kConfigError, "unknown mutation '" + text + "'");
}

void FaultSpec::Validate() const {
  if (!std::isfinite(rate) || rate < 0.0 || rate > 1.0) {
    throw Error(ErrorCode::kInvalidFault, "rate must lie in [0, 1]");
  }
  bool has_static = !word_patches.empty() || !word_sites.empty() || !retired_sites.empty();
  if (mode == FaultMode::kBernoulli && has_static) {
    throw Error(ErrorCode::kInvalidFault, "bernoulli faults cannot carry static sites");
  }
  if (rate == 0.0 && has_static) {
    throw Error(ErrorCode::kInvalidFault, "static sites given with rate 0");
  }
  if (mutation == Mutation::kWrongRdResult && !word_patches.empty()) {
    throw Error(ErrorCode::kInvalidFault, "word patches require the bitflip mutation");
  }
  for (uint64_t idx : retired_sites) {
    if (idx == 0) throw Error(ErrorCode::kInvalidFault, "retired indices are 1-based");
  }
}

bool FaultSpec::active() const {
  if (rate == 0.0) return false;
  if (mode == FaultMode::kBernoulli) return true;
  return !word_patches.empty() || !word_sites.empty() || !retired_sites.empty();
}

FaultSpec FaultSpec::AtRetired(std::vector<uint64_t> indices, Mutation mutation) {
  FaultSpec spec;
  spec.mode = FaultMode::kStatic;
  spec.rate = indices.empty() ? 0.0 : 1.0;  // every listed site fires
  spec.mutation = mutation;
  spec.retired_sites = std::move(indices);
  return spec;
}

uint64_t FaultRng::Below(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidFault, "empty range");
  // Reject the tail that would bias the modulo.
  const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
  uint64_t v;
  do {
    v = engine_();
  } while (v > limit);
  return v % n;
}

std::vector<uint32_t> EligibleWords(const MemImage& image, Mutation mutation) {
  std::vector<uint32_t> out;
  uint32_t n = std::min<uint32_t>(image.text_words, image.words.size());
  for (uint32_t i = 0; i < n; ++i) {
    if (mutation == Mutation::kInstrBitFlip) {
      out.push_back(i);
      continue;
    }
    try {
      DecodedInstr d = Decode(image.words[i]);
      if (WritesRd(d.op) && d.rd != 0) out.push_back(i);
    } catch (const Error&) {
      // Not an instruction; cannot produce a wrong result.
    }
  }
  return out;
}

std::pair<MemImage, FaultSpec> InjectStaticFaults(const MemImage& image, double rate,
                                                  uint64_t seed, Mutation mutation) {
  if (image.text_words == 0 || image.words.empty()) {
    throw Error(ErrorCode::kEmptyImage, "image has no instruction words");
  }
  FaultSpec spec;
  spec.mode = FaultMode::kStatic;
  spec.rate = rate;
  spec.seed = seed;
  spec.mutation = mutation;
  spec.Validate();

  std::vector<uint32_t> eligible = EligibleWords(image, mutation);
  // The small slack keeps products such as 0.3 * 10 from rounding up.
  const double exact = rate * static_cast<double>(eligible.size());
  const auto count = static_cast<size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));

  FaultRng rng(seed);
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + rng.Below(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());

  MemImage mutated = image;
  for (uint32_t idx : eligible) {
    Word addr = image.base + 4 * idx;
    spec.word_sites.push_back(addr);
    if (mutation == Mutation::kInstrBitFlip) {
      Word flipped = image.words[idx] ^ (Word{1} << rng.Below(32));
      mutated.words[idx] = flipped;
      spec.word_patches.emplace_back(addr, flipped);
    }
  }
  return {std::move(mutated), std::move(spec)};
}

DutBackend::DutBackend(const MemImage& image, FaultSpec fault, FrameStore& store,
                       const GprLayout& layout)
    : state_(LoadState(image)),
      fault_(std::move(fault)),
      rng_(fault_.seed),
      store_(store),
      layout_(layout) {
  fault_.Validate();
  fault_.sites.clear();
  for (const auto& [addr, word] : fault_.word_patches) state_.mem.Store(addr, 4, word);
  word_sites_ = fault_.word_sites;
  std::sort(word_sites_.begin(), word_sites_.end());
  retired_sites_ = fault_.retired_sites;
  std::sort(retired_sites_.begin(), retired_sites_.end());
  InstallLayout(store_, layout_);
  MirrorAll();
}

void DutBackend::MirrorAll() {
  auto regs = ObservedRegs(state_);
  MirrorGprs(store_, regs, layout_);
}

bool DutBackend::StepOne() {
  if (state_.halted || trapped()) return false;
  try {
    StepUnchecked();
  } catch (const Error& e) {
    trap_ = e.what();
    throw;
  }
  return true;
}

void DutBackend::StepUnchecked() {
  const uint64_t index = state_.retired + 1;
  const Word pc = state_.pc;
  if (pc % 4 != 0) throw Error(ErrorCode::kMisalignedJump, "pc " + HexWord(pc));
  Word word = state_.mem.LoadWord(pc);

  bool fire = false;
  bool patched_word = false;
  if (fault_.rate > 0.0) {
    if (fault_.mode == FaultMode::kBernoulli) {
      fire = rng_.Unit() < fault_.rate;
    } else {
      patched_word = std::binary_search(word_sites_.begin(), word_sites_.end(), pc);
      fire = patched_word ||
             std::binary_search(retired_sites_.begin(), retired_sites_.end(), index);
    }
  }

  std::string what;
  if (fire && fault_.mutation == Mutation::kInstrBitFlip) {
    if (patched_word) {
      what = "bitflip (patched word)";
    } else {
      uint32_t bit = static_cast<uint32_t>(rng_.Below(32));
      word ^= Word{1} << bit;
      what = "bitflip bit " + std::to_string(bit);
    }
  }

  DecodedInstr instr = Decode(word);
  Retirement r = Step(state_, instr);
  const bool visible_rd = r.wrote_rd && instr.rd != 0;
  if (fire && fault_.mutation == Mutation::kWrongRdResult) {
    if (visible_rd) {
      state_.regs[instr.rd] = WrongRdValue(state_.regs[instr.rd]);
      what = "wrongrd x" + std::to_string(instr.rd) + "+1";
    } else {
      what = "wrongrd (no rd write)";
    }
  }
  if (fire) {
    fault_.sites.push_back(
        {index, pc, what + " at " + HexWord(pc) + ": " + Disassemble(word)});
  }
  if (visible_rd) MirrorGpr(store_, layout_, instr.rd, state_.regs[instr.rd]);
  last_pc_ = pc;
  last_raw_ = word;
}

FramesReadySignal DutBackend::RunToStrobe(uint64_t k) {
  RequirePositiveStrobe(k);
  try {
    for (uint64_t i = 0; i < k; ++i) {
      if (!StepOne()) break;
    }
  } catch (const Error&) {
    // Recorded in trap_; the DUT is frozen where it faulted.
  }
  FramesReadySignal sig;
  sig.strobe_index = next_strobe_++;
  sig.retired = state_.retired;
  sig.pc = last_pc_;
  sig.raw_instr = last_raw_;
  sig.halted = state_.halted;
  sig.trap = trap_;
  return sig;
}

void DutBackend::Resync(const ArchState& golden) {
  state_ = golden;
  trap_.clear();
  MirrorAll();
}

DutSnapshot DutBackend::Save() const {
  return {state_, rng_, next_strobe_, fault_.sites.size(), last_pc_, last_raw_, trap_};
}

void DutBackend::Restore(const DutSnapshot& snapshot) {
  state_ = snapshot.state;
  rng_ = snapshot.rng;
  next_strobe_ = snapshot.next_strobe;
  if (snapshot.fired < fault_.sites.size()) fault_.sites.resize(snapshot.fired);
  last_pc_ = snapshot.last_pc;
  last_raw_ = snapshot.last_raw;
  trap_ = snapshot.trap;
  MirrorAll();
}

}  // namespace feriver
