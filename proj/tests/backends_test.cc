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
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "feriver/error.h"
#include "feriver/pcap.h"
#include "feriver/workloads.h"
#include "gtest/gtest.h"

namespace feriver {
namespace {

const GprLayout kLayout{FrameAddress{2, 0, 0, 3, 0}, 1};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kConfigError;
}

std::array<Word, kNumObservedRegs> ReadDutRegs(FrameStore& store) {
  auto payload = Readback(store, RequestFor(kLayout));
  return ExtractGprs(payload, kLayout, store.geometry().frame_words);
}

// addi x1,x0,1; addi x2,x0,2; add x3,x1,x2; addi x4,x3,10; ebreak
MemImage SmallProgram() {
  ProgramBuilder b;
  b.I(Opcode::kAddi, 1, 0, 1);
  b.I(Opcode::kAddi, 2, 0, 2);
  b.R(Opcode::kAdd, 3, 1, 2);
  b.I(Opcode::kAddi, 4, 3, 10);
  b.Ebreak();
  return b.Build();
}

// loop: addi x1, x1, 1; jal x0, loop
MemImage EndlessCounter() {
  ProgramBuilder b;
  auto loop = b.NewLabel();
  b.Bind(loop);
  b.I(Opcode::kAddi, 1, 1, 1);
  b.J(loop);
  return b.Build();
}

TEST(GoldenBackend, StrobeOfThreeSnapshotsAfterThirdInstruction) {
  ArchState s = LoadState(SmallProgram());
  GprSnapshot snap = GoldenRunToStrobe(s, 3, 0);
  EXPECT_EQ(snap.source, Source::kIss);
  EXPECT_EQ(snap.retired, 3u);
  EXPECT_EQ(snap.pc, 8u);
  EXPECT_EQ(Disassemble(snap.raw_instr), "add x3, x1, x2");
  EXPECT_EQ(snap.regs[0], 1u);
  EXPECT_EQ(snap.regs[1], 2u);
  EXPECT_EQ(snap.regs[2], 3u);
  EXPECT_EQ(snap.regs[3], 0u);
  EXPECT_FALSE(snap.halted);
}

TEST(GoldenBackend, StrobeOfOneAfterAddi) {
  ProgramBuilder b;
  b.I(Opcode::kAddi, 1, 0, 5);
  b.Ebreak();
  GoldenBackend g(b.Build());
  GprSnapshot snap = g.RunToStrobe(1);
  EXPECT_EQ(snap.strobe_index, 0u);
  EXPECT_EQ(snap.regs[0], 5u);
  EXPECT_EQ(snap.retired, 1u);
}

TEST(GoldenBackend, HaltEndsStrobeEarly) {
  GoldenBackend g(SmallProgram());
  GprSnapshot snap = g.RunToStrobe(100);
  EXPECT_TRUE(snap.halted);
  EXPECT_EQ(snap.retired, 5u);
  EXPECT_EQ(snap.pc, 16u);
  EXPECT_EQ(snap.regs[3], 13u);
}

TEST(GoldenBackend, ZeroStrobeRejected) {
  GoldenBackend g(SmallProgram());
  EXPECT_EQ(CodeOf([&] { g.RunToStrobe(0); }), ErrorCode::kConfigError);
}

TEST(DutBackend, FaultFreeDutIsBisimilarToGolden) {
  for (const auto& [name, image] : BuiltinWorkloads()) {
    for (uint64_t k : {1u, 7u, 64u}) {
      FrameStore store;
      GoldenBackend g(image);
      DutBackend d(image, FaultSpec{}, store, kLayout);
      for (uint64_t i = 0;; ++i) {
        GprSnapshot gs = g.RunToStrobe(k);
        FramesReadySignal sig = d.RunToStrobe(k);
        ASSERT_EQ(sig.strobe_index, gs.strobe_index);
        ASSERT_EQ(sig.retired, gs.retired);
        ASSERT_EQ(sig.pc, gs.pc);
        ASSERT_EQ(sig.raw_instr, gs.raw_instr);
        ASSERT_EQ(ReadDutRegs(store), gs.regs) << name << " k=" << k << " strobe " << i;
        ASSERT_EQ(sig.halted, gs.halted);
        if (gs.halted) break;
      }
      EXPECT_TRUE(d.fault().sites.empty());
      EXPECT_EQ(d.state(), g.state());
    }
  }
}

TEST(DutBackend, WrongResultAtRetiredIndexFour) {
  FrameStore store;
  DutBackend d(SmallProgram(), FaultSpec::AtRetired({4}), store, kLayout);
  d.RunToStrobe(3);
  EXPECT_EQ(ReadDutRegs(store)[3], 0u);
  d.RunToStrobe(1);
  auto regs = ReadDutRegs(store);
  EXPECT_EQ(regs[3], 14u);  // x4 = 3 + 10, plus one
  EXPECT_EQ(regs[2], 3u);
  ASSERT_EQ(d.fault().sites.size(), 1u);
  EXPECT_EQ(d.fault().sites[0].retired_index, 4u);
  EXPECT_EQ(d.fault().sites[0].pc, 12u);
}

TEST(DutBackend, BernoulliRateMatchesBinomial) {
  FaultSpec spec;
  spec.mode = FaultMode::kBernoulli;
  spec.rate = 0.25;
  spec.seed = 7;
  FrameStore store;
  DutBackend d(EndlessCounter(), spec, store, kLayout);
  d.RunToStrobe(1000);
  const double mean = 250.0;
  const double sigma = std::sqrt(1000 * 0.25 * 0.75);
  double n = static_cast<double>(d.fault().sites.size());
  EXPECT_LE(std::abs(n - mean), 3 * sigma) << n;
  // Sites are strictly increasing retired indices within the run.
  for (size_t i = 1; i < d.fault().sites.size(); ++i) {
    EXPECT_LT(d.fault().sites[i - 1].retired_index, d.fault().sites[i].retired_index);
  }
}

TEST(DutBackend, BernoulliRatePropertyAcrossSeeds) {
  // Over many seeds the empirical firing rate stays inside a 3-sigma band.
  for (double rate : {0.01, 0.1, 0.5, 0.9}) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      FaultSpec spec;
      spec.mode = FaultMode::kBernoulli;
      spec.rate = rate;
      spec.seed = seed;
      FrameStore store;
      DutBackend d(EndlessCounter(), spec, store, kLayout);
      d.RunToStrobe(4000);
      double n = static_cast<double>(d.fault().sites.size());
      double sigma = std::sqrt(4000 * rate * (1 - rate));
      EXPECT_LE(std::abs(n - 4000 * rate), 4 * sigma) << rate << " " << seed;
    }
  }
}

TEST(DutBackend, ZeroRateNeverFires) {
  FaultSpec spec;
  spec.mode = FaultMode::kBernoulli;
  spec.rate = 0.0;
  FrameStore store;
  DutBackend d(EndlessCounter(), spec, store, kLayout);
  d.RunToStrobe(5000);
  EXPECT_TRUE(d.fault().sites.empty());
  EXPECT_EQ(ReadDutRegs(store)[0], 2500u);
}

TEST(DutBackend, SameSeedSameFaults) {
  FaultSpec spec;
  spec.mode = FaultMode::kBernoulli;
  spec.rate = 0.05;
  spec.seed = 99;
  spec.mutation = Mutation::kWrongRdResult;
  const MemImage& image = BuiltinWorkloads().at("ssort");
  FrameStore s1, s2;
  DutBackend a(image, spec, s1, kLayout);
  DutBackend b(image, spec, s2, kLayout);
  for (int i = 0; i < 50; ++i) {
    FramesReadySignal x = a.RunToStrobe(10);
    FramesReadySignal y = b.RunToStrobe(10);
    EXPECT_EQ(x.retired, y.retired);
    EXPECT_EQ(x.trap, y.trap);
    EXPECT_EQ(ReadDutRegs(s1), ReadDutRegs(s2));
  }
  EXPECT_EQ(a.fault().sites, b.fault().sites);
  EXPECT_FALSE(a.fault().sites.empty());
}

TEST(DutBackend, SaveRestoreReplaysBitExactly) {
  FaultSpec spec;
  spec.mode = FaultMode::kBernoulli;
  spec.rate = 0.3;
  spec.seed = 5;
  FrameStore store;
  DutBackend d(EndlessCounter(), spec, store, kLayout);
  d.RunToStrobe(100);
  DutSnapshot snap = d.Save();
  d.RunToStrobe(100);
  auto first_regs = ReadDutRegs(store);
  auto first_sites = d.fault().sites;
  d.Restore(snap);
  EXPECT_EQ(d.fault().sites.size(), snap.fired);
  d.RunToStrobe(100);
  EXPECT_EQ(ReadDutRegs(store), first_regs);
  EXPECT_EQ(d.fault().sites, first_sites);
}

TEST(DutBackend, ResyncCopiesGoldenStateIntoFrames) {
  FrameStore store;
  GoldenBackend g(SmallProgram());
  DutBackend d(SmallProgram(), FaultSpec::AtRetired({1, 2}), store, kLayout);
  GprSnapshot gs = g.RunToStrobe(2);
  d.RunToStrobe(2);
  EXPECT_NE(ReadDutRegs(store), gs.regs);
  d.Resync(g.state());
  EXPECT_EQ(ReadDutRegs(store), gs.regs);
  EXPECT_EQ(d.state(), g.state());
}

TEST(DutBackend, BitflipRetiredSiteChangesOneBitOfTheExecutedWord) {
  ProgramBuilder b;
  for (int i = 0; i < 8; ++i) b.I(Opcode::kAddi, 0, 0, 0);
  b.Ebreak();
  MemImage image = b.Build();
  FrameStore store;
  DutBackend d(image, FaultSpec::AtRetired({3}, Mutation::kInstrBitFlip), store, kLayout);
  try {
    d.RunToStrobe(3);
  } catch (const Error& e) {
    // A flipped opcode bit may legitimately produce an illegal word.
    EXPECT_EQ(e.code(), ErrorCode::kIllegalInstruction);
    return;
  }
  EXPECT_EQ(d.last_pc(), 8u);
  EXPECT_EQ(std::popcount(d.last_raw() ^ 0x00000013u), 1);
  ASSERT_EQ(d.fault().sites.size(), 1u);
  EXPECT_EQ(d.fault().sites[0].retired_index, 3u);
}

TEST(DutBackend, TrapFreezesUntilResync) {
  // lw through a pointer the fault pushes off alignment.
  ProgramBuilder b;
  auto data = b.AddData({0x1234});
  b.La(5, data);
  b.Load(Opcode::kLw, 6, 0, 5);
  b.Ebreak();
  MemImage image = b.Build();
  FrameStore store;
  DutBackend d(image, FaultSpec::AtRetired({2}), store, kLayout);
  FramesReadySignal sig = d.RunToStrobe(10);
  EXPECT_NE(sig.trap.find("MisalignedAccess"), std::string::npos) << sig.trap;
  EXPECT_EQ(sig.retired, 2u);
  EXPECT_FALSE(sig.halted);
  EXPECT_TRUE(d.trapped());
  EXPECT_EQ(d.RunToStrobe(10).retired, 2u);
  GoldenBackend g(image);
  g.RunToStrobe(2);
  d.Resync(g.state());
  EXPECT_FALSE(d.trapped());
  sig = d.RunToStrobe(10);
  EXPECT_TRUE(sig.halted);
  EXPECT_EQ(ReadDutRegs(store)[5], 0x1234u);
}

TEST(FaultSpec, ValidationErrors) {
  FaultSpec s;
  s.rate = 1.5;
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  s.rate = -0.1;
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  s.rate = std::nan("");
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  s = FaultSpec::AtRetired({0});
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  s = FaultSpec::AtRetired({3});
  s.mode = FaultMode::kBernoulli;
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  s = FaultSpec::AtRetired({3});
  s.rate = 0.0;
  EXPECT_EQ(CodeOf([&] { s.Validate(); }), ErrorCode::kInvalidFault);
  EXPECT_EQ(CodeOf([] { ParseFaultMode("sometimes"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseMutation("flip"); }), ErrorCode::kConfigError);
  EXPECT_EQ(ParseMutation("wrongrd"), Mutation::kWrongRdResult);
  EXPECT_EQ(ParseFaultMode("bernoulli"), FaultMode::kBernoulli);
}

TEST(InjectStaticFaults, QuarterOfFiveWordsPicksTwo) {
  ProgramBuilder b;
  for (int i = 1; i <= 5; ++i) b.I(Opcode::kAddi, i, 0, i);
  MemImage image = b.Build();
  for (Mutation m : {Mutation::kWrongRdResult, Mutation::kInstrBitFlip}) {
    auto [mutated, spec] = InjectStaticFaults(image, 0.25, 42, m);
    ASSERT_EQ(spec.word_sites.size(), 2u);
    EXPECT_NE(spec.word_sites[0], spec.word_sites[1]);
    EXPECT_TRUE(spec.sites.empty());
    if (m == Mutation::kWrongRdResult) {
      EXPECT_EQ(mutated, image);
    } else {
      ASSERT_EQ(spec.word_patches.size(), 2u);
      int changed = 0;
      for (size_t i = 0; i < image.words.size(); ++i) {
        Word diff = image.words[i] ^ mutated.words[i];
        if (diff != 0) {
          ++changed;
          EXPECT_EQ(std::popcount(diff), 1);
        }
      }
      EXPECT_EQ(changed, 2);
    }
  }
}

TEST(InjectStaticFaults, SiteCountIsCeilingOfRateTimesEligible) {
  const MemImage& image = BuiltinWorkloads().at("md5");
  const size_t eligible = EligibleWords(image, Mutation::kWrongRdResult).size();
  ASSERT_GT(eligible, 10u);
  for (double rate : {0.0, 0.001, 0.1, 0.3, 0.5, 1.0}) {
    auto [mutated, spec] = InjectStaticFaults(image, rate, 3, Mutation::kWrongRdResult);
    size_t expected = static_cast<size_t>(std::ceil(rate * eligible - 1e-9));
    EXPECT_EQ(spec.word_sites.size(), expected) << rate;
    std::set<Word> unique(spec.word_sites.begin(), spec.word_sites.end());
    EXPECT_EQ(unique.size(), spec.word_sites.size());
    for (Word addr : spec.word_sites) {
      DecodedInstr d = Decode(image.words[(addr - image.base) / 4]);
      EXPECT_TRUE(WritesRd(d.op));
      EXPECT_NE(d.rd, 0);
      EXPECT_LT((addr - image.base) / 4, image.text_words);
    }
  }
  ProgramBuilder b;
  for (int i = 0; i < 10; ++i) b.I(Opcode::kAddi, 1, 0, i);
  auto [m, spec] = InjectStaticFaults(b.Build(), 0.3, 1, Mutation::kWrongRdResult);
  EXPECT_EQ(spec.word_sites.size(), 3u);
}

TEST(InjectStaticFaults, DeterministicPerSeed) {
  const MemImage& image = BuiltinWorkloads().at("ssort");
  auto a = InjectStaticFaults(image, 0.2, 11, Mutation::kInstrBitFlip);
  auto b = InjectStaticFaults(image, 0.2, 11, Mutation::kInstrBitFlip);
  auto c = InjectStaticFaults(image, 0.2, 12, Mutation::kInstrBitFlip);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second.word_sites, b.second.word_sites);
  EXPECT_NE(a.first, c.first);
}

TEST(InjectStaticFaults, Errors) {
  MemImage empty;
  EXPECT_EQ(CodeOf([&] { InjectStaticFaults(empty, 0.1, 0, Mutation::kInstrBitFlip); }),
            ErrorCode::kEmptyImage);
  EXPECT_EQ(CodeOf([] {
              InjectStaticFaults(BuiltinWorkloads().at("ssort"), 2.0, 0,
                                 Mutation::kInstrBitFlip);
            }),
            ErrorCode::kInvalidFault);
  // Nothing eligible: no sites, no error.
  ProgramBuilder b;
  b.Emit(Decode(0x0000000f));  // fence never writes rd
  EXPECT_TRUE(
      InjectStaticFaults(b.Build(), 0.5, 0, Mutation::kWrongRdResult).second.word_sites.empty());
}

TEST(InjectStaticFaults, DutFaultsFireOnEveryExecutionOfASite) {
  const MemImage& image = BuiltinWorkloads().at("ssort");
  auto [mutated, spec] = InjectStaticFaults(image, 0.05, 4, Mutation::kWrongRdResult);
  std::set<Word> site_pcs(spec.word_sites.begin(), spec.word_sites.end());
  // Count how often the golden model retires a site pc.
  ArchState g = LoadState(image);
  uint64_t golden_hits = 0;
  while (!g.halted) {
    if (site_pcs.count(g.pc)) ++golden_hits;
    StepFetch(g);
  }
  // Resync after every instruction keeps the DUT on the golden path.
  FrameStore store;
  DutBackend d(image, spec, store, kLayout);
  GoldenBackend gb(image);
  while (!gb.state().halted) {
    gb.RunToStrobe(1);
    d.RunToStrobe(1);
    d.Resync(gb.state());
  }
  EXPECT_EQ(d.fault().sites.size(), golden_hits);
  EXPECT_GT(golden_hits, 0u);
}

TEST(FaultRng, BelowIsInRangeAndCoversIt) {
  FaultRng rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    uint64_t v = rng.Below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.Unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace feriver
