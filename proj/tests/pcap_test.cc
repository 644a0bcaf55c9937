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

#include "feriver/pcap.h"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <vector>

#include "feriver/error.h"
#include "gtest/gtest.h"

namespace feriver {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kConfigError;
}

// Bit-field composition written independently of FarEncode.
uint32_t ComposeFar(uint32_t bt, uint32_t tb, uint32_t row, uint32_t maj,
                    uint32_t min) {
  return bt * (1u << 23) + tb * (1u << 22) + row * (1u << 17) +
         maj * (1u << 7) + min;
}

TEST(FarCodecTest, Examples) {
  EXPECT_EQ(FarEncode({}), 0u);
  EXPECT_EQ(ComposeFar(1, 0, 3, 42, 5), 0x00861505u);
  EXPECT_EQ(FarEncode({1, 0, 3, 42, 5}), 0x00861505u);
  EXPECT_EQ(FarDecode(0x00861505), (FrameAddress{1, 0, 3, 42, 5}));
  EXPECT_EQ(FarDecode(0), FrameAddress{});
}

TEST(FarCodecTest, Errors) {
  EXPECT_EQ(CodeOf([] { FarEncode({0, 0, 0, 0, 128}); }), ErrorCode::kFieldOutOfRange);
  EXPECT_EQ(CodeOf([] { FarEncode({8, 0, 0, 0, 0}); }), ErrorCode::kFieldOutOfRange);
  EXPECT_EQ(CodeOf([] { FarEncode({0, 2, 0, 0, 0}); }), ErrorCode::kFieldOutOfRange);
  EXPECT_EQ(CodeOf([] { FarDecode(0x04000000); }), ErrorCode::kReservedBitsSet);
  EXPECT_EQ(CodeOf([] { FarDecode(0x3u << 23, /*stored_frame=*/true); }),
            ErrorCode::kInvalidBlockType);
  EXPECT_EQ(FarDecode(0x3u << 23).block_type, 3u);
}

TEST(FarIncrementTest, MinorThenMajor) {
  const FrameGeometry g;
  EXPECT_EQ(FarIncrement({0, 0, 0, 0, 0}, g), (FrameAddress{0, 0, 0, 0, 1}));
  EXPECT_EQ(FarIncrement({0, 0, 0, 5, g.minors_per_major - 1}, g),
            (FrameAddress{0, 0, 0, 6, 0}));
  EXPECT_EQ(CodeOf([&] {
              FarIncrement({0, 0, 0, g.majors_per_row - 1, g.minors_per_major - 1}, g);
            }),
            ErrorCode::kEndOfRow);
}

TEST(BlockTypeTableTest, DefaultsAndOverride) {
  BlockTypeTable table;
  EXPECT_EQ(table.Code("CLK"), 0u);
  EXPECT_EQ(table.Code("BRAM"), 1u);
  EXPECT_EQ(table.Code("CLB"), 2u);
  EXPECT_EQ(table.Name(1), "BRAM");
  table.Set("CLB", 0);
  EXPECT_EQ(table.Code("CLB"), 0u);
  EXPECT_EQ(CodeOf([&] { table.Set("X", 3); }), ErrorCode::kInvalidBlockType);
}

void FillRow(FrameStore& store, uint32_t row, std::mt19937_64& rng) {
  const FrameGeometry& g = store.geometry();
  for (uint32_t maj = 0; maj < g.majors_per_row; ++maj) {
    for (uint32_t min = 0; min < g.minors_per_major; ++min) {
      Frame f(g.frame_words);
      for (Word& w : f) w = static_cast<Word>(rng()) & 0x7fffffff;
      store.WriteFrame({1, 0, row, maj, min}, f);
    }
  }
}

TEST(ReadbackTest, FramingArithmetic) {
  std::mt19937_64 rng(5);
  FrameStore store;
  FillRow(store, 0, rng);
  const FrameAddress start{1, 0, 0, 0, 0};

  const std::vector<Word> nine = Readback(store, {start, 9});
  EXPECT_EQ(nine.size(), 1010u);
  EXPECT_EQ(nine.size() * sizeof(Word), 4040u);

  const std::vector<Word> one = Readback(store, {start, 1});
  EXPECT_EQ(one.size() * sizeof(Word), 808u);
  for (size_t i = 101; i < 202; ++i) EXPECT_EQ(one[i], 0u);
  EXPECT_EQ(std::vector<Word>(one.begin(), one.begin() + 101), *store.ReadFrame(start));
  EXPECT_EQ(store.far(), (FrameAddress{1, 0, 0, 0, 1}));

  EXPECT_EQ(CodeOf([&] { Readback(store, {start, 10}); }), ErrorCode::kTooManyFrames);
  EXPECT_EQ(CodeOf([&] { Readback(store, {start, 0}); }), ErrorCode::kInvalidRequest);
}

TEST(ReadbackTest, FollowsFarIncrementAcrossMajors) {
  std::mt19937_64 rng(6);
  FrameStore store;
  FillRow(store, 0, rng);
  const FrameGeometry& g = store.geometry();
  const FrameAddress start{1, 0, 0, 2, g.minors_per_major - 2};
  const std::vector<Word> words = Readback(store, {start, 4});
  FrameAddress fa = start;
  for (int i = 0; i < 4; ++i) {
    const Frame f = *store.ReadFrame(fa);
    EXPECT_TRUE(std::equal(f.begin(), f.end(), words.begin() + i * g.frame_words));
    fa = FarIncrement(fa, g);
  }
  EXPECT_EQ(store.far(), fa);
}

TEST(ReadbackTest, Errors) {
  std::mt19937_64 rng(7);
  FrameStore store;
  FillRow(store, 0, rng);
  const FrameGeometry& g = store.geometry();
  EXPECT_EQ(CodeOf([&] { Readback(store, {{1, 0, 1, 0, 0}, 1}); }),
            ErrorCode::kMissingFrame);
  const FrameAddress near_end{1, 0, 0, g.majors_per_row - 1, g.minors_per_major - 2};
  EXPECT_EQ(CodeOf([&] { Readback(store, {near_end, 3}); }), ErrorCode::kEndOfRow);
  // Ending exactly on the row's last frame is a complete transaction.
  EXPECT_EQ(Readback(store, {near_end, 2}).size(), 3 * g.frame_words);
}

TEST(ReadbackTest, NeverMutatesFrames) {
  std::mt19937_64 rng(8);
  FrameStore store;
  FillRow(store, 0, rng);
  std::vector<Frame> before;
  for (const FrameAddress& fa : store.Addresses()) before.push_back(*store.ReadFrame(fa));
  for (int i = 0; i < 200; ++i) {
    const FrameAddress start{1, 0, 0, static_cast<uint32_t>(rng() % 15),
                             static_cast<uint32_t>(rng() % 36)};
    Readback(store, {start, 1 + static_cast<uint32_t>(rng() % 9)});
  }
  size_t i = 0;
  for (const FrameAddress& fa : store.Addresses()) EXPECT_EQ(*store.ReadFrame(fa), before[i++]);
}

TEST(FrameStoreTest, RejectsReservedBlockTypeAndBadFrames) {
  FrameStore store;
  EXPECT_EQ(CodeOf([&] { store.WriteFrame({3, 0, 0, 0, 0}, Frame(101)); }),
            ErrorCode::kInvalidBlockType);
  EXPECT_EQ(CodeOf([&] { store.WriteFrame({1, 0, 0, 0, 0}, Frame(100)); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([&] { store.WriteFrame({1, 0, 2, 0, 0}, Frame(101)); }),
            ErrorCode::kFieldOutOfRange);
}

Frame Marked(bool first, bool last) {
  Frame f(kDefaultFrameWords, 0);
  if (first) f.front() = kTraceMarker;
  if (last) f.back() = kTraceMarker;
  return f;
}

TEST(LocateMarkerTest, Fixtures) {
  const FrameAddress f{1, 0, 0, 4, 10};
  const FrameAddress f1{1, 0, 0, 4, 11};
  const FrameAddress f2{1, 0, 0, 4, 12};
  {
    FrameStore store;
    store.WriteFrame(f, Marked(true, false));
    store.WriteFrame(f1, Marked(false, false));
    store.WriteFrame(f2, Marked(false, true));
    EXPECT_EQ(LocateMarker(store), std::make_pair(f, f2));
  }
  {
    FrameStore store;
    store.WriteFrame(f, Marked(false, false));
    EXPECT_EQ(CodeOf([&] { LocateMarker(store); }), ErrorCode::kMarkerNotFound);
  }
  {
    FrameStore store;
    store.WriteFrame(f, Marked(true, false));
    store.WriteFrame(f1, Marked(true, false));
    store.WriteFrame(f2, Marked(false, true));
    EXPECT_EQ(CodeOf([&] { LocateMarker(store); }), ErrorCode::kMarkerAmbiguous);
  }
}

TEST(GprLayoutTest, MirrorAndExtract) {
  FrameStore store;
  const GprLayout layout{{1, 0, 1, 3, 7}, 2};
  InstallLayout(store, layout);
  std::array<Word, kNumObservedRegs> regs{};
  MirrorGprs(store, regs, layout);
  std::vector<Word> payload = Readback(store, RequestFor(layout));
  EXPECT_EQ(ExtractGprs(payload, layout, kDefaultFrameWords), regs);
  for (int i = 1; i <= 31; ++i) EXPECT_EQ(payload[i], 0u);

  regs[0] = 5;
  MirrorGprs(store, regs, layout);
  payload = Readback(store, RequestFor(layout));
  EXPECT_EQ(payload[1], 5u);
  EXPECT_EQ(payload[0], kTraceMarker);
  EXPECT_EQ(payload[2 * kDefaultFrameWords - 1], kTraceMarker);
  EXPECT_EQ(LocateMarker(store), std::make_pair(layout.first, FrameAddress{1, 0, 1, 3, 8}));
}

TEST(GprLayoutTest, Errors) {
  FrameStore store;
  EXPECT_EQ(CodeOf([&] { InstallLayout(store, {{1, 0, 0, 0, 0}, 10}); }),
            ErrorCode::kLayoutOverflow);
  EXPECT_EQ(CodeOf([&] { InstallLayout(store, {{1, 0, 0, 15, 35}, 2}); }),
            ErrorCode::kLayoutOverflow);
  const GprLayout layout{{1, 0, 0, 0, 0}, 1};
  InstallLayout(store, layout);
  std::vector<Word> payload = Readback(store, RequestFor(layout));
  payload[0] = 0;
  EXPECT_EQ(CodeOf([&] { ExtractGprs(payload, layout, kDefaultFrameWords); }),
            ErrorCode::kMarkerCheckFailed);
  payload = Readback(store, RequestFor(layout));
  payload.pop_back();
  EXPECT_EQ(CodeOf([&] { ExtractGprs(payload, layout, kDefaultFrameWords); }),
            ErrorCode::kLengthMismatch);
}

TEST(GprLayoutTest, SmallFramesSpillAcrossFrames) {
  FrameGeometry g;
  g.frame_words = 8;
  FrameStore store(g);
  EXPECT_EQ(CodeOf([&] { InstallLayout(store, {{1, 0, 0, 0, 0}, 4}); }),
            ErrorCode::kLayoutOverflow);
  const GprLayout layout{{1, 0, 0, 0, 30}, 5};
  InstallLayout(store, layout);
  std::array<Word, kNumObservedRegs> regs{};
  for (int i = 0; i < kNumObservedRegs; ++i) regs[i] = 100 + i;
  MirrorGprs(store, regs, layout);
  EXPECT_EQ(ExtractGprs(Readback(store, RequestFor(layout)), layout, 8), regs);
}

TEST(GprLayoutTest, RoundTripProperty) {
  std::mt19937_64 rng(9);
  FrameStore store;
  const GprLayout layout{{1, 1, 1, 9, 20}, 3};
  InstallLayout(store, layout);
  for (int i = 0; i < 10000; ++i) {
    std::array<Word, kNumObservedRegs> regs;
    for (Word& r : regs) r = static_cast<Word>(rng());
    MirrorGprs(store, regs, layout);
    ASSERT_EQ(ExtractGprs(Readback(store, RequestFor(layout)), layout,
                          kDefaultFrameWords),
              regs);
  }
}

TEST(GprLayoutTest, ExtractFromWiderWindow) {
  const FrameGeometry g;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    FrameStore store;
    FillRow(store, 0, rng);
    const uint32_t n = 1 + static_cast<uint32_t>(rng() % kMaxDataFrames);
    const uint32_t span = 1 + static_cast<uint32_t>(rng() % n);
    const uint32_t offset = static_cast<uint32_t>(rng() % (n - span + 1));
    const uint32_t start_linear =
        static_cast<uint32_t>(rng() % (g.majors_per_row * g.minors_per_major - n + 1));
    const FrameAddress start{1, 0, 0, start_linear / g.minors_per_major,
                             start_linear % g.minors_per_major};
    FrameAddress first = start;
    for (uint32_t i = 0; i < offset; ++i) first = FarIncrement(first, g);
    const GprLayout layout{first, span};
    InstallLayout(store, layout);
    std::array<Word, kNumObservedRegs> regs;
    for (Word& r : regs) r = static_cast<Word>(rng());
    MirrorGprs(store, regs, layout);

    const ReadbackRequest req{start, n};
    ASSERT_EQ(LayoutOffsetIn(req, layout, g), offset);
    const std::vector<Word> payload = Readback(store, req);
    EXPECT_EQ(ExtractGprs(payload, req, layout, g), regs);
  }
}

TEST(GprLayoutTest, WindowErrors) {
  const FrameGeometry g;
  const GprLayout layout{{2, 0, 0, 4, 10}, 2};
  // Layout starts before the window, or its tail falls outside it.
  EXPECT_EQ(CodeOf([&] { LayoutOffsetIn({{2, 0, 0, 4, 11}, 5}, layout, g); }),
            ErrorCode::kLayoutOverflow);
  EXPECT_EQ(CodeOf([&] { LayoutOffsetIn({{2, 0, 0, 4, 8}, 3}, layout, g); }),
            ErrorCode::kLayoutOverflow);
  EXPECT_EQ(LayoutOffsetIn({{2, 0, 0, 4, 8}, 4}, layout, g), 2u);
  const std::vector<Word> short_payload(3 * kDefaultFrameWords, 0);
  EXPECT_EQ(CodeOf([&] { ExtractGprs(short_payload, {{2, 0, 0, 4, 8}, 4}, layout, g); }),
            ErrorCode::kLengthMismatch);
}

TEST(FrameDumpTest, LittleEndianFile) {
  const auto path = std::filesystem::temp_directory_path() / "feriver_dump_test.bin";
  const std::vector<Word> words = {0x04030201, kTraceMarker, 0};
  WriteFrameDump(path, words);
  EXPECT_EQ(std::filesystem::file_size(path), 12u);
  std::ifstream in(path, std::ios::binary);
  unsigned char first[4];
  in.read(reinterpret_cast<char*>(first), 4);
  EXPECT_EQ(first[0], 1);
  EXPECT_EQ(first[3], 4);
  EXPECT_EQ(ReadFrameDump(path), words);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace feriver
