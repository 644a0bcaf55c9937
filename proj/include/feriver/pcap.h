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

#ifndef FERIVER_PCAP_H_
#define FERIVER_PCAP_H_

// Software model of the configuration-frame readback path: segmented frame
// addresses, a frame store with an auto-incrementing FAR, bounded readback
// transactions, tracing-marker search and GPR placement inside frames.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feriver/isa.h"

namespace feriver {

inline constexpr uint32_t kDefaultFrameWords = 101;
inline constexpr uint32_t kMaxDataFrames = 9;
inline constexpr Word kTraceMarker = 0xdeadbeef;
inline constexpr uint8_t kReservedBlockType = 0b011;

// Frame address register layout:
//   [25:23] block type, [22] top/bottom, [21:17] row,
//   [16:7] major column, [6:0] minor column. Bits [31:26] are zero.
struct FrameAddress {
  uint32_t block_type = 0;
  uint32_t top_bottom = 0;
  uint32_t row = 0;
  uint32_t major_col = 0;
  uint32_t minor_col = 0;

  auto operator<=>(const FrameAddress&) const = default;
};

// Throws kFieldOutOfRange.
Word FarEncode(const FrameAddress& fa);

// Throws kReservedBitsSet; with stored_frame set, also kInvalidBlockType for
// the reserved block type.
FrameAddress FarDecode(Word word, bool stored_frame = false);

std::string FormatFar(const FrameAddress& fa);

struct FrameGeometry {
  uint32_t frame_words = kDefaultFrameWords;
  uint32_t rows = 2;
  uint32_t majors_per_row = 16;
  uint32_t minors_per_major = 36;

  // Throws kFieldOutOfRange when the geometry cannot be addressed.
  void Validate() const;
  bool Contains(const FrameAddress& fa) const;
};

// Next frame within the row. Throws kEndOfRow on the last frame of a row,
// kFieldOutOfRange when fa is outside the geometry.
FrameAddress FarIncrement(const FrameAddress& fa, const FrameGeometry& geometry);

// Block-type codes by name. The defaults are CLK=000, BRAM=001, CLB=010;
// device documentation differs, so callers may override entries.
class BlockTypeTable {
 public:
  BlockTypeTable();

  void Set(const std::string& name, uint32_t code);
  std::optional<uint32_t> Code(const std::string& name) const;
  std::optional<std::string> Name(uint32_t code) const;

 private:
  std::map<std::string, uint32_t> codes_;
};

using Frame = std::vector<Word>;

struct ReadbackRequest {
  FrameAddress start;
  uint32_t n_data_frames = 1;
};

// Configuration memory. One writer (the DUT) and one reader (the arbiter);
// every access is serialized on an internal mutex.
class FrameStore {
 public:
  explicit FrameStore(FrameGeometry geometry = {});

  FrameStore(const FrameStore&) = delete;
  FrameStore& operator=(const FrameStore&) = delete;

  const FrameGeometry& geometry() const { return geometry_; }

  // Throws kFieldOutOfRange, kInvalidBlockType, kLengthMismatch.
  void WriteFrame(const FrameAddress& fa, Frame words);
  // Throws kMissingFrame, kFieldOutOfRange.
  void WriteWord(const FrameAddress& fa, uint32_t offset, Word value);

  std::optional<Frame> ReadFrame(const FrameAddress& fa) const;
  bool HasFrame(const FrameAddress& fa) const;
  // Stored addresses in FAR order.
  std::vector<FrameAddress> Addresses() const;
  size_t size() const;

  FrameAddress far() const;

 private:
  friend std::vector<Word> Readback(FrameStore&, const ReadbackRequest&);

  FrameGeometry geometry_;
  mutable std::mutex mu_;
  std::map<Word, Frame> frames_;  // keyed by encoded address => FAR order
  FrameAddress far_;
};

// Streams n_data_frames frames starting at req.start followed by one all-zero
// padding frame. Leaves the FAR on the frame after the last data frame (or on
// the last data frame when it ends its row). Frame contents are never
// modified. Throws kTooManyFrames (> 9), kInvalidRequest (0),
// kMissingFrame, kEndOfRow.
std::vector<Word> Readback(FrameStore& store, const ReadbackRequest& req);

// Frames whose first word / last word hold the marker. Throws
// kMarkerNotFound or kMarkerAmbiguous unless there is exactly one of each.
std::pair<FrameAddress, FrameAddress> LocateMarker(
    const FrameStore& store, Word marker = kTraceMarker);

// Where the register file lives in configuration memory: a span of
// consecutive frames bracketed by the tracing marker (word 0 of the first
// frame, last word of the last frame) with x1..x31 packed right after the
// first marker.
struct GprLayout {
  FrameAddress first;
  uint32_t span_frames = 1;

  bool operator==(const GprLayout&) const = default;
};

// Throws kLayoutOverflow when the span exceeds one readback transaction,
// leaves the row, or cannot hold the registers between the markers.
void ValidateLayout(const GprLayout& layout, const FrameGeometry& geometry);

std::vector<FrameAddress> LayoutFrames(const GprLayout& layout,
                                       const FrameGeometry& geometry);

// Creates the span's frames (zeroed) and plants both markers.
void InstallLayout(FrameStore& store, const GprLayout& layout);

// Writes x1..x31; the markers are left alone.
void MirrorGprs(FrameStore& store, std::span<const Word, kNumObservedRegs> regs,
                const GprLayout& layout);
// Writes a single register (1..31).
void MirrorGpr(FrameStore& store, const GprLayout& layout, int reg, Word value);

ReadbackRequest RequestFor(const GprLayout& layout);

// Inverse of MirrorGprs over a readback payload. Throws kLengthMismatch,
// kMarkerCheckFailed.
std::array<Word, kNumObservedRegs> ExtractGprs(std::span<const Word> payload,
                                               const GprLayout& layout,
                                               uint32_t frame_words);

// Position (in frames) of the layout inside the readback window `req`.
// Throws kLayoutOverflow unless the whole layout lies inside the window.
uint32_t LayoutOffsetIn(const ReadbackRequest& req, const GprLayout& layout,
                        const FrameGeometry& geometry);

// Extracts x1..x31 from the payload of a readback window that contains the
// layout (possibly with unrelated frames around it).
std::array<Word, kNumObservedRegs> ExtractGprs(std::span<const Word> payload,
                                               const ReadbackRequest& req,
                                               const GprLayout& layout,
                                               const FrameGeometry& geometry);

// Little-endian 32-bit words in payload order.
void WriteFrameDump(const std::filesystem::path& path,
                    std::span<const Word> payload);
std::vector<Word> ReadFrameDump(const std::filesystem::path& path);

}  // namespace feriver

#endif  // FERIVER_PCAP_H_
