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

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "feriver/error.h"

namespace feriver {
namespace {

constexpr uint32_t kBlockTypeMax = 0x7;
constexpr uint32_t kRowMax = 0x1f;
constexpr uint32_t kMajorMax = 0x3ff;
constexpr uint32_t kMinorMax = 0x7f;

void CheckField(uint32_t value, uint32_t max, const char* name) {
  if (value > max) {
    throw Error(ErrorCode::kFieldOutOfRange,
                std::string(name) + " = " + std::to_string(value) +
                    " exceeds " + std::to_string(max));
  }
}

void RequireInGeometry(const FrameAddress& fa, const FrameGeometry& g) {
  if (!g.Contains(fa)) {
    throw Error(ErrorCode::kFieldOutOfRange,
                "frame " + FormatFar(fa) + " outside geometry");
  }
}

// Address of the frame `index` frames after `first`.
FrameAddress Advance(FrameAddress fa, uint32_t index, const FrameGeometry& g) {
  for (uint32_t i = 0; i < index; ++i) fa = FarIncrement(fa, g);
  return fa;
}

}  // namespace

Word FarEncode(const FrameAddress& fa) {
  CheckField(fa.block_type, kBlockTypeMax, "block_type");
  CheckField(fa.top_bottom, 1, "top_bottom");
  CheckField(fa.row, kRowMax, "row");
  CheckField(fa.major_col, kMajorMax, "major_col");
  CheckField(fa.minor_col, kMinorMax, "minor_col");
  return fa.block_type << 23 | fa.top_bottom << 22 | fa.row << 17 |
         fa.major_col << 7 | fa.minor_col;
}

FrameAddress FarDecode(Word word, bool stored_frame) {
  if ((word >> 26) != 0) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", word);
    throw Error(ErrorCode::kReservedBitsSet, buf);
  }
  FrameAddress fa{(word >> 23) & kBlockTypeMax, (word >> 22) & 1,
                  (word >> 17) & kRowMax, (word >> 7) & kMajorMax,
                  word & kMinorMax};
  if (stored_frame && fa.block_type == kReservedBlockType) {
    throw Error(ErrorCode::kInvalidBlockType, "block type 011 is reserved");
  }
  return fa;
}

std::string FormatFar(const FrameAddress& fa) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "{bt=%u,tb=%u,row=%u,maj=%u,min=%u}",
                fa.block_type, fa.top_bottom, fa.row, fa.major_col,
                fa.minor_col);
  return buf;
}

void FrameGeometry::Validate() const {
  if (frame_words == 0 || rows == 0 || majors_per_row == 0 ||
      minors_per_major == 0) {
    throw Error(ErrorCode::kFieldOutOfRange, "empty frame geometry");
  }
  CheckField(rows - 1, kRowMax, "rows");
  CheckField(majors_per_row - 1, kMajorMax, "majors_per_row");
  CheckField(minors_per_major - 1, kMinorMax, "minors_per_major");
}

bool FrameGeometry::Contains(const FrameAddress& fa) const {
  return fa.block_type <= kBlockTypeMax && fa.top_bottom <= 1 &&
         fa.row < rows && fa.major_col < majors_per_row &&
         fa.minor_col < minors_per_major;
}

FrameAddress FarIncrement(const FrameAddress& fa, const FrameGeometry& g) {
  RequireInGeometry(fa, g);
  FrameAddress next = fa;
  if (++next.minor_col < g.minors_per_major) return next;
  next.minor_col = 0;
  if (++next.major_col < g.majors_per_row) return next;
  throw Error(ErrorCode::kEndOfRow, FormatFar(fa) + " is the last frame of its row");
}

BlockTypeTable::BlockTypeTable()
    : codes_{{"CLK", 0b000}, {"BRAM", 0b001}, {"CLB", 0b010}} {}

void BlockTypeTable::Set(const std::string& name, uint32_t code) {
  CheckField(code, kBlockTypeMax, "block_type");
  if (code == kReservedBlockType) {
    throw Error(ErrorCode::kInvalidBlockType, "block type 011 is reserved");
  }
  codes_[name] = code;
}

std::optional<uint32_t> BlockTypeTable::Code(const std::string& name) const {
  auto it = codes_.find(name);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> BlockTypeTable::Name(uint32_t code) const {
  for (const auto& [name, c] : codes_) {
    if (c == code) return name;
  }
  return std::nullopt;
}

FrameStore::FrameStore(FrameGeometry geometry) : geometry_(geometry) {
  geometry_.Validate();
}

void FrameStore::WriteFrame(const FrameAddress& fa, Frame words) {
  RequireInGeometry(fa, geometry_);
  if (fa.block_type == kReservedBlockType) {
    throw Error(ErrorCode::kInvalidBlockType,
                "cannot store a frame of block type 011");
  }
  if (words.size() != geometry_.frame_words) {
    throw Error(ErrorCode::kLengthMismatch,
                "frame has " + std::to_string(words.size()) + " words, expected " +
                    std::to_string(geometry_.frame_words));
  }
  std::lock_guard<std::mutex> lock(mu_);
  frames_[FarEncode(fa)] = std::move(words);
}

void FrameStore::WriteWord(const FrameAddress& fa, uint32_t offset, Word value) {
  if (offset >= geometry_.frame_words) {
    throw Error(ErrorCode::kFieldOutOfRange,
                "word offset " + std::to_string(offset) + " outside frame");
  }
  const Word key = FarEncode(fa);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = frames_.find(key);
  if (it == frames_.end()) {
    throw Error(ErrorCode::kMissingFrame, FormatFar(fa));
  }
  it->second[offset] = value;
}

std::optional<Frame> FrameStore::ReadFrame(const FrameAddress& fa) const {
  const Word key = FarEncode(fa);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = frames_.find(key);
  if (it == frames_.end()) return std::nullopt;
  return it->second;
}

bool FrameStore::HasFrame(const FrameAddress& fa) const {
  const Word key = FarEncode(fa);
  std::lock_guard<std::mutex> lock(mu_);
  return frames_.count(key) != 0;
}

std::vector<FrameAddress> FrameStore::Addresses() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<FrameAddress> out;
  out.reserve(frames_.size());
  for (const auto& [key, frame] : frames_) out.push_back(FarDecode(key));
  return out;
}

size_t FrameStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return frames_.size();
}

FrameAddress FrameStore::far() const {
  std::lock_guard<std::mutex> lock(mu_);
  return far_;
}

std::vector<Word> Readback(FrameStore& store, const ReadbackRequest& req) {
  if (req.n_data_frames > kMaxDataFrames) {
    throw Error(ErrorCode::kTooManyFrames,
                std::to_string(req.n_data_frames) +
                    " data frames requested; one PCAP transaction carries at "
                    "most 9 data frames + 1 padding frame");
  }
  if (req.n_data_frames == 0) {
    throw Error(ErrorCode::kInvalidRequest, "readback of zero frames");
  }
  const FrameGeometry& g = store.geometry_;
  RequireInGeometry(req.start, g);

  std::lock_guard<std::mutex> lock(store.mu_);
  std::vector<Word> out;
  out.reserve((req.n_data_frames + 1) * g.frame_words);
  store.far_ = req.start;
  for (uint32_t i = 0; i < req.n_data_frames; ++i) {
    auto it = store.frames_.find(FarEncode(store.far_));
    if (it == store.frames_.end()) {
      throw Error(ErrorCode::kMissingFrame, FormatFar(store.far_));
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
    const bool last = i + 1 == req.n_data_frames;
    try {
      store.far_ = FarIncrement(store.far_, g);
    } catch (const Error&) {
      if (!last) {
        throw Error(ErrorCode::kEndOfRow,
                    "row ends inside the transaction at " +
                        FormatFar(store.far_));
      }
    }
  }
  out.resize(out.size() + g.frame_words, 0);  // padding frame
  return out;
}

std::pair<FrameAddress, FrameAddress> LocateMarker(const FrameStore& store,
                                                   Word marker) {
  const uint32_t last_word = store.geometry().frame_words - 1;
  std::vector<FrameAddress> firsts;
  std::vector<FrameAddress> lasts;
  for (const FrameAddress& fa : store.Addresses()) {
    const std::optional<Frame> frame = store.ReadFrame(fa);
    if (!frame) continue;
    if ((*frame)[0] == marker) firsts.push_back(fa);
    if ((*frame)[last_word] == marker) lasts.push_back(fa);
  }
  if (firsts.empty() && lasts.empty()) {
    throw Error(ErrorCode::kMarkerNotFound, "no tracing marker in the store");
  }
  if (firsts.size() != 1 || lasts.size() != 1 || lasts[0] < firsts[0]) {
    throw Error(ErrorCode::kMarkerAmbiguous,
                std::to_string(firsts.size() + lasts.size()) +
                    " marker occurrences, expected one opening and one closing");
  }
  return {firsts[0], lasts[0]};
}

void ValidateLayout(const GprLayout& layout, const FrameGeometry& g) {
  if (layout.span_frames == 0 || layout.span_frames > kMaxDataFrames) {
    throw Error(ErrorCode::kLayoutOverflow,
                "layout spans " + std::to_string(layout.span_frames) +
                    " frames; a readback transaction holds 1..9 data frames");
  }
  // Opening marker + 31 registers must end before the closing marker.
  if (uint64_t{layout.span_frames} * g.frame_words < kNumObservedRegs + 2) {
    throw Error(ErrorCode::kLayoutOverflow,
                "registers do not fit between the markers");
  }
  if (!g.Contains(layout.first)) {
    throw Error(ErrorCode::kLayoutOverflow,
                "layout start " + FormatFar(layout.first) + " outside geometry");
  }
  if (layout.first.block_type == kReservedBlockType) {
    throw Error(ErrorCode::kInvalidBlockType, "layout in block type 011");
  }
  try {
    Advance(layout.first, layout.span_frames - 1, g);
  } catch (const Error&) {
    throw Error(ErrorCode::kLayoutOverflow, "layout crosses the end of a row");
  }
}

std::vector<FrameAddress> LayoutFrames(const GprLayout& layout,
                                       const FrameGeometry& g) {
  ValidateLayout(layout, g);
  std::vector<FrameAddress> out{layout.first};
  for (uint32_t i = 1; i < layout.span_frames; ++i) {
    out.push_back(FarIncrement(out.back(), g));
  }
  return out;
}

void InstallLayout(FrameStore& store, const GprLayout& layout) {
  const FrameGeometry& g = store.geometry();
  const std::vector<FrameAddress> frames = LayoutFrames(layout, g);
  for (const FrameAddress& fa : frames) store.WriteFrame(fa, Frame(g.frame_words, 0));
  store.WriteWord(frames.front(), 0, kTraceMarker);
  store.WriteWord(frames.back(), g.frame_words - 1, kTraceMarker);
}

void MirrorGpr(FrameStore& store, const GprLayout& layout, int reg, Word value) {
  const FrameGeometry& g = store.geometry();
  const auto offset = static_cast<uint32_t>(reg);  // x1 sits right after the marker
  store.WriteWord(Advance(layout.first, offset / g.frame_words, g),
                  offset % g.frame_words, value);
}

void MirrorGprs(FrameStore& store, std::span<const Word, kNumObservedRegs> regs,
                const GprLayout& layout) {
  ValidateLayout(layout, store.geometry());
  for (int r = 1; r <= kNumObservedRegs; ++r) {
    MirrorGpr(store, layout, r, regs[r - 1]);
  }
}

ReadbackRequest RequestFor(const GprLayout& layout) {
  return {layout.first, layout.span_frames};
}

namespace {

// x1..x31 from the words of the layout frames (markers at both ends).
std::array<Word, kNumObservedRegs> ExtractBracket(std::span<const Word> span) {
  if (span.front() != kTraceMarker || span.back() != kTraceMarker) {
    throw Error(ErrorCode::kMarkerCheckFailed,
                "tracing marker missing at the layout bracket");
  }
  std::array<Word, kNumObservedRegs> regs{};
  for (int r = 1; r <= kNumObservedRegs; ++r) regs[r - 1] = span[r];
  return regs;
}

}  // namespace

std::array<Word, kNumObservedRegs> ExtractGprs(std::span<const Word> payload,
                                               const GprLayout& layout,
                                               uint32_t frame_words) {
  const size_t expected = size_t{layout.span_frames + 1} * frame_words;
  if (payload.size() != expected) {
    throw Error(ErrorCode::kLengthMismatch,
                "payload has " + std::to_string(payload.size()) +
                    " words, expected " + std::to_string(expected));
  }
  return ExtractBracket(payload.first(size_t{layout.span_frames} * frame_words));
}

uint32_t LayoutOffsetIn(const ReadbackRequest& req, const GprLayout& layout,
                        const FrameGeometry& geometry) {
  FrameAddress fa = req.start;
  for (uint32_t i = 0; i < req.n_data_frames; ++i) {
    if (fa == layout.first) {
      if (i + layout.span_frames > req.n_data_frames) break;
      return i;
    }
    if (i + 1 < req.n_data_frames) fa = FarIncrement(fa, geometry);
  }
  throw Error(ErrorCode::kLayoutOverflow,
              "register layout at " + FormatFar(layout.first) + " (+" +
                  std::to_string(layout.span_frames) + " frames) is not inside the readback of " +
                  std::to_string(req.n_data_frames) + " frames at " + FormatFar(req.start));
}

std::array<Word, kNumObservedRegs> ExtractGprs(std::span<const Word> payload,
                                               const ReadbackRequest& req,
                                               const GprLayout& layout,
                                               const FrameGeometry& geometry) {
  const size_t fw = geometry.frame_words;
  const size_t expected = size_t{req.n_data_frames + 1} * fw;
  if (payload.size() != expected) {
    throw Error(ErrorCode::kLengthMismatch,
                "payload has " + std::to_string(payload.size()) +
                    " words, expected " + std::to_string(expected));
  }
  const uint32_t offset = LayoutOffsetIn(req, layout, geometry);
  return ExtractBracket(payload.subspan(offset * fw, size_t{layout.span_frames} * fw));
}

void WriteFrameDump(const std::filesystem::path& path,
                    std::span<const Word> payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + path.string());
  for (Word w : payload) {
    const char bytes[4] = {static_cast<char>(w), static_cast<char>(w >> 8),
                           static_cast<char>(w >> 16), static_cast<char>(w >> 24)};
    out.write(bytes, 4);
  }
}

std::vector<Word> ReadFrameDump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  if (bytes.size() % 4 != 0) {
    throw Error(ErrorCode::kLengthMismatch, "dump is not a whole number of words");
  }
  std::vector<Word> words(bytes.size() / 4);
  for (size_t i = 0; i < words.size(); ++i) {
    words[i] = Word{bytes[4 * i]} | Word{bytes[4 * i + 1]} << 8 |
               Word{bytes[4 * i + 2]} << 16 | Word{bytes[4 * i + 3]} << 24;
  }
  return words;
}

}  // namespace feriver
