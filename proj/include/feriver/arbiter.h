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

#ifndef FERIVER_ARBITER_H_
#define FERIVER_ARBITER_H_

// The Sync/Check unit: pairs the golden snapshot and the DUT's frames-ready
// signal of each strobe, reads the DUT registers back from configuration
// frames, compares x1..x31 and raises a checkpoint on mismatch.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "feriver/backends.h"
#include "feriver/checkpoint.h"
#include "feriver/pcap.h"

namespace feriver {

struct StrobeConfig {
  uint64_t strobe_counter = 1;
  bool resync = false;
  GprLayout gpr_layout;
  FrameAddress readback_start;
  uint32_t n_frames = 1;  // data frames per readback

  ReadbackRequest request() const { return {readback_start, n_frames}; }

  // Throws kConfigError (strobe_counter), kTooManyFrames/kInvalidRequest
  // (n_frames) and kLayoutOverflow (layout not inside the readback window).
  void Validate(const FrameGeometry& geometry) const;
};

// The register layout starting at `readback_start` with the fewest frames
// that can hold it.
GprLayout DefaultLayout(const FrameAddress& first, const FrameGeometry& geometry);

enum class Verdict { kMatch, kMismatch };

struct CheckVerdict {
  uint64_t strobe_index = 0;
  Verdict verdict = Verdict::kMatch;
  std::optional<Checkpoint> checkpoint;  // present iff kMismatch
};

// Halt/interrupt notification: one per checked strobe.
struct ArbiterEvent {
  uint64_t strobe_index = 0;
  Verdict verdict = Verdict::kMatch;

  bool operator==(const ArbiterEvent&) const = default;
};

class Arbiter {
 public:
  Arbiter(StrobeConfig config, FrameGeometry geometry = {});

  Arbiter(const Arbiter&) = delete;
  Arbiter& operator=(const Arbiter&) = delete;

  // Buffers one side of the outstanding strobe. Only the strobe that has not
  // been checked yet may be submitted: earlier or repeated indices throw
  // kDuplicateIndex, later ones kOutOfOrderSubmission.
  void Submit(const GprSnapshot& golden);
  void Submit(const FramesReadySignal& dut);

  // Compares the buffered pair for `strobe_index`. Throws
  // kIncompleteRendezvous unless both sides are buffered for exactly that
  // index; propagates readback errors. The store must not be written while
  // this runs (the DUT is paused).
  CheckVerdict Check(uint64_t strobe_index, FrameStore& store);

  // Blocks until both sides of `strobe_index` are buffered, then checks.
  // Throws the abort error if Abort() is called meanwhile.
  CheckVerdict AwaitAndCheck(uint64_t strobe_index, FrameStore& store);

  // Lets the sources past strobe `strobe_index`; `stop` tells them to quit.
  void Release(uint64_t strobe_index, bool stop);
  // Blocks a source until `strobe_index` is released. Returns the stop flag.
  bool AwaitRelease(uint64_t strobe_index);

  // Wakes every waiter with an error (a source failed).
  void Abort(const std::string& reason);

  std::optional<ArbiterEvent> PollEvent();

  const StrobeConfig& config() const { return config_; }
  uint64_t checkpoints() const;
  uint64_t checked() const;
  // Seconds spent in readback and in extraction/comparison.
  double readback_seconds() const;
  double compare_seconds() const;

 private:
  void CheckSubmission(uint64_t index, bool already_buffered) const;
  CheckVerdict CheckLocked(uint64_t strobe_index, FrameStore& store);
  void ThrowIfAborted() const;

  const StrobeConfig config_;
  FrameGeometry geometry_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<GprSnapshot> golden_;
  std::optional<FramesReadySignal> dut_;
  uint64_t next_check_ = 0;
  uint64_t released_ = 0;  // strobes [0, released_) are released
  bool stop_ = false;
  std::string abort_reason_;
  uint64_t next_checkpoint_id_ = 0;
  std::deque<ArbiterEvent> events_;
  double readback_seconds_ = 0.0;
  double compare_seconds_ = 0.0;
};

}  // namespace feriver

#endif  // FERIVER_ARBITER_H_
