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

#ifndef FERIVER_RECONSTRUCTOR_H_
#define FERIVER_RECONSTRUCTOR_H_

// Deterministic replay of the instructions leading to a checkpoint and the
// VCD waveform (checkpoint_<id>.vcd) built from it.

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "feriver/arbiter.h"
#include "feriver/backends.h"
#include "feriver/checkpoint.h"
#include "feriver/isa.h"
#include "feriver/pcap.h"
#include "feriver/workloads.h"

namespace feriver {

// Both sources as they stand at the start of strobe `strobe_index` (after
// the previous strobe's check and any resynchronisation).
struct BoundaryState {
  uint64_t strobe_index = 0;
  ArchState golden;
  Word golden_last_pc = 0;
  Word golden_last_raw = 0;
  DutSnapshot dut;
};

// Instructions [start_retired, end_retired] of the golden retirement count,
// replayed from base_state.
struct ReplayWindow {
  uint64_t start_retired = 0;
  uint64_t end_retired = 0;
  ArchState base_state;  // golden state at the boundary preceding the window
};

// start = max(0, end - window). Throws kConfigError for window == 0.
uint64_t WindowStart(uint64_t end_retired, uint64_t window);

// Default reconstruction window: two strobes.
inline uint64_t DefaultWindow(uint64_t strobe_counter) { return 2 * strobe_counter; }

// Values of every traced signal after one replay step.
struct ReplayStep {
  Word golden_pc = 0;
  Word golden_instr = 0;
  Word dut_pc = 0;
  Word dut_instr = 0;
  GprSet golden{};
  GprSet dut{};
};

struct ReplayTrace {
  ReplayWindow window;
  ReplayStep initial;              // state at start_retired
  std::vector<ReplayStep> steps;   // one per retired instruction after it
};

// Replays both sources from `base` (whose golden retirement count must not
// exceed start) until the strobe boundary at which the golden model has
// retired `end_retired` instructions, applying resynchronisation at
// intermediate boundaries exactly as the session does.
ReplayTrace ReplayFrom(const MemImage& image, const FaultSpec& fault,
                       const StrobeConfig& config, const BoundaryState& base,
                       uint64_t start_retired, uint64_t end_retired,
                       const FrameGeometry& geometry = {});

// The most recent strobe boundaries of a run, enough to start any replay
// window of a given length.
class BoundaryHistory {
 public:
  BoundaryHistory(uint64_t strobe_counter, uint64_t window);

  void Push(BoundaryState state);
  // The boundary at or before golden retirement count `retired`. Throws
  // kNonReproducibleSession if it has already been dropped.
  const BoundaryState& Before(uint64_t retired) const;

 private:
  uint64_t strobe_counter_;
  size_t capacity_;
  std::deque<BoundaryState> ring_;
};

// Replays the window of `window` instructions ending at `end_retired` from
// the history and checks it against `cp`.
ReplayTrace ReplayCheckpoint(const MemImage& image, const FaultSpec& fault,
                             const StrobeConfig& config, const FrameGeometry& geometry,
                             const BoundaryHistory& history, const Checkpoint& cp,
                             uint64_t end_retired, uint64_t window);

// Throws kNonReproducibleSession unless the trace ends on the checkpoint's
// register sets.
void CheckAgainst(const ReplayTrace& trace, const Checkpoint& cp);

// Standard VCD: 1 ns timescale, one instruction per 10 ns clock period.
std::string WriteVcd(const ReplayTrace& trace);

// Index into trace.steps (0 = initial state, i = steps[i-1]) where the
// register sets first differ, or -1.
int64_t FirstDivergence(const ReplayTrace& trace);

// Replays the session for `cp` from scratch (golden and DUT rebuilt from the
// workload and fault description) and returns the VCD. Throws
// kNonReproducibleSession if the replay does not end on cp's registers.
std::string Reconstruct(const MemImage& image, const FaultSpec& fault,
                        const StrobeConfig& config, const Checkpoint& cp,
                        uint64_t window, const FrameGeometry& geometry = {});

// Same, returning the trace.
ReplayTrace ReconstructTrace(const MemImage& image, const FaultSpec& fault,
                             const StrobeConfig& config, const Checkpoint& cp,
                             uint64_t window, const FrameGeometry& geometry = {});

}  // namespace feriver

#endif  // FERIVER_RECONSTRUCTOR_H_
