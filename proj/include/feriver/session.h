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

#ifndef FERIVER_SESSION_H_
#define FERIVER_SESSION_H_

// Drives one lock-step verification session: both sources run a strobe,
// rendezvous at the arbiter, get compared, and on mismatch a checkpoint and
// its replay waveform are produced.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "feriver/arbiter.h"
#include "feriver/backends.h"
#include "feriver/checkpoint.h"
#include "feriver/pcap.h"
#include "feriver/workloads.h"

namespace feriver {

enum class Schedule {
  kInterleaved,  // both sources take turns on the calling thread
  kConcurrent,   // each source runs on its own thread
};

std::string ScheduleName(Schedule schedule);
Schedule ParseSchedule(const std::string& text);  // throws kConfigError

struct SessionOptions {
  StrobeConfig strobe;
  FrameGeometry geometry;
  Schedule schedule = Schedule::kInterleaved;
  uint64_t vcd_window = 0;   // instructions; 0 selects two strobes
  uint64_t max_retired = 0;  // golden instructions; 0 means no limit
  bool build_vcd = true;     // replay every checkpoint into a waveform
  // Receives each checkpoint with its JSON and VCD text (VCD empty when
  // build_vcd is off). Time spent here counts as reconstruction.
  std::function<void(const Checkpoint&, const std::string& json, const std::string& vcd)>
      on_checkpoint;
};

// Wall-clock seconds per phase.
struct PhaseTimes {
  double parallel_run = 0.0;
  double readback = 0.0;
  double compare = 0.0;
  double reconstruct = 0.0;
};

struct SessionResult {
  uint64_t retired = 0;  // golden instructions
  uint64_t strobes = 0;
  uint64_t checkpoints = 0;
  std::vector<Checkpoint> checkpoint_list;
  std::vector<uint64_t> checkpoint_retired;  // golden count at each checkpoint
  std::vector<ArbiterEvent> events;
  std::vector<FaultSite> fault_sites;
  PhaseTimes times;
  double wall_seconds = 0.0;
  std::string end_reason;  // "halt", "mismatch" or "limit"
};

// Errors from any stage propagate with the strobe index attached.
SessionResult DriveSession(const MemImage& image, const FaultSpec& fault,
                           const SessionOptions& options);

}  // namespace feriver

#endif  // FERIVER_SESSION_H_
