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

#ifndef FERIVER_HARNESS_H_
#define FERIVER_HARNESS_H_

// Command-level orchestration: configuration, the verify and bench flows,
// report/CSV output and the first-order time model.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "feriver/backends.h"
#include "feriver/pcap.h"
#include "feriver/session.h"
#include "feriver/workloads.h"

namespace feriver {

// Where the register file lives unless configured otherwise: a CLB frame.
inline constexpr FrameAddress kDefaultGprFar{2, 0, 0, 3, 0};

struct RunConfig {
  std::string workload = "builtin:qsort";
  uint64_t strobe_counter = 1;
  double error_rate = 0.0;
  uint64_t seed = 1;
  Mutation mutation = Mutation::kWrongRdResult;
  FaultMode fault_mode = FaultMode::kStatic;
  bool resync = false;
  uint64_t vcd_window = 0;  // 0: two strobes
  Word far = FarEncode(kDefaultGprFar);
  uint32_t n_frames = 1;
  std::string out = "feriver-out";
  Schedule schedule = Schedule::kInterleaved;
  Word bin_base = 0;
  uint64_t max_retired = 0;

  bool operator==(const RunConfig&) const = default;
};

// Applies "key = value" lines (keys are the RunConfig field names; '#'
// starts a comment). Throws kConfigError naming the line.
void ApplyConfigText(RunConfig& config, std::string_view text);
void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path);

// Session options for a configuration. Throws the validation error of the
// offending constraint (e.g. kTooManyFrames).
SessionOptions MakeSessionOptions(const RunConfig& config);

// The fault model for a configuration: static sites are drawn from the image.
FaultSpec MakeFault(const MemImage& image, const RunConfig& config);

// $FERIVER_OUT if set, otherwise config.out.
std::filesystem::path ResolveOutDir(const RunConfig& config);

// Short name for reports: "qsort" for builtin:qsort, the file stem otherwise.
std::string WorkloadName(const std::string& spec);

struct SessionReport {
  std::string workload;
  RunConfig config;
  FaultSpec fault;  // with fired sites
  SessionResult result;
  double throughput_ips = 0.0;

  std::string ToJson() const;
};

// verify: exit status 0 (no checkpoint), 1 (checkpoints written), 2 (error;
// the message names the failing stage). Writes report.json and the
// checkpoint_<id>.json/.vcd pairs into the output directory.
int CmdVerify(const RunConfig& config, std::ostream& out, std::ostream& err);

// Runs one verification and returns the report without writing files.
SessionReport RunVerification(const RunConfig& config, bool build_vcd = true);

struct BenchRow {
  std::string workload;
  double error_rate = 0.0;
  uint64_t retired = 0;
  uint64_t strobes = 0;
  uint64_t checkpoints = 0;
  double throughput_ips = 0.0;
  double wall_seconds = 0.0;
  PhaseTimes times;
  std::string status = "ok";
};

inline constexpr std::string_view kBenchHeader =
    "workload,error_rate,retired,checkpoints,throughput_ips,t_parallel,t_readback,"
    "t_compare,t_reconstruct,status";

// One session per (workload, rate) with resync on; waveforms are generated in
// memory so their cost is measured. Cell failures become status strings.
std::vector<BenchRow> RunBench(const RunConfig& base, const std::vector<std::string>& workloads,
                               const std::vector<double>& rates);
std::string BenchCsv(const std::vector<BenchRow>& rows);

// bench: writes the CSV (to csv_path, or <out dir>/bench.csv when empty).
// Exit status 2 only when every cell fails.
int CmdBench(const RunConfig& base, const std::vector<std::string>& workloads,
             const std::vector<double>& rates, const std::string& csv_path, std::ostream& out,
             std::ostream& err);

// predicted = parallel_unit * retired + check_unit * strobes
//           + reconstruct_unit * checkpoints   (seconds)
struct TimeModel {
  double parallel_unit = 0.0;
  double check_unit = 0.0;
  double reconstruct_unit = 0.0;
  bool calibrated = false;

  // Throws kUncalibratedModel.
  double Predict(uint64_t retired, uint64_t strobes, uint64_t checkpoints) const;
  double ReconstructTerm(uint64_t checkpoints) const;
};

// Unit costs from a fault-free run of `config` (per instruction and per
// strobe) and from repeated timing of a single checkpoint reconstruction.
TimeModel CalibrateTimeModel(const RunConfig& config, int repetitions = 15);

}  // namespace feriver

#endif  // FERIVER_HARNESS_H_
