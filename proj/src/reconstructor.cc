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

#include "feriver/reconstructor.h"

#include <sstream>
#include <utility>

#include "feriver/error.h"

namespace feriver {
namespace {

ReplayStep Capture(const GoldenBackend& g, const DutBackend& d) {
  ReplayStep st;
  st.golden_pc = g.last_pc();
  st.golden_instr = g.last_raw();
  st.dut_pc = d.last_pc();
  st.dut_instr = d.last_raw();
  st.golden = ObservedRegs(g.state());
  st.dut = ObservedRegs(d.state());
  return st;
}

// Executes one DUT instruction; a trap leaves the DUT frozen, as in a strobe.
bool DutStep(DutBackend& d) {
  try {
    return d.StepOne();
  } catch (const Error&) {
    return false;
  }
}

// VCD identifier codes: printable ASCII '!'..'~', base 94.
std::string VcdId(size_t index) {
  std::string id;
  do {
    id += static_cast<char>('!' + index % 94);
    index /= 94;
  } while (index > 0);
  return id;
}

std::string VcdBits(Word value) {
  if (value == 0) return "b0";
  std::string bits = "b";
  bool leading = true;
  for (int i = 31; i >= 0; --i) {
    bool bit = (value >> i) & 1;
    if (bit) leading = false;
    if (!leading) bits += bit ? '1' : '0';
  }
  return bits;
}

// Flat list of the 32-bit signals of one step, in declaration order.
std::vector<Word> Values(const ReplayStep& st) {
  std::vector<Word> v = {st.golden_pc, st.golden_instr};
  v.insert(v.end(), st.golden.begin(), st.golden.end());
  v.push_back(st.dut_pc);
  v.push_back(st.dut_instr);
  v.insert(v.end(), st.dut.begin(), st.dut.end());
  return v;
}

}  // namespace

uint64_t WindowStart(uint64_t end_retired, uint64_t window) {
  if (window == 0) throw Error(ErrorCode::kConfigError, "reconstruction window must be >= 1");
  return end_retired > window ? end_retired - window : 0;
}

ReplayTrace ReplayFrom(const MemImage& image, const FaultSpec& fault,
                       const StrobeConfig& config, const BoundaryState& base,
                       uint64_t start_retired, uint64_t end_retired,
                       const FrameGeometry& geometry) {
  const uint64_t base_retired = base.golden.retired;
  if (base_retired > start_retired || start_retired > end_retired) {
    throw Error(ErrorCode::kConfigError, "replay base lies after the window start");
  }
  GoldenBackend g(image);
  g.Restore(base.golden, base.strobe_index, base.golden_last_pc, base.golden_last_raw);
  FrameStore store(geometry);
  DutBackend d(image, fault, store, config.gpr_layout);
  d.Restore(base.dut);

  ReplayTrace trace;
  trace.window = {start_retired, end_retired, base.golden};
  if (base_retired == start_retired) trace.initial = Capture(g, d);
  uint64_t position = base_retired;  // golden retirement count, then DUT-only steps
  while (true) {
    for (uint64_t i = 0; i < config.strobe_counter; ++i) {
      bool golden_moved = g.StepOne();
      bool dut_moved = DutStep(d);
      if (!golden_moved && !dut_moved) break;
      ++position;
      if (position == start_retired) {
        trace.initial = Capture(g, d);
      } else if (position > start_retired) {
        trace.steps.push_back(Capture(g, d));
      }
    }
    if (g.state().halted || g.state().retired >= end_retired) break;
    if (config.resync && ObservedRegs(g.state()) != ObservedRegs(d.state())) {
      d.Resync(g.state());
    }
  }
  return trace;
}

void CheckAgainst(const ReplayTrace& trace, const Checkpoint& cp) {
  const ReplayStep& last = trace.steps.empty() ? trace.initial : trace.steps.back();
  if (last.golden != cp.gpr_iss || last.dut != cp.gpr_bitstream) {
    throw Error(ErrorCode::kNonReproducibleSession,
                "replay of checkpoint " + std::to_string(cp.checkpoint_id) +
                    " does not end on its register sets");
  }
}

int64_t FirstDivergence(const ReplayTrace& trace) {
  if (trace.initial.golden != trace.initial.dut) return 0;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i].golden != trace.steps[i].dut) return static_cast<int64_t>(i + 1);
  }
  return -1;
}

std::string WriteVcd(const ReplayTrace& trace) {
  std::ostringstream out;
  out << "$version feriver replay $end\n"
      << "$comment retired " << trace.window.start_retired << " to "
      << trace.window.end_retired << " $end\n"
      << "$timescale 1ns $end\n"
      << "$scope module feriver $end\n";
  size_t next_id = 0;
  const std::string clk = VcdId(next_id++);
  const std::string diverged = VcdId(next_id++);
  out << "$var wire 1 " << clk << " clk $end\n";
  out << "$var wire 1 " << diverged << " diverged $end\n";
  std::vector<std::string> ids;
  for (const char* side : {"golden", "dut"}) {
    out << "$scope module " << side << " $end\n";
    for (const char* name : {"pc", "instr"}) {
      ids.push_back(VcdId(next_id++));
      out << "$var wire 32 " << ids.back() << " " << name << " $end\n";
    }
    for (int r = 1; r <= kNumObservedRegs; ++r) {
      ids.push_back(VcdId(next_id++));
      out << "$var wire 32 " << ids.back() << " " << RegName(r) << " $end\n";
    }
    out << "$upscope $end\n";
  }
  out << "$upscope $end\n$enddefinitions $end\n";

  bool div = trace.initial.golden != trace.initial.dut;
  std::vector<Word> current = Values(trace.initial);
  out << "#0\n$dumpvars\n0" << clk << "\n" << (div ? '1' : '0') << diverged << "\n";
  for (size_t i = 0; i < ids.size(); ++i) out << VcdBits(current[i]) << " " << ids[i] << "\n";
  out << "$end\n";

  for (size_t step = 0; step < trace.steps.size(); ++step) {
    const uint64_t t = 10 * (step + 1);
    out << "#" << t << "\n1" << clk << "\n";
    const ReplayStep& st = trace.steps[step];
    if (!div && st.golden != st.dut) {
      div = true;
      out << "1" << diverged << "\n";
    }
    std::vector<Word> values = Values(st);
    for (size_t i = 0; i < ids.size(); ++i) {
      if (values[i] != current[i]) out << VcdBits(values[i]) << " " << ids[i] << "\n";
    }
    current = std::move(values);
    out << "#" << t + 5 << "\n0" << clk << "\n";
  }
  return out.str();
}

BoundaryHistory::BoundaryHistory(uint64_t strobe_counter, uint64_t window)
    : strobe_counter_(strobe_counter),
      capacity_(static_cast<size_t>((window + strobe_counter - 1) / strobe_counter + 2)) {
  if (strobe_counter == 0) throw Error(ErrorCode::kConfigError, "strobe_counter must be >= 1");
}

void BoundaryHistory::Push(BoundaryState state) {
  ring_.push_back(std::move(state));
  while (ring_.size() > capacity_) ring_.pop_front();
}

const BoundaryState& BoundaryHistory::Before(uint64_t retired) const {
  const uint64_t strobe = retired / strobe_counter_;
  for (const BoundaryState& b : ring_) {
    if (b.strobe_index == strobe) return b;
  }
  throw Error(ErrorCode::kNonReproducibleSession,
              "no recorded boundary for strobe " + std::to_string(strobe));
}

ReplayTrace ReplayCheckpoint(const MemImage& image, const FaultSpec& fault,
                             const StrobeConfig& config, const FrameGeometry& geometry,
                             const BoundaryHistory& history, const Checkpoint& cp,
                             uint64_t end_retired, uint64_t window) {
  const uint64_t start = WindowStart(end_retired, window);
  ReplayTrace trace =
      ReplayFrom(image, fault, config, history.Before(start), start, end_retired, geometry);
  CheckAgainst(trace, cp);
  return trace;
}

ReplayTrace ReconstructTrace(const MemImage& image, const FaultSpec& fault,
                             const StrobeConfig& config, const Checkpoint& cp,
                             uint64_t window, const FrameGeometry& geometry) {
  WindowStart(0, window);
  GoldenBackend g(image);
  FrameStore store(geometry);
  DutBackend d(image, fault, store, config.gpr_layout);
  BoundaryHistory history(config.strobe_counter, window);
  for (uint64_t s = 0;; ++s) {
    history.Push({s, g.state(), g.last_pc(), g.last_raw(), d.Save()});
    g.RunToStrobe(config.strobe_counter);
    d.RunToStrobe(config.strobe_counter);
    const bool differ = ObservedRegs(g.state()) != ObservedRegs(d.state());
    if (s == cp.strobe_index) {
      if (!differ) {
        throw Error(ErrorCode::kNonReproducibleSession,
                    "strobe " + std::to_string(s) + " compares equal on replay");
      }
      return ReplayCheckpoint(image, fault, config, geometry, history, cp,
                              g.state().retired, window);
    }
    if (g.state().halted || (differ && !config.resync)) {
      throw Error(ErrorCode::kNonReproducibleSession,
                  "session ends before strobe " + std::to_string(cp.strobe_index));
    }
    if (differ) d.Resync(g.state());
  }
}

std::string Reconstruct(const MemImage& image, const FaultSpec& fault,
                        const StrobeConfig& config, const Checkpoint& cp,
                        uint64_t window, const FrameGeometry& geometry) {
  return WriteVcd(ReconstructTrace(image, fault, config, cp, window, geometry));
}

}  // namespace feriver
