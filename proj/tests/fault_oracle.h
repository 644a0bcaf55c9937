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

#ifndef FERIVER_TESTS_FAULT_ORACLE_H_
#define FERIVER_TESTS_FAULT_ORACLE_H_

// Independent prediction of where a single wrong-result fault must be
// detected, computed with the reference interpreter only (no backend, frame
// store or arbiter code involved).

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "feriver/workloads.h"
#include "reference_interpreter.h"

namespace feriver::testing {

inline RefState RefLoad(const MemImage& image) {
  RefState s;
  for (size_t i = 0; i < image.words.size(); ++i) {
    for (int b = 0; b < 4; ++b) {
      s.mem[image.base + static_cast<uint32_t>(4 * i + b)] =
          static_cast<uint8_t>(image.words[i] >> (8 * b));
    }
  }
  s.pc = image.entry;
  return s;
}

inline bool RefFetch(const RefState& s, uint32_t& word) {
  word = 0;
  for (int b = 0; b < 4; ++b) {
    auto it = s.mem.find(s.pc + b);
    if (it == s.mem.end()) return false;
    word |= uint32_t{it->second} << (8 * b);
  }
  return true;
}

// Executes one instruction; false on any fault or when halted.
inline bool RefStep(RefState& s, uint32_t* executed = nullptr) {
  if (s.halted) return false;
  uint32_t w;
  if (!RefFetch(s, w)) return false;
  if (executed) *executed = w;
  return RefExecute(s, w) == RefFault::kNone;
}

// True when the opcode writes rd (U, J, JALR, loads, OP-IMM, OP).
inline bool RefWritesRd(uint32_t w) {
  switch (w & 0x7f) {
    case 0x37: case 0x17: case 0x6f: case 0x67: case 0x03: case 0x13: case 0x33:
      return true;
    default:
      return false;
  }
}

struct WrongRdOutcome {
  bool persists = false;           // registers differ at the detecting boundary
  uint64_t strobe_index = 0;       // first boundary at or after the fault
  uint64_t boundary_retired = 0;   // golden retirement count at that boundary
  uint32_t site_pc = 0;            // pc of the faulty instruction
  uint32_t boundary_pc = 0;        // pc of the last golden instruction
};

// Fault: the `site`-th retired instruction (1-based) writes result+1.
inline WrongRdOutcome PredictWrongRd(const MemImage& image, uint64_t site, uint64_t k) {
  RefState golden = RefLoad(image);
  RefState faulty = golden;
  WrongRdOutcome out;
  out.strobe_index = (site + k - 1) / k - 1;
  const uint64_t boundary = (out.strobe_index + 1) * k;
  bool faulty_alive = true;
  uint64_t retired = 0;
  while (retired < boundary && !golden.halted) {
    uint32_t pc = golden.pc;
    uint32_t w = 0;
    if (!RefStep(golden, &w)) break;
    ++retired;
    out.boundary_pc = pc;
    if (faulty_alive && !faulty.halted) {
      uint32_t fw = 0;
      faulty_alive = RefStep(faulty, &fw);
      if (faulty_alive && retired == site) {
        out.site_pc = pc;
        uint32_t rd = (fw >> 7) & 0x1f;
        if (RefWritesRd(fw) && rd != 0) faulty.x[rd] += 1;
      }
    }
  }
  out.boundary_retired = retired;
  for (int r = 1; r < 32; ++r) {
    if (golden.x[r] != faulty.x[r]) out.persists = true;
  }
  return out;
}

// Register sets of both sides after one retired instruction.
struct BruteStep {
  uint32_t golden[32];
  uint32_t dut[32];
  bool Differ() const {
    for (int r = 1; r < 32; ++r) {
      if (golden[r] != dut[r]) return true;
    }
    return false;
  }
};

// Per-instruction states of a golden copy and a faulty copy (result+1 at the
// 1-based DUT retirement indices in `sites`), stepped k instructions per
// strobe until the golden copy halts or reaches `end` retirements. Entry 0 is
// the initial state. With `resync` the faulty copy is overwritten from the
// golden copy at every boundary where the registers differ. A faulty copy
// that cannot step stays frozen until the next resync.
inline std::vector<BruteStep> BruteForceTrace(const MemImage& image,
                                              const std::set<uint64_t>& sites, uint64_t k,
                                              bool resync, uint64_t end) {
  std::vector<BruteStep> brute;
  RefState g = RefLoad(image);
  RefState d = g;
  bool alive = true;
  uint64_t retired = 0;
  uint64_t dut_retired = 0;
  auto snap = [&] {
    BruteStep s;
    std::copy(std::begin(g.x), std::end(g.x), s.golden);
    std::copy(std::begin(d.x), std::end(d.x), s.dut);
    brute.push_back(s);
  };
  snap();
  while (true) {
    for (uint64_t i = 0; i < k; ++i) {
      bool gm = !g.halted && RefStep(g);
      if (gm) ++retired;
      bool dm = false;
      if (alive && !d.halted) {
        uint32_t w = 0;
        dm = RefStep(d, &w);
        if (dm) {
          ++dut_retired;
          uint32_t rd = (w >> 7) & 0x1f;
          if (sites.count(dut_retired) && RefWritesRd(w) && rd != 0) d.x[rd] += 1;
        } else {
          alive = false;
        }
      }
      if (!gm && !dm) break;
      snap();
    }
    if (g.halted || retired >= end) break;
    bool differ = false;
    for (int r = 1; r < 32; ++r) differ |= g.x[r] != d.x[r];
    if (differ && resync) {
      d = g;
      dut_retired = retired;
      alive = true;
    }
  }
  return brute;
}

}  // namespace feriver::testing

#endif  // FERIVER_TESTS_FAULT_ORACLE_H_
