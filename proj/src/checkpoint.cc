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

#include "feriver/checkpoint.h"

#include <cstdio>
#include <set>

#include "feriver/error.h"
#include "json.hpp"

namespace feriver {
namespace {

using OrderedJson = nlohmann::ordered_json;

const char* const kKeys[] = {"checkpoint_id", "strobe_index", "pc",      "mnemonic",
                             "gpr_bitstream", "gpr_iss",      "mismatched", "dut_pc_raw"};

[[noreturn]] void Violation(const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, what);
}

Word ParseHexWord(const nlohmann::json& value, const std::string& where) {
  if (!value.is_string()) Violation(where + " must be a hex string");
  const std::string& s = value.get_ref<const std::string&>();
  if (s.size() != 10 || s[0] != '0' || s[1] != 'x') {
    Violation(where + " must look like 0x%08x, got '" + s + "'");
  }
  Word w = 0;
  for (size_t i = 2; i < s.size(); ++i) {
    char c = s[i];
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      Violation(where + " has a non-lowercase-hex digit: '" + s + "'");
    }
    w = (w << 4) | static_cast<Word>(digit);
  }
  return w;
}

uint64_t ParseCount(const nlohmann::json& value, const std::string& where) {
  if (!value.is_number_unsigned()) {
    Violation(where + " must be a non-negative integer");
  }
  return value.get<uint64_t>();
}

GprSet ParseGprs(const nlohmann::json& value, const std::string& where) {
  if (!value.is_object()) Violation(where + " must be an object");
  if (value.size() != kNumObservedRegs) {
    Violation(where + " must hold exactly x1..x31");
  }
  GprSet regs{};
  for (int r = 1; r <= kNumObservedRegs; ++r) {
    auto it = value.find(RegName(r));
    if (it == value.end()) Violation(where + " lacks " + RegName(r));
    regs[r - 1] = ParseHexWord(*it, where + "." + RegName(r));
  }
  return regs;
}

int ParseRegName(const nlohmann::json& value) {
  if (!value.is_string()) Violation("mismatched entries must be register names");
  const std::string& s = value.get_ref<const std::string&>();
  for (int r = 1; r <= kNumObservedRegs; ++r) {
    if (s == RegName(r)) return r;
  }
  Violation("'" + s + "' is not one of x1..x31");
}

}  // namespace

std::string RegName(int reg) { return "x" + std::to_string(reg); }

std::vector<int> MismatchedRegs(const GprSet& a, const GprSet& b) {
  std::vector<int> out;
  for (int r = 1; r <= kNumObservedRegs; ++r) {
    if (a[r - 1] != b[r - 1]) out.push_back(r);
  }
  return out;
}

void Checkpoint::Validate() const {
  std::vector<int> expected = MismatchedRegs(gpr_bitstream, gpr_iss);
  if (expected.empty()) Violation("register sets are identical");
  if (mismatched != expected) {
    Violation("mismatched list disagrees with the register sets");
  }
}

std::string SerializeCheckpoint(const Checkpoint& cp) {
  cp.Validate();
  auto regs = [](const GprSet& set) {
    OrderedJson obj = OrderedJson::object();
    for (int r = 1; r <= kNumObservedRegs; ++r) obj[RegName(r)] = HexWord(set[r - 1]);
    return obj;
  };
  OrderedJson j;
  j["checkpoint_id"] = cp.checkpoint_id;
  j["strobe_index"] = cp.strobe_index;
  j["pc"] = HexWord(cp.pc);
  j["mnemonic"] = cp.mnemonic;
  j["gpr_bitstream"] = regs(cp.gpr_bitstream);
  j["gpr_iss"] = regs(cp.gpr_iss);
  OrderedJson names = OrderedJson::array();
  for (int r : cp.mismatched) names.push_back(RegName(r));
  j["mismatched"] = std::move(names);
  j["dut_pc_raw"] = HexWord(cp.dut_pc_raw);
  return j.dump(2) + "\n";
}

Checkpoint ParseCheckpoint(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    Violation(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) Violation("checkpoint must be a JSON object");
  std::set<std::string> allowed(std::begin(kKeys), std::end(kKeys));
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) Violation("unknown key '" + item.key() + "'");
  }
  for (const char* key : kKeys) {
    if (!j.contains(key)) Violation(std::string("missing key '") + key + "'");
  }
  Checkpoint cp;
  cp.checkpoint_id = ParseCount(j["checkpoint_id"], "checkpoint_id");
  cp.strobe_index = ParseCount(j["strobe_index"], "strobe_index");
  cp.pc = ParseHexWord(j["pc"], "pc");
  if (!j["mnemonic"].is_string()) Violation("mnemonic must be a string");
  cp.mnemonic = j["mnemonic"].get<std::string>();
  cp.gpr_bitstream = ParseGprs(j["gpr_bitstream"], "gpr_bitstream");
  cp.gpr_iss = ParseGprs(j["gpr_iss"], "gpr_iss");
  if (!j["mismatched"].is_array()) Violation("mismatched must be an array");
  for (const auto& name : j["mismatched"]) cp.mismatched.push_back(ParseRegName(name));
  cp.dut_pc_raw = ParseHexWord(j["dut_pc_raw"], "dut_pc_raw");
  cp.Validate();
  return cp;
}

}  // namespace feriver
