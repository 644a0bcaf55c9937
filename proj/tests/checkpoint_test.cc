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

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include "feriver/error.h"
#include "gtest/gtest.h"
#include "json.hpp"

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

Checkpoint Minimal() {
  Checkpoint cp;
  cp.mnemonic = "addi x1, x0, 1";
  cp.gpr_bitstream[0] = 1;
  cp.mismatched = {1};
  return cp;
}

Checkpoint RandomCheckpoint(std::mt19937_64& rng) {
  Checkpoint cp;
  cp.checkpoint_id = rng() >> (rng() % 64);
  cp.strobe_index = rng() >> (rng() % 64);
  cp.pc = static_cast<Word>(rng());
  cp.mnemonic = Disassemble(static_cast<Word>(rng()));
  for (int r = 0; r < kNumObservedRegs; ++r) {
    cp.gpr_iss[r] = rng() % 3 == 0 ? 0 : static_cast<Word>(rng());
    cp.gpr_bitstream[r] = rng() % 4 == 0 ? static_cast<Word>(rng()) : cp.gpr_iss[r];
  }
  cp.gpr_bitstream[rng() % kNumObservedRegs] ^= 1u << (rng() % 32);
  cp.mismatched = MismatchedRegs(cp.gpr_bitstream, cp.gpr_iss);
  cp.dut_pc_raw = static_cast<Word>(rng());
  return cp;
}

TEST(Checkpoint, MinimalSerialization) {
  std::string text = SerializeCheckpoint(Minimal());
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"checkpoint_id", "strobe_index", "pc", "mnemonic",
                                            "gpr_bitstream", "gpr_iss", "mismatched",
                                            "dut_pc_raw"}));
  EXPECT_EQ(j["mismatched"], nlohmann::ordered_json::array({"x1"}));
  EXPECT_EQ(j["pc"], "0x00000000");
  EXPECT_EQ(j["gpr_bitstream"]["x1"], "0x00000001");
  EXPECT_EQ(j["gpr_iss"]["x1"], "0x00000000");
  std::vector<std::string> regs;
  for (const auto& item : j["gpr_iss"].items()) regs.push_back(item.key());
  ASSERT_EQ(regs.size(), 31u);
  for (int r = 1; r <= 31; ++r) EXPECT_EQ(regs[r - 1], "x" + std::to_string(r));
  EXPECT_EQ(text.back(), '\n');
}

TEST(Checkpoint, RoundTripAndByteIdentity) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    Checkpoint cp = RandomCheckpoint(rng);
    std::string a = SerializeCheckpoint(cp);
    Checkpoint back = ParseCheckpoint(a);
    ASSERT_EQ(back, cp);
    ASSERT_EQ(SerializeCheckpoint(back), a);
    ASSERT_EQ(SerializeCheckpoint(cp), a);
  }
}

TEST(Checkpoint, HexIsLowercaseEightDigits) {
  Checkpoint cp = Minimal();
  cp.pc = 0xABCDEF01;
  std::string text = SerializeCheckpoint(cp);
  EXPECT_NE(text.find("\"0xabcdef01\""), std::string::npos);
}

TEST(Checkpoint, SchemaViolations) {
  const std::string good = SerializeCheckpoint(Minimal());
  auto mutate = [&](const std::function<void(nlohmann::ordered_json&)>& f) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(good);
    f(j);
    return j.dump(2);
  };
  auto rejects = [](const std::string& text) {
    return CodeOf([&] { ParseCheckpoint(text); }) == ErrorCode::kSchemaViolation;
  };
  // The three canonical cases.
  EXPECT_TRUE(rejects(mutate([](auto& j) { j.erase("mnemonic"); })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["pc"] = "0xZZ000000"; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["mismatched"] = {"x1", "x2"}; })));
  // Further malformations.
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["mismatched"] = nlohmann::ordered_json::array(); })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["pc"] = "0x0000000"; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["pc"] = "0x0000000A"; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["pc"] = 5; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["extra"] = 1; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["gpr_iss"].erase("x31"); })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["gpr_iss"]["x32"] = "0x00000000"; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["checkpoint_id"] = -1; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["strobe_index"] = "3"; })));
  EXPECT_TRUE(rejects(mutate([](auto& j) { j["mismatched"] = {"r1"}; })));
  EXPECT_TRUE(rejects("{"));
  EXPECT_TRUE(rejects("[]"));
  EXPECT_NO_THROW(ParseCheckpoint(good));
}

TEST(Checkpoint, SerializeRejectsInconsistentRecords) {
  Checkpoint cp = Minimal();
  cp.mismatched = {2};
  EXPECT_EQ(CodeOf([&] { SerializeCheckpoint(cp); }), ErrorCode::kSchemaViolation);
  cp.gpr_bitstream = cp.gpr_iss;
  cp.mismatched.clear();
  EXPECT_EQ(CodeOf([&] { SerializeCheckpoint(cp); }), ErrorCode::kSchemaViolation);
}

}  // namespace
}  // namespace feriver
