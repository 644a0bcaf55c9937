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

#include "feriver/arbiter.h"

#include <chrono>

#include "feriver/error.h"

namespace feriver {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

GprLayout DefaultLayout(const FrameAddress& first, const FrameGeometry& geometry) {
  // Two markers plus 31 registers.
  const uint32_t needed = kNumObservedRegs + 2;
  uint32_t span = (needed + geometry.frame_words - 1) / geometry.frame_words;
  return {first, span};
}

void StrobeConfig::Validate(const FrameGeometry& geometry) const {
  if (strobe_counter == 0) {
    throw Error(ErrorCode::kConfigError, "strobe_counter must be >= 1");
  }
  if (n_frames == 0) {
    throw Error(ErrorCode::kInvalidRequest, "a readback needs at least one data frame");
  }
  if (n_frames > kMaxDataFrames) {
    throw Error(ErrorCode::kTooManyFrames,
                "PCAP readback is limited to " + std::to_string(kMaxDataFrames) +
                    " data frames plus 1 padding frame; requested " + std::to_string(n_frames));
  }
  ValidateLayout(gpr_layout, geometry);
  // Walk the whole window so a readback that would run off its row is
  // rejected here rather than on the first strobe.
  FrameAddress fa = readback_start;
  for (uint32_t i = 1; i < n_frames; ++i) fa = FarIncrement(fa, geometry);
  LayoutOffsetIn(request(), gpr_layout, geometry);
}

Arbiter::Arbiter(StrobeConfig config, FrameGeometry geometry)
    : config_(std::move(config)), geometry_(geometry) {
  geometry_.Validate();
  config_.Validate(geometry_);
}

void Arbiter::CheckSubmission(uint64_t index, bool already_buffered) const {
  if (index < next_check_ || (index == next_check_ && already_buffered)) {
    throw Error(ErrorCode::kDuplicateIndex,
                "strobe " + std::to_string(index) + " was already submitted");
  }
  if (index > next_check_) {
    throw Error(ErrorCode::kOutOfOrderSubmission,
                "strobe " + std::to_string(index) + " submitted while strobe " +
                    std::to_string(next_check_) + " is outstanding");
  }
}

void Arbiter::ThrowIfAborted() const {
  if (!abort_reason_.empty()) {
    throw Error(ErrorCode::kIncompleteRendezvous, "session aborted: " + abort_reason_);
  }
}

void Arbiter::Submit(const GprSnapshot& golden) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    CheckSubmission(golden.strobe_index, golden_.has_value());
    golden_ = golden;
  }
  cv_.notify_all();
}

void Arbiter::Submit(const FramesReadySignal& dut) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    CheckSubmission(dut.strobe_index, dut_.has_value());
    dut_ = dut;
  }
  cv_.notify_all();
}

CheckVerdict Arbiter::Check(uint64_t strobe_index, FrameStore& store) {
  std::unique_lock<std::mutex> lock(mu_);
  return CheckLocked(strobe_index, store);
}

CheckVerdict Arbiter::AwaitAndCheck(uint64_t strobe_index, FrameStore& store) {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] {
    return !abort_reason_.empty() || (golden_.has_value() && dut_.has_value()) ||
           strobe_index != next_check_;
  });
  ThrowIfAborted();
  return CheckLocked(strobe_index, store);
}

CheckVerdict Arbiter::CheckLocked(uint64_t strobe_index, FrameStore& store) {
  if (strobe_index != next_check_ || !golden_ || !dut_ ||
      golden_->strobe_index != strobe_index || dut_->strobe_index != strobe_index) {
    throw Error(ErrorCode::kIncompleteRendezvous,
                "strobe " + std::to_string(strobe_index) + " lacks " +
                    (!golden_ ? "the golden snapshot" : !dut_ ? "the DUT signal" : "a pairing"));
  }

  auto t0 = std::chrono::steady_clock::now();
  std::vector<Word> payload = Readback(store, config_.request());
  readback_seconds_ += SecondsSince(t0);

  auto t1 = std::chrono::steady_clock::now();
  GprSet dut_regs = ExtractGprs(payload, config_.request(), config_.gpr_layout, geometry_);
  CheckVerdict verdict;
  verdict.strobe_index = strobe_index;
  std::vector<int> diff = MismatchedRegs(dut_regs, golden_->regs);
  if (!diff.empty()) {
    Checkpoint cp;
    cp.checkpoint_id = next_checkpoint_id_++;
    cp.strobe_index = strobe_index;
    cp.pc = golden_->pc;
    cp.mnemonic = Disassemble(golden_->raw_instr);
    cp.gpr_bitstream = dut_regs;
    cp.gpr_iss = golden_->regs;
    cp.mismatched = std::move(diff);
    cp.dut_pc_raw = dut_->pc;
    verdict.verdict = Verdict::kMismatch;
    verdict.checkpoint = std::move(cp);
  }
  compare_seconds_ += SecondsSince(t1);

  golden_.reset();
  dut_.reset();
  ++next_check_;
  events_.push_back({strobe_index, verdict.verdict});
  cv_.notify_all();
  return verdict;
}

void Arbiter::Release(uint64_t strobe_index, bool stop) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (strobe_index + 1 > released_) released_ = strobe_index + 1;
    stop_ = stop_ || stop;
  }
  cv_.notify_all();
}

bool Arbiter::AwaitRelease(uint64_t strobe_index) {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return !abort_reason_.empty() || released_ > strobe_index; });
  ThrowIfAborted();
  return stop_;
}

void Arbiter::Abort(const std::string& reason) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (abort_reason_.empty()) abort_reason_ = reason.empty() ? "aborted" : reason;
  }
  cv_.notify_all();
}

std::optional<ArbiterEvent> Arbiter::PollEvent() {
  std::lock_guard<std::mutex> lock(mu_);
  if (events_.empty()) return std::nullopt;
  ArbiterEvent e = events_.front();
  events_.pop_front();
  return e;
}

uint64_t Arbiter::checkpoints() const {
  std::lock_guard<std::mutex> lock(mu_);
  return next_checkpoint_id_;
}

uint64_t Arbiter::checked() const {
  std::lock_guard<std::mutex> lock(mu_);
  return next_check_;
}

double Arbiter::readback_seconds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return readback_seconds_;
}

double Arbiter::compare_seconds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return compare_seconds_;
}

}  // namespace feriver
