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

#include "feriver/session.h"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "feriver/error.h"
#include "feriver/reconstructor.h"

namespace feriver {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string StrobeContext(uint64_t strobe) { return "strobe " + std::to_string(strobe); }

// State shared by both schedules; every method runs while the sources are
// paused at a strobe boundary.
class SessionRun {
 public:
  SessionRun(const MemImage& image, const FaultSpec& fault, const SessionOptions& options)
      : image_(image),
        fault_(fault),
        options_(options),
        window_(options.vcd_window ? options.vcd_window
                                   : DefaultWindow(options.strobe.strobe_counter)),
        store_(options.geometry),
        golden_(image),
        dut_(image, fault, store_, options.strobe.gpr_layout),
        arbiter_(options.strobe, options.geometry),
        history_(options.strobe.strobe_counter, window_) {}

  void RecordBoundary(uint64_t strobe) {
    history_.Push({strobe, golden_.state(), golden_.last_pc(), golden_.last_raw(), dut_.Save()});
  }

  GprSnapshot RunGolden(uint64_t strobe) {
    try {
      return golden_.RunToStrobe(options_.strobe.strobe_counter);
    } catch (const Error& e) {
      throw e.WithContext("golden " + StrobeContext(strobe));
    }
  }

  FramesReadySignal RunDut() { return dut_.RunToStrobe(options_.strobe.strobe_counter); }

  // Books the verdict and decides whether the session stops.
  bool Handle(const CheckVerdict& verdict) {
    ++result_.strobes;
    const bool mismatch = verdict.verdict == Verdict::kMismatch;
    if (mismatch) {
      auto t0 = Clock::now();
      const Checkpoint& cp = *verdict.checkpoint;
      const uint64_t end = golden_.state().retired;
      std::string vcd;
      if (options_.build_vcd) {
        try {
          vcd = WriteVcd(ReplayCheckpoint(image_, fault_, options_.strobe, options_.geometry,
                                          history_, cp, end, window_));
        } catch (const Error& e) {
          throw e.WithContext("reconstruct checkpoint " + std::to_string(cp.checkpoint_id));
        }
      }
      std::string json = SerializeCheckpoint(cp);
      if (options_.on_checkpoint) options_.on_checkpoint(cp, json, vcd);
      result_.checkpoint_list.push_back(cp);
      result_.checkpoint_retired.push_back(end);
      ++result_.checkpoints;
      if (options_.strobe.resync) dut_.Resync(golden_.state());
      result_.times.reconstruct += SecondsSince(t0);
    }
    if (golden_.state().halted) {
      result_.end_reason = "halt";
      return true;
    }
    if (mismatch && !options_.strobe.resync) {
      result_.end_reason = "mismatch";
      return true;
    }
    if (options_.max_retired && golden_.state().retired >= options_.max_retired) {
      result_.end_reason = "limit";
      return true;
    }
    return false;
  }

  SessionResult Finish(double wall) {
    result_.retired = golden_.state().retired;
    result_.fault_sites = dut_.fault().sites;
    result_.times.readback = arbiter_.readback_seconds();
    result_.times.compare = arbiter_.compare_seconds();
    while (auto e = arbiter_.PollEvent()) result_.events.push_back(*e);
    result_.wall_seconds = wall;
    return std::move(result_);
  }

  Arbiter& arbiter() { return arbiter_; }
  FrameStore& store() { return store_; }
  double checking_seconds() const {
    return arbiter_.readback_seconds() + arbiter_.compare_seconds();
  }
  void AddParallel(double seconds) { result_.times.parallel_run += seconds; }

 private:
  const MemImage& image_;
  const FaultSpec& fault_;
  const SessionOptions& options_;
  const uint64_t window_;
  FrameStore store_;
  GoldenBackend golden_;
  DutBackend dut_;
  Arbiter arbiter_;
  BoundaryHistory history_;
  SessionResult result_;
};

void RunInterleaved(SessionRun& run) {
  for (uint64_t s = 0;; ++s) {
    auto t0 = Clock::now();
    run.RecordBoundary(s);
    run.arbiter().Submit(run.RunGolden(s));
    run.arbiter().Submit(run.RunDut());
    run.AddParallel(SecondsSince(t0));
    CheckVerdict verdict;
    try {
      verdict = run.arbiter().Check(s, run.store());
    } catch (const Error& e) {
      throw e.WithContext("check " + StrobeContext(s));
    }
    if (run.Handle(verdict)) return;
  }
}

void RunConcurrent(SessionRun& run) {
  std::mutex error_mu;
  std::exception_ptr source_error;
  std::atomic<bool> coordinator_failed{false};
  auto source = [&](auto step) {
    try {
      for (uint64_t s = 0;; ++s) {
        step(s);
        if (run.arbiter().AwaitRelease(s)) return;
      }
    } catch (...) {
      // When the coordinator aborted, the error seen here is only the echo.
      if (coordinator_failed) return;
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!source_error) source_error = std::current_exception();
      }
      run.arbiter().Abort("a source failed");
    }
  };

  run.RecordBoundary(0);
  std::thread golden([&] { source([&](uint64_t s) { run.arbiter().Submit(run.RunGolden(s)); }); });
  std::thread dut([&] { source([&](uint64_t) { run.arbiter().Submit(run.RunDut()); }); });

  std::exception_ptr coordinator_error;
  try {
    for (uint64_t s = 0;; ++s) {
      auto t0 = Clock::now();
      const double checking_before = run.checking_seconds();
      CheckVerdict verdict;
      try {
        verdict = run.arbiter().AwaitAndCheck(s, run.store());
      } catch (const Error& e) {
        throw e.WithContext("check " + StrobeContext(s));
      }
      run.AddParallel(SecondsSince(t0) - (run.checking_seconds() - checking_before));
      const bool stop = run.Handle(verdict);
      if (!stop) run.RecordBoundary(s + 1);
      run.arbiter().Release(s, stop);
      if (stop) break;
    }
  } catch (...) {
    coordinator_error = std::current_exception();
    coordinator_failed = true;
    run.arbiter().Abort("coordinator failed");
  }
  golden.join();
  dut.join();
  // A source failure is the root cause of any abort the coordinator saw.
  std::lock_guard<std::mutex> lock(error_mu);
  if (source_error) std::rethrow_exception(source_error);
  if (coordinator_error) std::rethrow_exception(coordinator_error);
}

}  // namespace

std::string ScheduleName(Schedule schedule) {
  return schedule == Schedule::kInterleaved ? "interleaved" : "concurrent";
}

Schedule ParseSchedule(const std::string& text) {
  if (text == "interleaved") return Schedule::kInterleaved;
  if (text == "concurrent") return Schedule::kConcurrent;
  throw Error(ErrorCode::kConfigError, "unknown schedule '" + text + "'");
}

SessionResult DriveSession(const MemImage& image, const FaultSpec& fault,
                           const SessionOptions& options) {
  auto t0 = Clock::now();
  SessionRun run(image, fault, options);
  if (options.schedule == Schedule::kInterleaved) {
    RunInterleaved(run);
  } else {
    RunConcurrent(run);
  }
  return run.Finish(SecondsSince(t0));
}

}  // namespace feriver
