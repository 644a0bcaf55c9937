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

#include "feriver/harness.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "feriver/error.h"
#include "feriver/reconstructor.h"
#include "json.hpp"

namespace feriver {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void ConfigFail(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

std::string Trim(std::string_view s) {
  const char* ws = " \t\r\n";
  size_t a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return "";
  size_t b = s.find_last_not_of(ws);
  return std::string(s.substr(a, b - a + 1));
}

uint64_t ParseUnsigned(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    uint64_t v = std::stoull(value, &used, 0);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    ConfigFail(key + " expects a non-negative integer, got '" + value + "'");
  }
}

double ParseDouble(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    ConfigFail(key + " expects a number, got '" + value + "'");
  }
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  ConfigFail(key + " expects true/false, got '" + value + "'");
}

Word ParseWord(const std::string& key, const std::string& value) {
  uint64_t v = ParseUnsigned(key, value);
  if (v > 0xffffffffu) ConfigFail(key + " does not fit in 32 bits");
  return static_cast<Word>(v);
}

void SetKey(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "workload") {
    c.workload = value;
  } else if (key == "strobe_counter" || key == "strobe") {
    c.strobe_counter = ParseUnsigned(key, value);
  } else if (key == "error_rate") {
    c.error_rate = ParseDouble(key, value);
  } else if (key == "seed") {
    c.seed = ParseUnsigned(key, value);
  } else if (key == "mutation") {
    c.mutation = ParseMutation(value);
  } else if (key == "fault_mode") {
    c.fault_mode = ParseFaultMode(value);
  } else if (key == "resync") {
    c.resync = ParseBool(key, value);
  } else if (key == "vcd_window") {
    c.vcd_window = ParseUnsigned(key, value);
  } else if (key == "far") {
    c.far = ParseWord(key, value);
  } else if (key == "n_frames" || key == "frames") {
    uint64_t n = ParseUnsigned(key, value);
    c.n_frames = static_cast<uint32_t>(std::min<uint64_t>(n, 0xffffffffu));
  } else if (key == "out") {
    c.out = value;
  } else if (key == "schedule") {
    c.schedule = ParseSchedule(value);
  } else if (key == "bin_base") {
    c.bin_base = ParseWord(key, value);
  } else if (key == "max_retired") {
    c.max_retired = ParseUnsigned(key, value);
  } else {
    ConfigFail("unknown key '" + key + "'");
  }
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void RemoveStaleArtifacts(const fs::path& dir) {
  if (!fs::is_directory(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const std::string ext = entry.path().extension().string();
    if (name == "report.json" ||
        (name.rfind("checkpoint_", 0) == 0 && (ext == ".json" || ext == ".vcd"))) {
      fs::remove(entry.path());
    }
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kConfigError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::kConfigError, "write failed for " + path.string());
}

// Runs `fn`, turning an Error into a stage-labelled message.
template <typename Fn>
auto InStage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.WithContext(stage);
  }
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

void ApplyConfigText(RunConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = Trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) ConfigFail("line " + std::to_string(n) + ": expected key = value");
    try {
      SetKey(config, Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)));
    } catch (const Error& e) {
      ConfigFail("line " + std::to_string(n) + ": " + e.detail());
    }
  }
}

void ApplyConfigFile(RunConfig& config, const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) ConfigFail("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    ApplyConfigText(config, ss.str());
  } catch (const Error& e) {
    ConfigFail(path.string() + ": " + e.detail());
  }
}

SessionOptions MakeSessionOptions(const RunConfig& config) {
  SessionOptions o;
  FrameAddress start = FarDecode(config.far, /*stored_frame=*/true);
  if (!o.geometry.Contains(start)) {
    throw Error(ErrorCode::kFieldOutOfRange,
                "readback FAR " + FormatFar(start) + " is outside the frame geometry");
  }
  o.strobe.strobe_counter = config.strobe_counter;
  o.strobe.resync = config.resync;
  o.strobe.readback_start = start;
  o.strobe.gpr_layout = DefaultLayout(start, o.geometry);
  o.strobe.n_frames = config.n_frames;
  o.strobe.Validate(o.geometry);
  o.schedule = config.schedule;
  o.vcd_window = config.vcd_window;
  o.max_retired = config.max_retired;
  return o;
}

FaultSpec MakeFault(const MemImage& image, const RunConfig& config) {
  if (config.fault_mode == FaultMode::kStatic) {
    if (config.error_rate == 0.0) {
      FaultSpec spec;
      spec.seed = config.seed;
      spec.mutation = config.mutation;
      return spec;
    }
    return InjectStaticFaults(image, config.error_rate, config.seed, config.mutation).second;
  }
  FaultSpec spec;
  spec.mode = FaultMode::kBernoulli;
  spec.rate = config.error_rate;
  spec.seed = config.seed;
  spec.mutation = config.mutation;
  spec.Validate();
  return spec;
}

fs::path ResolveOutDir(const RunConfig& config) {
  const char* env = std::getenv("FERIVER_OUT");
  if (env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(config.out);
}

std::string WorkloadName(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return spec.substr(8);
  if (BuiltinWorkloads().count(spec)) return spec;
  return fs::path(spec).stem().string();
}

std::string SessionReport::ToJson() const {
  nlohmann::ordered_json j;
  j["workload"] = workload;
  j["strobe_counter"] = config.strobe_counter;
  j["schedule"] = ScheduleName(config.schedule);
  j["resync"] = config.resync;
  nlohmann::ordered_json f;
  f["mode"] = FaultModeName(fault.mode);
  f["mutation"] = MutationName(fault.mutation);
  f["rate"] = fault.rate;
  f["seed"] = fault.seed;
  f["static_sites"] = fault.word_sites.size() + fault.retired_sites.size();
  f["fired"] = result.fault_sites.size();
  j["fault"] = f;
  j["retired"] = result.retired;
  j["strobes"] = result.strobes;
  j["checkpoints"] = result.checkpoints;
  j["end_reason"] = result.end_reason;
  nlohmann::ordered_json t;
  t["parallel_run"] = result.times.parallel_run;
  t["readback"] = result.times.readback;
  t["compare"] = result.times.compare;
  t["reconstruct"] = result.times.reconstruct;
  j["wall_seconds"] = result.wall_seconds;
  j["times"] = t;
  j["throughput_ips"] = throughput_ips;
  j["throughput_mips"] = throughput_ips / 1e6;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const Checkpoint& cp : result.checkpoint_list) {
    files.push_back("checkpoint_" + std::to_string(cp.checkpoint_id) + ".json");
  }
  j["checkpoint_files"] = files;
  return j.dump(2) + "\n";
}

namespace {

SessionReport RunWith(const RunConfig& config, SessionOptions options) {
  SessionReport report;
  report.config = config;
  report.workload = WorkloadName(config.workload);
  MemImage image = InStage("workload loading", [&] {
    return LoadWorkload(config.workload, config.bin_base);
  });
  report.fault = InStage("fault injection", [&] { return MakeFault(image, config); });
  report.result = InStage("lock-step session", [&] {
    return DriveSession(image, report.fault, options);
  });
  report.fault.sites = report.result.fault_sites;
  report.throughput_ips = report.result.wall_seconds > 0
                              ? static_cast<double>(report.result.retired) /
                                    report.result.wall_seconds
                              : 0.0;
  return report;
}

}  // namespace

SessionReport RunVerification(const RunConfig& config, bool build_vcd) {
  SessionOptions options = InStage("configuration", [&] { return MakeSessionOptions(config); });
  options.build_vcd = build_vcd;
  return RunWith(config, std::move(options));
}

int CmdVerify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    SessionOptions options =
        InStage("configuration", [&] { return MakeSessionOptions(config); });
    const fs::path dir = ResolveOutDir(config);
    InStage("artifact output", [&] {
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::kConfigError, "cannot create " + dir.string());
      RemoveStaleArtifacts(dir);
      return 0;
    });
    options.on_checkpoint = [&](const Checkpoint& cp, const std::string& json,
                                const std::string& vcd) {
      const std::string stem = "checkpoint_" + std::to_string(cp.checkpoint_id);
      WriteText(dir / (stem + ".json"), json);
      WriteText(dir / (stem + ".vcd"), vcd);
    };
    SessionReport report = RunWith(config, std::move(options));
    InStage("artifact output", [&] {
      WriteText(dir / "report.json", report.ToJson());
      return 0;
    });
    const SessionResult& r = report.result;
    out << "verify " << report.workload << ": retired " << r.retired << ", strobes "
        << r.strobes << ", checkpoints " << r.checkpoints << ", "
        << Fixed(report.throughput_ips / 1e6, 3) << " MIPS, "
        << (r.checkpoints == 0 ? "clean" : "mismatch") << " (" << r.end_reason << ") -> "
        << dir.string() << "\n";
    return r.checkpoints == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "feriver verify: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "feriver verify: " << e.what() << "\n";
    return 2;
  }
}

std::vector<BenchRow> RunBench(const RunConfig& base, const std::vector<std::string>& workloads,
                               const std::vector<double>& rates) {
  std::vector<BenchRow> rows;
  for (const std::string& w : workloads) {
    for (double rate : rates) {
      BenchRow row;
      row.workload = WorkloadName(w);
      row.error_rate = rate;
      try {
        RunConfig c = base;
        c.workload = w;
        c.error_rate = rate;
        c.resync = true;
        SessionReport rep = RunVerification(c, /*build_vcd=*/true);
        row.retired = rep.result.retired;
        row.strobes = rep.result.strobes;
        row.checkpoints = rep.result.checkpoints;
        row.throughput_ips = rep.throughput_ips;
        row.wall_seconds = rep.result.wall_seconds;
        row.times = rep.result.times;
      } catch (const Error& e) {
        row.status = "error:" + std::string(ErrorCodeName(e.code()));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string BenchCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kBenchHeader << "\n";
  for (const BenchRow& r : rows) {
    char rate[32];
    std::snprintf(rate, sizeof(rate), "%g", r.error_rate);
    out << r.workload << "," << rate << "," << r.retired << "," << r.checkpoints << ","
        << Fixed(r.throughput_ips, 1) << "," << Fixed(r.times.parallel_run, 6) << ","
        << Fixed(r.times.readback, 6) << "," << Fixed(r.times.compare, 6) << ","
        << Fixed(r.times.reconstruct, 6) << "," << r.status << "\n";
  }
  return out.str();
}

int CmdBench(const RunConfig& base, const std::vector<std::string>& workloads,
             const std::vector<double>& rates, const std::string& csv_path, std::ostream& out,
             std::ostream& err) {
  try {
    if (workloads.empty()) ConfigFail("bench needs at least one workload");
    if (rates.empty()) ConfigFail("bench needs at least one error rate");
    fs::path path;
    const char* env = std::getenv("FERIVER_OUT");
    if (env != nullptr && *env != '\0') {
      path = fs::path(env) / "bench.csv";
    } else if (!csv_path.empty()) {
      path = csv_path;
    } else {
      path = fs::path(base.out) / "bench.csv";
    }
    std::vector<BenchRow> rows = RunBench(base, workloads, rates);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    WriteText(path, BenchCsv(rows));
    size_t failed = 0;
    for (const BenchRow& r : rows) {
      if (r.status != "ok") ++failed;
      out << "bench " << r.workload << " rate " << r.error_rate << ": " << r.checkpoints
          << " checkpoints, " << Fixed(r.throughput_ips / 1e6, 3) << " MIPS, " << r.status
          << "\n";
    }
    out << "wrote " << path.string() << "\n";
    if (failed == rows.size()) {
      err << "feriver bench: every cell failed\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "feriver bench: " << e.what() << "\n";
    return 2;
  }
}

double TimeModel::Predict(uint64_t retired, uint64_t strobes, uint64_t checkpoints) const {
  if (!calibrated) {
    throw Error(ErrorCode::kUncalibratedModel, "calibrate the unit costs first");
  }
  return parallel_unit * static_cast<double>(retired) +
         check_unit * static_cast<double>(strobes) + ReconstructTerm(checkpoints);
}

double TimeModel::ReconstructTerm(uint64_t checkpoints) const {
  if (!calibrated) {
    throw Error(ErrorCode::kUncalibratedModel, "calibrate the unit costs first");
  }
  return reconstruct_unit * static_cast<double>(checkpoints);
}

TimeModel CalibrateTimeModel(const RunConfig& config, int repetitions) {
  if (repetitions < 1) ConfigFail("calibration needs at least one repetition");
  RunConfig clean = config;
  clean.error_rate = 0.0;
  clean.resync = true;

  // Fault-free runs: per-instruction and per-strobe cost.
  std::vector<double> parallel, check;
  for (int i = 0; i < 3; ++i) {
    SessionReport rep = RunVerification(clean);
    const SessionResult& r = rep.result;
    if (r.retired == 0 || r.strobes == 0) ConfigFail("calibration run retired nothing");
    const double checking = r.times.readback + r.times.compare;
    parallel.push_back((r.wall_seconds - checking - r.times.reconstruct) /
                       static_cast<double>(r.retired));
    check.push_back(checking / static_cast<double>(r.strobes));
  }

  // A single checkpoint: fault the earliest instruction whose wrong result
  // is still visible at its strobe boundary.
  MemImage image = LoadWorkload(config.workload, config.bin_base);
  SessionOptions options = MakeSessionOptions(clean);
  const uint64_t k = config.strobe_counter;
  std::vector<double> reconstruct;
  for (uint64_t site = 2 * k + 1; site < 2 * k + 1 + 64 && reconstruct.empty(); ++site) {
    options.max_retired = ((site + k - 1) / k + 1) * k;
    FaultSpec probe = FaultSpec::AtRetired({site});
    if (DriveSession(image, probe, options).checkpoints != 1) continue;
    for (int i = 0; i < repetitions; ++i) {
      SessionResult r = DriveSession(image, probe, options);
      reconstruct.push_back(r.times.reconstruct);
    }
  }
  if (reconstruct.empty()) ConfigFail("could not provoke a checkpoint for calibration");

  TimeModel model;
  model.parallel_unit = std::max(0.0, Median(parallel));
  model.check_unit = Median(check);
  model.reconstruct_unit = Median(reconstruct);
  model.calibrated = true;
  return model;
}

}  // namespace feriver
