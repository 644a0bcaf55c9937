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

// Command-line front end:
//   feriver verify [options]   run one lock-step verification session
//   feriver bench  [options]   sweep error rates over workloads into a CSV

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feriver/error.h"
#include "feriver/harness.h"

namespace {

// Flags that mirror RunConfig keys; the given ones are applied on top of the
// --config file as key=value lines.
struct SharedFlags {
  std::string config_file;
  std::map<std::string, std::string> values;  // config key -> text
  bool resync = false;
  bool no_resync = false;

  void Add(CLI::App& app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app.add_option(flag, values[key], help);
  }

  void Register(CLI::App& app) {
    app.add_option("--config", config_file, "key=value file with RunConfig defaults");
    Add(app, "--workload", "workload", "builtin:<name>, <name>, or a .mem/.bin path");
    Add(app, "--strobe", "strobe_counter", "instructions between comparisons (>= 1)");
    Add(app, "--error-rate", "error_rate", "fault rate in [0, 1]");
    Add(app, "--mutation", "mutation", "bitflip or wrongrd");
    Add(app, "--fault-mode", "fault_mode", "static or bernoulli");
    Add(app, "--seed", "seed", "fault RNG seed");
    Add(app, "--vcd-window", "vcd_window", "instructions per waveform (0: two strobes)");
    Add(app, "--far", "far", "readback start frame address (hex)");
    Add(app, "--frames", "n_frames", "data frames per readback (<= 9)");
    Add(app, "--schedule", "schedule", "interleaved or concurrent");
    Add(app, "--bin-base", "bin_base", "load address of .bin workloads");
    Add(app, "--max-retired", "max_retired", "stop after this many instructions (0: never)");
    app.add_flag("--resync", resync, "overwrite the DUT from the golden model after a mismatch");
    app.add_flag("--no-resync", no_resync, "stop at the first mismatch");
  }

  feriver::RunConfig Build(CLI::App& app) {
    feriver::RunConfig config;
    if (!config_file.empty()) feriver::ApplyConfigFile(config, config_file);
    std::ostringstream lines;
    for (const auto& [key, value] : values) {
      if (!value.empty()) lines << key << " = " << value << "\n";
    }
    if (resync) lines << "resync = true\n";
    if (no_resync) lines << "resync = false\n";
    feriver::ApplyConfigText(config, lines.str());
    (void)app;
    return config;
  }
};

std::vector<double> ParseRates(const std::vector<std::string>& items) {
  std::vector<double> rates;
  for (const std::string& s : items) {
    try {
      size_t used = 0;
      double r = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      rates.push_back(r);
    } catch (const std::exception&) {
      throw feriver::Error(feriver::ErrorCode::kConfigError, "bad rate '" + s + "'");
    }
  }
  return rates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lock-step differential verification of RV32I cores via frame readback"};
  app.require_subcommand(1);

  SharedFlags verify_flags;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run one verification session");
  verify_flags.Register(*verify);
  verify->add_option("--out", verify_out, "output directory (FERIVER_OUT overrides)");

  SharedFlags bench_flags;
  std::vector<std::string> rates_text;
  std::vector<std::string> workloads;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "error-rate sweep into a CSV");
  bench_flags.Register(*bench);
  bench->add_option("--rates", rates_text, "comma-separated error rates")
      ->delimiter(',')
      ->required();
  bench->add_option("--workloads", workloads, "comma-separated workloads")
      ->delimiter(',')
      ->required();
  bench->add_option("--out", bench_out, "CSV path (FERIVER_OUT overrides with <dir>/bench.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      feriver::RunConfig config = verify_flags.Build(*verify);
      if (!verify_out.empty()) config.out = verify_out;
      return feriver::CmdVerify(config, std::cout, std::cerr);
    }
    feriver::RunConfig config = bench_flags.Build(*bench);
    return feriver::CmdBench(config, workloads, ParseRates(rates_text), bench_out, std::cout,
                             std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "feriver: configuration: " << e.what() << "\n";
    return 2;
  }
}
