// Copyright 2026 The amls-verify Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// verify: statistical robustness estimation for dense-ReLU networks.
//
//   verify run <config.json>        run any job declared in the file
//   verify sweep <config.json>      run a parameter sweep job
//   verify selftest [config.json]   estimate every oracle problem
//   verify export-schema            print the weight-file and job schemas

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "amls/errors.hpp"
#include "amls/job.hpp"

namespace {

int dispatch(const std::string& path, bool expect_sweep, const amls::RunOptions& opts) {
  amls::JobConfig cfg;
  try {
    cfg = amls::JobConfig::load(path);
  } catch (const amls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (expect_sweep && cfg.kind != amls::JobKind::kSweep) {
    std::cerr << "config error: job: expected 'sweep', got '" << amls::to_string(cfg.kind)
              << "'\n";
    return 2;
  }
  return amls::run_job(cfg, opts, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate the probability that a network property is violated"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string run_path, sweep_path, selftest_path;
  auto* run = app.add_subcommand("run", "Run the job declared in a config file");
  run->add_option("config", run_path, "Job config (JSON)")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep job");
  sweep->add_option("config", sweep_path, "Sweep config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* selftest = app.add_subcommand("selftest", "Estimate every named oracle problem");
  selftest->add_option("config", selftest_path, "Optional oracle-selftest config")
      ->check(CLI::ExistingFile);
  auto* schema = app.add_subcommand("export-schema", "Print the weight-file and job schemas");

  CLI11_PARSE(app, argc, argv);

  amls::RunOptions opts;
  opts.seed = seed;
  opts.quiet = quiet;
  if (!out_dir.empty()) opts.out_dir = out_dir;

  try {
    if (*run) return dispatch(run_path, false, opts);
    if (*sweep) return dispatch(sweep_path, true, opts);
    if (*selftest) {
      if (!selftest_path.empty()) return dispatch(selftest_path, false, opts);
      return amls::run_job(amls::default_selftest_config(), opts, std::cout);
    }
    if (*schema) {
      const std::string text = amls::export_schema().dump(2);
      if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
        std::ofstream(*opts.out_dir / "schema.json") << text << '\n';
      } else {
        std::cout << text << '\n';
      }
      return 0;
    }
  } catch (const amls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
