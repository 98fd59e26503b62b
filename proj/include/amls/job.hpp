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

#ifndef AMLS_JOB_HPP
#define AMLS_JOB_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amls/estimator.hpp"
#include "amls/input_model.hpp"
#include "amls/property.hpp"

namespace amls {

enum class JobKind { kAmls, kNaiveMc, kSweep, kOracleSelftest };

std::string to_string(JobKind kind);

struct SweepAxes {
  std::vector<double> quantile;
  std::vector<std::uint32_t> mh_steps;
  std::vector<std::size_t> n_chains;
  /// Ball radii; only for uniform-linf-ball models. Each cell rebuilds the
  /// ball around the same center.
  std::vector<double> radius;
  std::size_t repeats = 1;
};

struct OutputPaths {
  std::filesystem::path dir = ".";
  std::string report = "report.json";
  std::string counterexamples = "counterexamples.txt";
  std::string trace = "sweep.tsv";
};

/// One job file. Input model and property are kept as declared JSON and
/// materialized by resolve_problem, so sweeps can rebuild them per cell.
struct JobConfig {
  JobKind kind = JobKind::kAmls;
  std::optional<std::string> oracle;
  nlohmann::json input_model;
  nlohmann::json property;
  AmlsConfig amls;
  std::uint64_t naive_samples = 10'000'000;
  std::uint64_t naive_batch = 100'000;
  SweepAxes sweep;
  std::vector<std::string> selftest_oracles;
  double selftest_tolerance_log10 = 0.3;
  OutputPaths output;
  /// Directory relative paths in the file resolve against.
  std::filesystem::path base_dir = ".";

  /// Parses and validates; throws ConfigError naming the offending field.
  static JobConfig from_json(const nlohmann::json& doc,
                             const std::filesystem::path& base_dir = ".");
  static JobConfig load(const std::filesystem::path& path);

  /// Every field with defaults filled in.
  nlohmann::json to_json() const;
};

/// Defaults of `verify selftest` without a config file.
JobConfig default_selftest_config();

/// Materialized input model and property of a job.
struct Problem {
  InputModel model;
  PropertySpec spec;
  /// Known truth for oracle problems.
  std::optional<double> log_true_prob;
  /// Declarations with inferred values filled in (true class, ball center).
  nlohmann::json model_decl;
  nlohmann::json property_decl;
};

/// Builds the job's problem, replacing the ball radius when given.
Problem resolve_problem(const JobConfig& cfg,
                        std::optional<double> radius = std::nullopt);

/// Serialized outcome of one estimation run.
struct RunReport {
  static constexpr const char* kUnsatMarker = "unsat-below-threshold";

  nlohmann::json config;
  std::string job;
  std::uint64_t seed = 0;
  /// "estimate", kUnsatMarker or "diverged".
  std::string status;
  std::optional<double> log_estimate;
  std::optional<double> log10_estimate;
  std::vector<double> levels;
  std::vector<double> level_log_factors;
  std::vector<std::size_t> survivor_counts;
  std::vector<double> acceptance_trace;
  std::uint64_t property_evaluations = 0;
  std::optional<std::uint64_t> hits;
  std::optional<std::uint64_t> samples;
  std::optional<double> log_true_prob;
  std::string counterexample_file;
  std::string message;
  double wall_time_seconds = 0.0;

  std::size_t n_levels() const { return levels.size(); }

  static RunReport from_amls(const AmlsResult& r);
  static RunReport from_naive(const NaiveMcResult& r);

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& doc);

  bool operator==(const RunReport&) const = default;
};

/// Writes all final chains of a successful run, one whitespace-separated
/// row per sample with the property value last. Throws UsageError for an
/// unsat result.
void emit_counterexamples(const AmlsResult& result, const std::filesystem::path& path);

struct CounterexampleFile {
  Matrix points;
  std::vector<double> values;
};
CounterexampleFile read_counterexamples(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  bool quiet = false;
};

/// Executes a job and writes its artifacts. Returns the process exit status:
/// 0 when the job completed (an unsat sentinel counts), 1 for a diverged run
/// or a failed self-test.
int run_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log);

/// Loads the config then runs it; validation failures return 2 with the
/// message on `err`.
int run_job(const std::filesystem::path& config_path, const RunOptions& opts,
            std::ostream& log, std::ostream& err);

/// JSON Schemas of the weight file and the job file.
nlohmann::json export_schema();

}  // namespace amls

#endif  // AMLS_JOB_HPP
