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

#include "amls/job.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "amls/errors.hpp"
#include "amls/network.hpp"
#include "amls/oracle.hpp"

namespace amls {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kJobFormatVersion = 1;
constexpr double kLn10 = 2.302585092994045684;

// ---------------------------------------------------------------------------
// Field access with errors naming the field.

template <class T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

template <class T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + "." + key + ": missing");
  }
  return get_as<T>(obj.at(key), where + "." + key);
}

template <class T>
T optional_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get_as<T>(obj.at(key), where + "." + key);
}

void require_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
}

// Reals that may be -inf are written as the string "-inf".
json real_to_json(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

double real_from_json(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v.get<double>();
}

JobKind parse_kind(const std::string& s) {
  if (s == "amls") return JobKind::kAmls;
  if (s == "naive-mc") return JobKind::kNaiveMc;
  if (s == "sweep") return JobKind::kSweep;
  if (s == "oracle-selftest") return JobKind::kOracleSelftest;
  throw ConfigError("job: unknown kind '" + s +
                    "' (expected amls, naive-mc, sweep or oracle-selftest)");
}

AmlsConfig parse_amls(const json& obj, AmlsConfig cfg) {
  const std::string w = "amls";
  if (obj.is_null()) return cfg;
  require_object(obj, w);
  cfg.n_chains = optional_or<std::size_t>(obj, "n_chains", cfg.n_chains, w);
  cfg.mh_steps = optional_or<std::uint32_t>(obj, "mh_steps", cfg.mh_steps, w);
  cfg.quantile = optional_or<double>(obj, "quantile", cfg.quantile, w);
  if (obj.contains("p_min") && obj.contains("log_p_min")) {
    throw ConfigError("amls: give either p_min or log_p_min, not both");
  }
  if (obj.contains("p_min")) {
    const double p = required<double>(obj, "p_min", w);
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("amls.p_min: must lie in (0, 1)");
    cfg.log_p_min = std::log(p);
  }
  cfg.log_p_min = optional_or<double>(obj, "log_p_min", cfg.log_p_min, w);
  if (obj.contains("proposal_width_init") && !obj.at("proposal_width_init").is_null()) {
    cfg.proposal_width_init = required<double>(obj, "proposal_width_init", w);
  }
  cfg.accept_target = optional_or<double>(obj, "accept_target", cfg.accept_target, w);
  cfg.width_shrink = optional_or<double>(obj, "width_shrink", cfg.width_shrink, w);
  cfg.width_grow = optional_or<double>(obj, "width_grow", cfg.width_grow, w);
  if (obj.contains("max_levels") && !obj.at("max_levels").is_null()) {
    cfg.max_levels = required<std::size_t>(obj, "max_levels", w);
  }
  cfg.adapt_proposal = optional_or<bool>(obj, "adapt_proposal", cfg.adapt_proposal, w);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("amls: ") + e.what());
  }
  return cfg;
}

json amls_to_json(const AmlsConfig& cfg, const InputModel* model) {
  json width = nullptr;
  if (cfg.proposal_width_init) {
    width = *cfg.proposal_width_init;
  } else if (model) {
    width = cfg.resolved_width(*model);
  }
  return {{"n_chains", cfg.n_chains},
          {"mh_steps", cfg.mh_steps},
          {"quantile", cfg.quantile},
          {"log_p_min", cfg.log_p_min},
          {"proposal_width_init", width},
          {"accept_target", cfg.accept_target},
          {"width_shrink", cfg.width_shrink},
          {"width_grow", cfg.width_grow},
          {"max_levels", cfg.resolved_max_levels()},
          {"adapt_proposal", cfg.adapt_proposal},
          {"seed", cfg.seed}};
}

template <class T>
std::vector<T> parse_axis(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return {};
  auto values = get_as<std::vector<T>>(obj.at(key), where + "." + key);
  if (values.empty()) throw ConfigError(where + "." + key + ": list is empty");
  return values;
}

// ---------------------------------------------------------------------------
// Problem materialization.

std::vector<double> vec_field(const json& obj, const char* key, const std::string& where) {
  return required<std::vector<double>>(obj, key, where);
}

PropertySpec build_property(const json& decl, const fs::path& base_dir, json& resolved,
                            std::optional<std::vector<double>>& reference) {
  const std::string w = "property";
  require_object(decl, w);
  const auto kind = required<std::string>(decl, "kind", w);
  resolved = decl;
  if (kind == "adversarial-margin") {
    fs::path net_path = required<std::string>(decl, "network", w);
    if (net_path.is_relative()) net_path = base_dir / net_path;
    if (!fs::exists(net_path)) {
      throw ConfigError("property.network: file not found: " + net_path.string());
    }
    std::shared_ptr<const Network> net;
    try {
      net = std::make_shared<const Network>(load_network(net_path));
    } catch (const LoadError& e) {
      throw ConfigError(std::string("property.network: ") + e.what());
    }
    if (decl.contains("reference_input")) {
      reference = vec_field(decl, "reference_input", w);
      if (reference->size() != net->input_dim()) {
        throw ConfigError("property.reference_input: has " +
                          std::to_string(reference->size()) + " entries, network expects " +
                          std::to_string(net->input_dim()));
      }
    }
    std::size_t true_class = 0;
    if (decl.contains("true_class")) {
      true_class = required<std::size_t>(decl, "true_class", w);
    } else if (reference) {
      true_class = infer_true_class(*net, *reference);
    } else {
      throw ConfigError("property: adversarial-margin needs true_class or reference_input");
    }
    resolved["true_class"] = true_class;
    return PropertySpec::adversarial_margin(std::move(net), true_class);
  }
  if (kind == "linear-threshold") {
    return PropertySpec::linear_threshold(vec_field(decl, "a", w), required<double>(decl, "b", w));
  }
  if (kind == "max-of-linear") {
    const auto& terms = decl.contains("terms") ? decl.at("terms") : json();
    if (!terms.is_array()) throw ConfigError("property.terms: expected an array");
    std::vector<LinearThreshold> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tw = "property.terms[" + std::to_string(i) + "]";
      out.push_back({vec_field(terms[i], "a", tw), required<double>(terms[i], "b", tw)});
    }
    return PropertySpec::max_of_linear(std::move(out));
  }
  if (kind == "analytic-builtin") {
    const auto name = required<std::string>(decl, "name", w);
    if (name != "neg-linf-distance") {
      throw ConfigError("property.name: unknown analytic builtin '" + name + "'");
    }
    return PropertySpec::neg_linf_distance(vec_field(decl, "center", w));
  }
  throw ConfigError("property.kind: unknown kind '" + kind + "'");
}

InputModel build_model(const json& decl, const std::optional<std::vector<double>>& reference,
                       std::optional<double> radius_override, json& resolved) {
  const std::string w = "input_model";
  require_object(decl, w);
  const auto kind = required<std::string>(decl, "kind", w);
  resolved = decl;
  if (kind == "uniform-box") {
    return InputModel::uniform_box(vec_field(decl, "lower", w), vec_field(decl, "upper", w));
  }
  if (kind == "uniform-linf-ball") {
    std::vector<double> center;
    if (decl.contains("center")) {
      center = vec_field(decl, "center", w);
    } else if (reference) {
      center = *reference;
      resolved["center"] = center;
    } else {
      throw ConfigError("input_model.center: missing (and no property.reference_input)");
    }
    const double radius = radius_override ? *radius_override : required<double>(decl, "radius", w);
    resolved["radius"] = radius;
    std::optional<Box> clip;
    if (decl.contains("clip") && !decl.at("clip").is_null()) {
      const auto& c = decl.at("clip");
      clip = Box{vec_field(c, "lower", "input_model.clip"),
                 vec_field(c, "upper", "input_model.clip")};
    }
    return InputModel::linf_ball(std::move(center), radius, std::move(clip));
  }
  if (kind == "standard-normal") {
    return InputModel::standard_normal(required<std::size_t>(decl, "dimension", w));
  }
  throw ConfigError("input_model.kind: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Output helpers.

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

fs::path output_dir(const JobConfig& cfg, const RunOptions& opts) {
  fs::path dir = opts.out_dir ? *opts.out_dir : cfg.output.dir;
  if (!opts.out_dir && dir.is_relative()) dir = cfg.base_dir / dir;
  fs::create_directories(dir);
  return dir;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string describe(const RunReport& r) {
  std::ostringstream s;
  s << r.status;
  if (r.log10_estimate) s << " log10=" << std::setprecision(6) << *r.log10_estimate;
  s << " K=" << r.n_levels() << " evals=" << r.property_evaluations;
  return s.str();
}

json resolved_config(const JobConfig& cfg, const Problem* problem) {
  json doc = cfg.to_json();
  if (problem) {
    doc["input_model"] = problem->model_decl;
    doc["property"] = problem->property_decl;
    doc["amls"] = amls_to_json(cfg.amls, &problem->model);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Jobs.

int run_amls_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const fs::path dir = output_dir(cfg, opts);
  const Problem problem = resolve_problem(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  int status = 0;
  try {
    const AmlsResult result = amls_run(problem.model, problem.spec, cfg.amls);
    report = RunReport::from_amls(result);
    if (!result.unsat) {
      emit_counterexamples(result, dir / cfg.output.counterexamples);
      report.counterexample_file = cfg.output.counterexamples;
    }
  } catch (const DivergedRunError& e) {
    report = RunReport::from_amls(e.partial());
    report.status = "diverged";
    report.log_estimate.reset();
    report.log10_estimate.reset();
    report.message = e.what();
    status = 1;
  }
  report.wall_time_seconds = seconds_since(start);
  report.job = to_string(cfg.kind);
  report.seed = cfg.amls.seed;
  report.log_true_prob = problem.log_true_prob;
  report.config = resolved_config(cfg, &problem);
  write_json(dir / cfg.output.report, report.to_json());
  if (!opts.quiet) log << "amls: " << describe(report) << '\n';
  return status;
}

int run_naive_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const fs::path dir = output_dir(cfg, opts);
  const Problem problem = resolve_problem(cfg);
  const auto start = std::chrono::steady_clock::now();
  const NaiveMcResult result = naive_mc(problem.model, problem.spec, cfg.naive_samples,
                                        cfg.naive_batch, cfg.amls.seed);
  RunReport report = RunReport::from_naive(result);
  report.wall_time_seconds = seconds_since(start);
  report.job = to_string(cfg.kind);
  report.seed = cfg.amls.seed;
  report.log_true_prob = problem.log_true_prob;
  report.config = resolved_config(cfg, &problem);
  write_json(dir / cfg.output.report, report.to_json());
  if (!opts.quiet) {
    log << "naive-mc: " << report.status << " hits=" << result.hits << "/" << result.samples;
    if (report.log10_estimate) log << " log10=" << *report.log10_estimate;
    log << '\n';
  }
  return 0;
}

int run_sweep_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const fs::path dir = output_dir(cfg, opts);
  fs::create_directories(dir / "cells");
  const SweepAxes& ax = cfg.sweep;
  const std::vector<double> rhos = ax.quantile.empty() ? std::vector{cfg.amls.quantile} : ax.quantile;
  const std::vector<std::uint32_t> steps =
      ax.mh_steps.empty() ? std::vector{cfg.amls.mh_steps} : ax.mh_steps;
  const std::vector<std::size_t> chains =
      ax.n_chains.empty() ? std::vector{cfg.amls.n_chains} : ax.n_chains;
  std::vector<std::optional<double>> radii;
  if (ax.radius.empty()) {
    radii.emplace_back();
  } else {
    for (double r : ax.radius) radii.emplace_back(r);
  }

  std::ostringstream table;
  table << "rho\tM\tN\teps\trepeat\tlog10_estimate\tK\tevaluations\n";
  std::size_t cell = 0, rows = 0;
  int status = 0;
  for (double rho : rhos) {
    for (std::uint32_t m : steps) {
      for (std::size_t n : chains) {
        for (const auto& radius : radii) {
          const Problem problem = resolve_problem(cfg, radius);
          AmlsConfig acfg = cfg.amls;
          acfg.quantile = rho;
          acfg.mh_steps = m;
          acfg.n_chains = n;
          acfg.validate();
          json runs = json::array();
          double sum_log10 = 0.0;
          std::size_t finite = 0;
          for (std::size_t rep = 0; rep < ax.repeats; ++rep) {
            acfg.seed = derive_seed(cfg.amls.seed, StreamTag::kSweepCell, cell, rep);
            const auto start = std::chrono::steady_clock::now();
            RunReport report;
            try {
              report = RunReport::from_amls(amls_run(problem.model, problem.spec, acfg));
            } catch (const DivergedRunError& e) {
              report = RunReport::from_amls(e.partial());
              report.status = "diverged";
              report.log_estimate.reset();
              report.log10_estimate.reset();
              report.message = e.what();
              status = 1;
            }
            report.wall_time_seconds = seconds_since(start);
            report.job = to_string(cfg.kind);
            report.seed = acfg.seed;
            report.log_true_prob = problem.log_true_prob;
            runs.push_back(report.to_json());
            double l10 = std::numeric_limits<double>::quiet_NaN();
            if (report.log10_estimate) {
              l10 = *report.log10_estimate;
              sum_log10 += l10;
              ++finite;
            } else if (report.status == RunReport::kUnsatMarker) {
              l10 = -std::numeric_limits<double>::infinity();
            }
            table << format_real(rho) << '\t' << m << '\t' << n << '\t'
                  << (radius ? format_real(*radius) : "-") << '\t' << rep << '\t'
                  << format_real(l10) << '\t' << report.n_levels() << '\t'
                  << report.property_evaluations << '\n';
            ++rows;
          }
          json cell_doc = {{"cell", cell},
                           {"quantile", rho},
                           {"mh_steps", m},
                           {"n_chains", n},
                           {"radius", radius ? json(*radius) : json(nullptr)},
                           {"repeats", ax.repeats},
                           {"input_model", problem.model_decl},
                           {"property", problem.property_decl},
                           {"amls", amls_to_json(acfg, &problem.model)},
                           {"finite_runs", finite},
                           {"mean_log10_estimate",
                            finite ? json(sum_log10 / static_cast<double>(finite)) : json(nullptr)},
                           {"log_true_prob", problem.log_true_prob
                                                 ? real_to_json(*problem.log_true_prob)
                                                 : json(nullptr)},
                           {"runs", std::move(runs)}};
          char name[32];
          std::snprintf(name, sizeof name, "cell_%04zu.json", cell);
          write_json(dir / "cells" / name, cell_doc);
          if (!opts.quiet) {
            log << "sweep cell " << cell << ": rho=" << rho << " M=" << m << " N=" << n;
            if (radius) log << " eps=" << *radius;
            if (finite) log << " mean log10=" << sum_log10 / static_cast<double>(finite);
            log << '\n';
          }
          ++cell;
        }
      }
    }
  }
  {
    std::ofstream out(dir / cfg.output.trace);
    if (!out) throw Error("cannot write " + (dir / cfg.output.trace).string());
    out << table.str();
  }
  write_json(dir / cfg.output.report, {{"job", "sweep"},
                                       {"config", resolved_config(cfg, nullptr)},
                                       {"cells", cell},
                                       {"rows", rows},
                                       {"trace", cfg.output.trace}});
  return status;
}

int run_selftest_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const fs::path dir = output_dir(cfg, opts);
  const std::vector<std::string> names =
      cfg.selftest_oracles.empty() ? oracle_names() : cfg.selftest_oracles;
  json entries = json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    const OracleProblem problem = oracle_by_name(name);
    RunReport report;
    bool pass = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      const AmlsResult r = amls_run(problem.model, problem.spec, cfg.amls);
      report = RunReport::from_amls(r);
      if (std::isinf(problem.log_true_prob)) {
        pass = r.unsat;
      } else {
        pass = !r.unsat && std::abs(r.log_estimate - problem.log_true_prob) / kLn10 <=
                               cfg.selftest_tolerance_log10;
      }
    } catch (const DivergedRunError& e) {
      report = RunReport::from_amls(e.partial());
      report.status = "diverged";
      report.log_estimate.reset();
      report.log10_estimate.reset();
      report.message = e.what();
    }
    report.wall_time_seconds = seconds_since(start);
    report.job = to_string(cfg.kind);
    report.seed = cfg.amls.seed;
    report.log_true_prob = problem.log_true_prob;
    all_pass = all_pass && pass;
    json entry = report.to_json();
    entry["oracle"] = name;
    entry["pass"] = pass;
    entries.push_back(std::move(entry));

    log << (pass ? "PASS " : "FAIL ") << name << ": truth log10="
        << format_real(problem.log_true_prob / kLn10) << " result "
        << describe(report) << '\n';
  }
  write_json(dir / cfg.output.report, {{"job", "oracle-selftest"},
                                       {"config", resolved_config(cfg, nullptr)},
                                       {"passed", all_pass},
                                       {"oracles", std::move(entries)}});
  return all_pass ? 0 : 1;
}

}  // namespace

std::string to_string(JobKind kind) {
  switch (kind) {
    case JobKind::kAmls:
      return "amls";
    case JobKind::kNaiveMc:
      return "naive-mc";
    case JobKind::kSweep:
      return "sweep";
    case JobKind::kOracleSelftest:
      return "oracle-selftest";
  }
  return "unknown";
}

JobConfig JobConfig::from_json(const json& doc, const fs::path& base_dir) {
  require_object(doc, "config");
  if (required<int>(doc, "format_version", "config") != kJobFormatVersion) {
    throw ConfigError("config.format_version: must be 1");
  }
  JobConfig cfg;
  cfg.base_dir = base_dir;
  cfg.kind = parse_kind(required<std::string>(doc, "job", "config"));
  cfg.amls = parse_amls(doc.contains("amls") ? doc.at("amls") : json(), cfg.amls);
  cfg.amls.seed = optional_or<std::uint64_t>(doc, "seed", 0, "config");

  if (doc.contains("oracle")) {
    cfg.oracle = required<std::string>(doc, "oracle", "config");
    oracle_by_name(*cfg.oracle);
    if (doc.contains("input_model") || doc.contains("property")) {
      throw ConfigError("config.oracle: cannot be combined with input_model/property");
    }
  } else if (cfg.kind != JobKind::kOracleSelftest) {
    if (!doc.contains("input_model")) throw ConfigError("config.input_model: missing");
    if (!doc.contains("property")) throw ConfigError("config.property: missing");
    cfg.input_model = doc.at("input_model");
    cfg.property = doc.at("property");
  }

  if (doc.contains("naive_mc")) {
    const auto& nm = doc.at("naive_mc");
    require_object(nm, "naive_mc");
    cfg.naive_samples = optional_or<std::uint64_t>(nm, "samples", cfg.naive_samples, "naive_mc");
    cfg.naive_batch = optional_or<std::uint64_t>(nm, "batch_size", cfg.naive_batch, "naive_mc");
    if (cfg.naive_samples == 0) throw ConfigError("naive_mc.samples: must be at least 1");
    if (cfg.naive_batch == 0) throw ConfigError("naive_mc.batch_size: must be at least 1");
  }

  if (cfg.kind == JobKind::kSweep) {
    if (!doc.contains("sweep")) throw ConfigError("config.sweep: missing for a sweep job");
    const auto& sw = doc.at("sweep");
    require_object(sw, "sweep");
    cfg.sweep.quantile = parse_axis<double>(sw, "quantile", "sweep");
    cfg.sweep.mh_steps = parse_axis<std::uint32_t>(sw, "mh_steps", "sweep");
    cfg.sweep.n_chains = parse_axis<std::size_t>(sw, "n_chains", "sweep");
    cfg.sweep.radius = parse_axis<double>(sw, "radius", "sweep");
    cfg.sweep.repeats = optional_or<std::size_t>(sw, "repeats", 1, "sweep");
    if (cfg.sweep.repeats == 0) throw ConfigError("sweep.repeats: must be at least 1");
    if (!cfg.sweep.radius.empty() &&
        (cfg.oracle || optional_or<std::string>(cfg.input_model, "kind", "", "input_model") !=
                           "uniform-linf-ball")) {
      throw ConfigError("sweep.radius: requires a uniform-linf-ball input_model");
    }
    for (double rho : cfg.sweep.quantile) {
      AmlsConfig probe = cfg.amls;
      probe.quantile = rho;
      for (std::size_t n : cfg.sweep.n_chains.empty() ? std::vector{cfg.amls.n_chains}
                                                       : cfg.sweep.n_chains) {
        probe.n_chains = n;
        try {
          probe.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(std::string("sweep: ") + e.what());
        }
      }
    }
  }

  if (cfg.kind == JobKind::kOracleSelftest && doc.contains("selftest")) {
    const auto& st = doc.at("selftest");
    require_object(st, "selftest");
    cfg.selftest_oracles = optional_or<std::vector<std::string>>(st, "oracles", {}, "selftest");
    for (const auto& name : cfg.selftest_oracles) oracle_by_name(name);
    cfg.selftest_tolerance_log10 =
        optional_or<double>(st, "tolerance_log10", cfg.selftest_tolerance_log10, "selftest");
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    require_object(o, "output");
    cfg.output.dir = optional_or<std::string>(o, "dir", cfg.output.dir.string(), "output");
    cfg.output.report = optional_or<std::string>(o, "report", cfg.output.report, "output");
    cfg.output.counterexamples =
        optional_or<std::string>(o, "counterexamples", cfg.output.counterexamples, "output");
    cfg.output.trace = optional_or<std::string>(o, "trace", cfg.output.trace, "output");
  }

  if (cfg.kind != JobKind::kOracleSelftest) {
    std::optional<double> radius;
    if (!cfg.sweep.radius.empty()) radius = cfg.sweep.radius.front();
    resolve_problem(cfg, radius);
  }
  return cfg;
}

JobConfig JobConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json JobConfig::to_json() const {
  json doc = {{"format_version", kJobFormatVersion},
              {"job", amls::to_string(kind)},
              {"seed", amls.seed},
              {"amls", amls_to_json(amls, nullptr)},
              {"output",
               {{"dir", output.dir.string()},
                {"report", output.report},
                {"counterexamples", output.counterexamples},
                {"trace", output.trace}}}};
  if (oracle) {
    doc["oracle"] = *oracle;
  } else if (kind != JobKind::kOracleSelftest) {
    doc["input_model"] = input_model;
    doc["property"] = property;
  }
  if (kind == JobKind::kNaiveMc) {
    doc["naive_mc"] = {{"samples", naive_samples}, {"batch_size", naive_batch}};
  }
  if (kind == JobKind::kSweep) {
    doc["sweep"] = {{"quantile", sweep.quantile},
                    {"mh_steps", sweep.mh_steps},
                    {"n_chains", sweep.n_chains},
                    {"radius", sweep.radius},
                    {"repeats", sweep.repeats}};
  }
  if (kind == JobKind::kOracleSelftest) {
    doc["selftest"] = {{"oracles", selftest_oracles.empty() ? oracle_names() : selftest_oracles},
                       {"tolerance_log10", selftest_tolerance_log10}};
  }
  return doc;
}

JobConfig default_selftest_config() {
  JobConfig cfg;
  cfg.kind = JobKind::kOracleSelftest;
  cfg.amls.n_chains = 2000;
  cfg.amls.mh_steps = 100;
  cfg.amls.quantile = 0.1;
  cfg.amls.seed = 1;
  cfg.output.report = "selftest.json";
  return cfg;
}

Problem resolve_problem(const JobConfig& cfg, std::optional<double> radius) {
  if (cfg.oracle) {
    OracleProblem p = oracle_by_name(*cfg.oracle);
    json decl = {{"oracle", p.name}, {"kind", to_string(p.model.kind())}};
    return {std::move(p.model), std::move(p.spec), p.log_true_prob, decl,
            json{{"oracle", p.name}, {"kind", p.spec.kind_name()}}};
  }
  json property_decl, model_decl;
  std::optional<std::vector<double>> reference;
  PropertySpec spec = build_property(cfg.property, cfg.base_dir, property_decl, reference);
  InputModel model = build_model(cfg.input_model, reference, radius, model_decl);
  if (model.dimension() != spec.dimension()) {
    throw ConfigError("input_model: dimension " + std::to_string(model.dimension()) +
                      " differs from property dimension " + std::to_string(spec.dimension()));
  }
  return {std::move(model), std::move(spec), std::nullopt, std::move(model_decl),
          std::move(property_decl)};
}

// ---------------------------------------------------------------------------
// Reports.

RunReport RunReport::from_amls(const AmlsResult& r) {
  RunReport rep;
  rep.status = r.unsat ? kUnsatMarker : "estimate";
  if (!r.unsat) {
    rep.log_estimate = r.log_estimate;
    rep.log10_estimate = r.log10_estimate();
  }
  rep.levels = r.levels;
  rep.level_log_factors = r.level_log_factors;
  rep.survivor_counts = r.survivor_counts;
  rep.acceptance_trace = r.acceptance_trace;
  rep.property_evaluations = r.property_evaluations;
  return rep;
}

RunReport RunReport::from_naive(const NaiveMcResult& r) {
  RunReport rep;
  rep.status = r.unsat ? kUnsatMarker : "estimate";
  if (!r.unsat) {
    rep.log_estimate = r.log_estimate;
    rep.log10_estimate = r.log_estimate / kLn10;
  }
  rep.property_evaluations = r.samples;
  rep.hits = r.hits;
  rep.samples = r.samples;
  return rep;
}

json RunReport::to_json() const {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json doc = {{"config", config},
              {"job", job},
              {"seed", seed},
              {"status", status},
              {"log_estimate", opt(log_estimate)},
              {"log10_estimate", opt(log10_estimate)},
              {"n_levels", n_levels()},
              {"levels", levels},
              {"level_log_factors", level_log_factors},
              {"survivor_counts", survivor_counts},
              {"acceptance_trace", acceptance_trace},
              {"property_evaluations", property_evaluations},
              {"hits", opt(hits)},
              {"samples", opt(samples)},
              {"log_true_prob", log_true_prob ? real_to_json(*log_true_prob) : json(nullptr)},
              {"counterexample_file",
               counterexample_file.empty() ? json(nullptr) : json(counterexample_file)},
              {"message", message.empty() ? json(nullptr) : json(message)},
              {"wall_time_seconds", wall_time_seconds}};
  return doc;
}

RunReport RunReport::from_json(const json& doc) {
  const std::string w = "report";
  RunReport r;
  r.config = doc.contains("config") ? doc.at("config") : json();
  r.job = required<std::string>(doc, "job", w);
  r.seed = required<std::uint64_t>(doc, "seed", w);
  r.status = required<std::string>(doc, "status", w);
  if (!doc.at("log_estimate").is_null()) r.log_estimate = doc.at("log_estimate").get<double>();
  if (!doc.at("log10_estimate").is_null()) {
    r.log10_estimate = doc.at("log10_estimate").get<double>();
  }
  r.levels = required<std::vector<double>>(doc, "levels", w);
  r.level_log_factors = required<std::vector<double>>(doc, "level_log_factors", w);
  r.survivor_counts = required<std::vector<std::size_t>>(doc, "survivor_counts", w);
  r.acceptance_trace = required<std::vector<double>>(doc, "acceptance_trace", w);
  r.property_evaluations = required<std::uint64_t>(doc, "property_evaluations", w);
  if (!doc.at("hits").is_null()) r.hits = doc.at("hits").get<std::uint64_t>();
  if (!doc.at("samples").is_null()) r.samples = doc.at("samples").get<std::uint64_t>();
  if (!doc.at("log_true_prob").is_null()) r.log_true_prob = real_from_json(doc.at("log_true_prob"));
  if (!doc.at("counterexample_file").is_null()) {
    r.counterexample_file = doc.at("counterexample_file").get<std::string>();
  }
  if (!doc.at("message").is_null()) r.message = doc.at("message").get<std::string>();
  r.wall_time_seconds = required<double>(doc, "wall_time_seconds", w);
  return r;
}

void emit_counterexamples(const AmlsResult& result, const fs::path& path) {
  if (result.unsat) {
    throw UsageError("emit_counterexamples: run returned the unsat sentinel");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const Matrix& x = result.counterexamples;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out << format_real(x(i, j)) << ' ';
    out << format_real(result.counterexample_values[i]) << '\n';
  }
}

CounterexampleFile read_counterexamples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(path.string() + ": ragged row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  CounterexampleFile f;
  if (rows.empty()) return f;
  const std::size_t d = rows.front().size() - 1;
  f.points = Matrix(rows.size(), d);
  f.values.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) f.points(i, j) = rows[i][j];
    f.values[i] = rows[i][d];
  }
  return f;
}

int run_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
  JobConfig effective = cfg;
  if (opts.seed) effective.amls.seed = *opts.seed;
  switch (effective.kind) {
    case JobKind::kAmls:
      return run_amls_job(effective, opts, log);
    case JobKind::kNaiveMc:
      return run_naive_job(effective, opts, log);
    case JobKind::kSweep:
      return run_sweep_job(effective, opts, log);
    case JobKind::kOracleSelftest:
      return run_selftest_job(effective, opts, log);
  }
  return 2;
}

int run_job(const fs::path& config_path, const RunOptions& opts, std::ostream& log,
            std::ostream& err) {
  JobConfig cfg;
  try {
    cfg = JobConfig::load(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  return run_job(cfg, opts, log);
}

json export_schema() {
  const json number_array = {{"type", "array"}, {"items", {{"type", "number"}}}};
  json weight = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "dense-relu weight file"},
      {"type", "object"},
      {"required", {"format_version", "input_dim", "layers"}},
      {"properties",
       {{"format_version", {{"const", 1}}},
        {"input_dim", {{"type", "integer"}, {"minimum", 1}}},
        {"layers",
         {{"type", "array"},
          {"items",
           {{"oneOf",
             {{{"type", "object"},
               {"required", {"kind", "out", "in", "weights", "bias"}},
               {"properties",
                {{"kind", {{"const", "dense"}}},
                 {"out", {{"type", "integer"}, {"minimum", 1}}},
                 {"in", {{"type", "integer"}, {"minimum", 1}}},
                 {"weights", number_array},
                 {"bias", number_array}}},
               {"description", "weights: row-major out x in"}},
              {{"type", "object"},
               {"required", {"kind"}},
               {"properties", {{"kind", {{"const", "relu"}}}}}}}}}}}}}}};
  json model = {
      {"type", "object"},
      {"required", {"kind"}},
      {"properties",
       {{"kind", {{"enum", {"uniform-box", "uniform-linf-ball", "standard-normal"}}}},
        {"lower", number_array},
        {"upper", number_array},
        {"center", number_array},
        {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"clip",
         {{"type", "object"},
          {"properties", {{"lower", number_array}, {"upper", number_array}}}}},
        {"dimension", {{"type", "integer"}, {"minimum", 1}}}}}};
  json property = {
      {"type", "object"},
      {"required", {"kind"}},
      {"properties",
       {{"kind",
         {{"enum", {"adversarial-margin", "linear-threshold", "max-of-linear",
                    "analytic-builtin"}}}},
        {"network", {{"type", "string"}}},
        {"reference_input", number_array},
        {"true_class", {{"type", "integer"}, {"minimum", 0}}},
        {"a", number_array},
        {"b", {{"type", "number"}}},
        {"terms",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"properties", {{"a", number_array}, {"b", {{"type", "number"}}}}}}}}},
        {"name", {{"enum", {"neg-linf-distance"}}}},
        {"center", number_array}}}};
  json job = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "verification job"},
      {"type", "object"},
      {"required", {"format_version", "job"}},
      {"properties",
       {{"format_version", {{"const", 1}}},
        {"job", {{"enum", {"amls", "naive-mc", "sweep", "oracle-selftest"}}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"oracle", {{"enum", oracle_names()}}},
        {"input_model", model},
        {"property", property},
        {"amls",
         {{"type", "object"},
          {"properties",
           {{"n_chains", {{"type", "integer"}, {"minimum", 1}}},
            {"mh_steps", {{"type", "integer"}, {"minimum", 1}}},
            {"quantile", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}}},
            {"log_p_min", {{"type", "number"}, {"exclusiveMaximum", 0}}},
            {"p_min", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}}},
            {"proposal_width_init", {{"type", "number"}, {"exclusiveMinimum", 0}}},
            {"accept_target", {{"type", "number"}}},
            {"width_shrink", {{"type", "number"}}},
            {"width_grow", {{"type", "number"}}},
            {"max_levels", {{"type", "integer"}, {"minimum", 1}}},
            {"adapt_proposal", {{"type", "boolean"}}}}}}},
        {"naive_mc",
         {{"type", "object"},
          {"properties",
           {{"samples", {{"type", "integer"}, {"minimum", 1}}},
            {"batch_size", {{"type", "integer"}, {"minimum", 1}}}}}}},
        {"sweep",
         {{"type", "object"},
          {"properties",
           {{"quantile", number_array},
            {"mh_steps", {{"type", "array"}, {"items", {{"type", "integer"}}}}},
            {"n_chains", {{"type", "array"}, {"items", {{"type", "integer"}}}}},
            {"radius", number_array},
            {"repeats", {{"type", "integer"}, {"minimum", 1}}}}}}},
        {"selftest",
         {{"type", "object"},
          {"properties",
           {{"oracles", {{"type", "array"}, {"items", {{"type", "string"}}}}},
            {"tolerance_log10", {{"type", "number"}}}}}}},
        {"output",
         {{"type", "object"},
          {"properties",
           {{"dir", {{"type", "string"}}},
            {"report", {{"type", "string"}}},
            {"counterexamples", {{"type", "string"}}},
            {"trace", {{"type", "string"}}}}}}}}}};
  return {{"weight_file", weight}, {"job_config", job}};
}

}  // namespace amls
