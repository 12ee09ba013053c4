// tools/jip_cli.cpp

// Copyright 2026  JIP Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: single runs, grid search, ablation, synthetic data
// export and report conversion.
//
//   jip_cli run    --config exp.cfg --set params.alpha=0.1
//   jip_cli grid   --config exp.cfg --run.seeds 1-20 -o grid.jsonl
//   jip_cli ablate --config exp.cfg --output.format csv -o ablate.csv
//   jip_cli synth  --out-dir data/ --seed 7
//   jip_cli report --input grid.jsonl --output.format csv -o grid.csv
//
// Settings are applied in order: defaults, --config file, per-key flags, then
// --set assignments. Relative data paths in a config file resolve against the
// file's directory. Reports go to output.path or stdout; a short summary goes
// to stderr.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jip/experiment/config.hpp"
#include "jip/experiment/report.hpp"
#include "jip/experiment/runner.hpp"

namespace fs = std::filesystem;
using namespace jip;
using namespace jip::experiment;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> key_flags;
  bool quiet = false;
  bool list_keys = false;

  std::string out_dir;
  std::optional<std::uint64_t> synth_seed;

  std::string input;
  bool print_summary = false;
};

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) c = load_config(o.config_path);
  // flags in schema order so the result does not depend on argument order
  for (const auto& k : config_schema())
    if (auto it = o.key_flags.find(k.key); it != o.key_flags.end()) set_value(c, k.key, it->second);
  for (const auto& a : o.assignments) apply_override(c, a);
  return c;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_summary(const RunReport& r, std::ostream& os) {
  const ReportSummary s = summarize(r);
  os << r.kind << ": " << r.records.size() << " records, " << s.tuples.size() << " tuples, "
     << r.seeds.size() << " seeds (" << r.evaluation << ")\n";
  if (s.tuples.size() <= 12)
    for (const auto& t : s.tuples)
      os << "  " << t.variant << " alpha=" << csv::format_double(t.alpha)
         << " beta=" << csv::format_double(t.beta) << " lambda=" << csv::format_double(t.lambda)
         << " m=" << t.m << "  acc " << fmt(t.mean_accuracy) << " +- " << fmt(t.std_accuracy)
         << (t.failures ? "  (" + std::to_string(t.failures) + " failed)" : "") << "\n";
  if (s.best)
    os << "best: alpha=" << csv::format_double(s.best->alpha)
       << " beta=" << csv::format_double(s.best->beta)
       << " lambda=" << csv::format_double(s.best->lambda) << " m=" << s.best->m << "  acc "
       << fmt(s.best->mean_accuracy) << "\n";
  else
    os << "best: none (every run failed)\n";
  os << "target-only baseline: " << fmt(s.baseline_mean) << "\n";
  if (r.kind == "grid") os << "per-seed best mean: " << fmt(s.per_seed_best_mean) << "\n";
  for (const auto& [name, delta] : s.ablation_deltas)
    os << "  baseline - " << name << ": " << fmt(delta) << "\n";
  std::size_t failed = 0;
  for (const auto& rec : r.records) failed += rec.ok() ? 0 : 1;
  if (failed) {
    os << failed << " run(s) failed, first: ";
    for (const auto& rec : r.records)
      if (!rec.ok()) {
        os << rec.status << "\n";
        break;
      }
  }
}

void emit(const RunReport& r, const ExperimentConfig& c, bool quiet) {
  if (c.output_path.empty())
    std::cout << format_report(r, c.format);
  else
    write_report(r, c.format, c.output_path);
  if (!quiet) print_summary(r, std::cerr);
}

void write_synth(const ExperimentConfig& c, const Options& o) {
  if (o.out_dir.empty()) throw InvalidArgument("synth: --out-dir is required");
  validate(c.synth);
  const std::uint64_t seed = o.synth_seed ? *o.synth_seed : c.seeds.front();
  const SyntheticDataset sd = synth_generate(c.synth, seed);
  fs::create_directories(o.out_dir);
  auto path = [&](const char* name) { return (fs::path(o.out_dir) / name).string(); };
  save_domain(sd.data.source, path("source_features.csv"), path("source_labels.csv"));
  save_domain(sd.data.target, path("target_features.csv"), path("target_labels.csv"));
  save_labels(sd.target_truth, path("target_truth.csv"));
  save_pairing(sd.data.pairs, path("pairing.csv"));

  // a config that runs the exported files as-is; its paths resolve next to it
  ExperimentConfig files = c;
  files.mode = DataMode::files;
  files.source_features = "source_features.csv";
  files.source_labels = "source_labels.csv";
  files.target_features = "target_features.csv";
  files.target_labels = "target_labels.csv";
  files.target_truth = "target_truth.csv";
  files.pairing = "pairing.csv";
  files.class_count = c.synth.class_count;
  files.seeds = {seed};
  csv::write_file(path("experiment.cfg"),
                  "# synthetic dataset, seed " + std::to_string(seed) + "\n" + format_config(files));
  if (!o.quiet)
    std::cerr << "wrote " << sd.data.source.count() << " source and " << sd.data.target.count()
              << " target samples (" << sd.data.pairs.size() << " pairs) to " << o.out_dir
              << "\n";
}

RunReport read_report(const std::string& path) {
  std::string text;
  for (const auto& l : csv::read_lines(path)) text += l + "\n";
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_lines(text, path);

  // CSV carries records only; rebuild what can be inferred
  RunReport r;
  r.records = parse_csv(text, path);
  r.evaluation = "unknown";
  std::set<std::uint64_t> seen;
  std::set<std::tuple<std::string, double, double, double, std::size_t>> tuples;
  bool ablate = false;
  for (const auto& rec : r.records) {
    if (seen.insert(rec.seed).second) r.seeds.push_back(rec.seed);
    tuples.emplace(rec.variant, rec.alpha, rec.beta, rec.lambda, rec.m);
    ablate = ablate || rec.variant != "jip";
    r.timing = r.timing || rec.wall_ms != 0.0;
  }
  r.kind = ablate ? "ablate" : tuples.size() > 1 ? "grid" : "run";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous domain adaptation experiments (shared-subspace projection)"};
  app.require_subcommand(0, 1);
  Options o;

  app.add_option("-c,--config", o.config_path, "key-value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", o.assignments, "override as key=value (repeatable)")
      ->allow_extra_args(false);
  app.add_flag("-q,--quiet", o.quiet, "no summary on stderr");
  app.add_flag("--list-keys", o.list_keys, "print every configuration key and its default");
  for (const auto& k : config_schema()) {
    const std::string name = k.key == "output.path" ? "-o,--output.path" : "--" + k.key;
    app.add_option_function<std::string>(
           name, [&o, key = k.key](const std::string& v) { o.key_flags[key] = v; }, k.help)
        ->group("Configuration keys");
  }

  auto* run = app.add_subcommand("run", "fit with fixed parameters on every seed");
  auto* grid = app.add_subcommand("grid", "search the alpha x beta x lambda (x m) grid");
  auto* ablate = app.add_subcommand("ablate", "baseline plus alpha/beta/lambda zeroed variants");
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV files");
  synth->add_option("-d,--out-dir", o.out_dir, "output directory")->required();
  synth->add_option("--seed", o.synth_seed, "generator seed (default: first of run.seeds)");
  auto* report = app.add_subcommand("report", "re-format or summarize an existing report");
  report->add_option("-i,--input", o.input, "jsonl or csv report")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_flag("-s,--summary", o.print_summary, "print the summary only");
  for (auto* sub : {run, grid, ablate, synth, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig c = build_config(o);
    if (o.list_keys) {
      for (const auto& k : config_schema())
        std::cout << k.key << " = " << k.get(ExperimentConfig{}) << "    # " << k.help << "\n";
      return 0;
    }
    if (app.got_subcommand(run)) {
      emit(run_single(c), c, o.quiet);
    } else if (app.got_subcommand(grid)) {
      emit(grid_search(c), c, o.quiet);
    } else if (app.got_subcommand(ablate)) {
      emit(ablation(c), c, o.quiet);
    } else if (app.got_subcommand(synth)) {
      write_synth(c, o);
    } else if (app.got_subcommand(report)) {
      const RunReport r = read_report(o.input);
      if (o.print_summary)
        print_summary(r, std::cout);
      else
        emit(r, c, o.quiet);
    } else {
      std::cerr << app.help();
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "jip_cli: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
