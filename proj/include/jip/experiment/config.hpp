// jip/experiment/config.hpp

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

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jip/classifier.hpp"
#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/solver.hpp"
#include "jip/synth.hpp"

namespace jip::experiment {

enum class DataMode { synthetic, files };
enum class ReportFormat { json_lines, csv };

inline std::vector<double> default_grid() { return {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}; }

struct ExperimentConfig {
  DataMode mode = DataMode::synthetic;

  // file mode
  std::string source_features;
  std::string source_labels;
  std::string target_features;
  std::string target_labels;
  std::string pairing;
  std::string target_truth;  // optional; without it evaluation falls back to CV
  int class_count = 0;       // 0 = largest label found in the files

  SynthSpec synth;
  std::vector<std::uint64_t> seeds{1};
  unsigned threads = 0;  // 0 = hardware concurrency

  JipHyperParams params;
  std::vector<double> grid_alpha = default_grid();
  std::vector<double> grid_beta = default_grid();
  std::vector<double> grid_lambda = default_grid();
  std::vector<std::size_t> grid_m;  // empty = {params.m}

  ClassifierSpec classifier;
  Preprocessing preprocessing = Preprocessing::zscore;
  std::size_t cv_folds = 5;

  std::string output_path;  // empty = stdout
  ReportFormat format = ReportFormat::json_lines;
  bool timing = false;  // wall times break byte-for-byte reproducibility

  bool ablate_optimize = true;  // ablation baseline from a grid search

  std::vector<std::size_t> effective_grid_m() const {
    return grid_m.empty() ? std::vector<std::size_t>{params.m} : grid_m;
  }
};

namespace detail {

inline std::string format_real(double v) { return csv::format_double(v); }

inline double parse_real(std::string_view s, std::string_view key) {
  double v = 0.0;
  if (!csv::parse_double(csv::trim(s), v))
    throw InvalidArgument(std::string(key) + ": '" + std::string(s) + "' is not a finite number");
  return v;
}

template <typename Int>
inline Int parse_count(std::string_view s, std::string_view key) {
  Int v{};
  if (!csv::parse_int(csv::trim(s), v))
    throw InvalidArgument(std::string(key) + ": '" + std::string(s) +
                          "' is not a non-negative integer");
  return v;
}

inline bool parse_bool(std::string_view s, std::string_view key) {
  s = csv::trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InvalidArgument(std::string(key) + ": '" + std::string(s) + "' is not a boolean");
}

inline std::vector<double> parse_real_list(std::string_view s, std::string_view key) {
  std::vector<double> out;
  if (csv::trim(s).empty()) throw InvalidArgument(std::string(key) + ": empty list");
  for (auto cell : csv::split(s)) out.push_back(parse_real(cell, key));
  return out;
}

inline std::vector<std::size_t> parse_count_list(std::string_view s, std::string_view key) {
  std::vector<std::size_t> out;
  if (csv::trim(s).empty()) return out;
  for (auto cell : csv::split(s)) out.push_back(parse_count<std::size_t>(cell, key));
  return out;
}

/// "1,2,5" or ranges "1-20" (inclusive), mixed freely.
inline std::vector<std::uint64_t> parse_seed_list(std::string_view s, std::string_view key) {
  std::vector<std::uint64_t> out;
  if (csv::trim(s).empty()) throw InvalidArgument(std::string(key) + ": empty seed list");
  for (auto cell : csv::split(s)) {
    const auto dash = cell.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_count<std::uint64_t>(cell, key));
      continue;
    }
    const auto lo = parse_count<std::uint64_t>(cell.substr(0, dash), key);
    const auto hi = parse_count<std::uint64_t>(cell.substr(dash + 1), key);
    if (hi < lo || hi - lo > 1'000'000)
      throw InvalidArgument(std::string(key) + ": bad seed range '" + std::string(cell) + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

template <typename T, typename F>
inline std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

inline std::string format_reals(const std::vector<double>& v) { return join(v, format_real); }

template <typename T>
inline std::string format_counts(const std::vector<T>& v) {
  return join(v, [](T x) { return std::to_string(x); });
}

}  // namespace detail

inline std::string to_string(DataMode m) { return m == DataMode::synthetic ? "synthetic" : "files"; }

inline DataMode parse_data_mode(std::string_view s) {
  if (s == "synthetic") return DataMode::synthetic;
  if (s == "files") return DataMode::files;
  throw InvalidArgument("data.mode: expected 'synthetic' or 'files', got '" + std::string(s) + "'");
}

inline std::string to_string(ReportFormat f) { return f == ReportFormat::csv ? "csv" : "jsonl"; }

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "jsonl" || s == "json_lines") return ReportFormat::json_lines;
  if (s == "csv") return ReportFormat::csv;
  throw InvalidArgument("output.format: expected 'jsonl' or 'csv', got '" + std::string(s) + "'");
}

struct KeySpec {
  std::string key;
  std::string help;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

/// Every accepted configuration key, in canonical order.
inline const std::vector<KeySpec>& config_schema() {
  using C = ExperimentConfig;
  using namespace detail;
  static const std::vector<KeySpec> schema = [] {
    std::vector<KeySpec> s;
    auto text = [&s](std::string key, std::string help, std::string C::*field) {
      s.push_back({key, std::move(help),
                   [field](C& c, std::string_view v) { c.*field = std::string(csv::trim(v)); },
                   [field](const C& c) { return c.*field; }});
    };
    auto real = [&s](std::string key, std::string help, auto getter) {
      s.push_back({key, std::move(help),
                   [getter, key](C& c, std::string_view v) { getter(c) = parse_real(v, key); },
                   [getter](const C& c) { return format_real(getter(c)); }});
    };
    auto count = [&s](std::string key, std::string help, auto getter) {
      s.push_back({key, std::move(help),
                   [getter, key](C& c, std::string_view v) {
                     auto& ref = getter(c);
                     ref = parse_count<std::remove_reference_t<decltype(ref)>>(v, key);
                   },
                   [getter](const C& c) { return std::to_string(getter(c)); }});
    };

    s.push_back({"data.mode", "synthetic | files",
                 [](C& c, std::string_view v) { c.mode = parse_data_mode(csv::trim(v)); },
                 [](const C& c) { return to_string(c.mode); }});
    text("data.source_features", "source feature CSV (files mode)", &C::source_features);
    text("data.source_labels", "source label CSV (files mode)", &C::source_labels);
    text("data.target_features", "target feature CSV (files mode)", &C::target_features);
    text("data.target_labels", "target label CSV, empty cells = unlabeled", &C::target_labels);
    text("data.pairing", "pairing CSV of 's,t' lines (files mode)", &C::pairing);
    text("data.target_truth", "optional full target label CSV for evaluation", &C::target_truth);
    count("data.class_count", "number of classes, 0 = infer from labels",
          [](auto& c) -> auto& { return c.class_count; });

    count("synth.class_count", "classes", [](auto& c) -> auto& { return c.synth.class_count; });
    count("synth.latent_dim", "shared latent dimension",
          [](auto& c) -> auto& { return c.synth.latent_dim; });
    count("synth.samples_per_domain", "samples in each domain",
          [](auto& c) -> auto& { return c.synth.samples_per_domain; });
    count("synth.source_dim", "source feature dimension",
          [](auto& c) -> auto& { return c.synth.source_dim; });
    count("synth.target_dim", "target feature dimension",
          [](auto& c) -> auto& { return c.synth.target_dim; });
    real("synth.noise_sigma", "Gaussian noise std in latent and feature space",
         [](auto& c) -> auto& { return c.synth.noise_sigma; });
    real("synth.pair_fraction", "fraction of samples that are paired (and labeled in the target)",
         [](auto& c) -> auto& { return c.synth.pair_fraction; });
    real("synth.class_separation", "minimum distance between latent class centers",
         [](auto& c) -> auto& { return c.synth.class_separation; });

    s.push_back({"run.seeds", "seed list, e.g. 1,2,3 or 1-20",
                 [](C& c, std::string_view v) { c.seeds = parse_seed_list(v, "run.seeds"); },
                 [](const C& c) { return format_counts(c.seeds); }});
    count("run.threads", "worker threads for grid/ablation, 0 = all cores",
          [](auto& c) -> auto& { return c.threads; });

    real("params.alpha", "local structure (Laplacian) weight",
         [](auto& c) -> auto& { return c.params.alpha; });
    real("params.beta", "paired correlation weight", [](auto& c) -> auto& { return c.params.beta; });
    real("params.lambda", "global structure (scatter) weight",
         [](auto& c) -> auto& { return c.params.lambda; });
    count("params.m", "shared subspace dimension (clamped to d_s + d_t)",
          [](auto& c) -> auto& { return c.params.m; });
    count("params.iterations", "pseudo-label refinement iterations",
          [](auto& c) -> auto& { return c.params.t_iters; });
    count("params.k_neighbors", "neighbours per sample in the adjacency graph",
          [](auto& c) -> auto& { return c.params.k_neighbors; });
    real("params.ridge", "initial ridge for the constraint matrix, 0 = automatic",
         [](auto& c) -> auto& { return c.params.ridge; });
    s.push_back({"params.selection", "eigenvalue selection: nonnegative | algebraic",
                 [](C& c, std::string_view v) {
                   c.params.selection = parse_eigen_selection(csv::trim(v));
                 },
                 [](const C& c) { return to_string(c.params.selection); }});

    auto grid = [&s](std::string key, std::vector<double> C::*field) {
      s.push_back({key, "grid values",
                   [field, key](C& c, std::string_view v) { c.*field = parse_real_list(v, key); },
                   [field](const C& c) { return format_reals(c.*field); }});
    };
    grid("grid.alpha", &C::grid_alpha);
    grid("grid.beta", &C::grid_beta);
    grid("grid.lambda", &C::grid_lambda);
    s.push_back({"grid.m", "subspace dimensions to sweep, empty = params.m",
                 [](C& c, std::string_view v) { c.grid_m = parse_count_list(v, "grid.m"); },
                 [](const C& c) { return format_counts(c.grid_m); }});

    s.push_back({"classifier.kind", "one_nn | nearest_centroid",
                 [](C& c, std::string_view v) {
                   c.classifier.kind = parse_classifier_kind(csv::trim(v));
                 },
                 [](const C& c) { return to_string(c.classifier.kind); }});
    s.push_back({"preprocess.scheme", "none | zscore | zscore_unitnorm",
                 [](C& c, std::string_view v) {
                   c.preprocessing = parse_preprocessing(csv::trim(v));
                 },
                 [](const C& c) { return to_string(c.preprocessing); }});
    count("eval.cv_folds", "folds for labeled-target cross-validation (files mode, no truth)",
          [](auto& c) -> auto& { return c.cv_folds; });

    text("output.path", "report file, empty = stdout", &C::output_path);
    s.push_back({"output.format", "jsonl | csv",
                 [](C& c, std::string_view v) { c.format = parse_report_format(csv::trim(v)); },
                 [](const C& c) { return to_string(c.format); }});
    s.push_back({"output.timing", "record wall-clock times (reports stop being byte-identical)",
                 [](C& c, std::string_view v) { c.timing = parse_bool(v, "output.timing"); },
                 [](const C& c) { return std::string(c.timing ? "true" : "false"); }});
    s.push_back({"ablate.optimize", "take the ablation baseline from a grid search",
                 [](C& c, std::string_view v) {
                   c.ablate_optimize = parse_bool(v, "ablate.optimize");
                 },
                 [](const C& c) { return std::string(c.ablate_optimize ? "true" : "false"); }});
    return s;
  }();
  return schema;
}

inline const KeySpec& find_key(std::string_view key) {
  for (const auto& k : config_schema())
    if (k.key == key) return k;
  throw InvalidArgument("unknown configuration key '" + std::string(key) + "'");
}

inline void set_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  find_key(key).set(c, value);
}

inline std::string get_value(const ExperimentConfig& c, std::string_view key) {
  return find_key(key).get(c);
}

/// "key=value" as given on the command line.
inline void apply_override(ExperimentConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw InvalidArgument("override '" + std::string(assignment) + "' is not key=value");
  set_value(c, csv::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// All keys with their current values, in schema order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : config_schema()) out.emplace_back(k.key, k.get(c));
  return out;
}

/// Key-value text: "key = value" lines, '#' comments, optional [section]
/// headers that prefix following keys with "section.".
inline void apply_config_text(ExperimentConfig& c, std::string_view text,
                              const std::string& source = "<config>") {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = csv::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ParseError(source, line_no, "malformed section header");
      section = std::string(csv::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
    std::string key(csv::trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    try {
      set_value(c, key, line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::string text;
  for (const auto& l : csv::read_lines(path)) text += l + "\n";
  ExperimentConfig c;
  apply_config_text(c, text, path);
  // relative data paths are taken relative to the config file
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&c.source_features, &c.source_labels, &c.target_features,
                         &c.target_labels, &c.pairing, &c.target_truth})
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  return c;
}

inline std::string format_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_echo(c)) out += k + " = " + v + "\n";
  return out;
}

/// Invariants checked before any run.
inline void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) throw ValidationError("run.seeds must not be empty");
  if (c.grid_alpha.empty() || c.grid_beta.empty() || c.grid_lambda.empty())
    throw ValidationError("grids must be non-empty");
  for (const auto* g : {&c.grid_alpha, &c.grid_beta, &c.grid_lambda})
    for (double v : *g)
      if (!(v >= 0.0)) throw ValidationError("grid values must be non-negative");
  for (std::size_t m : c.grid_m)
    if (m == 0) throw ValidationError("grid.m values must be positive");
  validate(c.params);
  if (c.cv_folds < 2) throw ValidationError("eval.cv_folds must be at least 2");
  if (c.class_count < 0) throw ValidationError("data.class_count must be non-negative");
  if (c.mode == DataMode::synthetic) {
    validate(c.synth);
    return;
  }
  const std::pair<const char*, const std::string*> required[] = {
      {"data.source_features", &c.source_features}, {"data.source_labels", &c.source_labels},
      {"data.target_features", &c.target_features}, {"data.target_labels", &c.target_labels},
      {"data.pairing", &c.pairing}};
  for (const auto& [key, value] : required)
    if (value->empty())
      throw ValidationError(std::string("files mode requires ") + key + " (missing " +
                            (std::string(key) == "data.pairing" ? "pairing file" : "path") +
                            ")");
  for (const auto& [key, value] : required)
    if (!std::filesystem::exists(*value))
      throw ValidationError(std::string(key) + ": file '" + *value + "' does not exist");
  if (!c.target_truth.empty() && !std::filesystem::exists(c.target_truth))
    throw ValidationError("data.target_truth: file '" + c.target_truth + "' does not exist");
}

}  // namespace jip::experiment
