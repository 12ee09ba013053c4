// jip/experiment/report.hpp

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/experiment/config.hpp"

namespace jip::experiment {

/// Result of one (parameter tuple, seed) fit.
struct RunRecord {
  std::string variant = "jip";  // "jip" for run/grid records, else the ablation variant
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  std::size_t m = 0;            // requested subspace dimension
  std::size_t effective_m = 0;  // after clamping / reduced-rank fallback
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "error: <message>"
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double baseline_accuracy = std::numeric_limits<double>::quiet_NaN();
  /// [0] after the initial classifier, [t] after refinement iteration t.
  std::vector<double> iteration_accuracy;
  double wall_ms = 0.0;
  std::vector<std::string> warnings;

  bool ok() const { return status == "ok"; }

  friend bool operator==(const RunRecord& a, const RunRecord& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    if (a.iteration_accuracy.size() != b.iteration_accuracy.size()) return false;
    for (std::size_t i = 0; i < a.iteration_accuracy.size(); ++i)
      if (!same(a.iteration_accuracy[i], b.iteration_accuracy[i])) return false;
    return a.variant == b.variant && a.alpha == b.alpha && a.beta == b.beta &&
           a.lambda == b.lambda && a.m == b.m && a.effective_m == b.effective_m &&
           a.seed == b.seed && a.status == b.status && same(a.accuracy, b.accuracy) &&
           same(a.baseline_accuracy, b.baseline_accuracy) && same(a.wall_ms, b.wall_ms) &&
           a.warnings == b.warnings;
  }
};

struct RunReport {
  std::string kind = "run";  // run | grid | ablate
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::uint64_t> seeds;
  /// "truth" or "cv_labeled_target" (labeled-target cross-validation).
  std::string evaluation = "truth";
  bool timing = false;
  std::vector<RunRecord> records;
};

/// Aggregate over seeds for one (variant, alpha, beta, lambda, m).
struct TupleSummary {
  std::string variant;
  double alpha = 0.0, beta = 0.0, lambda = 0.0;
  std::size_t m = 0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
  double std_accuracy = std::numeric_limits<double>::quiet_NaN();
  double mean_baseline = std::numeric_limits<double>::quiet_NaN();

  auto key() const { return std::tie(variant, alpha, beta, lambda, m); }
};

struct ReportSummary {
  std::vector<TupleSummary> tuples;  // in first-appearance order
  std::optional<TupleSummary> best;  // highest mean accuracy; ties keep the earlier tuple
  /// Mean over seeds of the best accuracy any tuple reached on that seed.
  double per_seed_best_mean = std::numeric_limits<double>::quiet_NaN();
  double baseline_mean = std::numeric_limits<double>::quiet_NaN();
  /// Ablation: variant -> (baseline mean - variant mean).
  std::vector<std::pair<std::string, double>> ablation_deltas;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double std_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

inline ReportSummary summarize(const RunReport& report) {
  ReportSummary out;
  std::vector<std::vector<double>> accs, bases;
  for (const auto& r : report.records) {
    TupleSummary probe{r.variant, r.alpha, r.beta, r.lambda, r.m};
    auto it = std::find_if(out.tuples.begin(), out.tuples.end(),
                           [&](const TupleSummary& t) { return t.key() == probe.key(); });
    std::size_t idx = static_cast<std::size_t>(it - out.tuples.begin());
    if (it == out.tuples.end()) {
      out.tuples.push_back(probe);
      accs.emplace_back();
      bases.emplace_back();
    }
    auto& t = out.tuples[idx];
    ++t.runs;
    if (!r.ok()) {
      ++t.failures;
      continue;
    }
    accs[idx].push_back(r.accuracy);
    if (!std::isnan(r.baseline_accuracy)) bases[idx].push_back(r.baseline_accuracy);
  }
  for (std::size_t i = 0; i < out.tuples.size(); ++i) {
    out.tuples[i].mean_accuracy = detail::mean_of(accs[i]);
    out.tuples[i].std_accuracy = detail::std_of(accs[i]);
    out.tuples[i].mean_baseline = detail::mean_of(bases[i]);
    const auto& t = out.tuples[i];
    if (std::isnan(t.mean_accuracy)) continue;
    if (!out.best || t.mean_accuracy > out.best->mean_accuracy) out.best = t;
  }

  std::map<std::uint64_t, double> best_per_seed, base_per_seed;
  for (const auto& r : report.records) {
    if (!r.ok()) continue;
    auto [it, fresh] = best_per_seed.emplace(r.seed, r.accuracy);
    if (!fresh) it->second = std::max(it->second, r.accuracy);
    if (!std::isnan(r.baseline_accuracy)) base_per_seed.emplace(r.seed, r.baseline_accuracy);
  }
  std::vector<double> bests, bases_all;
  for (const auto& [seed, v] : best_per_seed) bests.push_back(v);
  for (const auto& [seed, v] : base_per_seed) bases_all.push_back(v);
  out.per_seed_best_mean = detail::mean_of(bests);
  out.baseline_mean = detail::mean_of(bases_all);

  if (report.kind == "ablate") {
    const auto base = std::find_if(out.tuples.begin(), out.tuples.end(),
                                   [](const TupleSummary& t) { return t.variant == "baseline"; });
    if (base != out.tuples.end())
      for (const auto& t : out.tuples)
        if (t.variant != "baseline")
          out.ablation_deltas.emplace_back(t.variant, base->mean_accuracy - t.mean_accuracy);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON lines

namespace detail {

using nlohmann::ordered_json;

inline ordered_json number_or_null(double v) {
  return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
}

inline double number_from(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline ordered_json record_json(const RunRecord& r, bool timing) {
  ordered_json j;
  j["type"] = "record";
  j["variant"] = r.variant;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["lambda"] = r.lambda;
  j["m"] = r.m;
  j["effective_m"] = r.effective_m;
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["accuracy"] = number_or_null(r.accuracy);
  j["baseline_accuracy"] = number_or_null(r.baseline_accuracy);
  ordered_json iters = ordered_json::array();
  for (double a : r.iteration_accuracy) iters.push_back(number_or_null(a));
  j["iteration_accuracy"] = iters;
  j["warnings"] = r.warnings;
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

inline RunRecord record_from(const ordered_json& j) {
  RunRecord r;
  r.variant = j.at("variant").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  r.lambda = j.at("lambda").get<double>();
  r.m = j.at("m").get<std::size_t>();
  r.effective_m = j.at("effective_m").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = j.at("status").get<std::string>();
  r.accuracy = number_from(j.at("accuracy"));
  r.baseline_accuracy = number_from(j.at("baseline_accuracy"));
  for (const auto& a : j.at("iteration_accuracy")) r.iteration_accuracy.push_back(number_from(a));
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

inline ordered_json tuple_json(const TupleSummary& t) {
  ordered_json j;
  j["variant"] = t.variant;
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["lambda"] = t.lambda;
  j["m"] = t.m;
  j["runs"] = t.runs;
  j["failures"] = t.failures;
  j["mean_accuracy"] = number_or_null(t.mean_accuracy);
  j["std_accuracy"] = number_or_null(t.std_accuracy);
  j["mean_baseline"] = number_or_null(t.mean_baseline);
  return j;
}

}  // namespace detail

inline std::string emit_json_lines(const RunReport& report) {
  using detail::ordered_json;
  std::string out;
  for (const auto& r : report.records) out += detail::record_json(r, report.timing).dump() + "\n";

  const ReportSummary s = summarize(report);
  ordered_json sum;
  sum["type"] = "summary";
  sum["kind"] = report.kind;
  sum["evaluation"] = report.evaluation;
  sum["seeds"] = report.seeds;
  sum["timing"] = report.timing;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  sum["config"] = cfg;
  sum["record_count"] = report.records.size();
  sum["baseline_mean"] = detail::number_or_null(s.baseline_mean);
  sum["per_seed_best_mean"] = detail::number_or_null(s.per_seed_best_mean);
  sum["best"] = s.best ? detail::tuple_json(*s.best) : ordered_json(nullptr);
  ordered_json tuples = ordered_json::array();
  for (const auto& t : s.tuples) tuples.push_back(detail::tuple_json(t));
  sum["tuples"] = tuples;
  ordered_json abl = ordered_json::array();
  for (const auto& [variant, delta] : s.ablation_deltas)
    abl.push_back({{"variant", variant}, {"delta", detail::number_or_null(delta)}});
  sum["ablation"] = abl;
  out += sum.dump() + "\n";
  return out;
}

inline RunReport parse_json_lines(const std::string& text, const std::string& source = "<jsonl>") {
  RunReport report;
  bool have_summary = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    try {
      const auto j = detail::ordered_json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "record") {
        report.records.push_back(detail::record_from(j));
      } else if (type == "summary") {
        report.kind = j.at("kind").get<std::string>();
        report.evaluation = j.at("evaluation").get<std::string>();
        report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        report.timing = j.at("timing").get<bool>();
        for (const auto& [k, v] : j.at("config").items())
          report.config.emplace_back(k, v.get<std::string>());
        have_summary = true;
      } else {
        throw ParseError(source, line_no, "unknown line type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (!have_summary) throw ParseError(source, line_no, "missing summary line");
  return report;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits one CSV line honouring double-quoted cells.
inline std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

inline std::string csv_number(double v) { return std::isnan(v) ? "" : csv::format_double(v); }

inline std::string join_warnings(const std::vector<std::string>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "; " : "") + w[i];
  return out;
}

}  // namespace detail

/// Header plus one row per record. Iteration accuracies become acc_iter_0..K
/// columns (K = largest iteration count in the report).
inline std::string emit_csv(const RunReport& report) {
  std::size_t iters = 0;
  for (const auto& r : report.records) iters = std::max(iters, r.iteration_accuracy.size());
  std::string out =
      "variant,alpha,beta,lambda,m,effective_m,seed,status,accuracy,baseline_accuracy";
  if (report.timing) out += ",wall_ms";
  for (std::size_t k = 0; k < iters; ++k) out += ",acc_iter_" + std::to_string(k);
  out += ",warnings\n";
  for (const auto& r : report.records) {
    out += detail::csv_quote(r.variant) + "," + csv::format_double(r.alpha) + "," +
           csv::format_double(r.beta) + "," + csv::format_double(r.lambda) + "," +
           std::to_string(r.m) + "," + std::to_string(r.effective_m) + "," +
           std::to_string(r.seed) + "," + detail::csv_quote(r.status) + "," +
           detail::csv_number(r.accuracy) + "," + detail::csv_number(r.baseline_accuracy);
    if (report.timing) out += "," + csv::format_double(r.wall_ms);
    for (std::size_t k = 0; k < iters; ++k)
      out += "," + (k < r.iteration_accuracy.size() ? detail::csv_number(r.iteration_accuracy[k])
                                                    : std::string());
    out += "," + detail::csv_quote(detail::join_warnings(r.warnings)) + "\n";
  }
  return out;
}

/// Records back from emit_csv output (config and summary are not part of CSV).
inline std::vector<RunRecord> parse_csv(const std::string& text,
                                        const std::string& source = "<csv>") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  const auto header = detail::csv_cells(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"variant", "alpha", "beta", "lambda", "m", "effective_m", "seed",
                               "status", "accuracy", "baseline_accuracy", "warnings"})
    if (!col.count(required))
      throw ParseError(source, 1, std::string("missing column ") + required);
  std::size_t iters = 0;
  while (col.count("acc_iter_" + std::to_string(iters))) ++iters;

  std::vector<RunRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::csv_cells(line);
    if (cells.size() != header.size())
      throw ParseError(source, line_no, "row has " + std::to_string(cells.size()) +
                                            " cells, expected " + std::to_string(header.size()));
    auto cell = [&](const std::string& name) -> const std::string& { return cells[col.at(name)]; };
    auto real = [&](const std::string& name, bool allow_empty) {
      const auto& s = cell(name);
      if (s.empty() && allow_empty) return std::numeric_limits<double>::quiet_NaN();
      double v = 0.0;
      if (!csv::parse_double(s, v)) throw ParseError(source, line_no, "bad number in " + name);
      return v;
    };
    auto count = [&](const std::string& name) {
      std::uint64_t v = 0;
      if (!csv::parse_int(cell(name), v)) throw ParseError(source, line_no, "bad count in " + name);
      return v;
    };
    RunRecord r;
    r.variant = cell("variant");
    r.alpha = real("alpha", false);
    r.beta = real("beta", false);
    r.lambda = real("lambda", false);
    r.m = static_cast<std::size_t>(count("m"));
    r.effective_m = static_cast<std::size_t>(count("effective_m"));
    r.seed = count("seed");
    r.status = cell("status");
    r.accuracy = real("accuracy", true);
    r.baseline_accuracy = real("baseline_accuracy", true);
    if (col.count("wall_ms")) r.wall_ms = real("wall_ms", false);
    for (std::size_t k = 0; k < iters; ++k) {
      const auto name = "acc_iter_" + std::to_string(k);
      if (cell(name).empty()) break;
      r.iteration_accuracy.push_back(real(name, false));
    }
    std::string_view w = cell("warnings");
    while (!w.empty()) {
      const auto sep = w.find("; ");
      r.warnings.emplace_back(w.substr(0, sep));
      if (sep == std::string_view::npos) break;
      w.remove_prefix(sep + 2);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_report(const RunReport& report, ReportFormat format) {
  return format == ReportFormat::csv ? emit_csv(report) : emit_json_lines(report);
}

inline void write_report(const RunReport& report, ReportFormat format, const std::string& path) {
  csv::write_file(path, format_report(report, format));
}

}  // namespace jip::experiment
