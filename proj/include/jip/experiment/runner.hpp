// jip/experiment/runner.hpp

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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "jip/classifier.hpp"
#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/experiment/config.hpp"
#include "jip/experiment/report.hpp"
#include "jip/solver.hpp"
#include "jip/synth.hpp"

namespace jip::experiment {

/// One dataset instance ready for fitting, plus the labels used to score it.
struct PreparedData {
  HeteroDataset data;
  std::optional<Labels> truth;  // full target labels; absent = cross-validate
};

inline PreparedData load_file_data(const ExperimentConfig& c) {
  PreparedData out;
  DomainData src{load_features(c.source_features), load_labels(c.source_labels)};
  DomainData tgt{load_features(c.target_features), load_labels(c.target_labels)};
  std::optional<Labels> truth;
  if (!c.target_truth.empty()) truth = load_labels(c.target_truth);

  int classes = c.class_count;
  if (classes == 0) {
    for (const Labels* y : {&src.labels, &tgt.labels})
      for (Label l : *y) classes = std::max(classes, l);
    if (truth)
      for (Label l : *truth) classes = std::max(classes, l);
  }
  validate_domain(src, classes, c.source_labels);
  validate_domain(tgt, classes, c.target_labels);
  out.data.source = std::move(src);
  out.data.target = std::move(tgt);
  out.data.class_count = classes;
  out.data.pairs = load_pairing(c.pairing, out.data.source, out.data.target);
  validate(out.data);

  if (truth) {
    if (truth->size() != out.data.target.count())
      throw ValidationError(c.target_truth + ": " + std::to_string(truth->size()) +
                            " labels for " + std::to_string(out.data.target.count()) +
                            " target samples");
    for (std::size_t i = 0; i < truth->size(); ++i) {
      const Label y = (*truth)[i];
      if (y < 1 || y > classes)
        throw ValidationError(c.target_truth + ": sample " + std::to_string(i) +
                              " has no valid truth label");
      const Label given = out.data.target.labels[i];
      if (given != kUnlabeled && given != y)
        throw ValidationError(c.target_truth + ": sample " + std::to_string(i) +
                              " disagrees with the target label file");
    }
    out.truth = std::move(truth);
  }
  return out;
}

/// Data for every configured seed, in seed order. File data is identical for
/// every seed.
inline std::vector<PreparedData> prepare_data(const ExperimentConfig& c) {
  validate(c);
  std::vector<PreparedData> out;
  if (c.mode == DataMode::files) {
    const PreparedData d = load_file_data(c);
    out.assign(c.seeds.size(), d);
    return out;
  }
  for (std::uint64_t seed : c.seeds) {
    SyntheticDataset sd = synth_generate(c.synth, seed);
    out.push_back({std::move(sd.data), std::move(sd.target_truth)});
  }
  return out;
}

inline std::string evaluation_mode(const ExperimentConfig& c) {
  return c.mode == DataMode::synthetic || !c.target_truth.empty() ? "truth"
                                                                  : "cv_labeled_target";
}

namespace detail {

struct Tally {
  std::size_t hits = 0, total = 0;
  void add(const Labels& pred, const Labels& truth) {
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    total += pred.size();
  }
  double value() const {
    return total ? static_cast<double>(hits) / static_cast<double>(total)
                 : std::numeric_limits<double>::quiet_NaN();
  }
};

/// Fit on `ds`, score the target samples in `eval` against `truth` (indexed
/// like the target domain) and accumulate into the tallies.
inline void fit_and_score(const HeteroDataset& ds, const std::vector<std::size_t>& eval,
                          const Labels& truth, const JipHyperParams& params,
                          const ExperimentConfig& c, RunRecord& rec, Tally& final_tally,
                          std::vector<Tally>& iter_tally, Tally& base_tally) {
  FitOptions opts;
  opts.classifier = c.classifier;
  opts.preprocessing = c.preprocessing;
  const JipModel model = fit(ds, params, opts);
  const Labels want = select_labels(truth, eval);

  iter_tally.resize(model.iterations.size() + 1);
  iter_tally[0].add(select_labels(model.initial_labels, eval), want);
  for (std::size_t t = 0; t < model.iterations.size(); ++t)
    iter_tally[t + 1].add(select_labels(model.iterations[t].target_labels, eval), want);
  final_tally.add(select_labels(model.target_labels, eval), want);
  rec.effective_m = model.projection.dim();
  for (const auto& w : model.warnings)
    if (std::find(rec.warnings.begin(), rec.warnings.end(), w) == rec.warnings.end())
      rec.warnings.push_back(w);

  // target-only baseline: labeled target samples, raw features
  const auto labeled = labeled_indices(ds.target.labels);
  const ClassifierModel base = train(c.classifier, ds.target.features.select_columns(labeled),
                                     select_labels(ds.target.labels, labeled));
  base_tally.add(base.predict(ds.target.features.select_columns(eval)), want);
}

}  // namespace detail

/// One fit (or one cross-validated set of fits) for `params` on `prepared`.
/// Failures are reported in the record status, never thrown.
inline RunRecord evaluate(const PreparedData& prepared, const JipHyperParams& params,
                          const ExperimentConfig& c, std::uint64_t seed,
                          const std::string& variant) {
  RunRecord rec;
  rec.variant = variant;
  rec.alpha = params.alpha;
  rec.beta = params.beta;
  rec.lambda = params.lambda;
  rec.m = params.m;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    detail::Tally final_tally, base_tally;
    std::vector<detail::Tally> iter_tally;
    const HeteroDataset& ds = prepared.data;
    if (prepared.truth) {
      const auto eval = unlabeled_indices(ds.target.labels);
      if (eval.empty()) throw ValidationError("no unlabeled target samples to evaluate");
      detail::fit_and_score(ds, eval, *prepared.truth, params, c, rec, final_tally, iter_tally,
                            base_tally);
    } else {
      // k-fold over labeled target samples; a held-out sample also loses its pair
      const auto labeled = labeled_indices(ds.target.labels);
      if (labeled.size() < c.cv_folds)
        throw ValidationError("cross-validation needs at least " + std::to_string(c.cv_folds) +
                              " labeled target samples");
      for (std::size_t fold = 0; fold < c.cv_folds; ++fold) {
        std::vector<std::size_t> held;
        for (std::size_t k = fold; k < labeled.size(); k += c.cv_folds) held.push_back(labeled[k]);
        HeteroDataset train_ds = ds;
        for (std::size_t i : held) train_ds.target.labels[i] = kUnlabeled;
        std::erase_if(train_ds.pairs, [&](const SamplePair& p) {
          return std::find(held.begin(), held.end(), p.target) != held.end();
        });
        detail::fit_and_score(train_ds, held, ds.target.labels, params, c, rec, final_tally,
                              iter_tally, base_tally);
      }
    }
    rec.accuracy = final_tally.value();
    rec.baseline_accuracy = base_tally.value();
    for (const auto& t : iter_tally) rec.iteration_accuracy.push_back(t.value());
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
    rec.accuracy = std::numeric_limits<double>::quiet_NaN();
    rec.iteration_accuracy.clear();
  }
  if (c.timing)
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Runs job(i) for i in [0, count) on up to `threads` workers (0 = all cores).
/// Jobs must not throw.
template <typename Job>
inline void parallel_for(std::size_t count, unsigned threads, Job job) {
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

struct Job {
  JipHyperParams params;
  std::string variant;
};

/// Every job on every seed; records ordered job-major, then by seed order.
inline std::vector<RunRecord> run_jobs(const std::vector<Job>& jobs,
                                       const std::vector<PreparedData>& data,
                                       const ExperimentConfig& c) {
  const std::size_t seeds = c.seeds.size();
  std::vector<RunRecord> out(jobs.size() * seeds);
  parallel_for(out.size(), c.threads, [&](std::size_t i) {
    const std::size_t j = i / seeds, s = i % seeds;
    out[i] = evaluate(data[s], jobs[j].params, c, c.seeds[s], jobs[j].variant);
  });
  return out;
}

inline RunReport make_report(const ExperimentConfig& c, std::string kind) {
  RunReport r;
  r.kind = std::move(kind);
  r.config = config_echo(c);
  r.seeds = c.seeds;
  r.evaluation = evaluation_mode(c);
  r.timing = c.timing;
  return r;
}

/// Fixed parameters from the config, once per seed.
inline RunReport run_single(const ExperimentConfig& c) {
  const auto data = prepare_data(c);
  RunReport report = make_report(c, "run");
  report.records = run_jobs({{c.params, "jip"}}, data, c);
  return report;
}

/// Cartesian product of the alpha, beta, lambda (and m) grids, sorted by tuple.
inline std::vector<JipHyperParams> grid_tuples(const ExperimentConfig& c) {
  std::vector<std::tuple<double, double, double, std::size_t>> keys;
  for (double a : c.grid_alpha)
    for (double b : c.grid_beta)
      for (double l : c.grid_lambda)
        for (std::size_t m : c.effective_grid_m()) keys.emplace_back(a, b, l, m);
  std::stable_sort(keys.begin(), keys.end());
  std::vector<JipHyperParams> out;
  for (const auto& [a, b, l, m] : keys) {
    JipHyperParams p = c.params;
    p.alpha = a;
    p.beta = b;
    p.lambda = l;
    p.m = m;
    out.push_back(p);
  }
  return out;
}

inline RunReport grid_search(const ExperimentConfig& c, const std::vector<PreparedData>& data) {
  RunReport report = make_report(c, "grid");
  std::vector<Job> jobs;
  for (const auto& p : grid_tuples(c)) jobs.push_back({p, "jip"});
  report.records = run_jobs(jobs, data, c);
  return report;
}

inline RunReport grid_search(const ExperimentConfig& c) { return grid_search(c, prepare_data(c)); }

/// The best tuple of a grid report as hyperparameters (other fields from c).
inline JipHyperParams best_params(const RunReport& grid, const ExperimentConfig& c) {
  const ReportSummary s = summarize(grid);
  if (!s.best) throw NumericFailure("grid search produced no successful run");
  JipHyperParams p = c.params;
  p.alpha = s.best->alpha;
  p.beta = s.best->beta;
  p.lambda = s.best->lambda;
  p.m = s.best->m;
  return p;
}

inline const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> v{"baseline", "alpha0", "beta0", "lambda0",
                                          "alpha0_lambda0"};
  return v;
}

/// Baseline plus the four zeroed variants, each on every seed.
inline RunReport ablation(const ExperimentConfig& c, const std::vector<PreparedData>& data,
                          const JipHyperParams& baseline) {
  RunReport report = make_report(c, "ablate");
  report.config.emplace_back("ablate.baseline",
                             "alpha=" + csv::format_double(baseline.alpha) +
                                 ",beta=" + csv::format_double(baseline.beta) +
                                 ",lambda=" + csv::format_double(baseline.lambda) +
                                 ",m=" + std::to_string(baseline.m));
  std::vector<Job> jobs;
  for (const auto& name : ablation_variants()) {
    JipHyperParams p = baseline;
    if (name == "alpha0" || name == "alpha0_lambda0") p.alpha = 0.0;
    if (name == "beta0") p.beta = 0.0;
    if (name == "lambda0" || name == "alpha0_lambda0") p.lambda = 0.0;
    jobs.push_back({p, name});
  }
  report.records = run_jobs(jobs, data, c);
  return report;
}

/// Baseline from a grid search when ablate.optimize is set, else params.
inline RunReport ablation(const ExperimentConfig& c) {
  const auto data = prepare_data(c);
  const JipHyperParams baseline = c.ablate_optimize ? best_params(grid_search(c, data), c) : c.params;
  return ablation(c, data, baseline);
}

}  // namespace jip::experiment
