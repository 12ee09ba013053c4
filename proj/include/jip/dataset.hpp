// jip/dataset.hpp

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
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jip/errors.hpp"
#include "jip/matrix.hpp"

namespace jip {

using Label = int;
/// Marks a sample whose class is unknown. Valid classes are 1..C.
inline constexpr Label kUnlabeled = -1;
using Labels = std::vector<Label>;

/// One domain: features are d x n (row = feature, column = sample).
struct DomainData {
  Matrix features;
  Labels labels;

  std::size_t dim() const { return features.rows(); }
  std::size_t count() const { return features.cols(); }

  friend bool operator==(const DomainData&, const DomainData&) = default;
};

struct SamplePair {
  std::size_t source = 0;
  std::size_t target = 0;

  friend auto operator<=>(const SamplePair&, const SamplePair&) = default;
};

/// Two domains plus a one-to-one pairing of samples that share a label.
struct HeteroDataset {
  DomainData source;
  DomainData target;
  std::vector<SamplePair> pairs;
  int class_count = 0;

  friend bool operator==(const HeteroDataset&, const HeteroDataset&) = default;
};

inline void validate_domain(const DomainData& d, int class_count, std::string_view name) {
  if (d.features.cols() != d.labels.size())
    throw ValidationError(std::string(name) + ": " + std::to_string(d.features.cols()) +
                          " samples but " + std::to_string(d.labels.size()) + " labels");
  if (!d.features.all_finite())
    throw ValidationError(std::string(name) + ": non-finite feature value");
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    const Label y = d.labels[i];
    if (y == kUnlabeled) continue;
    if (y < 1 || (class_count > 0 && y > class_count))
      throw ValidationError(std::string(name) + ": label " + std::to_string(y) +
                            " of sample " + std::to_string(i) + " is outside 1.." +
                            std::to_string(class_count));
  }
}

inline void validate_pairs(const std::vector<SamplePair>& pairs, const DomainData& source,
                           const DomainData& target) {
  std::vector<bool> seen_s(source.count(), false), seen_t(target.count(), false);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [s, t] = pairs[p];
    const std::string where = "pair " + std::to_string(p) + " (" + std::to_string(s) + "," +
                              std::to_string(t) + ")";
    if (s >= source.count() || t >= target.count())
      throw ValidationError(where + ": index out of range");
    if (seen_s[s]) throw ValidationError(where + ": duplicate source index");
    if (seen_t[t]) throw ValidationError(where + ": duplicate target index");
    seen_s[s] = seen_t[t] = true;
    if (source.labels[s] == kUnlabeled || target.labels[t] == kUnlabeled)
      throw ValidationError(where + ": paired samples must be labeled");
    if (source.labels[s] != target.labels[t])
      throw ValidationError(where + ": label mismatch (" + std::to_string(source.labels[s]) +
                            " vs " + std::to_string(target.labels[t]) + ")");
  }
}

/// Checks every HeteroDataset invariant; throws ValidationError on the first violation.
inline void validate(const HeteroDataset& ds) {
  if (ds.class_count < 1) throw ValidationError("dataset: class_count must be at least 1");
  validate_domain(ds.source, ds.class_count, "source");
  validate_domain(ds.target, ds.class_count, "target");
  validate_pairs(ds.pairs, ds.source, ds.target);
  if (ds.pairs.size() > std::min(ds.source.count(), ds.target.count()))
    throw ValidationError("dataset: more pairs than samples in a domain");
}

/// Indices of target samples that carry a label / do not.
inline std::vector<std::size_t> labeled_indices(const Labels& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] != kUnlabeled) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> unlabeled_indices(const Labels& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] == kUnlabeled) out.push_back(i);
  return out;
}

inline Labels select_labels(const Labels& y, const std::vector<std::size_t>& idx) {
  Labels out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

/// Paired columns (X_SP, X_TP), aligned by pair order.
inline std::pair<Matrix, Matrix> paired_features(const HeteroDataset& ds) {
  std::vector<std::size_t> si, ti;
  for (const auto& p : ds.pairs) {
    si.push_back(p.source);
    ti.push_back(p.target);
  }
  return {ds.source.features.select_columns(si), ds.target.features.select_columns(ti)};
}

// ---------------------------------------------------------------------------
// CSV I/O

namespace csv {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

template <typename Int>
inline bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  // drop trailing blank lines
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace csv

/// Feature CSV: row i = feature i, n comma-separated decimals, no header.
inline Matrix load_features(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path, 0, "empty feature file");
  std::vector<double> values;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto cells = csv::split(lines[r]);
    if (r == 0) cols = cells.size();
    if (cells.size() != cols)
      throw ParseError(path, r + 1,
                       "row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(cols));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(cells[c], v))
        throw ParseError(path, r + 1,
                         "cell " + std::to_string(c + 1) + " is not a finite number: '" +
                             std::string(cells[c]) + "'");
      values.push_back(v);
    }
  }
  return Matrix(lines.size(), cols, std::move(values));
}

/// Label CSV: one line, n cells, empty cell = unlabeled.
inline Labels load_labels(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) return {};
  if (lines.size() > 1) throw ParseError(path, 2, "label file must be a single line");
  Labels out;
  const auto cells = csv::split(lines[0]);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) {
      out.push_back(kUnlabeled);
      continue;
    }
    Label y = 0;
    if (!csv::parse_int(cells[c], y))
      throw ParseError(path, 1,
                       "cell " + std::to_string(c + 1) + " is not an integer label: '" +
                           std::string(cells[c]) + "'");
    out.push_back(y);
  }
  return out;
}

/// Loads one domain. `class_count` 0 means "any positive label".
inline DomainData load_domain(const std::string& features_path, const std::string& labels_path,
                              int class_count = 0) {
  DomainData d{load_features(features_path), load_labels(labels_path)};
  validate_domain(d, class_count, labels_path);
  return d;
}

inline std::vector<SamplePair> load_pairing(const std::string& path, const DomainData& source,
                                            const DomainData& target) {
  const auto lines = csv::read_lines(path);
  std::vector<SamplePair> pairs;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (csv::trim(lines[r]).empty()) continue;
    const auto cells = csv::split(lines[r]);
    SamplePair p;
    if (cells.size() != 2 || !csv::parse_int(cells[0], p.source) ||
        !csv::parse_int(cells[1], p.target))
      throw ParseError(path, r + 1, "expected 's,t' with two non-negative integers");
    pairs.push_back(p);
  }
  validate_pairs(pairs, source, target);
  return pairs;
}

inline std::string format_features(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += csv::format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string format_labels(const Labels& y) {
  std::string out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) out += ',';
    if (y[i] != kUnlabeled) out += std::to_string(y[i]);
  }
  out += '\n';
  return out;
}

inline void save_domain(const DomainData& d, const std::string& features_path,
                        const std::string& labels_path) {
  csv::write_file(features_path, format_features(d.features));
  csv::write_file(labels_path, format_labels(d.labels));
}

inline void save_labels(const Labels& y, const std::string& path) {
  csv::write_file(path, format_labels(y));
}

inline void save_pairing(const std::vector<SamplePair>& pairs, const std::string& path) {
  std::string out;
  for (const auto& p : pairs) out += std::to_string(p.source) + "," + std::to_string(p.target) + "\n";
  csv::write_file(path, out);
}

// ---------------------------------------------------------------------------
// Preprocessing

enum class Preprocessing { none, zscore, zscore_unitnorm };

inline std::string to_string(Preprocessing p) {
  switch (p) {
    case Preprocessing::none: return "none";
    case Preprocessing::zscore: return "zscore";
    case Preprocessing::zscore_unitnorm: return "zscore_unitnorm";
  }
  return "?";
}

inline Preprocessing parse_preprocessing(std::string_view s) {
  if (s == "none") return Preprocessing::none;
  if (s == "zscore") return Preprocessing::zscore;
  if (s == "zscore_unitnorm") return Preprocessing::zscore_unitnorm;
  throw InvalidArgument("unknown preprocessing scheme '" + std::string(s) + "'");
}

/// Per-feature shift/scale captured from training data, replayable on new samples.
struct FeatureScaling {
  Preprocessing scheme = Preprocessing::none;
  std::vector<double> mean;
  std::vector<double> scale;  // 1 where the feature was (near) constant

  static FeatureScaling fit(const Matrix& x, Preprocessing scheme) {
    FeatureScaling s;
    s.scheme = scheme;
    if (scheme == Preprocessing::none) return s;
    const std::size_t n = x.cols();
    if (n < 2) throw InvalidArgument("preprocess: zscore needs at least 2 samples");
    s.mean.assign(x.rows(), 0.0);
    s.scale.assign(x.rows(), 1.0);
    for (std::size_t f = 0; f < x.rows(); ++f) {
      const auto row = x.row(f);
      double mu = 0.0;
      for (double v : row) mu += v;
      mu /= static_cast<double>(n);
      double var = 0.0;
      for (double v : row) var += (v - mu) * (v - mu);
      const double sd = std::sqrt(var / static_cast<double>(n));
      s.mean[f] = mu;
      s.scale[f] = sd < 1e-12 ? 1.0 : sd;
    }
    return s;
  }

  Matrix apply(const Matrix& x) const {
    if (scheme == Preprocessing::none) return x;
    if (x.rows() != mean.size())
      throw InvalidArgument("FeatureScaling: feature dimension mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t f = 0; f < x.rows(); ++f)
      for (std::size_t i = 0; i < x.cols(); ++i) out(f, i) = (x(f, i) - mean[f]) / scale[f];
    if (scheme == Preprocessing::zscore_unitnorm) {
      for (std::size_t i = 0; i < out.cols(); ++i) {
        double nrm = 0.0;
        for (std::size_t f = 0; f < out.rows(); ++f) nrm += out(f, i) * out(f, i);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;
        for (std::size_t f = 0; f < out.rows(); ++f) out(f, i) /= nrm;
      }
    }
    return out;
  }
};

inline DomainData preprocess(const DomainData& data, Preprocessing scheme) {
  return {FeatureScaling::fit(data.features, scheme).apply(data.features), data.labels};
}

}  // namespace jip
