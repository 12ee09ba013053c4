// jip/classifier.hpp

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

#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/matrix.hpp"

namespace jip {

enum class ClassifierKind { one_nn, nearest_centroid };

inline std::string to_string(ClassifierKind k) {
  return k == ClassifierKind::one_nn ? "one_nn" : "nearest_centroid";
}

inline ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "one_nn") return ClassifierKind::one_nn;
  if (s == "nearest_centroid") return ClassifierKind::nearest_centroid;
  throw InvalidArgument("unknown classifier kind '" + std::string(s) + "'");
}

/// Exact distance ties always resolve to the lowest class id, then the lowest
/// training sample index; no other tie rule is offered.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::one_nn;

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

/// Trained classifier over column-sample matrices (m x n). Immutable after train.
class ClassifierModel {
 public:
  ClassifierKind kind() const { return kind_; }
  std::size_t dim() const { return prototypes_.rows(); }

  Labels predict(const Matrix& queries) const {
    if (queries.rows() != dim())
      throw InvalidArgument("predict: query dimension " + std::to_string(queries.rows()) +
                            " does not match training dimension " + std::to_string(dim()));
    Labels out(queries.cols());
    for (std::size_t q = 0; q < queries.cols(); ++q) {
      auto best = std::make_tuple(std::numeric_limits<double>::infinity(),
                                  std::numeric_limits<Label>::max(), std::size_t{0});
      for (std::size_t i = 0; i < prototypes_.cols(); ++i) {
        double d2 = 0.0;
        for (std::size_t f = 0; f < dim(); ++f) {
          const double diff = queries(f, q) - prototypes_(f, i);
          d2 += diff * diff;
        }
        const auto cand = std::make_tuple(d2, labels_[i], i);
        if (cand < best) best = cand;
      }
      out[q] = std::get<1>(best);
    }
    return out;
  }

 private:
  friend ClassifierModel train(const ClassifierSpec&, const Matrix&, const Labels&);

  ClassifierKind kind_ = ClassifierKind::one_nn;
  Matrix prototypes_;  // training samples or class centroids, one per column
  Labels labels_;
};

/// one_nn keeps every sample; nearest_centroid keeps one mean per class,
/// ordered by class id.
inline ClassifierModel train(const ClassifierSpec& spec, const Matrix& z, const Labels& y) {
  if (z.cols() == 0) throw InvalidArgument("train: empty training set");
  if (z.cols() != y.size())
    throw InvalidArgument("train: " + std::to_string(z.cols()) + " samples but " +
                          std::to_string(y.size()) + " labels");
  require_finite(z, "train");
  for (Label l : y)
    if (l == kUnlabeled) throw InvalidArgument("train: unlabeled training sample");

  ClassifierModel model;
  model.kind_ = spec.kind;
  if (spec.kind == ClassifierKind::one_nn) {
    model.prototypes_ = z;
    model.labels_ = y;
    return model;
  }
  std::map<Label, std::pair<std::vector<double>, std::size_t>> sums;
  for (std::size_t i = 0; i < z.cols(); ++i) {
    auto& [sum, count] = sums[y[i]];
    sum.resize(z.rows(), 0.0);
    for (std::size_t f = 0; f < z.rows(); ++f) sum[f] += z(f, i);
    ++count;
  }
  model.prototypes_ = Matrix(z.rows(), sums.size());
  std::size_t col = 0;
  for (const auto& [label, acc] : sums) {
    for (std::size_t f = 0; f < z.rows(); ++f)
      model.prototypes_(f, col) = acc.first[f] / static_cast<double>(acc.second);
    model.labels_.push_back(label);
    ++col;
  }
  return model;
}

inline Labels predict(const ClassifierModel& model, const Matrix& queries) {
  return model.predict(queries);
}

/// Fraction of positions where the labels agree.
inline double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size())
    throw InvalidArgument("accuracy: length mismatch");
  if (truth.empty()) throw InvalidArgument("accuracy: empty label vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kUnlabeled) throw InvalidArgument("accuracy: truth contains unlabeled entry");
    if (predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace jip
