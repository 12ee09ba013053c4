// jip/solver.hpp

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
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "jip/classifier.hpp"
#include "jip/dataset.hpp"
#include "jip/eigen.hpp"
#include "jip/errors.hpp"
#include "jip/matrix.hpp"
#include "jip/terms.hpp"

namespace jip {

struct JipHyperParams {
  double alpha = 1.0;   // local structure (Laplacian) weight
  double beta = 1.0;    // paired correlation weight
  double lambda = 1.0;  // global structure (LDA scatter) weight
  std::size_t m = 100;  // shared subspace dimension, clamped to d_s + d_t
  std::size_t t_iters = 5;
  std::size_t k_neighbors = 10;
  double ridge = 0.0;  // 0 = automatic escalation
  EigenSelection selection = EigenSelection::smallest_nonnegative;

  friend bool operator==(const JipHyperParams&, const JipHyperParams&) = default;
};

inline std::string to_string(EigenSelection s) {
  return s == EigenSelection::smallest_algebraic ? "algebraic" : "nonnegative";
}

inline EigenSelection parse_eigen_selection(std::string_view s) {
  if (s == "algebraic") return EigenSelection::smallest_algebraic;
  if (s == "nonnegative") return EigenSelection::smallest_nonnegative;
  throw InvalidArgument("unknown eigenvalue selection '" + std::string(s) + "'");
}

inline void validate(const JipHyperParams& p) {
  auto weight_ok = [](double w) { return w >= 0.0 && std::isfinite(w); };
  if (!weight_ok(p.alpha) || !weight_ok(p.beta) || !weight_ok(p.lambda))
    throw InvalidArgument("JipHyperParams: alpha, beta and lambda must be finite and >= 0");
  if (!weight_ok(p.ridge)) throw InvalidArgument("JipHyperParams: ridge must be finite and >= 0");
  if (p.m < 1) throw InvalidArgument("JipHyperParams: m must be at least 1");
  if (p.t_iters < 1) throw InvalidArgument("JipHyperParams: t_iters must be at least 1");
}

/// W = [A; B]: A maps source features (d_s) and B target features (d_t) into
/// the shared m-dimensional space.
struct SharedProjection {
  Matrix a;
  Matrix b;
  std::vector<double> eigenvalues;

  std::size_t dim() const { return a.cols(); }

  Matrix stacked() const {
    Matrix w(a.rows() + b.rows(), a.cols());
    w.set_block(0, 0, a);
    w.set_block(a.rows(), 0, b);
    return w;
  }
};

/// X (M_0 + sum_c M_c + alpha L) X^T + lambda S_w, symmetrized.
inline Matrix assemble_lhs(const Matrix& x_block, const MmdSet& mmd, const Matrix& laplacian,
                           const Matrix& s_w, double alpha, double lambda) {
  const std::size_t d = x_block.rows(), n = x_block.cols();
  if (mmd.m0.rows() != n || mmd.m0.cols() != n || laplacian.rows() != n ||
      laplacian.cols() != n)
    throw InvalidArgument("assemble_lhs: n x n terms do not match the data matrix");
  if (s_w.rows() != d || s_w.cols() != d)
    throw InvalidArgument("assemble_lhs: within-class scatter does not match the data matrix");
  for (const auto& mc : mmd.per_class)
    if (mc.rows() != n || mc.cols() != n)
      throw InvalidArgument("assemble_lhs: class MMD matrix has the wrong shape");
  Matrix inner = mmd.total();
  if (alpha != 0.0) inner.add_scaled(laplacian, alpha);
  Matrix lhs = multiply_transposed(x_block * inner, x_block);
  if (lambda != 0.0) lhs.add_scaled(s_w, lambda);
  return symmetrize(lhs);
}

/// Same matrix as assemble_lhs, with every MMD matrix given by its indicator
/// vector e (M = e e^T). Avoids forming n x n products; the Laplacian is
/// treated as sparse.
inline Matrix assemble_lhs_factored(const Matrix& x_block,
                                    const std::vector<std::vector<double>>& mmd_vectors,
                                    const Matrix& laplacian, const Matrix& s_w, double alpha,
                                    double lambda) {
  const std::size_t d = x_block.rows(), n = x_block.cols();
  if (laplacian.rows() != n || laplacian.cols() != n)
    throw InvalidArgument("assemble_lhs: n x n terms do not match the data matrix");
  if (s_w.rows() != d || s_w.cols() != d)
    throw InvalidArgument("assemble_lhs: within-class scatter does not match the data matrix");
  const Matrix xt = x_block.transpose();  // one sample per row
  Matrix lhs(d, d);
  std::vector<double> v(d);
  for (const auto& e : mmd_vectors) {
    if (e.size() != n) throw InvalidArgument("assemble_lhs: MMD vector has the wrong length");
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] == 0.0) continue;
      auto xi = xt.row(i);
      for (std::size_t f = 0; f < d; ++f) v[f] += e[i] * xi[f];
    }
    for (std::size_t f = 0; f < d; ++f) {
      if (v[f] == 0.0) continue;
      auto r = lhs.row(f);
      for (std::size_t g = 0; g < d; ++g) r[g] += v[f] * v[g];
    }
  }
  if (alpha != 0.0) {
    Matrix lx(n, d);  // L X^T
    for (std::size_t i = 0; i < n; ++i) {
      auto out = lx.row(i);
      for (std::size_t k = 0; k < n; ++k) {
        const double l = laplacian(i, k);
        if (l == 0.0) continue;
        auto xk = xt.row(k);
        for (std::size_t f = 0; f < d; ++f) out[f] += l * xk[f];
      }
    }
    lhs.add_scaled(transposed_multiply(xt, lx), alpha);
  }
  if (lambda != 0.0) lhs.add_scaled(s_w, lambda);
  return symmetrize(lhs);
}

/// beta C + lambda S_b, symmetrized.
inline Matrix assemble_rhs(const Matrix& c_matrix, const Matrix& s_b, double beta,
                           double lambda) {
  if (!c_matrix.is_square() || c_matrix.rows() != s_b.rows() || c_matrix.cols() != s_b.cols())
    throw InvalidArgument("assemble_rhs: C and S_b must be square and equal in size");
  Matrix rhs(c_matrix.rows(), c_matrix.cols());
  if (beta != 0.0) rhs.add_scaled(c_matrix, beta);
  if (lambda != 0.0) rhs.add_scaled(s_b, lambda);
  return symmetrize(rhs);
}

/// The constraint matrix actually handed to the eigensolver: an all-zero rhs
/// (beta = lambda = 0) is replaced by the identity.
inline Matrix effective_rhs(const Matrix& rhs) {
  return rhs.max_abs() == 0.0 ? Matrix::identity(rhs.rows()) : rhs;
}

/// m smallest generalized eigenpairs of (lhs, rhs), split row-wise into A and B.
inline SharedProjection solve_projection(const Matrix& lhs, const Matrix& rhs,
                                         const JipHyperParams& params, std::size_t d_s,
                                         std::size_t d_t) {
  if (lhs.rows() != d_s + d_t || rhs.rows() != d_s + d_t)
    throw InvalidArgument("solve_projection: matrices must be (d_s + d_t) square");
  GenEigOptions opts;
  opts.ridge = params.ridge;
  opts.selection = params.selection;
  const EigenPairs e = gen_eig_smallest(lhs, effective_rhs(rhs), params.m, opts);
  const std::size_t m = e.vectors.cols();
  return {e.vectors.block(0, 0, d_s, m), e.vectors.block(d_s, 0, d_t, m), e.values};
}

/// (A^T x_s, B^T x_t)
inline std::pair<Matrix, Matrix> project(const SharedProjection& p, const Matrix& x_s,
                                         const Matrix& x_t) {
  if (x_s.rows() != p.a.rows() || x_t.rows() != p.b.rows())
    throw InvalidArgument("project: feature dimension does not match the projection");
  return {transposed_multiply(p.a, x_s), transposed_multiply(p.b, x_t)};
}

struct IterationRecord {
  double objective = 0.0;     // Tr(W^T lhs W) - Tr(W^T rhs W), monitoring only
  std::size_t changed = 0;    // pseudo-labels that moved this iteration
  std::size_t effective_dim = 0;
  Labels target_labels;       // full target label vector after this iteration
};

struct JipModel {
  SharedProjection projection;
  FeatureScaling source_scaling;
  FeatureScaling target_scaling;
  /// Target labels after the initial classifier (true labels where known).
  Labels initial_labels;
  /// Target labels after the final iteration (true labels where known).
  Labels target_labels;
  std::vector<IterationRecord> iterations;
  ClassifierModel classifier;
  std::vector<std::string> warnings;

  /// Raw (unpreprocessed) target samples -> predicted labels in the shared space.
  Labels predict_target(const Matrix& raw_target) const {
    return classifier.predict(transposed_multiply(projection.b, target_scaling.apply(raw_target)));
  }

  Labels predict_source(const Matrix& raw_source) const {
    return classifier.predict(transposed_multiply(projection.a, source_scaling.apply(raw_source)));
  }
};

struct FitOptions {
  ClassifierSpec classifier;
  Preprocessing preprocessing = Preprocessing::zscore;
};

/// Full self-training loop: initial pseudo-labels from the labeled target
/// samples, then t_iters rounds of (rebuild terms, solve, project, retrain,
/// relabel). Labeled target samples keep their labels throughout.
inline JipModel fit(const HeteroDataset& raw, const JipHyperParams& params,
                    const FitOptions& options = {}) {
  validate(raw);
  validate(params);
  for (Label y : raw.source.labels)
    if (y == kUnlabeled) throw InvalidArgument("fit: every source sample must be labeled");
  if (raw.source.count() == 0 || raw.target.count() == 0)
    throw InvalidArgument("fit: both domains need samples");

  JipModel model;
  model.source_scaling = FeatureScaling::fit(raw.source.features, options.preprocessing);
  model.target_scaling = FeatureScaling::fit(raw.target.features, options.preprocessing);
  HeteroDataset ds = raw;
  ds.source.features = model.source_scaling.apply(raw.source.features);
  ds.target.features = model.target_scaling.apply(raw.target.features);

  const std::size_t d_s = ds.source.dim(), d_t = ds.target.dim();
  JipHyperParams p = params;
  if (p.m > d_s + d_t) {
    model.warnings.push_back("subspace dimension " + std::to_string(p.m) +
                             " clamped to d_s + d_t = " + std::to_string(d_s + d_t));
    p.m = d_s + d_t;
  }

  const auto labeled = labeled_indices(ds.target.labels);
  const auto unlabeled = unlabeled_indices(ds.target.labels);
  if (labeled.empty()) throw InvalidArgument("fit: the target domain has no labeled samples");
  {
    std::vector<bool> present(static_cast<std::size_t>(ds.class_count) + 1, false);
    for (std::size_t i : labeled) present[static_cast<std::size_t>(ds.target.labels[i])] = true;
    for (int c = 1; c <= ds.class_count; ++c)
      if (!present[static_cast<std::size_t>(c)])
        model.warnings.push_back("class " + std::to_string(c) +
                                 " has no labeled target sample");
  }
  const Labels labeled_y = select_labels(ds.target.labels, labeled);

  // Step 1: pseudo-labels from the labeled target samples in raw feature space.
  Labels current = ds.target.labels;
  {
    const ClassifierModel init = train(options.classifier,
                                       ds.target.features.select_columns(labeled), labeled_y);
    if (!unlabeled.empty()) {
      const Labels guess = init.predict(ds.target.features.select_columns(unlabeled));
      for (std::size_t k = 0; k < unlabeled.size(); ++k) current[unlabeled[k]] = guess[k];
    }
    model.classifier = init;
  }
  model.initial_labels = current;

  const Matrix x_block = assemble_block_diag({ds.source.features, ds.target.features});
  const Matrix c_matrix = ds.pairs.empty() ? Matrix(d_s + d_t, d_s + d_t) : [&] {
    const auto [xsp, xtp] = paired_features(ds);
    return correlation_matrix(xsp, xtp);
  }();

  Labels train_y = ds.source.labels;
  train_y.insert(train_y.end(), labeled_y.begin(), labeled_y.end());

  for (std::size_t t = 0; t < p.t_iters; ++t) {
    std::vector<std::vector<double>> mmd{mmd_marginal_vector(ds.source.count(), ds.target.count())};
    for (Label c = 1; c <= ds.class_count; ++c)
      mmd.push_back(mmd_class_vector(ds.source.labels, current, c));
    const StructureSet st = build_structure(ds, current, p.k_neighbors);
    const Matrix lhs =
        assemble_lhs_factored(x_block, mmd, st.laplacian, st.sw, p.alpha, p.lambda);
    const Matrix rhs = effective_rhs(assemble_rhs(c_matrix, st.sb, p.beta, p.lambda));

    SharedProjection proj;
    try {
      proj = solve_projection(lhs, rhs, p, d_s, d_t);
    } catch (const ReducedRank& rr) {
      if (rr.achievable() == 0) throw;
      model.warnings.push_back("iteration " + std::to_string(t + 1) + ": only " +
                               std::to_string(rr.achievable()) +
                               " admissible eigenpairs, subspace reduced accordingly");
      JipHyperParams reduced = p;
      reduced.m = rr.achievable();
      proj = solve_projection(lhs, rhs, reduced, d_s, d_t);
    }

    const auto [zs, zt] = project(proj, ds.source.features, ds.target.features);
    Matrix z_train(proj.dim(), zs.cols() + labeled.size());
    z_train.set_block(0, 0, zs);
    z_train.set_block(0, zs.cols(), zt.select_columns(labeled));
    ClassifierModel clf = train(options.classifier, z_train, train_y);

    IterationRecord rec;
    if (!unlabeled.empty()) {
      const Labels next = clf.predict(zt.select_columns(unlabeled));
      for (std::size_t k = 0; k < unlabeled.size(); ++k) {
        if (current[unlabeled[k]] != next[k]) ++rec.changed;
        current[unlabeled[k]] = next[k];
      }
    }
    const Matrix w = proj.stacked();
    rec.objective = trace_quadratic(w, lhs) - trace_quadratic(w, rhs);
    rec.effective_dim = proj.dim();
    rec.target_labels = current;
    model.iterations.push_back(std::move(rec));
    model.projection = std::move(proj);
    model.classifier = std::move(clf);
  }
  model.target_labels = current;
  return model;
}

}  // namespace jip
