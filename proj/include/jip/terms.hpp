// jip/terms.hpp

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
#include <map>
#include <utility>
#include <vector>

#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/matrix.hpp"

namespace jip {

// Column order everywhere in this file: the n_s source samples first, then the
// n_t target samples, matching the block data matrix X = [X_S 0; 0 X_T].

// Every MMD matrix is an outer product e e^T of a signed mean-indicator
// vector: +1/n_s^c on class members in the source block, -1/n_t^c on class
// members in the target block.

/// Indicator for the marginal term (every sample is a member).
inline std::vector<double> mmd_marginal_vector(std::size_t n_s, std::size_t n_t) {
  if (n_s == 0 || n_t == 0) throw InvalidArgument("mmd_marginal: both domains need samples");
  std::vector<double> e(n_s + n_t);
  std::fill(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n_s),
            1.0 / static_cast<double>(n_s));
  std::fill(e.begin() + static_cast<std::ptrdiff_t>(n_s), e.end(),
            -1.0 / static_cast<double>(n_t));
  return e;
}

/// Indicator for class `c`; all zeros when either side has no member.
inline std::vector<double> mmd_class_vector(const Labels& source_labels,
                                            const Labels& target_labels, Label c) {
  for (Label y : target_labels)
    if (y == kUnlabeled)
      throw InvalidArgument("mmd_conditional: target pseudo-labels must be fully assigned");
  const std::size_t n_s = source_labels.size();
  std::vector<double> e(n_s + target_labels.size(), 0.0);
  const auto ns_c = std::count(source_labels.begin(), source_labels.end(), c);
  const auto nt_c = std::count(target_labels.begin(), target_labels.end(), c);
  if (ns_c == 0 || nt_c == 0) return e;
  for (std::size_t i = 0; i < n_s; ++i)
    if (source_labels[i] == c) e[i] = 1.0 / static_cast<double>(ns_c);
  for (std::size_t j = 0; j < target_labels.size(); ++j)
    if (target_labels[j] == c) e[n_s + j] = -1.0 / static_cast<double>(nt_c);
  return e;
}

inline Matrix outer_self(const std::vector<double>& e) {
  Matrix m(e.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0.0) continue;
    for (std::size_t j = 0; j < e.size(); ++j) m(i, j) = e[i] * e[j];
  }
  return m;
}

/// Marginal MMD matrix: 1/n_s^2 on the source block, 1/n_t^2 on the target
/// block, -1/(n_s n_t) across.
inline Matrix mmd_marginal(std::size_t n_s, std::size_t n_t) {
  return outer_self(mmd_marginal_vector(n_s, n_t));
}

/// Class-conditional MMD matrix for class `c`; zero when either side has no
/// member of that class.
inline Matrix mmd_conditional(const Labels& source_labels, const Labels& target_labels,
                              Label c) {
  return outer_self(mmd_class_vector(source_labels, target_labels, c));
}

struct MmdSet {
  Matrix m0;
  std::vector<Matrix> per_class;  // index c-1 for class c
  std::vector<std::pair<std::size_t, std::size_t>> class_counts;  // (n_s^c, n_t^c)

  /// M_0 + sum_c M_c
  Matrix total() const {
    Matrix t = m0;
    for (const auto& mc : per_class) t += mc;
    return t;
  }
};

inline MmdSet build_mmd(const Labels& source_labels, const Labels& target_labels,
                        int class_count) {
  MmdSet set;
  set.m0 = mmd_marginal(source_labels.size(), target_labels.size());
  for (Label c = 1; c <= class_count; ++c) {
    set.per_class.push_back(mmd_conditional(source_labels, target_labels, c));
    set.class_counts.emplace_back(
        static_cast<std::size_t>(std::count(source_labels.begin(), source_labels.end(), c)),
        static_cast<std::size_t>(std::count(target_labels.begin(), target_labels.end(), c)));
  }
  return set;
}

/// C = [0, X_SP H X_TP^T; X_TP H X_SP^T, 0], square of size d_s + d_t.
inline Matrix correlation_matrix(const Matrix& x_sp, const Matrix& x_tp) {
  if (x_sp.cols() != x_tp.cols())
    throw InvalidArgument("correlation_matrix: paired matrices differ in sample count");
  if (x_sp.cols() == 0) throw InvalidArgument("correlation_matrix: no paired samples");
  const std::size_t np = x_sp.cols(), ds = x_sp.rows(), dt = x_tp.rows();
  // X_SP H X_TP^T == (X_SP H)(X_TP)^T since H is a symmetric projector
  Matrix centered = x_sp;
  for (std::size_t f = 0; f < ds; ++f) {
    double mu = 0.0;
    for (std::size_t i = 0; i < np; ++i) mu += x_sp(f, i);
    mu /= static_cast<double>(np);
    for (std::size_t i = 0; i < np; ++i) centered(f, i) -= mu;
  }
  const Matrix k = multiply_transposed(centered, x_tp);
  Matrix c(ds + dt, ds + dt);
  c.set_block(0, ds, k);
  c.set_block(ds, 0, k.transpose());
  return c;
}

namespace detail {

// Same-domain, same-label top-k cosine graph; writes into `w` at `offset`.
inline void domain_adjacency(const Matrix& x, const Labels& y, std::size_t k,
                             std::size_t offset, Matrix& w) {
  const std::size_t n = x.cols();
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t f = 0; f < x.rows(); ++f) s += x(f, i) * x(f, i);
    norms[i] = std::sqrt(s);
  }
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0 || k == 0) continue;
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || y[j] != y[i] || norms[j] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t f = 0; f < x.rows(); ++f) dot += x(f, i) * x(f, j);
      cand.emplace_back(std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0), j);
    }
    const std::size_t keep = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    for (std::size_t r = 0; r < keep; ++r) {
      const auto [sim, j] = cand[r];
      const double v = std::max(0.0, sim);
      double& wij = w(offset + i, offset + j);
      double& wji = w(offset + j, offset + i);
      wij = std::max(wij, v);
      wji = std::max(wji, v);
    }
  }
}

}  // namespace detail

/// Discriminative cosine adjacency over all n_s + n_t samples. Within each
/// domain, W_ij = max(0, cos(x_i, x_j)) when the labels agree and j is among
/// the k most similar same-label samples of i (or vice versa). Cross-domain
/// entries and the diagonal are zero; zero-norm samples stay isolated.
inline Matrix build_adjacency(const Matrix& xs, const Labels& ys, const Matrix& xt,
                              const Labels& yt, std::size_t k) {
  if (xs.cols() != ys.size() || xt.cols() != yt.size())
    throw InvalidArgument("build_adjacency: label count mismatch");
  for (Label l : ys)
    if (l == kUnlabeled) throw InvalidArgument("build_adjacency: unlabeled source sample");
  for (Label l : yt)
    if (l == kUnlabeled) throw InvalidArgument("build_adjacency: unassigned target label");
  const std::size_t n_s = xs.cols();
  Matrix w(n_s + xt.cols(), n_s + xt.cols());
  detail::domain_adjacency(xs, ys, k, 0, w);
  detail::domain_adjacency(xt, yt, k, n_s, w);
  return w;
}

/// `target_labels` are the current (pseudo-)labels of every target sample.
inline Matrix build_adjacency(const HeteroDataset& ds, const Labels& target_labels,
                              std::size_t k) {
  return build_adjacency(ds.source.features, ds.source.labels, ds.target.features,
                         target_labels, k);
}

/// L = D - W with D_ii = sum_j W_ij.
inline Matrix laplacian(const Matrix& adjacency) {
  if (!adjacency.is_square()) throw InvalidArgument("laplacian: adjacency is not square");
  require_finite(adjacency, "laplacian");
  if (!is_symmetric(adjacency, 1e-12))
    throw InvalidArgument("laplacian: adjacency is not symmetric");
  const std::size_t n = adjacency.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = adjacency(i, j);
      if (w < 0) throw InvalidArgument("laplacian: negative edge weight");
      deg += w;
      l(i, j) = -w;
    }
    l(i, i) = deg;
  }
  return l;
}

struct ScatterPair {
  Matrix within;
  Matrix between;
};

/// Per-domain LDA scatters. Every sample must be labeled.
inline ScatterPair scatter_matrices(const DomainData& data) {
  const std::size_t d = data.dim(), n = data.count();
  if (data.labels.size() != n) throw InvalidArgument("scatter_matrices: label count mismatch");
  for (Label l : data.labels)
    if (l == kUnlabeled) throw InvalidArgument("scatter_matrices: unlabeled sample");
  ScatterPair out{Matrix(d, d), Matrix(d, d)};
  if (n == 0) return out;

  std::vector<double> mu(d, 0.0);
  std::map<Label, std::pair<std::vector<double>, std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    auto& [sum, count] = classes[data.labels[i]];
    sum.resize(d, 0.0);
    for (std::size_t f = 0; f < d; ++f) {
      sum[f] += data.features(f, i);
      mu[f] += data.features(f, i);
    }
    ++count;
  }
  for (double& v : mu) v /= static_cast<double>(n);
  for (auto& [label, acc] : classes)
    for (double& v : acc.first) v /= static_cast<double>(acc.second);

  // within: deviations from the class mean
  Matrix dev(d, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mc = classes[data.labels[i]].first;
    for (std::size_t f = 0; f < d; ++f) dev(f, i) = data.features(f, i) - mc[f];
  }
  out.within = symmetrize(multiply_transposed(dev, dev));

  // between: weighted deviations of class means from the global mean
  Matrix mdev(d, classes.size());
  std::size_t col = 0;
  for (const auto& [label, acc] : classes) {
    const double w = std::sqrt(static_cast<double>(acc.second));
    for (std::size_t f = 0; f < d; ++f) mdev(f, col) = w * (acc.first[f] - mu[f]);
    ++col;
  }
  out.between = symmetrize(multiply_transposed(mdev, mdev));
  return out;
}

/// S_w = blockdiag(S_sw, S_tw), S_b = blockdiag(S_sb, S_tb).
inline ScatterPair assemble_scatter_blocks(const ScatterPair& source, const ScatterPair& target) {
  if (!source.within.is_square() || !source.between.is_square() ||
      !target.within.is_square() || !target.between.is_square() ||
      source.within.rows() != source.between.rows() ||
      target.within.rows() != target.between.rows())
    throw InvalidArgument("assemble_scatter_blocks: blocks must be square and consistent");
  return {assemble_block_diag({source.within, target.within}),
          assemble_block_diag({source.between, target.between})};
}

/// Local and global structure terms for one iteration.
struct StructureSet {
  Matrix adjacency;
  Matrix laplacian;
  Matrix sw;
  Matrix sb;
};

inline StructureSet build_structure(const HeteroDataset& ds, const Labels& target_labels,
                                    std::size_t k) {
  StructureSet s;
  s.adjacency = build_adjacency(ds, target_labels, k);
  s.laplacian = laplacian(s.adjacency);
  const ScatterPair src = scatter_matrices(ds.source);
  const ScatterPair tgt = scatter_matrices(DomainData{ds.target.features, target_labels});
  ScatterPair blocks = assemble_scatter_blocks(src, tgt);
  s.sw = std::move(blocks.within);
  s.sb = std::move(blocks.between);
  return s;
}

}  // namespace jip
