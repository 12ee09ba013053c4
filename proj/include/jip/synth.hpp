// jip/synth.hpp

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
#include <numeric>
#include <random>
#include <vector>

#include "jip/dataset.hpp"
#include "jip/errors.hpp"
#include "jip/matrix.hpp"

namespace jip {

/// Shape of a synthetic two-domain benchmark. Both domains are linear images
/// of one shared latent space in which classes sit at well-separated centers.
struct SynthSpec {
  int class_count = 4;
  std::size_t latent_dim = 5;
  std::size_t samples_per_domain = 100;
  std::size_t source_dim = 30;
  std::size_t target_dim = 20;
  double noise_sigma = 0.3;
  double pair_fraction = 0.3;
  double class_separation = 1.0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

/// A generated dataset plus the ground truth withheld from it.
struct SyntheticDataset {
  HeteroDataset data;
  /// True labels for every target sample (the dataset hides the unpaired ones).
  Labels target_truth;
};

inline std::size_t synth_pair_count(const SynthSpec& spec) {
  // the epsilon keeps 0.3 * 100 at 30 rather than 31
  return static_cast<std::size_t>(
      std::ceil(spec.pair_fraction * static_cast<double>(spec.samples_per_domain) - 1e-9));
}

inline void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& m) { throw InvalidArgument("SynthSpec: " + m); };
  if (spec.class_count < 1) fail("class_count must be at least 1");
  if (spec.latent_dim < 1) fail("latent_dim must be at least 1");
  if (spec.source_dim < 1 || spec.target_dim < 1) fail("domain dimensions must be positive");
  if (spec.latent_dim > std::min(spec.source_dim, spec.target_dim))
    fail("latent_dim must not exceed min(source_dim, target_dim)");
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
    fail("noise_sigma must be finite and non-negative");
  if (!(spec.pair_fraction > 0.0 && spec.pair_fraction <= 1.0))
    fail("pair_fraction must lie in (0, 1]");
  if (!(spec.class_separation > 0.0) || !std::isfinite(spec.class_separation))
    fail("class_separation must be positive");
  if (synth_pair_count(spec) < static_cast<std::size_t>(spec.class_count))
    fail("pair_fraction * samples_per_domain must cover every class at least once");
}

/// Deterministic for a fixed (spec, seed) on a given standard library.
///
/// Sample k (before shuffling) belongs to class (k mod C) + 1, and the first
/// ceil(pair_fraction * n) samples of each domain form the pairs, so pairs are
/// spread over classes as evenly as possible. Each latent point is its class
/// center plus N(0, sigma^2) noise; paired samples share the latent point and
/// get independent feature noise. Sample order is then shuffled per domain.
inline SyntheticDataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t c_count = static_cast<std::size_t>(spec.class_count);
  const std::size_t q = spec.latent_dim;
  const std::size_t n = spec.samples_per_domain;
  const double sigma = spec.noise_sigma;

  // Class centers by rejection sampling. The first draws are scaled so that
  // the expected pairwise distance equals class_separation, which keeps the
  // minimum-distance constraint active; the radius grows if packing is tight.
  std::vector<std::vector<double>> centers;
  double radius = spec.class_separation / std::sqrt(2.0 * static_cast<double>(q));
  std::size_t failures = 0;
  while (centers.size() < c_count) {
    std::vector<double> c(q);
    for (double& v : c) v = radius * gauss(rng);
    bool ok = true;
    for (const auto& other : centers) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < q; ++k) d2 += (c[k] - other[k]) * (c[k] - other[k]);
      if (std::sqrt(d2) < spec.class_separation) {
        ok = false;
        break;
      }
    }
    if (ok) {
      centers.push_back(std::move(c));
    } else if (++failures % 100 == 0) {
      radius *= 1.25;
    }
  }

  auto random_map = [&](std::size_t d) {
    Matrix p(d, q);
    const double s = 1.0 / std::sqrt(static_cast<double>(q));
    for (double& v : p.data()) v = s * gauss(rng);
    return p;
  };
  const Matrix map_s = random_map(spec.source_dim);
  const Matrix map_t = random_map(spec.target_dim);

  auto latent_point = [&](std::size_t cls) {
    std::vector<double> z = centers[cls];
    for (double& v : z) v += sigma * gauss(rng);
    return z;
  };
  auto emit = [&](const Matrix& map, const std::vector<double>& z, Matrix& x, std::size_t col) {
    for (std::size_t f = 0; f < map.rows(); ++f) {
      double v = 0.0;
      for (std::size_t k = 0; k < q; ++k) v += map(f, k) * z[k];
      x(f, col) = v + sigma * gauss(rng);
    }
  };

  const std::size_t n_pairs = synth_pair_count(spec);
  Matrix xs(spec.source_dim, n), xt(spec.target_dim, n);
  Labels ys(n), yt(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t cls = k % c_count;
    ys[k] = yt[k] = static_cast<Label>(cls + 1);
    if (k < n_pairs) {
      const auto z = latent_point(cls);
      emit(map_s, z, xs, k);
      emit(map_t, z, xt, k);
    } else {
      emit(map_s, latent_point(cls), xs, k);
      emit(map_t, latent_point(cls), xt, k);
    }
  }

  // shuffle sample order independently per domain
  std::vector<std::size_t> perm_s(n), perm_t(n);
  std::iota(perm_s.begin(), perm_s.end(), std::size_t{0});
  std::iota(perm_t.begin(), perm_t.end(), std::size_t{0});
  std::shuffle(perm_s.begin(), perm_s.end(), rng);
  std::shuffle(perm_t.begin(), perm_t.end(), rng);
  // perm[new] = old; inverse gives where an old index landed
  std::vector<std::size_t> where_s(n), where_t(n);
  for (std::size_t i = 0; i < n; ++i) {
    where_s[perm_s[i]] = i;
    where_t[perm_t[i]] = i;
  }

  SyntheticDataset out;
  out.data.class_count = spec.class_count;
  out.data.source.features = xs.select_columns(perm_s);
  out.data.target.features = xt.select_columns(perm_t);
  out.data.source.labels = select_labels(ys, perm_s);
  out.target_truth = select_labels(yt, perm_t);
  out.data.target.labels.assign(n, kUnlabeled);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    out.data.pairs.push_back({where_s[k], where_t[k]});
    out.data.target.labels[where_t[k]] = yt[k];
  }
  std::sort(out.data.pairs.begin(), out.data.pairs.end());
  return out;
}

}  // namespace jip
