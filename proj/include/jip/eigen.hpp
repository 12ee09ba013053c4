// jip/eigen.hpp

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
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "jip/errors.hpp"
#include "jip/matrix.hpp"

namespace jip {

/// Eigenvalues in ascending order; column j of `vectors` pairs with values[j]
/// and has unit Euclidean norm.
struct EigenPairs {
  std::vector<double> values;
  Matrix vectors;
  /// Ridge actually added to the constraint matrix (generalized problems only).
  double ridge_used = 0.0;
};

namespace detail {

// Householder reduction to tridiagonal form followed by the implicit QL
// iteration (the EISPACK tred2/tql2 pair). `v` holds the input on entry and
// the eigenvectors (columns) on exit; `d` the unsorted eigenvalues.
inline void tridiagonal_ql(Matrix& v, std::vector<double>& d) {
  const std::size_t n = v.rows();
  d.assign(n, 0.0);
  std::vector<double> e(n, 0.0);
  if (n == 0) return;

  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // accumulate transformations
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;

  // implicit QL on the tridiagonal (d, e)
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const int max_iter = 60;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter)
          throw NumericFailure("sym_eig: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, ii + 1);
            v(k, ii + 1) = s * v(k, ii) + c * h;
            v(k, ii) = c * v(k, ii) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Unit norm, and the largest-magnitude entry made positive so that results
// are reproducible independent of the sign the iteration happens to produce.
inline void normalize_column(Matrix& v, std::size_t j) {
  double norm = 0.0;
  std::size_t arg = 0;
  double big = -1.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    norm += v(i, j) * v(i, j);
    if (std::abs(v(i, j)) > big) {
      big = std::abs(v(i, j));
      arg = i;
    }
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  const double s = (v(arg, j) < 0 ? -1.0 : 1.0) / norm;
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= s;
}

inline std::vector<std::size_t> ascending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

// Lower Cholesky factor, or nullopt when a pivot is not safely positive.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > floor) || s <= 0.0) return std::nullopt;
    const double ljj = std::sqrt(s);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / ljj;
    }
  }
  return l;
}

// L^{-1} A L^{-T} for lower-triangular L, symmetrized.
inline Matrix congruence_by_inverse(const Matrix& l, const Matrix& a) {
  const std::size_t n = l.rows();
  // Y = L^{-1} A (forward substitution column by column)
  Matrix y = a;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = y(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y(k, j);
      y(i, j) = s / l(i, i);
    }
  }
  // Z = Y L^{-T}  <=>  Z^T = L^{-1} Y^T
  Matrix yt = y.transpose();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = yt(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * yt(k, j);
      yt(i, j) = s / l(i, i);
    }
  }
  return symmetrize(yt);
}

// Solves L^T x = y in place for every column of `y`.
inline void back_substitute_transposed(const Matrix& l, Matrix& y) {
  const std::size_t n = l.rows();
  for (std::size_t j = 0; j < y.cols(); ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * y(k, j);
      y(ii, j) = s / l(ii, ii);
    }
  }
}

}  // namespace detail

/// Full eigendecomposition of a symmetric matrix, values ascending.
inline EigenPairs sym_eig(const Matrix& m) {
  if (!m.is_square()) throw InvalidArgument("sym_eig: matrix is not square");
  require_finite(m, "sym_eig");
  if (!is_symmetric(m, 1e-10)) throw InvalidArgument("sym_eig: matrix is not symmetric");

  Matrix v = symmetrize(m);
  std::vector<double> d;
  detail::tridiagonal_ql(v, d);

  const auto order = detail::ascending_order(d);
  EigenPairs out;
  out.values.resize(order.size());
  out.vectors = Matrix(m.rows(), order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < m.rows(); ++i) out.vectors(i, k) = v(i, order[k]);
    detail::normalize_column(out.vectors, k);
  }
  if (!out.vectors.all_finite())
    throw NumericFailure("sym_eig: non-finite eigenvector produced");
  return out;
}

/// Which m eigenvalues of the generalized problem count as "smallest".
enum class EigenSelection {
  /// the m algebraically smallest finite eigenvalues
  smallest_algebraic,
  /// the m smallest eigenvalues that are >= 0 (up to roundoff)
  smallest_nonnegative,
};

struct GenEigOptions {
  /// Added to the constraint matrix. 0 selects the automatic escalation policy.
  double ridge = 0.0;
  EigenSelection selection = EigenSelection::smallest_algebraic;
  /// Drop directions annihilated by both matrices before solving.
  bool deflate_common_null = true;
};

namespace detail {

// Reference magnitude for ridge escalation: trace/d when positive, otherwise
// the RMS eigenvalue magnitude, otherwise 1.
inline double ridge_scale(const Matrix& a) {
  const double d = static_cast<double>(a.rows());
  const double t = a.trace() / d;
  if (t > 0) return t;
  const double f = a.frobenius_norm() / std::sqrt(d);
  return f > 0 ? f : 1.0;
}

// Ridge values to try in order: the caller's (if any), then 1e-6..1e-2 of scale.
inline std::vector<double> ridge_ladder(double requested, double scale) {
  std::vector<double> ladder;
  if (requested > 0) {
    ladder.push_back(requested);
  } else {
    ladder.push_back(0.0);
  }
  for (double r = 1e-6; r <= 1e-2 * (1 + 1e-9); r *= 10) {
    if (r * scale > requested) ladder.push_back(r * scale);
  }
  return ladder;
}

inline Matrix add_ridge(Matrix a, double ridge) {
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += ridge;
  return a;
}

// Orthonormal basis (columns) of range(lhs) + range(rhs).
inline Matrix joint_range_basis(const Matrix& lhs, const Matrix& rhs, double rel_tol) {
  const std::size_t d = lhs.rows();
  const double nl = lhs.frobenius_norm();
  const double nr = rhs.frobenius_norm();
  Matrix g(d, d);
  if (nl > 0) g.add_scaled(lhs * lhs, 1.0 / (nl * nl));
  if (nr > 0) g.add_scaled(rhs * rhs, 1.0 / (nr * nr));
  const EigenPairs eg = sym_eig(symmetrize(g));
  const double top = eg.values.empty() ? 0.0 : std::max(0.0, eg.values.back());
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < eg.values.size(); ++k)
    if (eg.values[k] > rel_tol * top) keep.push_back(k);
  return eg.vectors.select_columns(keep);
}

struct RawPairs {
  std::vector<double> values;  // may contain +-inf for excluded directions
  Matrix vectors;
  double ridge = 0.0;
};

}  // namespace detail

/// Solves lhs w = phi (rhs + ridge I) w for symmetric lhs, rhs and returns the
/// m smallest finite eigenvalues (per `opts.selection`) with unit-norm
/// eigenvectors, ascending.
///
/// When the ridged rhs is positive definite it is factored and the problem
/// reduced to a standard symmetric one. Otherwise the roles are swapped: a
/// positive definite (lightly ridged) lhs is factored, rhs w = mu lhs w is
/// solved, and phi = 1/mu, with mu ~ 0 treated as an infinite eigenvalue.
/// Directions in the common null space of lhs and rhs carry an indeterminate
/// eigenvalue and are removed first unless `deflate_common_null` is off.
///
/// Throws NumericFailure when neither matrix can be made definite, and
/// ReducedRank when fewer than m admissible eigenvalues exist.
inline EigenPairs gen_eig_smallest(const Matrix& lhs, const Matrix& rhs, std::size_t m,
                                   const GenEigOptions& opts = {}) {
  if (!lhs.is_square() || !rhs.is_square() || lhs.rows() != rhs.rows())
    throw InvalidArgument("gen_eig_smallest: lhs and rhs must be square and equal in size");
  require_finite(lhs, "gen_eig_smallest");
  require_finite(rhs, "gen_eig_smallest");
  if (!is_symmetric(lhs) || !is_symmetric(rhs))
    throw InvalidArgument("gen_eig_smallest: lhs and rhs must be symmetric");
  if (!(opts.ridge >= 0.0) || !std::isfinite(opts.ridge))
    throw InvalidArgument("gen_eig_smallest: ridge must be finite and non-negative");
  const std::size_t d = lhs.rows();
  if (m > d) throw InvalidArgument("gen_eig_smallest: m exceeds the problem dimension");
  if (m == 0) return EigenPairs{{}, Matrix(d, 0), opts.ridge};

  const Matrix lhs_s = symmetrize(lhs);
  const Matrix rhs_s = symmetrize(rhs);

  // Reduce to the joint range when a common null space is present.
  std::optional<Matrix> basis;
  Matrix lhs_r = lhs_s;
  Matrix rhs_r = rhs_s;
  if (opts.deflate_common_null) {
    Matrix q = detail::joint_range_basis(lhs_s, rhs_s, 1e-13);
    if (q.cols() < d) {
      if (q.cols() == 0) throw ReducedRank(m, 0);
      lhs_r = symmetrize(transposed_multiply(q, lhs_s * q));
      rhs_r = symmetrize(transposed_multiply(q, rhs_s * q));
      basis = std::move(q);
    }
  }
  const std::size_t r = lhs_r.rows();

  detail::RawPairs raw;
  bool solved = false;
  for (double ridge : detail::ridge_ladder(opts.ridge, detail::ridge_scale(rhs_r))) {
    const Matrix rhs_reg = detail::add_ridge(rhs_r, ridge);
    auto chol = detail::cholesky(rhs_reg);
    if (!chol) continue;
    const EigenPairs std_pairs = sym_eig(detail::congruence_by_inverse(*chol, lhs_r));
    raw.values = std_pairs.values;
    raw.vectors = std_pairs.vectors;
    detail::back_substitute_transposed(*chol, raw.vectors);
    raw.ridge = ridge;
    solved = true;
    break;
  }

  if (!solved) {
    // rhs is indefinite: factor lhs instead. The lhs ridge stays far below the
    // residual tolerance so the returned pairs still solve the original pencil.
    const double rhs_ridge = opts.ridge;
    const Matrix rhs_reg = detail::add_ridge(rhs_r, rhs_ridge);
    const double lscale = detail::ridge_scale(lhs_r);
    std::optional<Matrix> chol = detail::cholesky(lhs_r);
    for (double rel = 1e-12; !chol && rel <= 1e-10 * (1 + 1e-9); rel *= 10)
      chol = detail::cholesky(detail::add_ridge(lhs_r, rel * lscale));
    if (!chol)
      throw NumericFailure(
          "gen_eig_smallest: neither the constraint matrix nor the objective matrix "
          "is positive definite after regularization");
    const EigenPairs mu = sym_eig(detail::congruence_by_inverse(*chol, rhs_reg));
    double mu_max = 0.0;
    for (double v : mu.values) mu_max = std::max(mu_max, std::abs(v));
    raw.values.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
      const double v = mu.values[k];
      raw.values[k] = std::abs(v) <= 1e-12 * mu_max ? std::numeric_limits<double>::infinity()
                                                    : 1.0 / v;
    }
    raw.vectors = mu.vectors;
    detail::back_substitute_transposed(*chol, raw.vectors);
    raw.ridge = rhs_ridge;
  }

  // Admissible eigenvalues: finite, and non-negative when requested.
  const double lnorm = lhs_r.frobenius_norm();
  const double rnorm = detail::add_ridge(rhs_r, raw.ridge).frobenius_norm();
  const double neg_tol = rnorm > 0 ? 1e-9 * lnorm / rnorm : 0.0;
  std::vector<std::size_t> admissible;
  for (std::size_t k = 0; k < raw.values.size(); ++k) {
    const double v = raw.values[k];
    if (!std::isfinite(v)) continue;
    if (opts.selection == EigenSelection::smallest_nonnegative && v < -neg_tol) continue;
    admissible.push_back(k);
  }
  std::stable_sort(admissible.begin(), admissible.end(), [&](std::size_t a, std::size_t b) {
    return raw.values[a] < raw.values[b];
  });
  if (admissible.size() < m) throw ReducedRank(m, admissible.size());
  admissible.resize(m);

  Matrix picked = raw.vectors.select_columns(admissible);
  if (basis) picked = *basis * picked;

  EigenPairs out;
  out.ridge_used = raw.ridge;
  out.vectors = std::move(picked);
  out.values.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.values.push_back(raw.values[admissible[k]]);
    detail::normalize_column(out.vectors, k);
  }
  if (!out.vectors.all_finite())
    throw NumericFailure("gen_eig_smallest: non-finite eigenvector produced");
  return out;
}

/// Spec-shaped convenience overload.
inline EigenPairs gen_eig_smallest(const Matrix& lhs, const Matrix& rhs, std::size_t m,
                                   double ridge) {
  GenEigOptions opts;
  opts.ridge = ridge;
  return gen_eig_smallest(lhs, rhs, m, opts);
}

}  // namespace jip
