// tests/terms_test.cpp

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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jip/eigen.hpp"
#include "jip/terms.hpp"
#include "oracles.hpp"

using namespace jip;

namespace {

struct Instance {
  Matrix xs, xt;
  Labels ys, yt;
  int classes = 0;
  Matrix w;  // (d_s + d_t) x m

  Matrix a() const { return w.block(0, 0, xs.rows(), w.cols()); }
  Matrix b() const { return w.block(xs.rows(), 0, xt.rows(), w.cols()); }
  Matrix x_block() const { return assemble_block_diag({xs, xt}); }
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> n_dist(2, 30), d_dist(1, 20), m_dist(1, 6);
  std::uniform_int_distribution<int> c_dist(1, 4);
  Instance in;
  in.classes = c_dist(rng);
  const std::size_t ns = n_dist(rng), nt = n_dist(rng), ds = d_dist(rng), dt = d_dist(rng);
  in.xs = oracle::random_matrix(rng, ds, ns);
  in.xt = oracle::random_matrix(rng, dt, nt);
  std::uniform_int_distribution<int> lab(1, in.classes);
  for (std::size_t i = 0; i < ns; ++i) in.ys.push_back(lab(rng));
  for (std::size_t i = 0; i < nt; ++i) in.yt.push_back(lab(rng));
  in.w = oracle::random_matrix(rng, ds + dt, m_dist(rng));
  return in;
}

double max_row_sum(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) s += v;
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double min_eigenvalue(const Matrix& m) { return sym_eig(m).values.front(); }

}  // namespace

TEST(MmdMarginal, OneByOne) {
  EXPECT_EQ(mmd_marginal(1, 1), (Matrix{{1, -1}, {-1, 1}}));
}

TEST(MmdMarginal, TwoSourceOneTarget) {
  EXPECT_EQ(mmd_marginal(2, 1),
            (Matrix{{.25, .25, -.5}, {.25, .25, -.5}, {-.5, -.5, 1}}));
}

TEST(MmdMarginal, ZeroCountThrows) {
  EXPECT_THROW(mmd_marginal(0, 3), InvalidArgument);
  EXPECT_THROW(mmd_marginal(3, 0), InvalidArgument);
}

TEST(MmdConditional, SingleMemberEachSide) {
  // source [2, 1, 2], target [1, 2]: class 1 is source 1 and target 0 (index 3)
  const Matrix m = mmd_conditional({2, 1, 2}, {1, 2}, 1);
  Matrix want(5, 5);
  want(1, 1) = 1;
  want(3, 3) = 1;
  want(1, 3) = -1;
  want(3, 1) = -1;
  EXPECT_EQ(m, want);
}

TEST(MmdConditional, AbsentClassGivesZero) {
  EXPECT_EQ(mmd_conditional({1, 2, 3}, {1, 1}, 3), Matrix(5, 5));
  EXPECT_EQ(mmd_conditional({1, 1}, {1, 2, 3}, 2), Matrix(5, 5));
}

TEST(MmdConditional, UnassignedTargetThrows) {
  EXPECT_THROW(mmd_conditional({1}, {1, kUnlabeled}, 1), InvalidArgument);
}

TEST(MmdSet, CountsAndInvariants) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const MmdSet set = build_mmd(in.ys, in.yt, in.classes);
    ASSERT_EQ(set.per_class.size(), static_cast<std::size_t>(in.classes));
    EXPECT_LE(max_row_sum(set.m0), 1e-12);
    EXPECT_TRUE(is_symmetric(set.m0, 0.0));
    for (int c = 1; c <= in.classes; ++c) {
      const auto& mc = set.per_class[static_cast<std::size_t>(c - 1)];
      EXPECT_LE(max_row_sum(mc), 1e-12);
      EXPECT_TRUE(is_symmetric(mc, 0.0));
      const auto [nsc, ntc] = set.class_counts[static_cast<std::size_t>(c - 1)];
      EXPECT_EQ(nsc, static_cast<std::size_t>(std::count(in.ys.begin(), in.ys.end(), c)));
      EXPECT_EQ(ntc, static_cast<std::size_t>(std::count(in.yt.begin(), in.yt.end(), c)));
      if (nsc == 0 || ntc == 0) {
        EXPECT_EQ(mc.max_abs(), 0.0);
      }
    }
  }
}

TEST(MmdQuadraticForm, MarginalMatchesDirectEvaluation) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const Matrix x = in.x_block();
    const Matrix m0 = mmd_marginal(in.xs.cols(), in.xt.cols());
    const double got = trace_quadratic(in.w, x * m0 * x.transpose());
    const double want = oracle::marginal_mmd_direct(in.a(), in.b(), in.xs, in.xt);
    EXPECT_LE(oracle::relative_error(got, want), 1e-10) << "rep " << rep;
  }
}

TEST(MmdQuadraticForm, ConditionalMatchesDirectEvaluation) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const Matrix x = in.x_block();
    for (int c = 1; c <= in.classes; ++c) {
      const Matrix mc = mmd_conditional(in.ys, in.yt, c);
      const double got = trace_quadratic(in.w, x * mc * x.transpose());
      const double want =
          oracle::conditional_mmd_direct(in.a(), in.b(), in.xs, in.xt, in.ys, in.yt, c);
      if (want == 0.0)
        EXPECT_EQ(got, 0.0);
      else
        EXPECT_LE(oracle::relative_error(got, want), 1e-10) << "rep " << rep << " class " << c;
    }
  }
}

TEST(Correlation, SingleSampleIsZero) {
  const Matrix c = correlation_matrix(Matrix{{1}, {2}}, Matrix{{3}});
  EXPECT_EQ(c, Matrix(3, 3));
}

TEST(Correlation, TwoSampleExample) {
  EXPECT_EQ(correlation_matrix(Matrix{{1, -1}}, Matrix{{1, -1}}), (Matrix{{0, 2}, {2, 0}}));
}

TEST(Correlation, MismatchedPairsThrow) {
  EXPECT_THROW(correlation_matrix(Matrix(2, 3), Matrix(2, 2)), InvalidArgument);
  EXPECT_THROW(correlation_matrix(Matrix(2, 0), Matrix(2, 0)), InvalidArgument);
}

TEST(Correlation, TraceIdentityAndZeroDiagonalBlocks) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const std::size_t np = std::min(in.xs.cols(), in.xt.cols());
    const Matrix xsp = in.xs.block(0, 0, in.xs.rows(), np);
    const Matrix xtp = in.xt.block(0, 0, in.xt.rows(), np);
    const Matrix c = correlation_matrix(xsp, xtp);
    const std::size_t ds = in.xs.rows(), dt = in.xt.rows();
    EXPECT_EQ(c.block(0, 0, ds, ds).max_abs(), 0.0);
    EXPECT_EQ(c.block(ds, ds, dt, dt).max_abs(), 0.0);
    EXPECT_TRUE(is_symmetric(c, 0.0));
    // the explicit centering-matrix product agrees with the centered shortcut
    const Matrix k = xsp * centering_matrix(np) * xtp.transpose();
    EXPECT_LE((k - c.block(0, ds, ds, dt)).max_abs(), 1e-12 * std::max(1.0, k.max_abs()));
    const double got = trace_quadratic(in.w, c);
    const double want = oracle::paired_correlation_direct(in.a(), in.b(), xsp, xtp);
    EXPECT_LE(oracle::relative_error(got, want), 1e-10) << "rep " << rep;
  }
}

TEST(Adjacency, IdenticalSameLabelSamples) {
  const Matrix xs{{1, 1}, {2, 2}};
  const Matrix xt{{1}};
  const Matrix w = build_adjacency(xs, {1, 1}, xt, {1}, 1);
  EXPECT_DOUBLE_EQ(w(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(w(1, 0), 1.0);
  EXPECT_EQ(w(0, 0), 0.0);
  EXPECT_EQ(w(0, 2), 0.0);
  EXPECT_EQ(w(2, 0), 0.0);
}

TEST(Adjacency, DifferentLabelsNotConnected) {
  const Matrix w = build_adjacency(Matrix{{1, 1}, {2, 2}}, {1, 2}, Matrix{{1}}, {1}, 3);
  EXPECT_EQ(w.max_abs(), 0.0);
}

TEST(Adjacency, NegativeCosineClippedAndZeroNormIsolated) {
  const Matrix xs{{1, -1, 0}, {0, 0, 0}};
  const Matrix w = build_adjacency(xs, {1, 1, 1}, Matrix{{1, 2}}, {1, 1}, 5);
  EXPECT_EQ(w(0, 1), 0.0);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(w(2, j), 0.0);
  EXPECT_DOUBLE_EQ(w(3, 4), 1.0);
}

TEST(Adjacency, TopKWithLowestIndexTieBreak) {
  // t1 and t2 tie as t0's nearest neighbour; with k = 1 t0 keeps t1. t1 and t2
  // prefer each other, so the t0-t2 edge never appears.
  const Matrix xt{{1, 1, 1}, {0, 2, 2}, {0, 1, 0}, {0, 0, 1}};
  const Matrix w = build_adjacency(Matrix{{1}}, {1}, xt, {2, 2, 2}, 1);
  EXPECT_NEAR(w(1, 2), 1.0 / std::sqrt(6.0), 1e-15);
  EXPECT_EQ(w(1, 3), 0.0);
  EXPECT_NEAR(w(2, 3), 5.0 / 6.0, 1e-15);
}

TEST(Adjacency, PropertiesOnRandomData) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const Instance in = random_instance(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(rep % 5);
    const Matrix w = build_adjacency(in.xs, in.ys, in.xt, in.yt, k);
    const std::size_t ns = in.xs.cols(), n = w.rows();
    EXPECT_TRUE(is_symmetric(w, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(w(i, i), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_GE(w(i, j), 0.0);
        EXPECT_LE(w(i, j), 1.0 + 1e-15);
        const bool cross = (i < ns) != (j < ns);
        if (cross) {
          EXPECT_EQ(w(i, j), 0.0);
        }
        if (w(i, j) > 0.0 && !cross) {
          const Label li = i < ns ? in.ys[i] : in.yt[i - ns];
          const Label lj = j < ns ? in.ys[j] : in.yt[j - ns];
          EXPECT_EQ(li, lj);
        }
      }
    }
  }
}

TEST(Adjacency, UnassignedLabelsThrow) {
  EXPECT_THROW(build_adjacency(Matrix{{1}}, {1}, Matrix{{1}}, {kUnlabeled}, 1), InvalidArgument);
  EXPECT_THROW(build_adjacency(Matrix{{1}}, {kUnlabeled}, Matrix{{1}}, {1}, 1), InvalidArgument);
}

TEST(Laplacian, TwoNodes) {
  EXPECT_EQ(laplacian(Matrix{{0, 0.5}, {0.5, 0}}), (Matrix{{0.5, -0.5}, {-0.5, 0.5}}));
}

TEST(Laplacian, ZeroAdjacency) { EXPECT_EQ(laplacian(Matrix(4, 4)), Matrix(4, 4)); }

TEST(Laplacian, AsymmetricOrNegativeThrows) {
  EXPECT_THROW(laplacian(Matrix{{0, 1}, {0.5, 0}}), InvalidArgument);
  EXPECT_THROW(laplacian(Matrix{{0, -1}, {-1, 0}}), InvalidArgument);
  EXPECT_THROW(laplacian(Matrix(2, 3)), InvalidArgument);
}

TEST(Laplacian, PairwiseDistanceIdentityAndPsd) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const Matrix adj = build_adjacency(in.xs, in.ys, in.xt, in.yt, 4);
    const Matrix l = laplacian(adj);
    EXPECT_LE(max_row_sum(l), 1e-10);
    EXPECT_GE(min_eigenvalue(l), -1e-10 * std::max(1.0, l.frobenius_norm()));
    const Matrix x = in.x_block();
    const double got = trace_quadratic(in.w, x * l * x.transpose());
    const double want = oracle::laplacian_direct(in.w, x, adj);
    if (want == 0.0)
      EXPECT_LE(std::abs(got), 1e-12);
    else
      EXPECT_LE(oracle::relative_error(got, want), 1e-10) << "rep " << rep;
  }
}

TEST(Scatter, OneSamplePerClassHasZeroWithin) {
  const ScatterPair s = scatter_matrices({Matrix{{1, 4, -2}, {0, 3, 5}}, {1, 2, 3}});
  EXPECT_EQ(s.within.max_abs(), 0.0);
  EXPECT_GT(s.between.max_abs(), 0.0);
}

TEST(Scatter, SingleClassHasZeroBetween) {
  const ScatterPair s = scatter_matrices({Matrix{{1, 4, -2}, {0, 3, 5}}, {2, 2, 2}});
  EXPECT_LE(s.between.max_abs(), 1e-15);
  EXPECT_GT(s.within.max_abs(), 0.0);
}

TEST(Scatter, HandExample) {
  // class 1 = {0, 2}, class 2 = {4}: mu = 2, mu_1 = 1, mu_2 = 4
  const ScatterPair s = scatter_matrices({Matrix{{0, 2, 4}}, {1, 1, 2}});
  EXPECT_DOUBLE_EQ(s.within(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.between(0, 0), 2.0 * 1.0 + 1.0 * 4.0);
}

TEST(Scatter, UnlabeledSampleThrows) {
  EXPECT_THROW(scatter_matrices({Matrix{{1, 2}}, {1, kUnlabeled}}), InvalidArgument);
}

TEST(Scatter, TotalScatterIdentity) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(rng);
    const ScatterPair s = scatter_matrices({in.xs, in.ys});
    const Matrix total = oracle::total_scatter_direct(in.xs);
    const double err = (s.within + s.between - total).frobenius_norm() / total.frobenius_norm();
    EXPECT_LE(err, 1e-10) << "rep " << rep;
    const double scale = std::max(1.0, total.frobenius_norm());
    EXPECT_GE(min_eigenvalue(s.within), -1e-8 * scale);
    EXPECT_GE(min_eigenvalue(s.between), -1e-8 * scale);
    // projected within-class spread matches the direct sum of squared deviations
    const Matrix ws = in.a();
    const double got = trace_quadratic(ws, s.within);
    const double want = oracle::within_scatter_direct(ws, in.xs, in.ys);
    EXPECT_LE(oracle::relative_error(got, want), 1e-10);
  }
}

TEST(ScatterBlocks, OneByOneAndZero) {
  const ScatterPair out =
      assemble_scatter_blocks({Matrix{{2}}, Matrix{{3}}}, {Matrix{{5}}, Matrix{{7}}});
  EXPECT_EQ(out.within, (Matrix{{2, 0}, {0, 5}}));
  EXPECT_EQ(out.between, (Matrix{{3, 0}, {0, 7}}));
  const ScatterPair zero =
      assemble_scatter_blocks({Matrix(2, 2), Matrix(2, 2)}, {Matrix(3, 3), Matrix(3, 3)});
  EXPECT_EQ(zero.within, Matrix(5, 5));
  EXPECT_EQ(zero.between, Matrix(5, 5));
}

TEST(ScatterBlocks, InconsistentBlocksThrow) {
  EXPECT_THROW(assemble_scatter_blocks({Matrix(2, 2), Matrix(3, 3)}, {Matrix(1, 1), Matrix(1, 1)}),
               InvalidArgument);
}

TEST(ScatterBlocks, PsdPreserved) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix f = oracle::random_matrix(rng, 4, 2);
    const Matrix sa = multiply_transposed(f, f);  // rank 2, PSD
    const Matrix sb = oracle::random_spd(rng, 3, 0.0);
    const ScatterPair out =
        assemble_scatter_blocks({sa, oracle::random_spd(rng, 4, 0.0)}, {sb, Matrix(3, 3)});
    EXPECT_GE(min_eigenvalue(out.within), -1e-8 * out.within.frobenius_norm());
    EXPECT_GE(min_eigenvalue(out.between), -1e-8 * out.between.frobenius_norm());
  }
}

TEST(Structure, ShapesAndInvariants) {
  std::mt19937_64 rng(9);
  const Instance in = random_instance(rng);
  HeteroDataset ds;
  ds.class_count = in.classes;
  ds.source = {in.xs, in.ys};
  ds.target = {in.xt, Labels(in.yt.size(), kUnlabeled)};
  const StructureSet st = build_structure(ds, in.yt, 10);
  const std::size_t n = in.xs.cols() + in.xt.cols(), d = in.xs.rows() + in.xt.rows();
  EXPECT_EQ(st.laplacian.rows(), n);
  EXPECT_EQ(st.sw.rows(), d);
  EXPECT_EQ(st.sb.rows(), d);
  EXPECT_EQ(st.sw.block(0, in.xs.rows(), in.xs.rows(), in.xt.rows()).max_abs(), 0.0);
  EXPECT_LE(max_row_sum(st.laplacian), 1e-10);
}
