/**
 * Copyright 2026 The DBP Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include "dbp/linalg.hpp"
#include "oracle.hpp"

namespace dbp {
namespace {

using testing::EMat;
using testing::Rand;
using testing::to_eigen;
using namespace std::complex_literals;

TEST(Gram, Identity) { EXPECT_EQ(gram(CMat::identity(2)), CMat::identity(2)); }

TEST(Gram, TwoByTwo) {
  const CMat h{{1.0, 1i}, {0.0, 1.0}};
  const CMat want{{1.0, 1i}, {-1i, 2.0}};
  EXPECT_LT(max_abs_diff(gram(h), want), 1e-15);
}

TEST(Gram, OuterProductSum) {
  Rand rng(1);
  const CMat h = rng.matrix(8, 4);
  CMat acc(4, 4);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) acc(i, j) += std::conj(h(r, i)) * h(r, j);
  EXPECT_LT(max_abs_diff(gram(h), acc), 1e-12);
}

TEST(Gram, HermitianAndOuterGram) {
  Rand rng(2);
  for (int k = 0; k < 20; ++k) {
    const CMat h = rng.matrix(rng.index(1, 12), rng.index(1, 12));
    const CMat g = gram(h);
    EXPECT_LT(max_abs_diff(g, adjoint(g)), 1e-12);
    const EMat e = to_eigen(h);
    EXPECT_LT((to_eigen(outer_gram(h)) - e * e.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gram, Decentralizes) {
  Rand rng(3);
  const CMat h = rng.matrix(24, 6);
  for (std::size_t c : {1u, 2u, 3u, 4u, 6u, 8u, 12u, 24u}) {
    const std::size_t s = 24 / c;
    CMat sum(6, 6);
    for (std::size_t k = 0; k < c; ++k) {
      CMat blk(s, 6);
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < 6; ++j) blk(i, j) = h(k * s + i, j);
      const CMat g = gram(blk);
      for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] += g.data()[i];
    }
    EXPECT_LT(max_abs_diff(sum, gram(h)), 1e-12) << "C=" << c;
  }
}

TEST(HpdInverse, ScalarMatrix) {
  CMat m = CMat::identity(3);
  for (cplx& v : m.data()) v *= 2.0;
  CMat want = CMat::identity(3);
  for (cplx& v : want.data()) v *= 0.5;
  EXPECT_LT(max_abs_diff(hpd_inverse(m), want), 1e-15);
}

TEST(HpdInverse, TwoByTwo) {
  const CMat m{{2.0, 1i}, {-1i, 2.0}};
  const CMat want{{2.0 / 3.0, -1i / 3.0}, {1i / 3.0, 2.0 / 3.0}};
  EXPECT_LT(max_abs_diff(hpd_inverse(m), want), 1e-15);
}

TEST(HpdInverse, RoundTripUpTo64) {
  Rand rng(4);
  for (std::size_t n : {1u, 2u, 5u, 16u, 33u, 64u}) {
    const CMat m = rng.hpd(n);
    const EMat prod = to_eigen(m) * to_eigen(hpd_inverse(m));
    EXPECT_LT((prod - EMat::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9) << "n=" << n;
  }
}

TEST(HpdInverse, RejectsIndefinite) {
  const CMat m{{1.0, 0.0}, {0.0, -1.0}};
  EXPECT_THROW(hpd_inverse(m), SingularMatrixError);
  EXPECT_THROW(hpd_inverse(CMat(3, 3)), SingularMatrixError);
  EXPECT_THROW(hpd_inverse(CMat(2, 3)), DimensionError);
}

TEST(HpdSolve, MatchesEigen) {
  Rand rng(5);
  const CMat m = rng.hpd(12);
  const CVec b = rng.vec(12);
  const testing::EVec want = to_eigen(m).ldlt().solve(to_eigen(b));
  EXPECT_LT((to_eigen(hpd_solve(m, b)) - want).norm(), 1e-12);
}

TEST(RegInverse, ZeroChannel) {
  const CMat h(4, 2);
  CMat want = CMat::identity(2);
  for (cplx& v : want.data()) v *= 0.5;
  EXPECT_LT(max_abs_diff(reg_inverse(h, 2.0, GramSide::cols), want), 1e-15);
}

TEST(RegInverse, Scalar) {
  const CMat h{{2.0}};
  EXPECT_NEAR(std::abs(reg_inverse(h, 1.0, GramSide::cols)(0, 0) - 0.2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(reg_inverse(h, 1.0, GramSide::rows)(0, 0) - 0.2), 0.0, 1e-15);
}

TEST(RegInverse, RejectsNonPositiveRho) {
  const CMat h = CMat::identity(2);
  EXPECT_THROW(reg_inverse(h, 0.0, GramSide::rows), ParameterError);
  EXPECT_THROW(reg_inverse(h, -1.0, GramSide::cols), ParameterError);
}

TEST(RegInverse, Woodbury) {
  Rand rng(6);
  for (int k = 0; k < 20; ++k) {
    const std::size_t r = rng.index(1, 16), c = rng.index(1, 16);
    const double rho = rng.uniform(0.05, 3.0);
    const CMat h = k == 0 ? rng.matrix(8, 16) : rng.matrix(r, c);
    const EMat e = to_eigen(h);
    const EMat left = e.adjoint() * to_eigen(reg_inverse(h, rho, GramSide::rows));
    const EMat right = to_eigen(reg_inverse(h, rho, GramSide::cols)) * e.adjoint();
    EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-9);
    // and against Eigen's own inverse
    const EMat g = e.adjoint() * e + rho * EMat::Identity(h.cols(), h.cols());
    EXPECT_LT((to_eigen(reg_inverse(h, rho, GramSide::cols)) - g.inverse()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(VectorOps, Basics) {
  const CVec a{1.0 + 1i, 2.0};
  const CVec b{1i, -1.0};
  EXPECT_EQ(add(a, b), (CVec{1.0 + 2i, 1.0}));
  EXPECT_EQ(sub(a, b), (CVec{1.0, 3.0}));
  EXPECT_EQ(dot(a, b), (1.0 - 1i) * 1i + 2.0 * -1.0);
  EXPECT_DOUBLE_EQ(squared_norm(a), 6.0);
  EXPECT_THROW(add(a, CVec{1.0}), DimensionError);
  EXPECT_TRUE(all_finite(a));
  EXPECT_FALSE(all_finite(CVec{std::numeric_limits<double>::quiet_NaN()}));
}

TEST(MatrixOps, MatvecAndAdjoint) {
  Rand rng(7);
  const CMat h = rng.matrix(5, 3);
  const CVec x = rng.vec(3), y = rng.vec(5);
  EXPECT_LT((to_eigen(matvec(h, x)) - to_eigen(h) * to_eigen(x)).norm(), 1e-13);
  EXPECT_LT((to_eigen(adjoint_matvec(h, y)) - to_eigen(h).adjoint() * to_eigen(y)).norm(), 1e-13);
  EXPECT_EQ(to_eigen(transpose(h)), to_eigen(h).transpose().eval());
  EXPECT_EQ(transpose(transpose(h)), h);
  EXPECT_THROW(matvec(h, y), DimensionError);
  EXPECT_THROW(CMat(2, 2, CVec(3)), DimensionError);
}

}  // namespace
}  // namespace dbp
