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

#include "dbp/beamform.hpp"
#include "dbp/channel.hpp"
#include "oracle.hpp"

namespace dbp {
namespace {

using testing::EMat;
using testing::EVec;
using testing::Rand;
using testing::from_eigen;
using testing::project_stacked;
using testing::to_eigen;

EVec stack_eigen(const std::vector<CVec>& parts) {
  CVec all;
  for (const CVec& p : parts) all.insert(all.end(), p.begin(), p.end());
  return to_eigen(all);
}

// Beamforming ADMM from the per-cluster subproblems, solved densely.
EVec dense_beamform(const ClusteredChannel& down, const CVec& s_in, const BfParams& p) {
  const std::size_t c = down.num_clusters();
  const std::size_t u = down.users();
  const std::size_t sp = down.antennas_per_cluster();
  const EVec s = to_eigen(s_in);
  auto local = [&](std::size_t k, const EVec& q) {
    // argmin 1/2 ||x||^2 + rho/2 ||H_c x - q||^2
    const EMat hc = to_eigen(down.cluster(k));
    const EMat lhs = EMat::Identity(sp, sp) + p.rho * hc.adjoint() * hc;
    return EVec(lhs.ldlt().solve(p.rho * hc.adjoint() * q));
  };
  const double sc = std::max(static_cast<double>(u) / static_cast<double>(c * sp), 1.0 / static_cast<double>(c));
  std::vector<EVec> x(c), lam(c, EVec::Zero(u));
  for (std::size_t k = 0; k < c; ++k) x[k] = local(k, sc * s);
  for (std::size_t t = 2; t <= p.t_max; ++t) {
    std::vector<EVec> m(c);
    EVec w(c * u);
    for (std::size_t k = 0; k < c; ++k) {
      m[k] = to_eigen(down.cluster(k)) * x[k];
      w.segment(k * u, u) = m[k] - lam[k];
    }
    const EVec z = project_stacked(w, s, c, p.epsilon);
    for (std::size_t k = 0; k < c; ++k) {
      const EVec zk = z.segment(k * u, u);
      lam[k] -= p.gamma * (m[k] - zk);
      x[k] = local(k, zk + lam[k]);
    }
  }
  EVec out(c * sp);
  for (std::size_t k = 0; k < c; ++k) out.segment(k * sp, sp) = x[k];
  return out;
}

TEST(ZfCentralized, OrthonormalRows) {
  Rand rng(1);
  const Eigen::HouseholderQR<EMat> qr(to_eigen(rng.matrix(10, 4)));
  const EMat q = qr.householderQ() * EMat::Identity(10, 4);
  const CMat h = from_eigen(EMat(q.adjoint()));
  const CVec s = rng.vec(4);
  EXPECT_LT(max_abs_diff(zf_centralized(h, s), adjoint_matvec(h, s)), 1e-12);
}

TEST(ZfCentralized, ExactAndMinimumNorm) {
  Rand rng(2);
  const CMat h = rng.matrix(6, 20);
  const CVec s = rng.vec(6);
  const CVec x = zf_centralized(h, s);
  EXPECT_LT(norm2(sub(s, matvec(h, x))), 1e-10);
  const EMat e = to_eigen(h);
  const EMat proj_null = EMat::Identity(20, 20) - e.adjoint() * (e * e.adjoint()).inverse() * e;
  for (int k = 0; k < 100; ++k) {
    const EVec other = to_eigen(x) + proj_null * to_eigen(rng.vec(20));
    ASSERT_LT((e * other - to_eigen(s)).norm(), 1e-9);
    EXPECT_LE(norm2(x), other.norm() + 1e-12);
  }
}

TEST(ZfCentralized, Errors) {
  EXPECT_THROW(zf_centralized(CMat(4, 2), CVec(4)), DimensionError);
  EXPECT_THROW(zf_centralized(CMat(2, 4), CVec(3)), DimensionError);
  EXPECT_THROW(zf_centralized(CMat(2, 4), CVec(2)), SingularMatrixError);
}

TEST(InitScale, Examples) {
  EXPECT_DOUBLE_EQ(init_scale(16, 64, 8), 0.25);
  EXPECT_DOUBLE_EQ(init_scale(16, 512, 16), 1.0 / 16.0);
}

TEST(BfPreprocess, BranchesAgree) {
  Rand rng(3);
  for (auto [u, s] : {std::pair<std::size_t, std::size_t>{16, 16}, {8, 4}, {4, 12}}) {
    const CMat hc = rng.matrix(u, s);
    const CVec sym = rng.vec(u);
    BfParams p;
    p.rho = 0.8;
    p.mode = InverseMode::antennas;
    const auto a = bf_preprocess(hc, sym, p, 4, 4 * s, u);
    p.mode = InverseMode::users;
    const auto b = bf_preprocess(hc, sym, p, 4, 4 * s, u);
    EXPECT_EQ(a.inv.rows(), s);
    EXPECT_EQ(b.inv.rows(), u);
    EXPECT_LT(max_abs_diff(a.x, b.x), 1e-9);
    EXPECT_EQ(squared_norm(a.lambda), 0.0);
    EXPECT_LT(max_abs_diff(a.z, scale(sym, init_scale(u, 4 * s, 4))), 1e-15);
  }
}

TEST(BfPreprocess, AutomaticMode) {
  BfParams p;
  EXPECT_EQ(bf_preprocess(CMat::identity(4), CVec(4), p, 1, 4, 4).mode, InverseMode::antennas);
  EXPECT_EQ(bf_preprocess(CMat(4, 8), CVec(4), p, 1, 8, 4).mode, InverseMode::users);
  EXPECT_THROW(bf_preprocess(CMat(4, 8), CVec(3), p, 1, 8, 4), DimensionError);
}

TEST(ConsensusProject, FeasibleIsNoOp) {
  Rand rng(4);
  std::vector<CVec> w{rng.vec(3), rng.vec(3), rng.vec(3)};
  const CVec s = add(add(w[0], w[1]), w[2]);
  for (double eps : {0.0, 0.1, 5.0}) {
    const auto z = consensus_project(w, s, eps, 3);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_LT(max_abs_diff(z[c], w[c]), 1e-15);
  }
  // strictly inside the ball
  const CVec s2 = add(s, CVec{0.01, 0.0, 0.0});
  const auto z = consensus_project(w, s2, 0.5, 3);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(z[c], w[c]);
}

TEST(ConsensusProject, EpsZeroExample) {
  const std::vector<CVec> w{{0.0, 0.0}, {0.0, 0.0}};
  const CVec s{2.0, 0.0};
  const auto z = consensus_project(w, s, 0.0, 2);
  for (const CVec& zc : z) EXPECT_EQ(zc, (CVec{1.0, 0.0}));
  EXPECT_EQ(add(z[0], z[1]), s);
}

TEST(ConsensusProject, MatchesProjectionOracle) {
  Rand rng(5);
  for (int k = 0; k < 300; ++k) {
    const std::size_t c = rng.index(1, 5), u = rng.index(1, 4);
    std::vector<CVec> w;
    for (std::size_t i = 0; i < c; ++i) w.push_back(rng.vec(u));
    const CVec s = rng.vec(u);
    const double eps = k % 3 == 0 ? 0.0 : rng.uniform(0.0, 3.0);
    const auto z = consensus_project(w, s, eps, c);
    const EVec want = project_stacked(stack_eigen(w), to_eigen(s), c, eps);
    EXPECT_LT((stack_eigen(z) - want).cwiseAbs().maxCoeff(), 1e-10) << "eps=" << eps;
  }
}

TEST(ConsensusProject, ClosestFeasiblePoint) {
  Rand rng(6);
  for (int k = 0; k < 50; ++k) {
    const std::size_t c = 3, u = 2;
    std::vector<CVec> w{rng.vec(u), rng.vec(u), rng.vec(u)};
    const CVec s = rng.vec(u);
    const double eps = rng.uniform(0.0, 0.5);
    const EVec zw = stack_eigen(consensus_project(w, s, eps, c));
    const EVec ww = stack_eigen(w);
    // random feasible points: project arbitrary vectors with the oracle
    for (int j = 0; j < 20; ++j) {
      const EVec other = project_stacked(to_eigen(rng.vec(c * u)) * 3.0, to_eigen(s), c, eps);
      EXPECT_LE((zw - ww).norm(), (other - ww).norm() + 1e-12);
    }
  }
}

TEST(ConsensusProject, Idempotent) {
  Rand rng(7);
  for (int k = 0; k < 100; ++k) {
    std::vector<CVec> w{rng.vec(4), rng.vec(4)};
    const CVec s = rng.vec(4);
    const double eps = k % 2 ? 0.0 : rng.uniform(0.0, 1.0);
    const auto once = consensus_project(w, s, eps, 2);
    const auto twice = consensus_project(once, s, eps, 2);
    EXPECT_LT((stack_eigen(once) - stack_eigen(twice)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConsensusProject, Errors) {
  const std::vector<CVec> w{{1.0}, {1.0}};
  EXPECT_THROW(consensus_project(w, CVec{1.0}, 0.0, 3), DimensionError);
  EXPECT_THROW(consensus_project(w, CVec{1.0, 2.0}, 0.0, 2), DimensionError);
}

ClusteredChannel random_downlink(Rand& rng, std::size_t u, std::size_t b, std::size_t c) {
  return partition(rng.matrix(b, u), c).reciprocal();
}

TEST(AdmmBeamform, MatchesDenseAdmm) {
  Rand rng(8);
  for (int k = 0; k < 40; ++k) {
    const std::size_t c = rng.index(1, 4), s = rng.index(1, 6), u = rng.index(1, 4);
    if (c * s < u) continue;
    const auto down = random_downlink(rng, u, c * s, c);
    const CVec sym = rng.vec(u);
    BfParams p;
    p.rho = rng.uniform(0.3, 2.0);
    p.gamma = rng.uniform(0.5, 1.5);
    p.t_max = rng.index(1, 8);
    p.epsilon = k % 2 ? 0.0 : rng.uniform(0.0, 0.5);
    ConsensusRuntime rt(c);
    const CVec x = stack(admm_beamform(down, sym, p, rt));
    EXPECT_LT((to_eigen(x) - dense_beamform(down, sym, p)).norm(), 1e-9) << "instance " << k;
  }
}

TEST(AdmmBeamform, SingleClusterConvergesToZf) {
  Rand rng(9);
  for (int k = 0; k < 5; ++k) {
    const auto down = random_downlink(rng, 4, 16, 1);
    const CVec s = rng.vec(4);
    BfParams p;
    p.t_max = 300;
    ConsensusRuntime rt(1);
    const CVec x = stack(admm_beamform(down, s, p, rt));
    EXPECT_LT(relative_error(x, zf_centralized(down.stacked(), s)), 1e-4);
  }
}

TEST(AdmmBeamform, ResidualTrendAndEnergy) {
  Rand rng(10);
  for (int k = 0; k < 10; ++k) {
    const auto down = random_downlink(rng, 8, 32, 4);
    const CMat h = down.stacked();
    const CVec s = rng.vec(8);
    auto run = [&](std::size_t t) {
      BfParams p;
      p.t_max = t;
      ConsensusRuntime rt(4);
      return stack(admm_beamform(down, s, p, rt));
    };
    const CVec x2 = run(2), x10 = run(10), x300 = run(300);
    const double r2 = norm2(sub(s, matvec(h, x2))), r10 = norm2(sub(s, matvec(h, x10)));
    EXPECT_LT(r10, r2);
    EXPECT_LE(norm2(sub(s, matvec(h, x300))) / norm2(s), 1e-3);
    const double zf = norm2(zf_centralized(h, s));
    EXPECT_GE(norm2(x300), zf - 1e-6);
    EXPECT_LT(std::abs(norm2(x300) - zf), std::abs(norm2(x10) - zf) + 1e-12);
  }
}

TEST(AdmmBeamform, EpsilonBallAtConvergence) {
  Rand rng(11);
  const auto down = random_downlink(rng, 4, 16, 4);
  const CMat h = down.stacked();
  const CVec s = rng.vec(4);
  BfParams p;
  p.t_max = 1000;
  p.epsilon = 0.3;
  ConsensusRuntime rt(4);
  const CVec x = stack(admm_beamform(down, s, p, rt));
  // y - n = H x = s + e with ||e|| <= eps
  EXPECT_LE(norm2(sub(s, matvec(h, x))), p.epsilon + 1e-3);
  EXPECT_LT(norm2(x), norm2(zf_centralized(h, s)));
}

TEST(AdmmBeamform, SingleIterationHasNoTraffic) {
  Rand rng(12);
  const auto down = random_downlink(rng, 16, 256, 8);
  BfParams p;
  p.t_max = 1;
  ConsensusRuntime rt(8);
  const auto xs = admm_beamform(down, rng.vec(16), p, rt);
  EXPECT_EQ(xs.size(), 8u);
  EXPECT_EQ(rt.record(), ConsensusRecord{});
}

TEST(AdmmBeamform, SchedulingIndependent) {
  Rand rng(13);
  const auto down = random_downlink(rng, 6, 48, 8);
  const CVec s = rng.vec(6);
  BfParams p;
  p.t_max = 7;
  p.epsilon = 0.05;
  ConsensusRuntime ref_rt(8);
  const auto ref = admm_beamform(down, s, p, ref_rt);
  for (Schedule sch : {Schedule::sequential, Schedule::reversed, Schedule::interleaved, Schedule::shuffled}) {
    for (std::size_t w : {1u, 2u, 4u, 8u}) {
      ConsensusRuntime rt(8, {w, sch, 99});
      EXPECT_EQ(admm_beamform(down, s, p, rt), ref);
    }
  }
}

TEST(AdmmBeamform, Validation) {
  Rand rng(14);
  const auto down = random_downlink(rng, 2, 8, 2);
  ConsensusRuntime rt(2);
  BfParams p;
  p.epsilon = -1.0;
  EXPECT_THROW(admm_beamform(down, CVec(2), p, rt), ParameterError);
  p = {};
  p.t_max = 0;
  EXPECT_THROW(admm_beamform(down, CVec(2), p, rt), ParameterError);
  p = {};
  EXPECT_THROW(admm_beamform(down, CVec(3), p, rt), DimensionError);
  EXPECT_THROW(admm_beamform(down.reciprocal(), CVec(2), p, rt), DimensionError);
}

}  // namespace
}  // namespace dbp
