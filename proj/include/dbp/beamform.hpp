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

// Downlink precoding: centralized zero-forcing and decentralized ADMM
// beamforming with a consensus projection onto ||s - sum_c z_c|| <= eps.
//
// There is deliberately no CG precoder: the downlink channel is split
// column-wise across clusters, so H H^H does not decompose into per-cluster
// terms the way the uplink Gram matrix does.

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "dbp/channel.hpp"
#include "dbp/detect.hpp"
#include "dbp/error.hpp"
#include "dbp/linalg.hpp"
#include "dbp/runtime.hpp"

namespace dbp {

struct BfParams {
  double rho = 1.0;
  double gamma = 1.0;
  std::size_t t_max = 3;
  double epsilon = 0.0;
  InverseMode mode = InverseMode::automatic;

  void validate() const {
    if (!(rho > 0.0)) throw ParameterError("beamforming: rho must be positive");
    if (!(gamma > 0.0)) throw ParameterError("beamforming: gamma must be positive");
    if (t_max < 1) throw ParameterError("beamforming: t_max must be at least 1");
    if (!(epsilon >= 0.0)) throw ParameterError("beamforming: epsilon must be nonnegative");
  }
};

/// Minimum-norm exact precoder H^H (H H^H)^{-1} s for a U x B channel.
inline CVec zf_centralized(const CMat& h, std::span<const cplx> s) {
  if (s.size() != h.rows()) throw DimensionError("zf_centralized: s length != U");
  if (h.rows() > h.cols()) throw DimensionError("zf_centralized: needs U <= B");
  return adjoint_matvec(h, hpd_solve(outer_gram(h), s));
}

/// Scale of the MRC-like initializer z_c = max{U/B, 1/C} s.
inline double init_scale(std::size_t users, std::size_t antennas, std::size_t clusters) {
  return std::max(static_cast<double>(users) / static_cast<double>(antennas), 1.0 / static_cast<double>(clusters));
}

struct BfClusterState {
  CVec x;
  CVec z;
  CVec lambda;
  CVec m;  ///< H_c x_c from the latest contribution
  CMat inv;  ///< (H_c^H H_c + I/rho)^{-1} (S x S) or (H_c H_c^H + I/rho)^{-1} (U x U)
  InverseMode mode = InverseMode::antennas;
};

/// x_c = A^{-1} H_c^H q  or  H_c^H B^{-1} q.
inline CVec bf_local_update(const BfClusterState& st, const CMat& hc, std::span<const cplx> q) {
  if (st.mode == InverseMode::antennas) return matvec(st.inv, adjoint_matvec(hc, q));
  return adjoint_matvec(hc, matvec(st.inv, q));
}

/// Preprocessing and first iterate for one U x S downlink cluster block.
inline BfClusterState bf_preprocess(const CMat& hc, std::span<const cplx> s, const BfParams& params,
                                    std::size_t clusters, std::size_t antennas, std::size_t users) {
  params.validate();
  if (hc.rows() != users || s.size() != users) throw DimensionError("bf_preprocess: expected U x S block and length-U s");
  BfClusterState st;
  st.mode = resolve_mode(params.mode, hc.cols(), hc.rows());
  st.inv = reg_inverse(hc, 1.0 / params.rho, st.mode == InverseMode::antennas ? GramSide::cols : GramSide::rows);
  st.z = scale(s, init_scale(users, antennas, clusters));
  st.lambda.assign(users, cplx{0.0});
  st.x = bf_local_update(st, hc, st.z);
  return st;
}

/// Per-cluster correction z_c - w_c from the consensus sum w = sum_c w_c.
///
/// It is the c-th block of the orthogonal projection of the stacked w onto
/// {z : ||s - sum_c z_c|| <= eps}: zero when w is already feasible, and
/// otherwise (1 - eps/||s - w||) (s/C - w/C).
inline CVec consensus_correction(std::span<const cplx> w_sum, std::span<const cplx> s, double epsilon,
                                 std::size_t clusters) {
  require_same_length(w_sum, s, "consensus_correction");
  const double inv_c = 1.0 / static_cast<double>(clusters);
  double factor = 1.0;
  if (epsilon > 0.0) {
    const double gap = norm2(sub(s, w_sum));
    if (gap <= epsilon) return CVec(s.size(), cplx{0.0});
    factor = 1.0 - epsilon / gap;
  }
  CVec d(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = factor * (inv_c * s[i] - inv_c * w_sum[i]);
  return d;
}

/// Projection of all local vectors at once; the sum is taken in list order.
inline std::vector<CVec> consensus_project(std::span<const CVec> w_list, std::span<const cplx> s, double epsilon,
                                           std::size_t clusters) {
  if (w_list.size() != clusters) throw DimensionError("consensus_project: expected one vector per cluster");
  CVec sum = w_list.front();
  for (std::size_t c = 1; c < w_list.size(); ++c) {
    require_same_length(sum, w_list[c], "consensus_project");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += w_list[c][i];
  }
  const CVec d = consensus_correction(sum, s, epsilon, clusters);
  std::vector<CVec> z;
  z.reserve(w_list.size());
  for (const CVec& w : w_list) z.push_back(add(w, d));
  return z;
}

struct DownlinkProblem {
  const ClusteredChannel* channel = nullptr;  ///< downlink (U x S) blocks
  CVec s;
};

/// Decentralized ADMM beamforming. The first iterate is purely local; each of
/// the remaining t_max - 1 iterations gathers w_c = H_c x_c - lambda_c, then
/// every cluster projects, updates its dual and solves its local LS problem.
class BeamformJob {
 public:
  BeamformJob(std::span<const DownlinkProblem> batch, const BfParams& params)
      : batch_(batch.begin(), batch.end()),
        params_(params),
        clusters_(batch.empty() ? 1 : batch.front().channel->num_clusters()),
        users_(batch.empty() ? 0 : batch.front().channel->users()),
        states_(clusters_) {
    params_.validate();
    for (const DownlinkProblem& p : batch_) {
      if (p.channel->link() != Link::downlink) throw DimensionError("beamforming given an uplink channel");
      if (p.channel->num_clusters() != clusters_ || p.channel->users() != users_) {
        throw DimensionError("beamforming batch: problems differ in C or U");
      }
      if (p.s.size() != users_) throw DimensionError("beamforming: s length != U");
    }
  }

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t steps() const noexcept { return params_.t_max - 1; }

  void setup(std::size_t c) {
    auto& st = states_[c];
    st.clear();
    st.reserve(batch_.size());
    for (const DownlinkProblem& p : batch_) {
      st.push_back(bf_preprocess(p.channel->cluster(c), p.s, params_, clusters_, p.channel->antennas(), users_));
    }
  }

  CVec contribute(std::size_t c, std::size_t /*step*/) {
    auto& st = states_[c];
    CVec out;
    out.reserve(batch_.size() * users_);
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      BfClusterState& cs = st[k];
      cs.m = matvec(batch_[k].channel->cluster(c), cs.x);
      for (std::size_t u = 0; u < users_; ++u) out.push_back(cs.m[u] - cs.lambda[u]);
    }
    return out;
  }

  void receive(std::size_t c, std::size_t /*step*/, const CVec& sum) {
    auto& st = states_[c];
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      BfClusterState& cs = st[k];
      const std::span<const cplx> w_sum(sum.data() + k * users_, users_);
      const CVec d = consensus_correction(w_sum, batch_[k].s, params_.epsilon, clusters_);
      for (std::size_t u = 0; u < users_; ++u) {
        const cplx w = cs.m[u] - cs.lambda[u];
        cs.z[u] = w + d[u];
        cs.lambda[u] -= params_.gamma * (cs.m[u] - cs.z[u]);
      }
      cs.x = bf_local_update(cs, batch_[k].channel->cluster(c), add(cs.z, cs.lambda));
    }
  }

  std::vector<CVec> output(std::size_t c) const {
    std::vector<CVec> xs;
    xs.reserve(batch_.size());
    for (const BfClusterState& cs : states_[c]) xs.push_back(cs.x);
    return xs;
  }

 private:
  std::vector<DownlinkProblem> batch_;
  BfParams params_;
  std::size_t clusters_;
  std::size_t users_;
  ClusterLocal<std::vector<BfClusterState>> states_;
};

/// Per problem, the full precoder with cluster blocks stacked in order.
inline std::vector<CVec> admm_beamform_batch(std::span<const DownlinkProblem> batch, const BfParams& params,
                                             ConsensusRuntime& rt) {
  if (batch.empty()) return {};
  BeamformJob job(batch, params);
  if (job.clusters() != rt.clusters()) throw DimensionError("admm_beamform: runtime cluster count mismatch");
  const auto per_cluster = run_decentralized(job, rt);
  std::vector<CVec> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    for (const auto& xs : per_cluster) out[k].insert(out[k].end(), xs[k].begin(), xs[k].end());
  }
  return out;
}

/// Local precoders x_c^(T_max), one per cluster.
inline std::vector<CVec> admm_beamform(const ClusteredChannel& downlink, std::span<const cplx> s,
                                       const BfParams& params, ConsensusRuntime& rt) {
  const DownlinkProblem p{&downlink, {s.begin(), s.end()}};
  BeamformJob job({&p, 1}, params);
  if (job.clusters() != rt.clusters()) throw DimensionError("admm_beamform: runtime cluster count mismatch");
  std::vector<CVec> xs;
  for (auto& per_cluster : run_decentralized(job, rt)) xs.push_back(std::move(per_cluster.front()));
  return xs;
}

inline CVec stack(std::span<const CVec> parts) {
  CVec out;
  for (const CVec& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace dbp
