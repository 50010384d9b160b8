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

// Uplink equalization: centralized MMSE, decentralized consensus ADMM with a
// pluggable proximal step, and decentralized conjugate gradients.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dbp/channel.hpp"
#include "dbp/error.hpp"
#include "dbp/linalg.hpp"
#include "dbp/runtime.hpp"

namespace dbp {

/// Which regularized Gram matrix a cluster inverts during preprocessing.
enum class InverseMode {
  automatic,  ///< antennas when S <= U, users otherwise
  antennas,   ///< S x S inverse (Woodbury form)
  users,      ///< U x U inverse
};

inline InverseMode resolve_mode(InverseMode m, std::size_t antennas_per_cluster, std::size_t users) {
  if (m != InverseMode::automatic) return m;
  return antennas_per_cluster <= users ? InverseMode::antennas : InverseMode::users;
}

enum class RegularizerKind { zf, mmse, box, bpsk };

struct Regularizer {
  RegularizerKind kind = RegularizerKind::mmse;
  double radius = 1.0;  ///< box half-side, used by box and bpsk

  static Regularizer zf() { return {RegularizerKind::zf, 0.0}; }
  static Regularizer mmse() { return {RegularizerKind::mmse, 0.0}; }
  static Regularizer box(double r) { return {RegularizerKind::box, r}; }
  static Regularizer bpsk(double r) { return {RegularizerKind::bpsk, r}; }
};

struct AdmmParams {
  double rho = 1.0;
  double gamma = 1.0;
  std::size_t t_max = 3;
  Regularizer regularizer = Regularizer::mmse();
  double no = 0.0;
  double es = 1.0;
  InverseMode mode = InverseMode::automatic;

  void validate() const {
    if (!(rho > 0.0)) throw ParameterError("ADMM: rho must be positive");
    if (!(gamma > 0.0)) throw ParameterError("ADMM: gamma must be positive");
    if (t_max < 1) throw ParameterError("ADMM: t_max must be at least 1");
    if (no < 0.0) throw ParameterError("ADMM: No must be nonnegative");
    if (!(es > 0.0)) throw ParameterError("ADMM: Es must be positive");
    const auto k = regularizer.kind;
    if ((k == RegularizerKind::box || k == RegularizerKind::bpsk) && !(regularizer.radius > 0.0)) {
      throw ParameterError("ADMM: box radius must be positive");
    }
  }
};

/// One cluster's received data for one subcarrier/symbol.
struct UplinkProblem {
  const ClusteredChannel* channel = nullptr;
  std::vector<CVec> y_parts;  ///< y_c, one length-S vector per cluster
};

inline void validate_uplink(const ClusteredChannel& ch, std::span<const CVec> y_parts) {
  if (ch.link() != Link::uplink) throw DimensionError("uplink detector given a downlink channel");
  if (y_parts.size() != ch.num_clusters()) {
    throw DimensionError("uplink detector: " + std::to_string(y_parts.size()) + " receive parts for " +
                         std::to_string(ch.num_clusters()) + " clusters");
  }
  for (const CVec& y : y_parts) {
    if (y.size() != ch.antennas_per_cluster()) throw DimensionError("uplink detector: y_c length != S");
  }
}

/// (H^H H + (No/Es) I)^{-1} H^H y via Cholesky.
inline CVec mmse_centralized(const CMat& h, std::span<const cplx> y, double no, double es) {
  if (y.size() != h.rows()) throw DimensionError("mmse_centralized: y length != B");
  if (no < 0.0 || !(es > 0.0)) throw ParameterError("mmse_centralized: need No >= 0, Es > 0");
  CMat g = gram(h);
  add_to_diagonal(g, no / es);
  return hpd_solve(g, adjoint_matvec(h, y));
}

// ---------------------------------------------------------------------------
// ADMM
// ---------------------------------------------------------------------------

struct AdmmClusterState {
  CVec z;
  CVec lambda;
  CVec y_reg;
  CMat inv;  ///< (H_c H_c^H + rho I_S)^{-1} or (H_c^H H_c + rho I_U)^{-1}
  InverseMode mode = InverseMode::antennas;
};

inline AdmmClusterState admm_preprocess(const CMat& hc, std::span<const cplx> yc, double rho,
                                        InverseMode mode = InverseMode::automatic) {
  if (!(rho > 0.0)) throw ParameterError("admm_preprocess: rho must be positive");
  if (yc.size() != hc.rows()) throw DimensionError("admm_preprocess: y_c length != S");
  AdmmClusterState st;
  st.mode = resolve_mode(mode, hc.rows(), hc.cols());
  if (st.mode == InverseMode::antennas) {
    st.inv = reg_inverse(hc, rho, GramSide::rows);
    st.y_reg = adjoint_matvec(hc, matvec(st.inv, yc));
  } else {
    st.inv = reg_inverse(hc, rho, GramSide::cols);
    st.y_reg = matvec(st.inv, adjoint_matvec(hc, yc));
  }
  st.z = st.y_reg;
  st.lambda.assign(hc.cols(), cplx{0.0});
  return st;
}

/// Local least-squares step: z = y_reg + rho B^{-1} q, or its Woodbury form
/// z = y_reg + q - H^H A^{-1} H q, with q = s - lambda.
inline CVec admm_local_update(const AdmmClusterState& st, const CMat& hc, std::span<const cplx> q, double rho) {
  CVec z = st.y_reg;
  if (st.mode == InverseMode::antennas) {
    const CVec t = adjoint_matvec(hc, matvec(st.inv, matvec(hc, q)));
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += q[i] - t[i];
  } else {
    const CVec t = matvec(st.inv, q);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += rho * t[i];
  }
  return z;
}

/// argmin_s g(s) + (C rho / 2) ||s - v||^2 for the supported regularizers.
inline CVec prox(std::span<const cplx> v, const Regularizer& reg, std::size_t clusters, double rho, double no,
                 double es) {
  CVec s(v.begin(), v.end());
  switch (reg.kind) {
    case RegularizerKind::zf:
      break;
    case RegularizerKind::mmse: {
      const double crs = static_cast<double>(clusters) * rho * es;
      const double shrink = crs / (no + crs);
      for (cplx& x : s) x *= shrink;
      break;
    }
    case RegularizerKind::box: {
      const double r = reg.radius;
      for (cplx& x : s) x = {std::clamp(x.real(), -r, r), std::clamp(x.imag(), -r, r)};
      break;
    }
    case RegularizerKind::bpsk: {
      const double r = reg.radius;
      for (cplx& x : s) x = {std::clamp(x.real(), -r, r), 0.0};
      break;
    }
  }
  return s;
}

/// Decentralized ADMM detection over a batch of problems sharing one runtime.
///
/// Consensus step 0 gathers z_c^(1); step t >= 1 runs the dual update, the
/// local least-squares update and gathers w_c = z_c + lambda_c. Every cluster
/// keeps its own copy of the consensus iterate s, obtained from the broadcast
/// sum through the proximal map. Batched problems are concatenated in the
/// consensus vector, so one round carries U entries per problem and cluster.
class AdmmDetectJob {
 public:
  AdmmDetectJob(std::span<const UplinkProblem> batch, const AdmmParams& params)
      : batch_(batch.begin(), batch.end()),
        params_(params),
        clusters_(batch.empty() ? 1 : batch.front().channel->num_clusters()),
        users_(batch.empty() ? 0 : batch.front().channel->users()),
        states_(clusters_),
        consensus_(clusters_) {
    params_.validate();
    for (const UplinkProblem& p : batch_) {
      validate_uplink(*p.channel, p.y_parts);
      if (p.channel->num_clusters() != clusters_ || p.channel->users() != users_) {
        throw DimensionError("ADMM batch: problems differ in C or U");
      }
    }
  }

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t steps() const noexcept { return params_.t_max; }

  void setup(std::size_t c) {
    auto& st = states_[c];
    st.clear();
    st.reserve(batch_.size());
    for (const UplinkProblem& p : batch_) {
      st.push_back(admm_preprocess(p.channel->cluster(c), p.y_parts[c], params_.rho, params_.mode));
    }
    consensus_[c].assign(batch_.size(), CVec(users_));
  }

  CVec contribute(std::size_t c, std::size_t step) {
    auto& st = states_[c];
    const auto& s = consensus_[c];
    CVec out;
    out.reserve(batch_.size() * users_);
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      AdmmClusterState& cs = st[k];
      if (step > 0) {
        for (std::size_t u = 0; u < users_; ++u) cs.lambda[u] += params_.gamma * (cs.z[u] - s[k][u]);
        const CVec q = sub(s[k], cs.lambda);
        cs.z = admm_local_update(cs, batch_[k].channel->cluster(c), q, params_.rho);
      }
      for (std::size_t u = 0; u < users_; ++u) out.push_back(cs.z[u] + cs.lambda[u]);
    }
    return out;
  }

  void receive(std::size_t c, std::size_t /*step*/, const CVec& sum) {
    auto& s = consensus_[c];
    const double inv_c = 1.0 / static_cast<double>(clusters_);
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      CVec v(users_);
      for (std::size_t u = 0; u < users_; ++u) v[u] = sum[k * users_ + u] * inv_c;
      s[k] = prox(v, params_.regularizer, clusters_, params_.rho, params_.no, params_.es);
    }
  }

  std::vector<CVec> output(std::size_t c) const { return consensus_[c]; }

 private:
  std::vector<UplinkProblem> batch_;
  AdmmParams params_;
  std::size_t clusters_;
  std::size_t users_;
  ClusterLocal<std::vector<AdmmClusterState>> states_;
  ClusterLocal<std::vector<CVec>> consensus_;
};

inline std::vector<CVec> admm_detect_batch(std::span<const UplinkProblem> batch, const AdmmParams& params,
                                           ConsensusRuntime& rt) {
  if (batch.empty()) return {};
  AdmmDetectJob job(batch, params);
  if (job.clusters() != rt.clusters()) throw DimensionError("admm_detect: runtime cluster count mismatch");
  return run_decentralized(job, rt).front();
}

/// Decentralized ADMM equalizer output s^(T_max) for one receive vector.
inline CVec admm_detect(const ClusteredChannel& clusters, std::span<const CVec> y_parts, const AdmmParams& params,
                        ConsensusRuntime& rt) {
  const UplinkProblem p{&clusters, {y_parts.begin(), y_parts.end()}};
  return admm_detect_batch({&p, 1}, params, rt).front();
}

// ---------------------------------------------------------------------------
// Conjugate gradients
// ---------------------------------------------------------------------------

struct CgState {
  CVec x;
  CVec r;
  CVec p;
  CVec e;
  CVec w;
  cplx alpha = 0.0;
  double beta = 0.0;
  double rr = 0.0;  ///< ||r||^2 carried between iterations
};

/// One CG iteration given the consensus Gram product w = sum_c H_c^H H_c p.
inline void cg_iterate(CgState& st, std::span<const cplx> w, double rho) {
  st.w.assign(w.begin(), w.end());
  st.e.resize(st.p.size());
  for (std::size_t i = 0; i < st.p.size(); ++i) st.e[i] = rho * st.p[i] + st.w[i];
  if (st.rr == 0.0) return;  // residual already exactly zero
  const cplx pe = dot(st.p, st.e);
  if (pe == cplx{0.0}) return;
  st.alpha = st.rr / pe;
  axpy(st.alpha, st.p, st.x);
  axpy(-st.alpha, st.e, st.r);
  const double rr_new = squared_norm(st.r);
  st.beta = rr_new / st.rr;
  st.rr = rr_new;
  for (std::size_t i = 0; i < st.p.size(); ++i) st.p[i] = st.r[i] + st.beta * st.p[i];
}

/// Decentralized CG detection: step 0 gathers the MRC output, step t gathers
/// the Gram product for the current search direction. Every cluster updates
/// its own copy of the CG state from the broadcast sum.
class CgDetectJob {
 public:
  CgDetectJob(std::span<const UplinkProblem> batch, double rho, std::size_t t_max)
      : batch_(batch.begin(), batch.end()),
        rho_(rho),
        t_max_(t_max),
        clusters_(batch.empty() ? 1 : batch.front().channel->num_clusters()),
        users_(batch.empty() ? 0 : batch.front().channel->users()),
        states_(clusters_) {
    if (!(rho >= 0.0)) throw ParameterError("CG: rho must be nonnegative");
    for (const UplinkProblem& p : batch_) {
      validate_uplink(*p.channel, p.y_parts);
      if (p.channel->num_clusters() != clusters_ || p.channel->users() != users_) {
        throw DimensionError("CG batch: problems differ in C or U");
      }
    }
  }

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t steps() const noexcept { return t_max_ + 1; }

  void setup(std::size_t c) { states_[c].assign(batch_.size(), CgState{}); }

  CVec contribute(std::size_t c, std::size_t step) {
    auto& st = states_[c];
    CVec out;
    out.reserve(batch_.size() * users_);
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      const CMat& hc = batch_[k].channel->cluster(c);
      const CVec local = step == 0 ? adjoint_matvec(hc, batch_[k].y_parts[c])
                                   : adjoint_matvec(hc, matvec(hc, st[k].p));
      out.insert(out.end(), local.begin(), local.end());
    }
    return out;
  }

  void receive(std::size_t c, std::size_t step, const CVec& sum) {
    auto& st = states_[c];
    for (std::size_t k = 0; k < batch_.size(); ++k) {
      const std::span<const cplx> part(sum.data() + k * users_, users_);
      CgState& cs = st[k];
      if (step == 0) {
        cs.r.assign(part.begin(), part.end());
        cs.p = cs.r;
        cs.x.assign(users_, cplx{0.0});
        cs.rr = squared_norm(cs.r);
      } else {
        cg_iterate(cs, part, rho_);
      }
    }
  }

  std::vector<CVec> output(std::size_t c) const {
    std::vector<CVec> xs;
    xs.reserve(batch_.size());
    for (const CgState& cs : states_[c]) xs.push_back(cs.x);
    return xs;
  }

 private:
  std::vector<UplinkProblem> batch_;
  double rho_;
  std::size_t t_max_;
  std::size_t clusters_;
  std::size_t users_;
  ClusterLocal<std::vector<CgState>> states_;
};

inline std::vector<CVec> cg_detect_batch(std::span<const UplinkProblem> batch, double rho, std::size_t t_max,
                                         ConsensusRuntime& rt) {
  if (batch.empty()) return {};
  CgDetectJob job(batch, rho, t_max);
  if (job.clusters() != rt.clusters()) throw DimensionError("cg_detect: runtime cluster count mismatch");
  return run_decentralized(job, rt).front();
}

inline CVec cg_detect(const ClusteredChannel& clusters, std::span<const CVec> y_parts, double rho, std::size_t t_max,
                      ConsensusRuntime& rt) {
  const UplinkProblem p{&clusters, {y_parts.begin(), y_parts.end()}};
  return cg_detect_batch({&p, 1}, rho, t_max, rt).front();
}

}  // namespace dbp
