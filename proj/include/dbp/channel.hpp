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

// Synthetic i.i.d. Rayleigh channels, antenna-cluster partitioning and
// per-cluster pilot-based channel estimation.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "dbp/error.hpp"
#include "dbp/linalg.hpp"
#include "dbp/rng.hpp"

namespace dbp {

enum class Link { uplink, downlink };

struct ChannelRealization {
  CMat h;  ///< B x U uplink matrix
  std::uint64_t seed = 0;
};

/// B x U matrix with i.i.d. CN(0,1) entries, drawn row by row from one engine.
inline ChannelRealization generate(std::size_t users, std::size_t antennas, std::uint64_t seed) {
  if (users < 1) throw ConfigError("generate: need at least one user");
  if (antennas < users) {
    throw ConfigError("generate: B=" + std::to_string(antennas) + " < U=" + std::to_string(users));
  }
  Engine eng(seed);
  ComplexNormal cn(1.0);
  CMat h(antennas, users);
  for (cplx& v : h.data()) v = cn(eng);
  return {std::move(h), seed};
}

/// Channel split into C equally sized antenna clusters.
///
/// Uplink blocks are S x U (row blocks of H); downlink blocks are their
/// transposes, U x S, so that y = sum_c H_c x_c.
class ClusteredChannel {
 public:
  ClusteredChannel(std::vector<CMat> blocks, Link link) : blocks_(std::move(blocks)), link_(link) {
    if (blocks_.empty()) throw DimensionError("ClusteredChannel: no clusters");
    const CMat& first = blocks_.front();
    for (const CMat& b : blocks_) {
      if (b.rows() != first.rows() || b.cols() != first.cols()) {
        throw DimensionError("ClusteredChannel: clusters differ in size");
      }
    }
  }

  Link link() const noexcept { return link_; }
  std::size_t num_clusters() const noexcept { return blocks_.size(); }
  std::size_t antennas_per_cluster() const noexcept {
    return link_ == Link::uplink ? blocks_.front().rows() : blocks_.front().cols();
  }
  std::size_t users() const noexcept {
    return link_ == Link::uplink ? blocks_.front().cols() : blocks_.front().rows();
  }
  std::size_t antennas() const noexcept { return num_clusters() * antennas_per_cluster(); }

  const CMat& cluster(std::size_t c) const { return blocks_.at(c); }
  const std::vector<CMat>& clusters() const noexcept { return blocks_; }

  /// Reciprocal channel: every block transposed, link direction flipped.
  ClusteredChannel reciprocal() const {
    std::vector<CMat> t;
    t.reserve(blocks_.size());
    for (const CMat& b : blocks_) t.push_back(transpose(b));
    return {std::move(t), link_ == Link::uplink ? Link::downlink : Link::uplink};
  }

  /// Reassembles the full matrix (B x U uplink, U x B downlink).
  CMat stacked() const {
    const std::size_t s = antennas_per_cluster();
    const std::size_t u = users();
    if (link_ == Link::uplink) {
      CMat h(antennas(), u);
      for (std::size_t c = 0; c < blocks_.size(); ++c)
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < u; ++j) h(c * s + i, j) = blocks_[c](i, j);
      return h;
    }
    CMat h(u, antennas());
    for (std::size_t c = 0; c < blocks_.size(); ++c)
      for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = 0; j < s; ++j) h(i, c * s + j) = blocks_[c](i, j);
    return h;
  }

 private:
  std::vector<CMat> blocks_;
  Link link_;
};

/// Row-wise split of an uplink matrix: cluster c holds rows [cS, (c+1)S).
inline ClusteredChannel partition(const CMat& h, std::size_t clusters) {
  if (clusters == 0 || h.rows() % clusters != 0) {
    throw DimensionError("partition: " + std::to_string(clusters) + " clusters do not divide " +
                         std::to_string(h.rows()) + " rows");
  }
  const std::size_t s = h.rows() / clusters;
  std::vector<CMat> blocks;
  blocks.reserve(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    CMat b(s, h.cols());
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < h.cols(); ++j) b(i, j) = h(c * s + i, j);
    blocks.push_back(std::move(b));
  }
  return {std::move(blocks), Link::uplink};
}

/// Least-squares estimate of one cluster's S x U channel from a U-slot pilot burst.
///
/// The pilot matrix is P = sqrt(Es) F with F the unnormalized U x U DFT, so
/// P P^H = Es U I. Receiving Y = H_c P + N and estimating H_c = Y P^H / (Es U)
/// gives H_c + N P^H / (Es U), whose per-entry error variance is No / (U Es).
/// The estimate is formed as H_c plus that projected noise, which keeps the
/// noiseless case bit-exact.
inline CMat pilot_estimate(const CMat& hc, double no, double es, std::uint64_t seed) {
  if (no < 0.0) throw ParameterError("pilot_estimate: No must be nonnegative");
  if (!(es > 0.0)) throw ParameterError("pilot_estimate: Es must be positive");
  if (no == 0.0) return hc;
  const std::size_t s = hc.rows();
  const std::size_t u = hc.cols();

  // P^H entries: conj(sqrt(Es) exp(-2 pi i k n / U)) at (n, k).
  CMat pilot_adj(u, u);
  const double amp = std::sqrt(es);
  for (std::size_t n = 0; n < u; ++n) {
    for (std::size_t k = 0; k < u; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * n) % u) / static_cast<double>(u);
      pilot_adj(n, k) = std::polar(amp, phase);
    }
  }
  Engine eng(seed);
  ComplexNormal cn(no);
  CMat noise(s, u);
  for (cplx& v : noise.data()) v = cn(eng);

  const CMat err = matmul(noise, pilot_adj);
  const double norm = 1.0 / (es * static_cast<double>(u));
  CMat est = hc;
  for (std::size_t i = 0; i < est.size(); ++i) est.data()[i] += err.data()[i] * norm;
  return est;
}

/// Estimates every cluster with its own pilot-noise stream (cluster index as the stream key).
inline ClusteredChannel estimate_clusters(const ClusteredChannel& uplink, double no, double es,
                                          std::uint64_t master, std::uint64_t trial = 0,
                                          std::uint64_t subcarrier = 0) {
  if (uplink.link() != Link::uplink) throw DimensionError("estimate_clusters: expects uplink blocks");
  std::vector<CMat> est;
  est.reserve(uplink.num_clusters());
  for (std::size_t c = 0; c < uplink.num_clusters(); ++c) {
    est.push_back(pilot_estimate(uplink.cluster(c), no, es, stream_seed(master, Stream::pilot, trial, subcarrier, c)));
  }
  return {std::move(est), Link::uplink};
}

/// Debug dump: one line per row, "re,im" pairs separated by commas.
inline void write_matrix_csv(std::ostream& os, const CMat& m) {
  os.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
}

}  // namespace dbp
