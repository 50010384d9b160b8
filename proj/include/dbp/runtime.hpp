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

// In-process emulation of a decentralized base station.
//
// C antenna clusters execute local work on a pool of worker threads. The only
// data that crosses a cluster boundary is a consensus vector: every cluster
// contributes one vector, a logical fusion node sums them in cluster order
// 0..C-1, and the identical sum is delivered back to every cluster. Because
// the reduction order is fixed and each cluster only writes its own state,
// results do not depend on the worker count or on how clusters are scheduled.

#pragma once

#include <algorithm>
#include <concepts>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "dbp/error.hpp"
#include "dbp/linalg.hpp"
#include "dbp/rng.hpp"

namespace dbp {

/// Bytes on the wire per complex consensus entry (two doubles).
inline constexpr std::size_t kBytesPerComplex = 16;

/// Cumulative consensus traffic.
///
/// `gathered_complex` counts entries sent from clusters to the fusion node,
/// `broadcast_complex` counts entries delivered back (once per cluster), and
/// `bytes_total` is the upstream payload in bytes.
struct ConsensusRecord {
  std::size_t rounds = 0;
  std::size_t gathered_complex = 0;
  std::size_t broadcast_complex = 0;
  std::size_t bytes_total = 0;

  friend bool operator==(const ConsensusRecord&, const ConsensusRecord&) = default;
};

enum class Schedule {
  sequential,   ///< clusters in order, contiguous chunks per worker
  reversed,     ///< clusters in reverse order
  interleaved,  ///< round-robin assignment of clusters to workers
  shuffled,     ///< fresh random permutation on every superstep
};

struct RuntimeOptions {
  std::size_t workers = 1;
  Schedule schedule = Schedule::sequential;
  std::uint64_t shuffle_seed = 0;
};

namespace detail {

inline constexpr std::size_t kNoCluster = std::numeric_limits<std::size_t>::max();

/// Cluster whose local step the calling thread is executing, or kNoCluster.
inline thread_local std::size_t current_cluster = kNoCluster;

class ClusterScope {
 public:
  explicit ClusterScope(std::size_t c) : prev_(current_cluster) { current_cluster = c; }
  ~ClusterScope() { current_cluster = prev_; }
  ClusterScope(const ClusterScope&) = delete;
  ClusterScope& operator=(const ClusterScope&) = delete;

 private:
  std::size_t prev_;
};

class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers) {
    threads_.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    start_.notify_all();
    for (auto& t : threads_) t.join();
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return threads_.size(); }

  /// Runs task(worker_index) once on every worker and waits for all of them.
  void run(std::function<void(std::size_t)> task) {
    std::unique_lock lk(mu_);
    task_ = std::move(task);
    remaining_ = threads_.size();
    ++generation_;
    start_.notify_all();
    done_.wait(lk, [this] { return remaining_ == 0; });
    task_ = nullptr;
  }

 private:
  void loop(std::size_t w) {
    std::size_t seen = 0;
    for (;;) {
      std::function<void(std::size_t)> task;
      {
        std::unique_lock lk(mu_);
        start_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        task = task_;
      }
      task(w);
      {
        std::lock_guard lk(mu_);
        if (--remaining_ == 0) done_.notify_one();
      }
    }
  }

  std::mutex mu_;
  std::condition_variable start_;
  std::condition_variable done_;
  std::function<void(std::size_t)> task_;
  std::size_t generation_ = 0;
  std::size_t remaining_ = 0;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace detail

/// One slot of state per cluster.
///
/// While a cluster's local step is running, touching any other cluster's slot
/// throws ContractViolation. Outside local steps (the fusion context) all
/// slots are readable.
template <typename T>
class ClusterLocal {
 public:
  explicit ClusterLocal(std::size_t clusters, const T& init = T{}) : slots_(clusters, init) {}

  std::size_t size() const noexcept { return slots_.size(); }

  T& operator[](std::size_t c) {
    check(c);
    return slots_[c];
  }
  const T& operator[](std::size_t c) const {
    check(c);
    return slots_[c];
  }

  /// All slots; only available to the fusion node.
  std::span<const T> all() const {
    if (detail::current_cluster != detail::kNoCluster) {
      throw ContractViolation("cluster " + std::to_string(detail::current_cluster) +
                              " attempted to read every cluster's state");
    }
    return slots_;
  }

 private:
  void check(std::size_t c) const {
    if (c >= slots_.size()) throw DimensionError("ClusterLocal: cluster index out of range");
    const std::size_t cur = detail::current_cluster;
    if (cur != detail::kNoCluster && cur != c) {
      throw ContractViolation("cluster " + std::to_string(cur) + " accessed state of cluster " + std::to_string(c));
    }
  }

  std::vector<T> slots_;
};

class ConsensusRuntime {
 public:
  explicit ConsensusRuntime(std::size_t clusters, RuntimeOptions opts = {})
      : clusters_(clusters), opts_(opts) {
    if (clusters_ == 0) throw ConfigError("ConsensusRuntime: need at least one cluster");
    opts_.workers = std::clamp<std::size_t>(opts_.workers, 1, clusters_);
    if (opts_.workers > 1) pool_ = std::make_unique<detail::WorkerPool>(opts_.workers);
  }

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t workers() const noexcept { return opts_.workers; }
  const ConsensusRecord& record() const noexcept { return record_; }
  void reset_record() noexcept { record_ = {}; }

  /// Runs fn(c) once for every cluster, spread over the workers, then waits.
  /// The first exception thrown by any cluster is rethrown here.
  template <typename F>
  void for_each_cluster(F&& fn) {
    if (detail::current_cluster != detail::kNoCluster) {
      throw ContractViolation("for_each_cluster called from inside a cluster step");
    }
    const std::vector<std::size_t> order = next_order();
    if (!pool_) {
      for (std::size_t c : order) {
        detail::ClusterScope scope(c);
        fn(c);
      }
      return;
    }
    const std::size_t nw = pool_->size();
    std::mutex err_mu;
    std::exception_ptr err;
    pool_->run([&](std::size_t w) {
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (owner(i, order.size(), nw) != w) continue;
        try {
          detail::ClusterScope scope(order[i]);
          fn(order[i]);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
    if (err) std::rethrow_exception(err);
  }

  /// Fusion-node sum of one vector per cluster, reduced in cluster order.
  CVec allreduce_sum(std::span<const CVec> locals) {
    if (detail::current_cluster != detail::kNoCluster) {
      throw ContractViolation("allreduce_sum called from inside a cluster step");
    }
    if (locals.size() != clusters_) {
      throw DimensionError("allreduce_sum: expected " + std::to_string(clusters_) + " contributions, got " +
                           std::to_string(locals.size()));
    }
    const std::size_t len = locals.front().size();
    for (const CVec& v : locals) {
      if (v.size() != len) throw DimensionError("allreduce_sum: contributions differ in length");
    }
    CVec sum = locals.front();
    for (std::size_t c = 1; c < locals.size(); ++c) {
      for (std::size_t i = 0; i < len; ++i) sum[i] += locals[c][i];
    }
    record_.rounds += 1;
    record_.gathered_complex += clusters_ * len;
    record_.broadcast_complex += clusters_ * len;
    record_.bytes_total += kBytesPerComplex * clusters_ * len;
    return sum;
  }

 private:
  std::vector<std::size_t> next_order() {
    std::vector<std::size_t> order(clusters_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    switch (opts_.schedule) {
      case Schedule::sequential:
      case Schedule::interleaved:
        break;
      case Schedule::reversed:
        std::reverse(order.begin(), order.end());
        break;
      case Schedule::shuffled: {
        Engine eng(splitmix64(opts_.shuffle_seed ^ (superstep_ * 0x9e3779b97f4a7c15ULL)));
        std::shuffle(order.begin(), order.end(), eng);
        break;
      }
    }
    ++superstep_;
    return order;
  }

  std::size_t owner(std::size_t i, std::size_t n, std::size_t nw) const noexcept {
    if (opts_.schedule == Schedule::interleaved || opts_.schedule == Schedule::shuffled) return i % nw;
    const std::size_t chunk = (n + nw - 1) / nw;
    return i / chunk;
  }

  std::size_t clusters_;
  RuntimeOptions opts_;
  ConsensusRecord record_;
  std::uint64_t superstep_ = 0;
  std::unique_ptr<detail::WorkerPool> pool_;
};

/// A decentralized algorithm expressed as consensus supersteps.
///
/// The driver calls setup(c) on every cluster, then for each step gathers
/// contribute(c, step) from every cluster, reduces them on the fusion node and
/// hands the sum to receive(c, step, sum). output(c) is collected at the end.
template <typename Job>
concept DecentralizedJob = requires(Job& job, std::size_t c, std::size_t step, const CVec& sum) {
  { job.steps() } -> std::convertible_to<std::size_t>;
  job.setup(c);
  { job.contribute(c, step) } -> std::convertible_to<CVec>;
  job.receive(c, step, sum);
  job.output(c);
};

template <DecentralizedJob Job>
auto run_decentralized(Job& job, ConsensusRuntime& rt) {
  using Out = std::decay_t<decltype(job.output(std::size_t{0}))>;
  const std::size_t nc = rt.clusters();
  rt.for_each_cluster([&](std::size_t c) { job.setup(c); });

  ClusterLocal<CVec> contributions(nc);
  for (std::size_t step = 0; step < job.steps(); ++step) {
    rt.for_each_cluster([&](std::size_t c) { contributions[c] = job.contribute(c, step); });
    const CVec sum = rt.allreduce_sum(contributions.all());
    rt.for_each_cluster([&](std::size_t c) { job.receive(c, step, sum); });
  }

  ClusterLocal<Out> outputs(nc);
  rt.for_each_cluster([&](std::size_t c) { outputs[c] = job.output(c); });
  const auto all = outputs.all();
  return std::vector<Out>(all.begin(), all.end());
}

}  // namespace dbp
