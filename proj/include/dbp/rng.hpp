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

// Reproducible random streams.
//
// Every random quantity of an experiment is drawn from its own engine whose
// seed is derived from the master seed by hashing a (kind, i, j, k) counter
// tuple with SplitMix64:
//
//   stream_seed(master, kind, i, j, k)
//     = mix(mix(mix(mix(master ^ kind_tag) ^ i) ^ j) ^ k)
//
// The harness uses i = trial, j = subcarrier, k = symbol or cluster index, so
// changing one experiment dimension never shifts the draws of another.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace dbp {

enum class Stream : std::uint64_t {
  channel = 0x6368616e6e656cULL,
  noise = 0x6e6f697365ULL,
  pilot = 0x70696c6f74ULL,
  bits = 0x62697473ULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream kind, std::uint64_t i = 0,
                                    std::uint64_t j = 0, std::uint64_t k = 0) noexcept {
  std::uint64_t h = splitmix64(master ^ static_cast<std::uint64_t>(kind));
  h = splitmix64(h ^ i);
  h = splitmix64(h ^ (j + 0x1000193ULL));
  return splitmix64(h ^ (k + 0x811c9dc5ULL));
}

using Engine = std::mt19937_64;

/// Circularly-symmetric complex Gaussian CN(0, variance).
class ComplexNormal {
 public:
  explicit ComplexNormal(double variance = 1.0) : dist_(0.0, std::sqrt(variance / 2.0)) {}

  std::complex<double> operator()(Engine& eng) {
    const double re = dist_(eng);
    const double im = dist_(eng);
    return {re, im};
  }

 private:
  std::normal_distribution<double> dist_;
};

}  // namespace dbp
