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

// Real-multiplication counts for the decentralized and centralized
// algorithms. TM (timing) counts the work on one processing element; AR
// (arithmetic) sums it over all C clusters plus the fusion node.

#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "dbp/error.hpp"

namespace dbp {

/// Exact rational with int64 numerator and positive denominator.
class Rational {
 public:
  constexpr Rational(std::int64_t n = 0, std::int64_t d = 1) : num_(n), den_(d) {  // NOLINT(implicit)
    if (den_ == 0) throw ParameterError("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr bool is_integer() const noexcept { return den_ == 1; }

  std::int64_t to_integer() const {
    if (!is_integer()) {
      throw Error("complexity formula produced non-integral value " + std::to_string(num_) + "/" +
                  std::to_string(den_));
    }
    return num_;
  }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend constexpr bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

enum class Algorithm { admm_dl, admm_ul, cg_ul, zf_dl, mmse_ul };
enum class CxMode { sxs, uxu, none };
enum class Metric { tm, ar };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::admm_dl: return "ADMM-DL";
    case Algorithm::admm_ul: return "ADMM-UL";
    case Algorithm::cg_ul: return "CG-UL";
    case Algorithm::zf_dl: return "ZF-DL";
    case Algorithm::mmse_ul: return "MMSE-UL";
  }
  return "?";
}

inline std::string_view to_string(CxMode m) {
  switch (m) {
    case CxMode::sxs: return "SxS";
    case CxMode::uxu: return "UxU";
    case CxMode::none: return "n/a";
  }
  return "?";
}

inline std::string_view to_string(Metric m) { return m == Metric::tm ? "TM" : "AR"; }

inline bool is_centralized(Algorithm a) { return a == Algorithm::zf_dl || a == Algorithm::mmse_ul; }

/// Mode the algorithms pick on their own: S x S inverse when S <= U.
inline CxMode natural_mode(Algorithm a, std::size_t s, std::size_t u) {
  if (a == Algorithm::admm_dl || a == Algorithm::admm_ul) return s <= u ? CxMode::sxs : CxMode::uxu;
  return CxMode::none;
}

struct ComplexityReport {
  Algorithm algorithm = Algorithm::cg_ul;
  CxMode mode = CxMode::none;
  Metric metric = Metric::tm;
  std::size_t users = 0;
  std::size_t antennas_per_cluster = 0;
  std::size_t clusters = 0;
  std::size_t iterations = 1;
  std::int64_t preprocessing = 0;
  std::int64_t first_iter = 0;
  std::int64_t per_iter = 0;

  /// preprocessing + first iteration + (T - 1) subsequent iterations
  std::int64_t total(std::size_t t) const {
    if (t < 1) throw ParameterError("ComplexityReport::total: T must be at least 1");
    return preprocessing + first_iter + static_cast<std::int64_t>(t - 1) * per_iter;
  }
  std::int64_t total() const { return total(iterations); }
};

namespace detail {

struct Cells {
  Rational pre, first, per;
};

inline Cells table_cells(Algorithm alg, CxMode mode, Metric metric, Rational u, Rational s, Rational c) {
  const Rational third(1, 3);
  const Rational ten_thirds(10, 3);
  const bool ar = metric == Metric::ar;
  switch (alg) {
    case Algorithm::admm_dl: {
      // n is the side of the inverted matrix, m the other dimension.
      const Rational n = mode == CxMode::sxs ? s : u;
      const Rational m = mode == CxMode::sxs ? u : s;
      const Rational pre = 2 * m * n * n + ten_thirds * n * n * n - third * n;
      const Rational first = 4 * s * u + 4 * n * n;
      if (!ar) return {pre, first, 8 * s * u + 4 * n * n + 6 * u + 1};
      return {c * pre, c * first, c * (8 * s * u + 4 * n * n + 2 * u) + 4 * u + 1};
    }
    case Algorithm::admm_ul: {
      const Rational n = mode == CxMode::sxs ? s : u;
      const Rational m = mode == CxMode::sxs ? u : s;
      const Rational pre = 2 * m * n * n + ten_thirds * n * n * n + 4 * u * s + 4 * n * n - third * n;
      if (mode == CxMode::sxs) {
        if (!ar) return {pre, 2 * u, 8 * s * u + 4 * s * s + 4 * u};
        return {c * pre, 2 * u, c * (8 * s * u + 4 * s * s + 2 * u) + 2 * u};
      }
      if (!ar) return {pre, 2 * u, 4 * u * u + 6 * u};
      return {c * pre, 2 * u, c * (4 * u * u + 4 * u) + 2 * u};
    }
    case Algorithm::cg_ul:
      if (!ar) return {4 * s * u + 2 * u, 8 * s * u + 6 * u, 8 * s * u + 12 * u};
      return {4 * c * s * u + 2 * u, c * (8 * s * u + 4 * u) + 2 * u, c * (8 * s * u + 10 * u) + 2 * u};
    case Algorithm::zf_dl:
      return {6 * c * s * u * u + ten_thirds * u * u * u + 4 * c * s * u - Rational(4, 3) * u, 0, 0};
    case Algorithm::mmse_ul:
      return {6 * c * s * u * u + ten_thirds * u * u * u + 4 * c * s * u - third * u, 0, 0};
  }
  return {};
}

}  // namespace detail

/// Evaluates one row of the complexity table. Centralized algorithms take
/// mode none and report their whole count as preprocessing.
inline ComplexityReport complexity_eval(Algorithm alg, CxMode mode, Metric metric, std::size_t users,
                                        std::size_t antennas_per_cluster, std::size_t clusters,
                                        std::size_t iterations = 1) {
  if (users < 1 || antennas_per_cluster < 1 || clusters < 1) throw ParameterError("complexity_eval: U, S, C must be >= 1");
  if (iterations < 1) throw ParameterError("complexity_eval: T must be >= 1");
  const bool admm = alg == Algorithm::admm_dl || alg == Algorithm::admm_ul;
  if (admm && mode == CxMode::none) throw ParameterError("complexity_eval: ADMM rows need mode SxS or UxU");
  if (!admm && mode != CxMode::none) {
    throw ParameterError("complexity_eval: " + std::string(to_string(alg)) + " has no inverse mode");
  }
  const auto to_r = [](std::size_t v) { return Rational(static_cast<std::int64_t>(v)); };
  const auto cells = detail::table_cells(alg, mode, metric, to_r(users), to_r(antennas_per_cluster), to_r(clusters));
  ComplexityReport r;
  r.algorithm = alg;
  r.mode = mode;
  r.metric = metric;
  r.users = users;
  r.antennas_per_cluster = antennas_per_cluster;
  r.clusters = clusters;
  r.iterations = iterations;
  r.preprocessing = cells.pre.to_integer();
  r.first_iter = cells.first.to_integer();
  r.per_iter = cells.per.to_integer();
  return r;
}

/// Every row of the table (14 in total) for one (U, S, C, T).
inline std::vector<ComplexityReport> complexity_table(std::size_t users, std::size_t antennas_per_cluster,
                                                      std::size_t clusters, std::size_t iterations = 1) {
  std::vector<ComplexityReport> rows;
  for (Algorithm a : {Algorithm::admm_dl, Algorithm::admm_ul}) {
    for (CxMode m : {CxMode::sxs, CxMode::uxu}) {
      for (Metric k : {Metric::tm, Metric::ar}) {
        rows.push_back(complexity_eval(a, m, k, users, antennas_per_cluster, clusters, iterations));
      }
    }
  }
  for (Algorithm a : {Algorithm::cg_ul, Algorithm::zf_dl, Algorithm::mmse_ul}) {
    for (Metric k : {Metric::tm, Metric::ar}) {
      rows.push_back(complexity_eval(a, CxMode::none, k, users, antennas_per_cluster, clusters, iterations));
    }
  }
  return rows;
}

}  // namespace dbp
