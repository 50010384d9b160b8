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

#include "dbp/complexity.hpp"

namespace dbp {
namespace {

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1, -3), Rational(-1, 3));
  EXPECT_EQ(Rational(1, 3) + Rational(2, 3), Rational(1));
  EXPECT_EQ(Rational(10, 3) * 3, Rational(10));
  EXPECT_EQ((Rational(1, 2) - Rational(1, 3)).den(), 6);
  EXPECT_EQ(Rational(7).to_integer(), 7);
  EXPECT_THROW(Rational(1, 3).to_integer(), Error);
  EXPECT_THROW(Rational(1, 0), ParameterError);
}

TEST(Complexity, WorkedValues) {
  EXPECT_EQ(complexity_eval(Algorithm::admm_dl, CxMode::sxs, Metric::tm, 16, 8, 8).preprocessing, 3752);
  EXPECT_EQ(complexity_eval(Algorithm::cg_ul, CxMode::none, Metric::tm, 16, 8, 8).preprocessing, 544);
  EXPECT_EQ(complexity_eval(Algorithm::mmse_ul, CxMode::none, Metric::tm, 16, 8, 8).preprocessing, 116048);
}

TEST(Complexity, AdmmUplinkThreeIterations) {
  // U=16, S=32, C=8, summed by hand from the table cells
  const auto uxu = complexity_eval(Algorithm::admm_ul, CxMode::uxu, Metric::tm, 16, 32, 8, 3);
  EXPECT_EQ(uxu.preprocessing, 33104);
  EXPECT_EQ(uxu.first_iter, 32);
  EXPECT_EQ(uxu.per_iter, 1120);
  EXPECT_EQ(uxu.total(), 35376);
  const auto sxs = complexity_eval(Algorithm::admm_ul, CxMode::sxs, Metric::tm, 16, 32, 8, 3);
  EXPECT_EQ(sxs.preprocessing, 148128);
  EXPECT_EQ(sxs.per_iter, 8256);
  EXPECT_EQ(sxs.total(), 164672);
}

TEST(Complexity, TotalDefinition) {
  const auto r = complexity_eval(Algorithm::cg_ul, CxMode::none, Metric::ar, 16, 8, 4, 5);
  EXPECT_EQ(r.total(), r.preprocessing + r.first_iter + 4 * r.per_iter);
  EXPECT_EQ(r.total(1), r.preprocessing + r.first_iter);
  EXPECT_THROW(r.total(0), ParameterError);
}

TEST(Complexity, InvalidPairings) {
  EXPECT_THROW(complexity_eval(Algorithm::admm_ul, CxMode::none, Metric::tm, 16, 8, 8), ParameterError);
  EXPECT_THROW(complexity_eval(Algorithm::cg_ul, CxMode::sxs, Metric::tm, 16, 8, 8), ParameterError);
  EXPECT_THROW(complexity_eval(Algorithm::mmse_ul, CxMode::uxu, Metric::tm, 16, 8, 8), ParameterError);
  EXPECT_THROW(complexity_eval(Algorithm::cg_ul, CxMode::none, Metric::tm, 0, 8, 8), ParameterError);
  EXPECT_THROW(complexity_eval(Algorithm::cg_ul, CxMode::none, Metric::tm, 16, 8, 8, 0), ParameterError);
}

TEST(Complexity, TableShape) {
  const auto rows = complexity_table(16, 8, 8, 3);
  ASSERT_EQ(rows.size(), 14u);
  for (const auto& r : rows) {
    EXPECT_GE(r.preprocessing, 0);
    EXPECT_GE(r.first_iter, 0);
    EXPECT_GE(r.per_iter, 0);
    EXPECT_EQ(r.iterations, 3u);
    EXPECT_EQ(is_centralized(r.algorithm), r.mode == CxMode::none && r.algorithm != Algorithm::cg_ul);
  }
}

TEST(Complexity, ArrayAtLeastTiming) {
  for (std::size_t u : {1u, 4u, 16u})
    for (std::size_t s : {1u, 8u, 32u})
      for (std::size_t c : {1u, 2u, 8u, 32u})
        for (Algorithm a : {Algorithm::admm_dl, Algorithm::admm_ul, Algorithm::cg_ul}) {
          const std::vector<CxMode> modes =
              a == Algorithm::cg_ul ? std::vector<CxMode>{CxMode::none} : std::vector<CxMode>{CxMode::sxs, CxMode::uxu};
          for (CxMode m : modes) {
            const auto tm = complexity_eval(a, m, Metric::tm, u, s, c, 4);
            const auto ar = complexity_eval(a, m, Metric::ar, u, s, c, 4);
            EXPECT_GE(ar.preprocessing, tm.preprocessing);
            EXPECT_GE(ar.first_iter, tm.first_iter);
            EXPECT_GE(ar.per_iter, tm.per_iter);
            EXPECT_GE(ar.total(), tm.total());
          }
        }
}

TEST(Complexity, DecentralizedTimingIndependentOfC) {
  for (std::size_t u : {2u, 16u})
    for (std::size_t s : {4u, 16u, 64u})
      for (Algorithm a : {Algorithm::admm_dl, Algorithm::admm_ul, Algorithm::cg_ul}) {
        const std::vector<CxMode> modes =
            a == Algorithm::cg_ul ? std::vector<CxMode>{CxMode::none} : std::vector<CxMode>{CxMode::sxs, CxMode::uxu};
        for (CxMode m : modes) {
          const auto ref = complexity_eval(a, m, Metric::tm, u, s, 1, 5);
          for (std::size_t c : {2u, 7u, 64u}) {
            const auto r = complexity_eval(a, m, Metric::tm, u, s, c, 5);
            EXPECT_EQ(r.preprocessing, ref.preprocessing);
            EXPECT_EQ(r.first_iter, ref.first_iter);
            EXPECT_EQ(r.per_iter, ref.per_iter);
          }
        }
      }
}

TEST(Complexity, CentralizedLinearInAntennas) {
  for (Algorithm a : {Algorithm::mmse_ul, Algorithm::zf_dl}) {
    for (std::size_t u : {2u, 16u}) {
      auto f = [&](std::size_t c, std::size_t s) {
        return complexity_eval(a, CxMode::none, Metric::tm, u, s, c).preprocessing;
      };
      // only B = C S matters, and equal steps in B give equal increments
      EXPECT_EQ(f(2, 8), f(4, 4));
      EXPECT_EQ(f(1, 16), f(16, 1));
      const std::int64_t step = f(1, 32) - f(1, 16);
      EXPECT_EQ(f(1, 48) - f(1, 32), step);
      EXPECT_EQ(f(4, 16) - f(3, 16), step);
      EXPECT_EQ(complexity_eval(a, CxMode::none, Metric::ar, u, 8, 4).preprocessing, f(4, 8));
    }
  }
}

TEST(Complexity, TotalsGrowWithIterations) {
  for (const auto& r1 : complexity_table(16, 8, 8, 1)) {
    if (is_centralized(r1.algorithm)) continue;
    EXPECT_GT(r1.per_iter, 0);
    EXPECT_LT(r1.total(1), r1.total(2));
    EXPECT_LT(r1.total(2), r1.total(3));
  }
}

TEST(Complexity, Names) {
  EXPECT_EQ(to_string(Algorithm::admm_dl), "ADMM-DL");
  EXPECT_EQ(to_string(CxMode::uxu), "UxU");
  EXPECT_EQ(to_string(Metric::ar), "AR");
  EXPECT_EQ(natural_mode(Algorithm::admm_ul, 8, 16), CxMode::sxs);
  EXPECT_EQ(natural_mode(Algorithm::admm_ul, 32, 16), CxMode::uxu);
  EXPECT_EQ(natural_mode(Algorithm::cg_ul, 32, 16), CxMode::none);
}

}  // namespace
}  // namespace dbp
