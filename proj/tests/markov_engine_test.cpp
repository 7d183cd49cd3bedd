// Copyright 2026 The NSZD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nszd/markov_engine.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace nszd {
namespace {

using testing::SmallStakes;
using testing::Uniform;

ProviderStrategy RandomP(std::mt19937_64& rng, double lo = 0, double hi = 1) {
  return {{Uniform(rng, lo, hi), Uniform(rng, lo, hi), Uniform(rng, lo, hi),
           Uniform(rng, lo, hi)}};
}

CollectorStrategy RandomQ(std::mt19937_64& rng, double lo = 0, double hi = 1) {
  return {{Uniform(rng, lo, hi), Uniform(rng, lo, hi)}};
}

TEST(TransitionFactorTest, ProviderDefectsAfterDD) {
  const ProviderStrategy p{{0.2, 0.4, 0.6, 0.7}};
  EXPECT_DOUBLE_EQ(
      ProviderTransitionFactor(State::kDD, p, 0.25, Action::kDefect),
      0.25 * (1 - 0.6) + 0.75 * (1 - 0.7));
  EXPECT_EQ(ProviderTransitionFactor(State::kCC, p, 0.9, Action::kCooperate),
            0.2);
  EXPECT_EQ(ProviderTransitionFactor(State::kCD, p, 0, Action::kCooperate),
            0.4);
}

TEST(TransitionFactorTest, CollectorDefectsAfterProviderDefects) {
  const CollectorStrategy q{{0.3, 0.8}};
  EXPECT_DOUBLE_EQ(CollectorTransitionFactor(State::kDD, q, 0.4),
                   0.6 * 0.7 + 0.4 * 0.2);
  EXPECT_EQ(CollectorTransitionFactor(State::kCC, q, 0.4), 0.3);
  EXPECT_EQ(CollectorTransitionFactor(State::kDC, q, 0), 0.3);
}

TEST(BuildTransitionMatrixTest, AllCooperateAbsorbsIntoCC) {
  const TransitionMatrix t = BuildTransitionMatrix(
      {{1, 1, 1, 1}}, {{1, 1}}, SmallStakes(0.3, 0.5));
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(t.m[i], (Vec4{1, 0, 0, 0}));
  }
}

TEST(BuildTransitionMatrixTest, AllDefectWithoutNoiseAbsorbsIntoDD) {
  const TransitionMatrix t = BuildTransitionMatrix(
      {{0, 0, 0, 0}}, {{0, 0}}, SmallStakes(0, 0));
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(t.m[i], (Vec4{0, 0, 0, 1}));
  }
}

TEST(BuildTransitionMatrixTest, MixedExampleMatchesEnumeration) {
  const ProviderStrategy p{{0.9, 0.78235, 0.07647, 0.1}};
  const CollectorStrategy q{{0.3, 0.7}};
  const GameParams g = SmallStakes(0.3, 0.5);
  const TransitionMatrix t = BuildTransitionMatrix(p, q, g);
  EXPECT_NEAR(t(State::kCC, State::kCC), 0.27, 1e-15);
  const Matrix4 ref = testing::EnumeratedTransitions(p.p, 0.3, 0.7, 0.3, 0.5);
  for (int i = 0; i < 4; ++i) {
    double row = 0;
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(t.m[i][j], ref[i][j], 1e-15);
      row += t.m[i][j];
    }
    EXPECT_NEAR(row, 1, 1e-12);
  }
}

TEST(BuildTransitionMatrixTest, RowStochasticOnRandomInputs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100000; ++trial) {
    GameParams g = SmallStakes(Uniform(rng), Uniform(rng));
    const TransitionMatrix t = BuildTransitionMatrix(RandomP(rng), RandomQ(rng), g);
    for (const Vec4& row : t.m) {
      double sum = 0;
      for (double x : row) {
        ASSERT_GE(x, 0);
        ASSERT_LE(x, 1);
        sum += x;
      }
      ASSERT_NEAR(sum, 1, 1e-12);
    }
  }
}

TEST(BuildTransitionMatrixTest, ReducesToNoiselessGame) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProviderStrategy p = RandomP(rng);
    const CollectorStrategy q = RandomQ(rng);
    const TransitionMatrix t = BuildTransitionMatrix(p, q, SmallStakes(0, 0));
    const Matrix4 ref = testing::NoiselessTransitions(p.p, q.q[0], q.q[1]);
    // With e1 = 0 a defecting provider is always seen as g, so the noiseless
    // reference with q2 replaced by q1 applies.
    const Matrix4 ref_g = testing::NoiselessTransitions(p.p, q.q[0], q.q[0]);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        ASSERT_NEAR(t.m[i][j], ref_g[i][j], 1e-15);
        if (j < 2) {
          ASSERT_NEAR(t.m[i][j], ref[i][j], 1e-15);
        }
      }
    }
  }
}

TEST(BuildTransitionMatrixTest, SwappingCollectorEntriesMirrorsProviderNoise) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProviderStrategy p = RandomP(rng);
    const CollectorStrategy q = RandomQ(rng);
    const double e2 = Uniform(rng);
    const TransitionMatrix a =
        BuildTransitionMatrix(p, q, SmallStakes(0, e2));
    const TransitionMatrix b =
        BuildTransitionMatrix(p, {{q.q[1], q.q[0]}}, SmallStakes(1, e2));
    for (int i = 0; i < 4; ++i) {
      for (int j = 2; j < 4; ++j) ASSERT_NEAR(a.m[i][j], b.m[i][j], 1e-15);
    }
  }
}

TEST(BuildTransitionMatrixTest, RejectsOutOfRangeStrategies) {
  EXPECT_THROW(BuildTransitionMatrix({{1.1, 0, 0, 0}}, {{0, 0}},
                                     SmallStakes(0.3, 0.5)),
               InvalidParameterError);
  EXPECT_THROW(BuildTransitionMatrix({{0, 0, 0, 0}}, {{0, -0.1}},
                                     SmallStakes(0.3, 0.5)),
               InvalidParameterError);
}

TEST(StationaryDistributionTest, AbsorbingCooperation) {
  const Vec4 v = StationaryDistribution(BuildTransitionMatrix(
      {{1, 1, 1, 1}}, {{1, 1}}, SmallStakes(0.3, 0.5)));
  EXPECT_NEAR(v[0], 1, 1e-14);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(v[i], 0, 1e-14);
}

TEST(StationaryDistributionTest, DoublyStochasticIsUniform) {
  TransitionMatrix t;
  for (auto& row : t.m) row = {0.25, 0.25, 0.25, 0.25};
  const Vec4 v = StationaryDistribution(t);
  for (double x : v) EXPECT_NEAR(x, 0.25, 1e-14);
}

TEST(StationaryDistributionTest, MatchesPowerIteration) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const ProviderStrategy p = RandomP(rng, 0.05, 0.95);
    const CollectorStrategy q = RandomQ(rng, 0.05, 0.95);
    const GameParams g = SmallStakes(Uniform(rng), Uniform(rng, 0, 0.99));
    const TransitionMatrix t = BuildTransitionMatrix(p, q, g);
    const Vec4 v = StationaryDistribution(t);
    const Vec4 ref = testing::PowerIterate(t.m);
    double sum = 0;
    for (int j = 0; j < 4; ++j) {
      EXPECT_GE(v[j], 0);
      EXPECT_NEAR(v[j], ref[j], 1e-10);
      double vm = 0;
      for (int i = 0; i < 4; ++i) vm += v[i] * t.m[i][j];
      EXPECT_NEAR(vm, v[j], 1e-10);
      sum += v[j];
    }
    EXPECT_NEAR(sum, 1, 1e-10);
  }
}

TEST(StationaryDistributionTest, MixedExampleResidual) {
  const TransitionMatrix t = BuildTransitionMatrix(
      {{0.9, 0.78235, 0.07647, 0.1}}, {{0.3, 0.7}}, SmallStakes(0.3, 0.5));
  const Vec4 v = StationaryDistribution(t);
  const Vec4 ref = testing::PowerIterate(t.m);
  for (int j = 0; j < 4; ++j) {
    double vm = 0;
    for (int i = 0; i < 4; ++i) vm += v[i] * t.m[i][j];
    EXPECT_LT(std::abs(vm - v[j]), 1e-10);
    EXPECT_NEAR(v[j], ref[j], 1e-10);
  }
}

TEST(StationaryDistributionTest, ReducibleChainIsRejected) {
  // Both players repeat their own last move: CC and DD are both absorbing.
  TransitionMatrix t;
  t.m = {Vec4{1, 0, 0, 0}, Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0},
         Vec4{0, 0, 0, 1}};
  EXPECT_THROW(StationaryDistribution(t), NonUniqueStationaryError);
  // Provider repeats her move, collector always cooperates, no noise:
  // CC and DC are separate closed classes.
  EXPECT_THROW(
      ExpectedPayoffs({{1, 1, 0, 0}}, {{1, 1}}, SmallStakes(0, 0)),
      NonUniqueStationaryError);
}

TEST(ExpectedPayoffsTest, AllCooperateEarnsTradingProfits) {
  const StationaryResult r =
      ExpectedPayoffs({{1, 1, 1, 1}}, {{1, 1}}, SmallStakes(0.3, 0.5));
  EXPECT_NEAR(r.s_p, 5, 1e-12);
  EXPECT_NEAR(r.s_c, 5, 1e-12);
}

TEST(ExpectedPayoffsTest, RoundedPinningStrategyNearPinnedValue) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const StationaryResult r = ExpectedPayoffs(
        {{0.9, 0.78235, 0.07647, 0.1}}, RandomQ(rng), SmallStakes(0.3, 0.5));
    EXPECT_NEAR(r.s_c, 4.15, 1e-4);
  }
}

TEST(ExpectedPayoffsTest, PayoffsAreConvexCombinations) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 1000; ++trial) {
    const GameParams g = SmallStakes(Uniform(rng), Uniform(rng, 0, 0.99));
    const PayoffVectors u = BuildPayoffs(g);
    const StationaryResult r =
        ExpectedPayoffs(RandomP(rng, 0.01, 0.99), RandomQ(rng, 0.01, 0.99), g);
    const auto [pmin, pmax] = std::minmax_element(u.u_p.begin(), u.u_p.end());
    const auto [cmin, cmax] = std::minmax_element(u.u_c.begin(), u.u_c.end());
    EXPECT_GE(r.s_p, *pmin - 1e-12);
    EXPECT_LE(r.s_p, *pmax + 1e-12);
    EXPECT_GE(r.s_c, *cmin - 1e-12);
    EXPECT_LE(r.s_c, *cmax + 1e-12);
  }
}

TEST(ZdColumnsTest, ClosedFormsDependOnOneSideOnly) {
  const ProviderStrategy p{{0.9, 0.6, 0.2, 0.4}};
  const Vec4 ph = ProviderColumn(p, 0.5);
  EXPECT_NEAR(ph[0], -0.1, 1e-15);
  EXPECT_NEAR(ph[1], 0.5 * 0.9 + 0.5 * 0.6 - 1, 1e-15);
  EXPECT_NEAR(ph[2], 0.2, 1e-15);
  EXPECT_NEAR(ph[3], 0.3, 1e-15);
  const Vec4 qh = CollectorColumn({{0.3, 0.7}}, 0.3);
  EXPECT_EQ(qh[0], 0);
  EXPECT_EQ(qh[1], 0);
  EXPECT_NEAR(qh[2], 0.42 - 1, 1e-15);
  EXPECT_NEAR(qh[3], 0.42, 1e-15);
}

// The column operations that produce p_hat and q_hat leave the determinant
// with any last column unchanged; check against the raw M - I columns.
TEST(ZdDeterminantTest, MatchesUntransformedMatrix) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 200; ++trial) {
    const ProviderStrategy p = RandomP(rng);
    const CollectorStrategy q = RandomQ(rng);
    const GameParams g = SmallStakes(Uniform(rng), Uniform(rng));
    const TransitionMatrix t = BuildTransitionMatrix(p, q, g);
    const Vec4 f{Uniform(rng, -3, 3), Uniform(rng, -3, 3), Uniform(rng, -3, 3),
                 Uniform(rng, -3, 3)};
    Eigen::Matrix4d raw;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) raw(i, j) = t.m[i][j] - (i == j ? 1 : 0);
      raw(i, 3) = f[i];
    }
    EXPECT_NEAR(ZdDeterminant(BuildZdColumns(p, q, g), f), raw.determinant(),
                1e-12);
  }
}

TEST(ZdDeterminantTest, RatioMatchesStationarySolve) {
  std::mt19937_64 rng(28);
  int checked = 0;
  while (checked < 1000) {
    const ProviderStrategy p = RandomP(rng);
    const CollectorStrategy q = RandomQ(rng);
    const GameParams g = SmallStakes(Uniform(rng), Uniform(rng, 0, 0.99));
    const ZdColumns cols = BuildZdColumns(p, q, g);
    const double norm = ZdDeterminant(cols, {1, 1, 1, 1});
    if (std::abs(norm) <= 1e-8) continue;
    const PayoffVectors u = BuildPayoffs(g);
    const StationaryResult r = ExpectedPayoffs(p, q, g);
    EXPECT_NEAR(ZdDeterminant(cols, u.u_c) / norm, r.s_c, 1e-9);
    EXPECT_NEAR(ZdDeterminant(cols, u.u_p) / norm, r.s_p, 1e-9);
    ++checked;
  }
}

TEST(ZdDeterminantTest, NormalizationColumnNonzeroWhenIrreducible) {
  const ZdColumns cols = BuildZdColumns({{0.9, 0.5, 0.2, 0.3}}, {{0.4, 0.6}},
                                        SmallStakes(0.3, 0.5));
  EXPECT_GT(std::abs(ZdDeterminant(cols, {1, 1, 1, 1})), 1e-6);
}

TEST(ZdDeterminantTest, AffineProviderColumnZeroesDeterminant) {
  std::mt19937_64 rng(29);
  const GameParams g = SmallStakes(0.3, 0.5);
  const PayoffVectors u = BuildPayoffs(g);
  // Any p whose p_hat equals beta U_C + gamma 1 for some beta, gamma.
  const double beta = -0.1;
  const double gamma = 0.4;
  Vec4 target{};
  for (int i = 0; i < 4; ++i) target[i] = beta * u.u_c[i] + gamma;
  ProviderStrategy p;
  p.p[0] = target[0] + 1;
  p.p[1] = (target[1] + 1 - g.e2 * p.p[0]) / (1 - g.e2);
  p.p[2] = target[2];
  p.p[3] = (target[3] - g.e2 * p.p[2]) / (1 - g.e2);
  for (int trial = 0; trial < 100; ++trial) {
    const ZdColumns cols = BuildZdColumns(p, RandomQ(rng), g);
    for (int i = 0; i < 4; ++i) ASSERT_NEAR(cols.p_hat[i], target[i], 1e-15);
    EXPECT_NEAR(ZdDeterminant(cols, target), 0, 1e-14);
  }
}

}  // namespace
}  // namespace nszd
