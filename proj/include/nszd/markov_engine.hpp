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

// Round-to-round Markov dynamics of the noisy sequential game.
//
// The provider conditions on her own previous action and on her (noisy)
// observation of the collector's previous action: outcomes Cg, Cb, Dg, Db.
// The collector conditions only on his (noisy) observation of the provider's
// current action: g or b. Cooperation is always observed correctly; a
// defecting collector is seen as g with probability e2, and a defecting
// provider is seen as g with probability 1 - e1.

#ifndef NSZD_MARKOV_ENGINE_HPP_
#define NSZD_MARKOV_ENGINE_HPP_

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "nszd/errors.hpp"
#include "nszd/payoff_model.hpp"

namespace nszd {

using Matrix4 = std::array<Vec4, 4>;

enum class Action { kCooperate, kDefect };

// p = (p1, p2, p3, p4): cooperation probabilities after Cg, Cb, Dg, Db.
struct ProviderStrategy {
  Vec4 p{};
};

// q = (q1, q2): cooperation probabilities after observing g, b.
struct CollectorStrategy {
  std::array<double, 2> q{};
};

inline void ValidateStrategy(const ProviderStrategy& s) {
  for (int i = 0; i < 4; ++i) {
    if (!(s.p[i] >= 0 && s.p[i] <= 1)) {
      throw InvalidParameterError("provider strategy entry p" +
                                  std::to_string(i + 1) +
                                  " must lie in [0, 1]");
    }
  }
}

inline void ValidateStrategy(const CollectorStrategy& s) {
  for (int i = 0; i < 2; ++i) {
    if (!(s.q[i] >= 0 && s.q[i] <= 1)) {
      throw InvalidParameterError("collector strategy entry q" +
                                  std::to_string(i + 1) +
                                  " must lie in [0, 1]");
    }
  }
}

// Probability that the provider plays `action` given previous state `prev`.
inline double ProviderTransitionFactor(State prev, const ProviderStrategy& s,
                                       double e2, Action action) {
  auto f = [&](int i) {
    return action == Action::kCooperate ? s.p[i] : 1 - s.p[i];
  };
  switch (prev) {
    case State::kCC:
      return f(0);
    case State::kCD:
      return e2 * f(0) + (1 - e2) * f(1);
    case State::kDC:
      return f(2);
    case State::kDD:
      return e2 * f(2) + (1 - e2) * f(3);
  }
  return 0;
}

// Probability that the collector plays his half of `next`, given the
// provider's half of `next`.
inline double CollectorTransitionFactor(State next, const CollectorStrategy& s,
                                        double e1) {
  const double q1 = s.q[0];
  const double q2 = s.q[1];
  switch (next) {
    case State::kCC:
      return q1;
    case State::kCD:
      return 1 - q1;
    case State::kDC:
      return (1 - e1) * q1 + e1 * q2;
    case State::kDD:
      return (1 - e1) * (1 - q1) + e1 * (1 - q2);
  }
  return 0;
}

// Rows are the previous state, columns the next state.
struct TransitionMatrix {
  Matrix4 m{};

  double operator()(State from, State to) const {
    return m[Index(from)][Index(to)];
  }
};

inline TransitionMatrix BuildTransitionMatrix(const ProviderStrategy& p,
                                              const CollectorStrategy& q,
                                              const GameParams& g) {
  ValidateStrategy(p);
  ValidateStrategy(q);
  TransitionMatrix t;
  for (State v : kAllStates) {
    for (State w : kAllStates) {
      const Action a =
          ProviderCooperates(w) ? Action::kCooperate : Action::kDefect;
      t.m[Index(v)][Index(w)] = ProviderTransitionFactor(v, p, g.e2, a) *
                                CollectorTransitionFactor(w, q, g.e1);
    }
  }
  return t;
}

// Threshold on the second-smallest singular value of M - I below which the
// chain is treated as having several closed classes.
inline constexpr double kReducibilityTolerance = 1e-9;

// Stationary distribution v with v^T M = v^T and sum(v) = 1, from the
// singular system (M^T - I) v = 0 with the normalization row appended.
inline Vec4 StationaryDistribution(const TransitionMatrix& t) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = t.m[i][j];
  }
  const Eigen::Matrix4d shifted = m - Eigen::Matrix4d::Identity();

  // Singular values come back in decreasing order.
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(shifted);
  const Eigen::Vector4d sv = svd.singularValues();
  if (sv(2) <= kReducibilityTolerance) {
    throw NonUniqueStationaryError(
        "transition matrix has more than one closed class (second-smallest "
        "singular value of M - I is " +
        std::to_string(sv(2)) +
        "); move strategy entries away from 0 and 1");
  }

  Eigen::Matrix<double, 5, 4> a;
  a.topRows<4>() = shifted.transpose();
  a.row(4).setOnes();
  Eigen::Matrix<double, 5, 1> b = Eigen::Matrix<double, 5, 1>::Zero();
  b(4) = 1;
  const Eigen::Vector4d x = a.colPivHouseholderQr().solve(b);

  Vec4 v{};
  double total = 0;
  for (int i = 0; i < 4; ++i) {
    // Round-off can leave entries of a transient state at -1e-17.
    v[i] = x(i) < 0 ? 0 : x(i);
    total += v[i];
  }
  for (double& vi : v) vi /= total;
  return v;
}

struct StationaryResult {
  Vec4 v{};
  double s_p = 0;
  double s_c = 0;
};

inline StationaryResult ExpectedPayoffs(const ProviderStrategy& p,
                                        const CollectorStrategy& q,
                                        const GameParams& g) {
  const PayoffVectors u = BuildPayoffs(g);
  StationaryResult r;
  r.v = StationaryDistribution(BuildTransitionMatrix(p, q, g));
  r.s_p = Dot(r.v, u.u_p);
  r.s_c = Dot(r.v, u.u_c);
  return r;
}

// The provider-controlled column after adding column 1 of M - I into
// column 2.
inline Vec4 ProviderColumn(const ProviderStrategy& s, double e2) {
  const auto& p = s.p;
  return {p[0] - 1, e2 * p[0] + (1 - e2) * p[1] - 1, p[2],
          e2 * p[2] + (1 - e2) * p[3]};
}

// The collector-controlled column after adding the provider column, scaled
// by the mixed observation probability, into column 3.
inline Vec4 CollectorColumn(const CollectorStrategy& s, double e1) {
  const double mixed = (1 - e1) * s.q[0] + e1 * s.q[1];
  return {0, 0, mixed - 1, mixed};
}

// First three columns of the transformed M - I. Column 4 is supplied per
// call.
struct ZdColumns {
  Vec4 first{};  // column 1 of M - I, untouched by the transformations
  Vec4 p_hat{};
  Vec4 q_hat{};
};

inline ZdColumns BuildZdColumns(const ProviderStrategy& p,
                                const CollectorStrategy& q,
                                const GameParams& g) {
  const TransitionMatrix t = BuildTransitionMatrix(p, q, g);
  ZdColumns c;
  for (int i = 0; i < 4; ++i) c.first[i] = t.m[i][0] - (i == 0 ? 1 : 0);
  c.p_hat = ProviderColumn(p, g.e2);
  c.q_hat = CollectorColumn(q, g.e1);
  return c;
}

inline double Det3(double a00, double a01, double a02, double a10, double a11,
                   double a12, double a20, double a21, double a22) {
  return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
         a02 * (a10 * a21 - a11 * a20);
}

// det[first | p_hat | q_hat | f], expanded by cofactors along the last
// column. The cofactors are proportional to the stationary vector, so the
// result is proportional to v . f.
inline double ZdDeterminant(const ZdColumns& c, const Vec4& f) {
  double det = 0;
  for (int i = 0; i < 4; ++i) {
    std::array<int, 3> rows{};
    for (int r = 0, k = 0; r < 4; ++r) {
      if (r != i) rows[k++] = r;
    }
    auto at = [&](int r, const Vec4& col) { return col[rows[r]]; };
    const double minor =
        Det3(at(0, c.first), at(0, c.p_hat), at(0, c.q_hat),  //
             at(1, c.first), at(1, c.p_hat), at(1, c.q_hat),  //
             at(2, c.first), at(2, c.p_hat), at(2, c.q_hat));
    const double sign = ((i + 3) % 2 == 0) ? 1.0 : -1.0;
    det += sign * f[i] * minor;
  }
  return det;
}

}  // namespace nszd

#endif  // NSZD_MARKOV_ENGINE_HPP_
