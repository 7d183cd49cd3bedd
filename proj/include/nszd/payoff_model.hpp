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

// Payoffs of the two-player data-trading game.
//
// The provider (she) moves first and either submits authentic data (C) or a
// noise-injected version (D, noise level e1). The collector (he) either keeps
// the data private (C) or resells it (D) while masking his identity with
// noise level e2, so a resale is detected with probability 1 - e2.

#ifndef NSZD_PAYOFF_MODEL_HPP_
#define NSZD_PAYOFF_MODEL_HPP_

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "nszd/errors.hpp"

namespace nszd {

using Vec4 = std::array<double, 4>;

// Joint state, provider's action first. Every 4-vector in the library is
// indexed in this order.
enum class State : int { kCC = 0, kCD = 1, kDC = 2, kDD = 3 };

inline constexpr std::array<State, 4> kAllStates = {State::kCC, State::kCD,
                                                    State::kDC, State::kDD};

inline constexpr int Index(State s) { return static_cast<int>(s); }

inline constexpr std::string_view StateName(State s) {
  constexpr std::array<std::string_view, 4> kNames = {"CC", "CD", "DC", "DD"};
  return kNames[Index(s)];
}

inline constexpr bool ProviderCooperates(State s) {
  return s == State::kCC || s == State::kCD;
}

inline constexpr bool CollectorCooperates(State s) {
  return s == State::kCC || s == State::kDC;
}

inline constexpr State MakeState(bool provider_c, bool collector_c) {
  return static_cast<State>((provider_c ? 0 : 2) + (collector_c ? 0 : 1));
}

inline double Dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

struct GameParams {
  double c_p = 0;   // provider's trading profit
  double c_c = 0;   // collector's trading profit
  double c_p1 = 0;  // provider's privacy-leakage loss
  double c_c1 = 0;  // collector's resale gain
  double c_p2 = 0;  // provider's compensation when a resale is detected
  double c_c2 = 0;  // collector's reputation loss when detected
  double e1 = 0;    // provider's data noise, [0, 1]
  double e2 = 0;    // collector's identity-masking noise, [0, 1]
};

inline void ValidateGameParams(const GameParams& g) {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0)) {
      throw InvalidParameterError(std::string(name) +
                                  " must be strictly positive");
    }
  };
  positive(g.c_p, "c_p");
  positive(g.c_c, "c_c");
  positive(g.c_p1, "c_p1");
  positive(g.c_c1, "c_c1");
  positive(g.c_p2, "c_p2");
  positive(g.c_c2, "c_c2");
  auto unit = [](double v, const char* name) {
    if (!(v >= 0 && v <= 1)) {
      throw InvalidParameterError(std::string(name) + " must lie in [0, 1]");
    }
  };
  unit(g.e1, "e1");
  unit(g.e2, "e2");
}

struct PayoffVectors {
  Vec4 u_p{};
  Vec4 u_c{};
};

// Evaluates the payoff table. All scale factors on the loss/gain terms are 1.
inline PayoffVectors BuildPayoffs(const GameParams& g) {
  ValidateGameParams(g);
  const double value = 1 - g.e1;   // data value retained after noising
  const double detect = 1 - g.e2;  // probability a resale is detected
  PayoffVectors u;
  u.u_p = {g.c_p, g.c_p - g.c_p1 + detect * g.c_p2, value * g.c_p,
           value * g.c_p - value * g.c_p1 + detect * g.c_p2};
  u.u_c = {g.c_c, g.c_c + g.c_c1 - detect * g.c_c2, value * g.c_c,
           value * g.c_c + value * g.c_c1 - detect * g.c_c2};
  return u;
}

enum class ProviderSensitivity {
  kDataValued,        // c_p > c_p1: DD is her worst state
  kPrivacySensitive,  // c_p < c_p1: CD is her worst state
  kBalanced,          // c_p == c_p1
  kUnknown,           // classification needs GameParams
};

inline constexpr std::string_view SensitivityName(ProviderSensitivity s) {
  switch (s) {
    case ProviderSensitivity::kDataValued:
      return "data_valued";
    case ProviderSensitivity::kPrivacySensitive:
      return "privacy_sensitive";
    case ProviderSensitivity::kBalanced:
      return "balanced";
    case ProviderSensitivity::kUnknown:
      break;
  }
  return "unknown";
}

// Truth values of the four strict ordering chains on the payoffs. Ties count
// as violations.
struct OrderingReport {
  bool provider_cc_gt_cd = false;      // U_P(CC) > U_P(CD)
  bool provider_cc_gt_dc_gt_dd = false;  // U_P(CC) > U_P(DC) > U_P(DD)
  bool collector_cd_gt_cc_gt_dc = false;  // U_C(CD) > U_C(CC) > U_C(DC)
  bool collector_cd_gt_dd_gt_dc = false;  // U_C(CD) > U_C(DD) > U_C(DC)
  ProviderSensitivity sensitivity = ProviderSensitivity::kUnknown;

  bool AllHold() const {
    return provider_cc_gt_cd && provider_cc_gt_dc_gt_dd &&
           collector_cd_gt_cc_gt_dc && collector_cd_gt_dd_gt_dc;
  }
};

inline OrderingReport ValidateOrdering(const PayoffVectors& u) {
  const auto& p = u.u_p;
  const auto& c = u.u_c;
  OrderingReport r;
  r.provider_cc_gt_cd = p[0] > p[1];
  r.provider_cc_gt_dc_gt_dd = p[0] > p[2] && p[2] > p[3];
  r.collector_cd_gt_cc_gt_dc = c[1] > c[0] && c[0] > c[2];
  r.collector_cd_gt_dd_gt_dc = c[1] > c[3] && c[3] > c[2];
  return r;
}

inline OrderingReport ValidateOrdering(const GameParams& g) {
  OrderingReport r = ValidateOrdering(BuildPayoffs(g));
  if (g.c_p > g.c_p1) {
    r.sensitivity = ProviderSensitivity::kDataValued;
  } else if (g.c_p < g.c_p1) {
    r.sensitivity = ProviderSensitivity::kPrivacySensitive;
  } else {
    r.sensitivity = ProviderSensitivity::kBalanced;
  }
  return r;
}

}  // namespace nszd

#endif  // NSZD_PAYOFF_MODEL_HPP_
