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

// Certificates that the collector cannot play a pinning or extortionate
// strategy.
//
// The collector's column in the determinant has zeros in its CC and CD rows
// whatever (q1, q2) he picks. Matching it to alpha U_P + beta U_C + gamma
// therefore forces the CC and CD rows of the target to vanish together,
// which the provider's payoff ordering rules out.

#ifndef NSZD_COLLECTOR_NSZD_HPP_
#define NSZD_COLLECTOR_NSZD_HPP_

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "nszd/errors.hpp"
#include "nszd/payoff_model.hpp"

namespace nszd {

enum class CertificateKind { kPinning, kExtortion };

inline constexpr std::string_view CertificateKindName(CertificateKind k) {
  return k == CertificateKind::kPinning ? "pinning" : "extortion";
}

struct InfeasibilityCertificate {
  CertificateKind kind = CertificateKind::kPinning;
  std::array<State, 2> conflicting_states{State::kCC, State::kCD};
  double lhs = 0;
  double rhs = 0;
  double gap = 0;
  bool holds = false;  // true: the collector strategy is impossible
  // Orderings the impossibility argument relies on.
  bool provider_cc_gt_cd = false;
  bool collector_cd_gt_cc_gt_dc = false;
  std::string note;
};

namespace detail {

inline void TagOrdering(InfeasibilityCertificate& c, const PayoffVectors& u) {
  const OrderingReport r = ValidateOrdering(u);
  c.provider_cc_gt_cd = r.provider_cc_gt_cd;
  c.collector_cd_gt_cc_gt_dc = r.collector_cd_gt_cc_gt_dc;
  if (!r.provider_cc_gt_cd) c.note += "U_P(CC) > U_P(CD) violated; ";
  if (c.kind == CertificateKind::kExtortion && !r.collector_cd_gt_cc_gt_dc) {
    c.note += "U_C(CD) > U_C(CC) > U_C(DC) violated; ";
  }
  if (!c.note.empty()) c.note.resize(c.note.size() - 2);
}

}  // namespace detail

// Pinning needs alpha U_P(CC) + gamma = alpha U_P(CD) + gamma = 0 with
// alpha != 0, i.e. U_P(CC) = U_P(CD).
inline InfeasibilityCertificate CheckCollectorPinning(const GameParams& g) {
  const PayoffVectors u = BuildPayoffs(g);
  InfeasibilityCertificate c;
  c.kind = CertificateKind::kPinning;
  c.lhs = u.u_p[Index(State::kCC)];
  c.rhs = u.u_p[Index(State::kCD)];
  c.gap = c.lhs - c.rhs;
  c.holds = c.lhs != c.rhs;
  detail::TagOrdering(c, u);
  return c;
}

// Extortion needs the CC and CD rows of phi[(U_P - l1) - chi (U_C - l2)] + 1
// to vanish together, i.e. equal payoff ratios in those two states.
inline InfeasibilityCertificate CheckCollectorExtortion(const GameParams& g,
                                                        double l1, double l2) {
  if (!(std::isfinite(l1) && l1 > 0) || !(std::isfinite(l2) && l2 > 0)) {
    throw InvalidParameterError("baselines l1 and l2 must be positive");
  }
  const PayoffVectors u = BuildPayoffs(g);
  auto ratio = [&](State s) {
    const double den = u.u_c[Index(s)] - l2;
    if (std::abs(den) <= 1e-12) {
      throw BaselineDegenerateError("U_C(" + std::string(StateName(s)) +
                                    ") - l2 vanishes");
    }
    return (u.u_p[Index(s)] - l1) / den;
  };
  InfeasibilityCertificate c;
  c.kind = CertificateKind::kExtortion;
  c.lhs = ratio(State::kCC);
  c.rhs = ratio(State::kCD);
  c.gap = c.lhs - c.rhs;
  c.holds = c.lhs != c.rhs;
  detail::TagOrdering(c, u);
  return c;
}

}  // namespace nszd

#endif  // NSZD_COLLECTOR_NSZD_HPP_
