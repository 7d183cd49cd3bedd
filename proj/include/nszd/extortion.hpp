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

// Extortionate strategies: the provider sets her strategy column to
//
//   p_hat = phi [ (U_P - l1) - chi (U_C - l2) ],
//
// which enforces S_P - l1 = chi (S_C - l2) for every collector strategy.

#ifndef NSZD_EXTORTION_HPP_
#define NSZD_EXTORTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nszd/detail/parallel.hpp"
#include "nszd/detail/random.hpp"
#include "nszd/errors.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"

namespace nszd {

inline constexpr double kExtortionFeasibilityTolerance = 1e-9;

enum class PhiSign { kPositive, kNegative };

struct ExtortionParams {
  double l1 = 0;   // provider's baseline payoff
  double l2 = 0;   // collector's baseline payoff
  double chi = 0;  // extortion factor, > 1
  double phi = 0;  // scale factor, nonzero
};

inline void ValidateBaselines(double l1, double l2) {
  if (!(std::isfinite(l1) && l1 > 0) || !(std::isfinite(l2) && l2 > 0)) {
    throw InvalidParameterError("baselines l1 and l2 must be positive");
  }
}

inline void ValidateExtortionParams(const ExtortionParams& x) {
  ValidateBaselines(x.l1, x.l2);
  if (!(std::isfinite(x.chi) && x.chi > 1)) {
    throw InvalidParameterError("extortion factor chi must exceed 1");
  }
  if (!(std::isfinite(x.phi) && x.phi != 0)) {
    throw InvalidParameterError("scale factor phi must be nonzero");
  }
}

inline PhiSign SignOf(double phi) {
  return phi > 0 ? PhiSign::kPositive : PhiSign::kNegative;
}

// Closed interval [lo, hi]; empty when lo > hi. Bounds may be infinite.
struct Interval {
  double lo = 0;
  double hi = 0;

  bool Empty() const { return !(lo <= hi); }
  bool Contains(double x) const { return lo <= x && x <= hi; }
};

// Bounds on chi from the CC and DD rows (phi > 0) or the DC and CD rows
// (phi < 0). Necessary for feasibility but not sufficient; see
// FeasibleChiInterval for the exact set.
struct ChiBounds {
  double lower = 0;
  double upper = 0;
  bool nonempty_above_1 = false;
};

inline ChiBounds ComputeChiBounds(const PayoffVectors& u, double l1, double l2,
                                  PhiSign sign) {
  ValidateBaselines(l1, l2);
  const State lo_state = sign == PhiSign::kPositive ? State::kCC : State::kDC;
  const State hi_state = sign == PhiSign::kPositive ? State::kDD : State::kCD;
  auto ratio = [&](State s) {
    const double den = u.u_c[Index(s)] - l2;
    if (std::abs(den) <= 1e-12) {
      throw BaselineDegenerateError("U_C(" + std::string(StateName(s)) +
                                    ") - l2 vanishes");
    }
    return (u.u_p[Index(s)] - l1) / den;
  };
  ChiBounds b;
  b.lower = ratio(lo_state);
  b.upper = ratio(hi_state);
  b.nonempty_above_1 = b.lower <= b.upper && b.upper > 1;
  return b;
}

inline ChiBounds ComputeChiBounds(const GameParams& g, double l1, double l2,
                                  PhiSign sign) {
  return ComputeChiBounds(BuildPayoffs(g), l1, l2, sign);
}

// Solved strategy entries are affine in phi: p_i = offset_i + phi * slope_i.
struct AffineEntries {
  Vec4 offset{1, 1, 0, 0};
  Vec4 slope{};
};

// Coefficients below this fraction of the payoff scale are rounding noise
// and are treated as exact zeros.
inline constexpr double kSlopeSnap = 1e-12;

namespace detail {

// Each slope is alpha_i - chi * beta_i; alpha collects the provider's payoff
// rows and beta the collector's, both combined the same way.
struct SlopeCoefficients {
  Vec4 alpha{};
  Vec4 beta{};
  double scale = 1;
};

inline SlopeCoefficients ComputeSlopeCoefficients(const PayoffVectors& u,
                                                  double e2, double l1,
                                                  double l2) {
  if (!(e2 < 1)) {
    throw DegenerateError("extortion requires e2 < 1 (p2, p4 divide by 1 - e2)");
  }
  auto combine = [e2](const Vec4& y) -> Vec4 {
    return {y[0], (y[1] - e2 * y[0]) / (1 - e2), y[2],
            (y[3] - e2 * y[2]) / (1 - e2)};
  };
  Vec4 yp{};
  Vec4 yc{};
  SlopeCoefficients c;
  for (int i = 0; i < 4; ++i) {
    yp[i] = u.u_p[i] - l1;
    yc[i] = u.u_c[i] - l2;
    c.scale = std::max({c.scale, std::abs(u.u_p[i]), std::abs(u.u_c[i]),
                        std::abs(l1), std::abs(l2)});
  }
  c.scale /= 1 - e2;
  c.alpha = combine(yp);
  c.beta = combine(yc);
  for (int i = 0; i < 4; ++i) {
    if (std::abs(c.alpha[i]) <= kSlopeSnap * c.scale) c.alpha[i] = 0;
    if (std::abs(c.beta[i]) <= kSlopeSnap * c.scale) c.beta[i] = 0;
  }
  return c;
}

}  // namespace detail

inline AffineEntries ExtortionEntries(const PayoffVectors& u, double e2,
                                      double l1, double l2, double chi) {
  const detail::SlopeCoefficients c =
      detail::ComputeSlopeCoefficients(u, e2, l1, l2);
  AffineEntries a;
  for (int i = 0; i < 4; ++i) {
    a.slope[i] = c.alpha[i] - chi * c.beta[i];
    const double scale = c.scale * std::max(1.0, std::abs(chi));
    if (std::abs(a.slope[i]) <= kSlopeSnap * scale) a.slope[i] = 0;
  }
  return a;
}

// Set of phi of the given sign for which all four entries lie in [0, 1].
// The end at zero is open: phi = 0 always satisfies the box but is excluded.
// Empty when no nonzero phi of that sign works.
inline Interval AdmissiblePhiRange(const GameParams& g, double l1, double l2,
                                   double chi, PhiSign sign) {
  ValidateBaselines(l1, l2);
  const AffineEntries a = ExtortionEntries(BuildPayoffs(g), g.e2, l1, l2, chi);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Interval r = sign == PhiSign::kPositive ? Interval{0, kInf}
                                          : Interval{-kInf, 0};
  for (int i = 0; i < 4; ++i) {
    const double o = a.offset[i];
    const double s = a.slope[i];
    if (s > 0) {
      r.lo = std::max(r.lo, -o / s);
      r.hi = std::min(r.hi, (1 - o) / s);
    } else if (s < 0) {
      r.lo = std::max(r.lo, (1 - o) / s);
      r.hi = std::min(r.hi, -o / s);
    }
  }
  // Both ends collapse onto zero when some entry leaves [0, 1] immediately.
  if (r.lo == r.hi) return {1, 0};
  return r;
}

// Exact set of chi for which some phi of the given sign makes all four
// entries feasible: each entry's slope must point into [0, 1] from its
// offset, and every slope is affine in chi.
inline Interval FeasibleChiInterval(const PayoffVectors& u, double e2,
                                    double l1, double l2, PhiSign sign) {
  ValidateBaselines(l1, l2);
  const detail::SlopeCoefficients c =
      detail::ComputeSlopeCoefficients(u, e2, l1, l2);
  const AffineEntries offsets;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Interval r{-kInf, kInf};
  for (int i = 0; i < 4; ++i) {
    const double alpha = c.alpha[i];
    const double beta = c.beta[i];
    // Offsets of 1 need a non-positive step, offsets of 0 a non-negative one.
    double dir = offsets.offset[i] == 1 ? -1 : 1;
    if (sign == PhiSign::kNegative) dir = -dir;
    // Require dir * (alpha - chi * beta) >= 0.
    const double a = dir * alpha;
    const double b = dir * beta;
    if (b > 0) {
      r.hi = std::min(r.hi, a / b);
    } else if (b < 0) {
      r.lo = std::max(r.lo, a / b);
    } else if (a < 0) {
      return {1, 0};
    }
  }
  return r;
}

inline bool ChiAboveOneExists(const Interval& chi) {
  return !chi.Empty() && chi.hi > 1;
}

struct ExtortionSolution {
  ProviderStrategy p;
  bool feasible = false;
  // Row-ratio bounds for the sign of phi; NaN if a baseline denominator
  // vanishes.
  double chi_lower = 0;
  double chi_upper = 0;
  Interval phi_range;  // admissible phi for this chi and sign of phi
  Interval exact_chi;  // all chi admitting some phi of this sign
};

// Midpoint of the admissible phi range. Unbounded ranges fall back to
// phi = +-1, which lies inside them.
inline double DefaultPhi(const GameParams& g, double l1, double l2, double chi,
                         PhiSign sign) {
  const Interval r = AdmissiblePhiRange(g, l1, l2, chi, sign);
  if (r.Empty()) {
    throw InvalidParameterError("no admissible phi for chi = " +
                                std::to_string(chi));
  }
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    return sign == PhiSign::kPositive ? std::min(1.0, r.hi)
                                      : std::max(-1.0, r.lo);
  }
  return 0.5 * (r.lo + r.hi);
}

// Solves p1..p4 row by row. Entries are reported as solved, never clamped.
inline ExtortionSolution BuildExtortionStrategy(const GameParams& g,
                                                const ExtortionParams& x) {
  ValidateExtortionParams(x);
  const PayoffVectors u = BuildPayoffs(g);
  const AffineEntries a = ExtortionEntries(u, g.e2, x.l1, x.l2, x.chi);
  const PhiSign sign = SignOf(x.phi);

  ExtortionSolution s;
  s.feasible = true;
  for (int i = 0; i < 4; ++i) {
    s.p.p[i] = a.offset[i] + x.phi * a.slope[i];
    if (!(s.p.p[i] >= -kExtortionFeasibilityTolerance &&
          s.p.p[i] <= 1 + kExtortionFeasibilityTolerance)) {
      s.feasible = false;
    }
  }
  try {
    const ChiBounds b = ComputeChiBounds(u, x.l1, x.l2, sign);
    s.chi_lower = b.lower;
    s.chi_upper = b.upper;
  } catch (const BaselineDegenerateError&) {
    s.chi_lower = s.chi_upper = std::numeric_limits<double>::quiet_NaN();
  }
  s.phi_range = AdmissiblePhiRange(g, x.l1, x.l2, x.chi, sign);
  s.exact_chi = FeasibleChiInterval(u, g.e2, x.l1, x.l2, sign);
  return s;
}

struct ExtortionVerification {
  int trials = 0;
  double max_residual = 0;
  int discarded = 0;
};

// Draws `trials` uniform collector strategies and returns the largest
// violation of S_P - l1 = chi (S_C - l2). Draws that make the chain
// reducible are discarded and redrawn.
inline ExtortionVerification VerifyExtortionRelation(
    const ExtortionSolution& sol, const GameParams& g,
    const ExtortionParams& x, int trials, std::mt19937_64& rng) {
  if (!sol.feasible) {
    throw InvalidParameterError("verification requires a feasible strategy");
  }
  ProviderStrategy p = sol.p;
  for (double& pi : p.p) pi = std::clamp(pi, 0.0, 1.0);

  ExtortionVerification r;
  const int max_discards = 100 * std::max(trials, 1);
  while (r.trials < trials) {
    const CollectorStrategy q{
        {detail::UniformUnit(rng), detail::UniformUnit(rng)}};
    try {
      const StationaryResult st = ExpectedPayoffs(p, q, g);
      const double residual =
          std::abs((st.s_p - x.l1) - x.chi * (st.s_c - x.l2));
      r.max_residual = std::max(r.max_residual, residual);
      ++r.trials;
    } catch (const NonUniqueStationaryError&) {
      if (++r.discarded > max_discards) throw;
    }
  }
  return r;
}

enum class ExtortionCellStatus {
  kOk,
  kDegenerateBaseline,  // a row-ratio denominator vanishes
  kInvalidUpperBound,   // upper row-ratio denominator negative
};

inline constexpr std::string_view ExtortionCellStatusName(
    ExtortionCellStatus s) {
  switch (s) {
    case ExtortionCellStatus::kOk:
      return "ok";
    case ExtortionCellStatus::kDegenerateBaseline:
      return "degenerate_baseline";
    case ExtortionCellStatus::kInvalidUpperBound:
      return "invalid_upper_bound";
  }
  return "unknown";
}

struct ExtortionCell {
  double e1 = 0;
  double e2 = 0;
  double chi_lower = std::numeric_limits<double>::quiet_NaN();
  double chi_upper = std::numeric_limits<double>::quiet_NaN();
  // Some (chi > 1, phi) pair with phi of the scanned sign is feasible.
  bool feasible = false;
  Interval exact_chi{1, 0};
  std::optional<bool> probe_feasible;
  ExtortionCellStatus status = ExtortionCellStatus::kOk;
};

struct ExtortionGrid {
  std::vector<double> e1_axis;
  std::vector<double> e2_axis;
  std::vector<ExtortionCell> cells;  // row-major: e1 outer, e2 inner

  std::size_t FeasibleCount() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(),
                      [](const ExtortionCell& c) { return c.feasible; }));
  }
};

// Evenly spaced axis from lo to hi inclusive.
inline std::vector<double> LinearAxis(double lo, double hi, std::size_t n) {
  if (n < 2) throw InvalidParameterError("axis resolution must be at least 2");
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(n - 1);
  }
  return axis;
}

inline ExtortionCell EvaluateExtortionCell(const GameParams& g, double l1,
                                           double l2, PhiSign sign,
                                           std::optional<double> chi_probe) {
  ExtortionCell c;
  c.e1 = g.e1;
  c.e2 = g.e2;
  const PayoffVectors u = BuildPayoffs(g);
  const State hi_state = sign == PhiSign::kPositive ? State::kDD : State::kCD;
  try {
    const ChiBounds b = ComputeChiBounds(u, l1, l2, sign);
    c.chi_lower = b.lower;
    c.chi_upper = b.upper;
    if (u.u_c[Index(hi_state)] - l2 < 0) {
      c.status = ExtortionCellStatus::kInvalidUpperBound;
      c.chi_upper = std::numeric_limits<double>::quiet_NaN();
    }
  } catch (const BaselineDegenerateError&) {
    c.status = ExtortionCellStatus::kDegenerateBaseline;
  }
  c.exact_chi = FeasibleChiInterval(u, g.e2, l1, l2, sign);
  c.feasible = ChiAboveOneExists(c.exact_chi);
  if (chi_probe) {
    c.probe_feasible = *chi_probe > 1 && c.exact_chi.Contains(*chi_probe);
  }
  return c;
}

inline ExtortionGrid ScanExtortionRegion(
    const GameParams& base, double l1, double l2,
    std::span<const double> e1_grid, std::span<const double> e2_grid,
    PhiSign sign = PhiSign::kPositive,
    std::optional<double> chi_probe = std::nullopt, int jobs = 1) {
  ValidateBaselines(l1, l2);
  if (e1_grid.size() < 2 || e2_grid.size() < 2) {
    throw InvalidParameterError("noise grids need at least 2 points");
  }
  auto check = [](std::span<const double> axis, const char* name) {
    for (double e : axis) {
      if (!(e >= 0 && e < 1)) {
        throw InvalidParameterError(std::string(name) +
                                    " grid values must lie in [0, 1)");
      }
    }
  };
  check(e1_grid, "e1");
  check(e2_grid, "e2");

  ExtortionGrid grid;
  grid.e1_axis.assign(e1_grid.begin(), e1_grid.end());
  grid.e2_axis.assign(e2_grid.begin(), e2_grid.end());
  grid.cells.resize(e1_grid.size() * e2_grid.size());
  const std::size_t n2 = e2_grid.size();
  detail::ParallelFor(grid.cells.size(), jobs, [&](std::size_t idx) {
    GameParams g = base;
    g.e1 = grid.e1_axis[idx / n2];
    g.e2 = grid.e2_axis[idx % n2];
    grid.cells[idx] = EvaluateExtortionCell(g, l1, l2, sign, chi_probe);
  });
  return grid;
}

}  // namespace nszd

#endif  // NSZD_EXTORTION_HPP_
