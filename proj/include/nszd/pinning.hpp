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

// Pinning strategies: the provider picks p1 and p4 freely, solves p2 and p3
// so that her strategy column is an affine function of the collector's
// payoff vector, and thereby fixes the collector's long-run payoff at
//
//   S_C = (A (1 - p1) + B p4) / (1 - p1 + p4)
//
// whatever the collector does.

#ifndef NSZD_PINNING_HPP_
#define NSZD_PINNING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "nszd/detail/parallel.hpp"
#include "nszd/errors.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"

namespace nszd {

inline constexpr double kPinningFeasibilityTolerance = 1e-9;
inline constexpr double kDegenerateDenominator = 1e-12;

struct PinningConstants {
  double a = 0;   // S_C when p4 = 0
  double b = 0;   // S_C when p1 = 1, equal to U_C(CC)
  double d1 = 0;  // common denominator of p2 and p3
};

inline PinningConstants ComputePinningConstants(const PayoffVectors& u,
                                                double e2) {
  if (!(e2 < 1)) {
    throw DegenerateError("pinning requires e2 < 1 (A divides by 1 - e2)");
  }
  const auto& c = u.u_c;
  PinningConstants k;
  k.a = (c[3] - e2 * c[2]) / (1 - e2);
  k.b = c[0];
  k.d1 = c[0] - c[3] - e2 * (c[0] - c[2]);
  return k;
}

enum class PinningStatus {
  kFeasible,
  kOutOfRange,       // p2 or p3 outside [0, 1]
  kDegenerateCorner,  // p1 = 1 and p4 = 0: the pinned value is 0/0
  kDegenerateDenominator,  // |D1| too small or e2 = 1 (scan cells only)
};

inline constexpr std::string_view PinningStatusName(PinningStatus s) {
  switch (s) {
    case PinningStatus::kFeasible:
      return "feasible";
    case PinningStatus::kOutOfRange:
      return "out_of_range";
    case PinningStatus::kDegenerateCorner:
      return "degenerate_corner";
    case PinningStatus::kDegenerateDenominator:
      return "degenerate_denominator";
  }
  return "unknown";
}

struct PinningSolution {
  double p1 = 0;
  double p2 = 0;
  double p3 = 0;
  double p4 = 0;
  double pinned_s_c = 0;
  double a_const = 0;
  double b_const = 0;
  double d1_const = 0;
  bool feasible = false;
  PinningStatus status = PinningStatus::kOutOfRange;

  ProviderStrategy Strategy() const { return {{p1, p2, p3, p4}}; }
};

inline double PinnedValue(double a, double b, double p1, double p4) {
  return (a * (1 - p1) + b * p4) / (1 - p1 + p4);
}

namespace detail {

inline bool WithinUnit(double x) {
  return x >= -kPinningFeasibilityTolerance &&
         x <= 1 + kPinningFeasibilityTolerance;
}

inline void CheckFreeEntry(double v, const char* name) {
  if (!(v >= 0 && v <= 1)) {
    throw InvalidParameterError(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace detail

// Solves p2 and p3 for the given free entries. An out-of-range solution is
// returned with feasible = false rather than thrown; entries within the
// feasibility tolerance of [0, 1] are clamped.
inline PinningSolution SolvePinning(double p1, double p4, const GameParams& g) {
  detail::CheckFreeEntry(p1, "p1");
  detail::CheckFreeEntry(p4, "p4");
  const PayoffVectors u = BuildPayoffs(g);
  const PinningConstants k = ComputePinningConstants(u, g.e2);
  if (std::abs(k.d1) <= kDegenerateDenominator) {
    throw DegenerateError("pinning denominator D1 vanishes for these payoffs");
  }
  const auto& c = u.u_c;
  const double e2 = g.e2;

  PinningSolution s;
  s.p1 = p1;
  s.p4 = p4;
  s.a_const = k.a;
  s.b_const = k.b;
  s.d1_const = k.d1;
  s.p2 = ((c[1] - c[3] + e2 * (c[2] - c[0])) * p1 + (c[0] - c[1]) * (1 + p4)) /
         k.d1;
  s.p3 = ((c[3] - c[2]) * (1 - p1) + (c[0] - c[2]) * (1 - e2) * p4) / k.d1;

  if (p1 == 1 && p4 == 0) {
    s.pinned_s_c = std::numeric_limits<double>::quiet_NaN();
    s.status = PinningStatus::kDegenerateCorner;
    s.feasible = false;
    return s;
  }
  s.pinned_s_c = PinnedValue(k.a, k.b, p1, p4);
  s.feasible = detail::WithinUnit(s.p2) && detail::WithinUnit(s.p3);
  if (s.feasible) {
    s.p2 = std::clamp(s.p2, 0.0, 1.0);
    s.p3 = std::clamp(s.p3, 0.0, 1.0);
    s.status = PinningStatus::kFeasible;
  } else {
    s.status = PinningStatus::kOutOfRange;
  }
  return s;
}

struct StrategySensitivity {
  double ds_dp1 = 0;
  double ds_dp4 = 0;
};

// Partial derivatives of the pinned payoff in the free entries.
inline StrategySensitivity PinningSensitivityStrategy(
    const PinningSolution& sol) {
  if (!sol.feasible) {
    throw InvalidParameterError("sensitivity requires a feasible solution");
  }
  const double denom = 1 - sol.p1 + sol.p4;
  if (denom == 0) {
    throw DegenerateError("sensitivity undefined at p1 = 1, p4 = 0");
  }
  const double spread = sol.b_const - sol.a_const;
  return {spread * sol.p4 / (denom * denom),
          spread * (1 - sol.p1) / (denom * denom)};
}

struct NoiseSensitivity {
  double ds_de1 = 0;
  double ds_de2 = 0;
};

// Partial derivatives of the pinned payoff in the two noise levels, holding
// p1 and p4 fixed (p2 and p3 re-solve implicitly).
inline NoiseSensitivity PinningSensitivityNoise(double p1, double p4,
                                                const GameParams& g) {
  detail::CheckFreeEntry(p1, "p1");
  detail::CheckFreeEntry(p4, "p4");
  ValidateGameParams(g);
  if (!(g.e2 < 1)) throw DegenerateError("noise sensitivity requires e2 < 1");
  const double denom = 1 - p1 + p4;
  if (denom == 0) {
    throw DegenerateError("sensitivity undefined at p1 = 1, p4 = 0");
  }
  const double weight = (1 - p1) / denom;
  const double detect = 1 - g.e2;
  return {-weight * (detect * g.c_c + g.c_c1) / detect,
          weight * (1 - g.e1) * g.c_c1 / (detect * detect)};
}

struct PinningCell {
  double p1 = 0;
  double p4 = 0;
  bool feasible = false;
  double p2 = std::numeric_limits<double>::quiet_NaN();
  double p3 = std::numeric_limits<double>::quiet_NaN();
  double s_c = std::numeric_limits<double>::quiet_NaN();
  PinningStatus status = PinningStatus::kOutOfRange;
};

struct PinningGrid {
  std::vector<double> p1_axis;
  std::vector<double> p4_axis;
  std::vector<PinningCell> cells;  // row-major: p1 outer, p4 inner

  std::size_t Resolution() const { return p1_axis.size(); }

  const PinningCell& At(std::size_t i1, std::size_t i4) const {
    return cells[i1 * p4_axis.size() + i4];
  }

  std::size_t FeasibleCount() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(),
                      [](const PinningCell& c) { return c.feasible; }));
  }

  // {min, max} of the pinned payoff over feasible cells; NaNs when empty.
  std::pair<double, double> FeasibleRange() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : cells) {
      if (!c.feasible) continue;
      lo = std::min(lo, c.s_c);
      hi = std::max(hi, c.s_c);
    }
    if (lo > hi) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan};
    }
    return {lo, hi};
  }
};

// Uniform grid on [0, 1] with both endpoints; entry i is exactly i / (n - 1).
inline std::vector<double> UnitAxis(std::size_t n) {
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return axis;
}

inline PinningGrid ScanPinningRegion(const GameParams& g,
                                     std::size_t resolution, int jobs = 1) {
  if (resolution < 2) {
    throw InvalidParameterError("scan resolution must be at least 2");
  }
  ValidateGameParams(g);
  PinningGrid grid;
  grid.p1_axis = UnitAxis(resolution);
  grid.p4_axis = grid.p1_axis;
  grid.cells.resize(resolution * resolution);

  bool degenerate = !(g.e2 < 1);
  if (!degenerate) {
    const PinningConstants k = ComputePinningConstants(BuildPayoffs(g), g.e2);
    degenerate = std::abs(k.d1) <= kDegenerateDenominator;
  }

  detail::ParallelFor(grid.cells.size(), jobs, [&](std::size_t idx) {
    PinningCell& cell = grid.cells[idx];
    cell.p1 = grid.p1_axis[idx / resolution];
    cell.p4 = grid.p4_axis[idx % resolution];
    if (degenerate) {
      cell.status = PinningStatus::kDegenerateDenominator;
      return;
    }
    const PinningSolution s = SolvePinning(cell.p1, cell.p4, g);
    cell.feasible = s.feasible;
    cell.p2 = s.p2;
    cell.p3 = s.p3;
    cell.s_c = s.pinned_s_c;
    cell.status = s.status;
  });
  return grid;
}

}  // namespace nszd

#endif  // NSZD_PINNING_HPP_
