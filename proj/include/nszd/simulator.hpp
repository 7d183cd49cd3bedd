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

// Round-by-round Monte-Carlo play of the noisy sequential game. Shares no
// code with the transition-matrix builder beyond the payoff table, so its
// output is an independent check on every closed form.

#ifndef NSZD_SIMULATOR_HPP_
#define NSZD_SIMULATOR_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "nszd/detail/random.hpp"
#include "nszd/errors.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"

namespace nszd {

enum class Observation { kGood, kBad };

inline constexpr char ObservationChar(Observation o) {
  return o == Observation::kGood ? 'g' : 'b';
}
inline constexpr char ActionChar(Action a) {
  return a == Action::kCooperate ? 'C' : 'D';
}

struct SimConfig {
  GameParams params;
  ProviderStrategy p;
  CollectorStrategy q;
  std::uint64_t rounds = 1;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  State initial_state = State::kCC;
};

inline void ValidateSimConfig(const SimConfig& c) {
  ValidateGameParams(c.params);
  ValidateStrategy(c.p);
  ValidateStrategy(c.q);
  if (c.rounds < 1) throw InvalidParameterError("rounds must be at least 1");
  if (c.burn_in >= c.rounds) {
    throw InvalidParameterError("burn_in must be smaller than rounds");
  }
}

struct RoundRecord {
  std::uint64_t round = 0;
  State prev_state = State::kCC;
  Observation provider_obs = Observation::kGood;  // of collector's last move
  Action provider_action = Action::kCooperate;
  Observation collector_obs = Observation::kGood;  // of provider's move
  Action collector_action = Action::kCooperate;
  double u_p = 0;
  double u_c = 0;
};

// Counts behind the observation-noise rules, over post-burn-in rounds.
struct ObservationTally {
  std::uint64_t collector_defections = 0;  // previous-round collector D
  std::uint64_t collector_defections_seen_good = 0;
  std::uint64_t provider_defections = 0;
  std::uint64_t provider_defections_seen_good = 0;
};

struct SimResult {
  Vec4 frequencies{};
  double s_p = 0;
  double s_c = 0;
  Vec4 se_frequencies{};
  double se_s_p = 0;
  double se_s_c = 0;
  std::uint64_t rounds_used = 0;
  std::array<std::array<std::uint64_t, 4>, 4> transitions{};
  ObservationTally tally;
};

inline constexpr std::uint64_t kSimBatches = 200;

namespace detail {

// Mean and batch-means standard error of a stream of per-round values.
class BatchStat {
 public:
  BatchStat(std::uint64_t total, std::uint64_t batches)
      : batch_size_(total >= 2 * batches ? total / batches : 1),
        max_batches_(total >= 2 * batches ? batches : total) {}

  void Add(double x) {
    sum_ += x;
    ++n_;
    if (batches_done_ < max_batches_) {
      batch_sum_ += x;
      if (++in_batch_ == batch_size_) {
        const double m = batch_sum_ / static_cast<double>(batch_size_);
        bsum_ += m;
        bsum2_ += m * m;
        ++batches_done_;
        batch_sum_ = 0;
        in_batch_ = 0;
      }
    }
  }

  double Mean() const { return sum_ / static_cast<double>(n_); }

  double StandardError() const {
    if (batches_done_ < 2) return std::numeric_limits<double>::infinity();
    const double k = static_cast<double>(batches_done_);
    const double mean = bsum_ / k;
    const double var = std::max(0.0, (bsum2_ - k * mean * mean) / (k - 1));
    return std::sqrt(var / k);
  }

 private:
  std::uint64_t batch_size_;
  std::uint64_t max_batches_;
  std::uint64_t n_ = 0;
  double sum_ = 0;
  double batch_sum_ = 0;
  std::uint64_t in_batch_ = 0;
  std::uint64_t batches_done_ = 0;
  double bsum_ = 0;
  double bsum2_ = 0;
};

}  // namespace detail

// Plays config.rounds rounds; statistics cover the rounds after burn_in.
// Each round consumes exactly four uniforms, in the order provider
// observation, provider action, collector observation, collector action.
inline SimResult PlayRounds(const SimConfig& config,
                            std::vector<RoundRecord>* trace = nullptr) {
  ValidateSimConfig(config);
  const PayoffVectors u = BuildPayoffs(config.params);
  const double e1 = config.params.e1;
  const double e2 = config.params.e2;
  std::mt19937_64 rng(config.seed);

  const std::uint64_t used = config.rounds - config.burn_in;
  std::array<detail::BatchStat, 4> freq_stats{
      detail::BatchStat(used, kSimBatches), detail::BatchStat(used, kSimBatches),
      detail::BatchStat(used, kSimBatches), detail::BatchStat(used, kSimBatches)};
  detail::BatchStat sp_stat(used, kSimBatches);
  detail::BatchStat sc_stat(used, kSimBatches);

  SimResult result;
  result.rounds_used = used;
  if (trace) {
    trace->clear();
    trace->reserve(config.rounds);
  }

  State prev = config.initial_state;
  for (std::uint64_t r = 0; r < config.rounds; ++r) {
    const double u_pobs = detail::UniformUnit(rng);
    const double u_pact = detail::UniformUnit(rng);
    const double u_cobs = detail::UniformUnit(rng);
    const double u_cact = detail::UniformUnit(rng);

    // The first round has no real history; its fictitious previous outcome
    // is observed as g.
    Observation pobs = Observation::kGood;
    if (r > 0 && !CollectorCooperates(prev) && !(u_pobs < e2)) {
      pobs = Observation::kBad;
    }
    const int idx = (ProviderCooperates(prev) ? 0 : 2) +
                    (pobs == Observation::kBad ? 1 : 0);
    const bool pc = u_pact < config.p.p[idx];

    Observation cobs = Observation::kGood;
    if (!pc && u_cobs < e1) cobs = Observation::kBad;
    const bool cc = u_cact < config.q.q[cobs == Observation::kGood ? 0 : 1];

    const State next = MakeState(pc, cc);
    const double up = u.u_p[Index(next)];
    const double uc = u.u_c[Index(next)];

    if (trace) {
      trace->push_back({r, prev, pobs,
                        pc ? Action::kCooperate : Action::kDefect, cobs,
                        cc ? Action::kCooperate : Action::kDefect, up, uc});
    }

    if (r >= config.burn_in) {
      for (int s = 0; s < 4; ++s) freq_stats[s].Add(s == Index(next) ? 1 : 0);
      sp_stat.Add(up);
      sc_stat.Add(uc);
      if (r > 0) {
        ++result.transitions[Index(prev)][Index(next)];
        if (!CollectorCooperates(prev)) {
          ++result.tally.collector_defections;
          if (pobs == Observation::kGood) {
            ++result.tally.collector_defections_seen_good;
          }
        }
      }
      if (!pc) {
        ++result.tally.provider_defections;
        if (cobs == Observation::kGood) {
          ++result.tally.provider_defections_seen_good;
        }
      }
    }
    prev = next;
  }

  for (int s = 0; s < 4; ++s) {
    result.frequencies[s] = freq_stats[s].Mean();
    result.se_frequencies[s] = freq_stats[s].StandardError();
  }
  result.s_p = sp_stat.Mean();
  result.s_c = sc_stat.Mean();
  result.se_s_p = sp_stat.StandardError();
  result.se_s_c = sc_stat.StandardError();
  return result;
}

struct AnalyticComparison {
  StationaryResult analytic;
  Vec4 z_frequencies{};
  double z_s_p = 0;
  double z_s_c = 0;
  bool flagged = false;  // some |z| exceeds the threshold
  double threshold = 4;
};

// z = (empirical - analytic) / standard error. A zero standard error gives
// z = 0 on an exact match and infinity otherwise.
inline double ZScore(double empirical, double analytic, double se) {
  const double diff = empirical - analytic;
  if (se > 0 && std::isfinite(se)) return diff / se;
  if (std::abs(diff) <= 1e-12) return 0;
  return std::numeric_limits<double>::infinity();
}

inline AnalyticComparison CompareToAnalytic(const SimResult& result,
                                            const StationaryResult& analytic,
                                            double threshold = 4) {
  AnalyticComparison c;
  c.analytic = analytic;
  c.threshold = threshold;
  for (int s = 0; s < 4; ++s) {
    c.z_frequencies[s] = ZScore(result.frequencies[s], analytic.v[s],
                                result.se_frequencies[s]);
    c.flagged |= !(std::abs(c.z_frequencies[s]) <= threshold);
  }
  c.z_s_p = ZScore(result.s_p, analytic.s_p, result.se_s_p);
  c.z_s_c = ZScore(result.s_c, analytic.s_c, result.se_s_c);
  c.flagged |= !(std::abs(c.z_s_p) <= threshold);
  c.flagged |= !(std::abs(c.z_s_c) <= threshold);
  return c;
}

inline AnalyticComparison CompareToAnalytic(const SimResult& result,
                                            const ProviderStrategy& p,
                                            const CollectorStrategy& q,
                                            const GameParams& g,
                                            double threshold = 4) {
  return CompareToAnalytic(result, ExpectedPayoffs(p, q, g), threshold);
}

}  // namespace nszd

#endif  // NSZD_SIMULATOR_HPP_
