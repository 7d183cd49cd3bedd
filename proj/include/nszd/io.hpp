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

// Serialization of library results and parsing of run configurations.
// Requires nlohmann/json.

#ifndef NSZD_IO_HPP_
#define NSZD_IO_HPP_

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "nszd/collector_nszd.hpp"
#include "nszd/extortion.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"
#include "nszd/pinning.hpp"
#include "nszd/simulator.hpp"

namespace nszd::io {

using nlohmann::json;

// 12 significant digits, shortest of fixed/scientific, always '.' as the
// decimal separator.
inline std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // drop the sign of -0
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline std::string FormatBool(bool b) { return b ? "1" : "0"; }

// JSON has no NaN or infinity; both become null.
inline json Number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline json Vec(const Vec4& v) {
  return json::array({Number(v[0]), Number(v[1]), Number(v[2]), Number(v[3])});
}

inline json IntervalJson(const Interval& i) {
  return json::array({Number(i.lo), Number(i.hi)});
}

inline json ToJson(const GameParams& g) {
  return {{"c_p", g.c_p},   {"c_c", g.c_c},   {"c_p1", g.c_p1},
          {"c_c1", g.c_c1}, {"c_p2", g.c_p2}, {"c_c2", g.c_c2},
          {"e1", g.e1},     {"e2", g.e2}};
}

// Flat key -> bool map.
inline json ToJson(const OrderingReport& r) {
  return {{"provider_cc_gt_cd", r.provider_cc_gt_cd},
          {"provider_cc_gt_dc_gt_dd", r.provider_cc_gt_dc_gt_dd},
          {"collector_cd_gt_cc_gt_dc", r.collector_cd_gt_cc_gt_dc},
          {"collector_cd_gt_dd_gt_dc", r.collector_cd_gt_dd_gt_dc},
          {"provider_data_valued",
           r.sensitivity == ProviderSensitivity::kDataValued},
          {"provider_privacy_sensitive",
           r.sensitivity == ProviderSensitivity::kPrivacySensitive}};
}

inline json ToJson(const PayoffVectors& u) {
  return {{"u_p", Vec(u.u_p)}, {"u_c", Vec(u.u_c)}};
}

// Row-major nested arrays.
inline json ToJson(const TransitionMatrix& t) {
  json rows = json::array();
  for (const auto& row : t.m) rows.push_back(Vec(row));
  return rows;
}

inline const char* kStateCsvHeader = "state,CC,CD,DC,DD\n";

inline std::string VectorCsvRow(const std::string& label, const Vec4& v) {
  std::string s = label;
  for (double x : v) s += "," + FormatNumber(x);
  return s + "\n";
}

inline std::string ToCsv(const PayoffVectors& u) {
  return kStateCsvHeader + VectorCsvRow("u_p", u.u_p) +
         VectorCsvRow("u_c", u.u_c);
}

inline std::string ToCsv(const TransitionMatrix& t) {
  std::string s = kStateCsvHeader;
  for (State v : kAllStates) {
    s += VectorCsvRow(std::string(StateName(v)), t.m[Index(v)]);
  }
  return s;
}

inline json ToJson(const PinningSolution& s) {
  return {{"p", Vec({s.p1, s.p2, s.p3, s.p4})},
          {"feasible", s.feasible},
          {"status", PinningStatusName(s.status)},
          {"pinned_s_c", Number(s.pinned_s_c)},
          {"a", s.a_const},
          {"b", s.b_const},
          {"d1", s.d1_const}};
}

inline const char* kPinningCsvHeader = "p1,p4,feasible,p2,p3,s_c_pinned\n";

inline std::string PinningCsvRow(double p1, double p4, bool feasible,
                                 double p2, double p3, double s_c) {
  return FormatNumber(p1) + "," + FormatNumber(p4) + "," +
         FormatBool(feasible) + "," + FormatNumber(p2) + "," +
         FormatNumber(p3) + "," + FormatNumber(s_c) + "\n";
}

inline std::string ToCsv(const PinningSolution& s) {
  return kPinningCsvHeader +
         PinningCsvRow(s.p1, s.p4, s.feasible, s.p2, s.p3, s.pinned_s_c);
}

inline std::string ToCsv(const PinningGrid& grid) {
  std::string s = kPinningCsvHeader;
  s.reserve(grid.cells.size() * 64);
  for (const auto& c : grid.cells) {
    s += PinningCsvRow(c.p1, c.p4, c.feasible, c.p2, c.p3, c.s_c);
  }
  return s;
}

inline json SummaryJson(const PinningGrid& grid) {
  const auto [lo, hi] = grid.FeasibleRange();
  return {{"resolution", grid.Resolution()},
          {"cells", grid.cells.size()},
          {"feasible_cells", grid.FeasibleCount()},
          {"s_c_min", Number(lo)},
          {"s_c_max", Number(hi)}};
}

inline std::string ToCsv(const ExtortionGrid& grid) {
  std::string s = "e1,e2,chi_lower,chi_upper,feasible\n";
  for (const auto& c : grid.cells) {
    s += FormatNumber(c.e1) + "," + FormatNumber(c.e2) + "," +
         FormatNumber(c.chi_lower) + "," + FormatNumber(c.chi_upper) + "," +
         FormatBool(c.feasible) + "\n";
  }
  return s;
}

inline json SummaryJson(const ExtortionGrid& grid) {
  std::size_t invalid = 0;
  std::size_t degenerate = 0;
  for (const auto& c : grid.cells) {
    invalid += c.status == ExtortionCellStatus::kInvalidUpperBound;
    degenerate += c.status == ExtortionCellStatus::kDegenerateBaseline;
  }
  return {{"cells", grid.cells.size()},
          {"feasible_cells", grid.FeasibleCount()},
          {"invalid_upper_bound_cells", invalid},
          {"degenerate_baseline_cells", degenerate}};
}

inline json ToJson(const ExtortionVerification& v) {
  return {{"trials", v.trials},
          {"max_residual", v.max_residual},
          {"discarded", v.discarded}};
}

inline json ToJson(const ExtortionSolution& s) {
  return {{"p", Vec(s.p.p)},
          {"feasible", s.feasible},
          {"chi_bounds", json::array({Number(s.chi_lower), Number(s.chi_upper)})},
          {"phi_range", IntervalJson(s.phi_range)},
          {"exact_chi", IntervalJson(s.exact_chi)}};
}

inline json ToJson(const InfeasibilityCertificate& c) {
  return {{"kind", CertificateKindName(c.kind)},
          {"conflicting_states",
           json::array({StateName(c.conflicting_states[0]),
                        StateName(c.conflicting_states[1])})},
          {"lhs", Number(c.lhs)},
          {"rhs", Number(c.rhs)},
          {"gap", Number(c.gap)},
          {"holds", c.holds},
          {"provider_cc_gt_cd", c.provider_cc_gt_cd},
          {"collector_cd_gt_cc_gt_dc", c.collector_cd_gt_cc_gt_dc},
          {"note", c.note}};
}

inline std::string ToCsv(const std::vector<InfeasibilityCertificate>& certs) {
  std::string s = "kind,lhs,rhs,gap,holds\n";
  for (const auto& c : certs) {
    s += std::string(CertificateKindName(c.kind)) + "," +
         FormatNumber(c.lhs) + "," + FormatNumber(c.rhs) + "," +
         FormatNumber(c.gap) + "," + FormatBool(c.holds) + "\n";
  }
  return s;
}

inline json ToJson(const SimResult& r) {
  json transitions = json::array();
  for (const auto& row : r.transitions) transitions.push_back(row);
  return {{"frequencies", Vec(r.frequencies)},
          {"se_frequencies", Vec(r.se_frequencies)},
          {"s_p", r.s_p},
          {"s_c", r.s_c},
          {"se_s_p", Number(r.se_s_p)},
          {"se_s_c", Number(r.se_s_c)},
          {"rounds_used", r.rounds_used},
          {"transition_counts", transitions}};
}

inline json ToJson(const AnalyticComparison& c) {
  return {{"v", Vec(c.analytic.v)},
          {"s_p", c.analytic.s_p},
          {"s_c", c.analytic.s_c},
          {"z_frequencies", Vec(c.z_frequencies)},
          {"z_s_p", Number(c.z_s_p)},
          {"z_s_c", Number(c.z_s_c)},
          {"threshold", c.threshold},
          {"flagged", c.flagged}};
}

inline std::string TraceCsv(const std::vector<RoundRecord>& trace) {
  std::string s =
      "round,prev_state,provider_obs,provider_action,collector_obs,"
      "collector_action,u_p,u_c\n";
  for (const auto& r : trace) {
    s += std::to_string(r.round) + "," + std::string(StateName(r.prev_state)) +
         "," + ObservationChar(r.provider_obs) + "," +
         ActionChar(r.provider_action) + "," + ObservationChar(r.collector_obs) +
         "," + ActionChar(r.collector_action) + "," + FormatNumber(r.u_p) +
         "," + FormatNumber(r.u_c) + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Run configuration.

// Malformed, missing, unknown or out-of-range configuration entries.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AxisSpec {
  double min = 0;
  double max = 0.99;
  std::size_t resolution = 100;
};

struct PinSection {
  std::optional<double> p1;
  std::optional<double> p4;
  std::size_t resolution = 101;
};

struct ExtortSection {
  double l1 = 0;
  double l2 = 0;
  std::optional<double> chi;
  std::optional<double> phi;
  PhiSign phi_sign = PhiSign::kPositive;
  int trials = 1000;
  AxisSpec e1_grid;
  AxisSpec e2_grid;
  std::optional<double> chi_probe;
};

struct CollectorSection {
  double l1 = 0;
  double l2 = 0;
};

struct SimulateSection {
  ProviderStrategy p;
  CollectorStrategy q;
  std::uint64_t rounds = 1000000;
  std::uint64_t burn_in = 1000;
  std::optional<std::uint64_t> seed;
  State initial_state = State::kCC;
};

struct OutputSection {
  std::optional<std::string> path;
  std::optional<std::string> format;
};

struct RunConfig {
  GameParams game;
  std::optional<PinSection> pin;
  std::optional<ExtortSection> extort;
  std::optional<CollectorSection> collector;
  std::optional<SimulateSection> simulate;
  OutputSection output;
};

namespace detail {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(Where("") + " must be an object");
  }

  void RejectUnknown(std::initializer_list<const char*> known) const {
    for (const auto& [key, value] : obj_.items()) {
      bool ok = false;
      for (const char* k : known) ok |= key == k;
      if (!ok) throw ConfigError("unknown key '" + Where(key) + "'");
    }
  }

  bool Has(const char* key) const { return obj_.contains(key); }

  double Number(const char* key) const {
    const json& v = Require(key);
    if (!v.is_number()) throw ConfigError("key '" + Where(key) + "' must be a number");
    return v.get<double>();
  }

  std::optional<double> OptNumber(const char* key) const {
    if (!Has(key)) return std::nullopt;
    return Number(key);
  }

  double Probability(const char* key) const {
    const double v = Number(key);
    CheckProbability(v, Where(key));
    return v;
  }

  std::uint64_t Count(const char* key) const {
    const json& v = Require(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("key '" + Where(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string String(const char* key) const {
    const json& v = Require(key);
    if (!v.is_string()) throw ConfigError("key '" + Where(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> Probabilities(const char* key, std::size_t n) const {
    const json& v = Require(key);
    if (!v.is_array() || v.size() != n) {
      throw ConfigError("key '" + Where(key) + "' must be an array of " +
                        std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number()) {
        throw ConfigError("key '" + Where(key) + "' must hold numbers");
      }
      out.push_back(v[i].get<double>());
      CheckProbability(out.back(), Where(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  Reader Section(const char* key) const { return Reader(Require(key), Where(key)); }

 private:
  static void CheckProbability(double v, const std::string& where) {
    if (!(v >= 0 && v <= 1)) {
      throw ConfigError("key '" + where + "' must lie in [0, 1]");
    }
  }

  const json& Require(const char* key) const {
    if (!obj_.contains(key)) throw ConfigError("missing key '" + Where(key) + "'");
    return obj_.at(key);
  }

  std::string Where(const std::string& key) const {
    if (path_.empty()) return key;
    if (key.empty()) return path_;
    return path_ + "." + key;
  }

  const json& obj_;
  std::string path_;
};

inline AxisSpec ParseAxis(const Reader& r) {
  r.RejectUnknown({"min", "max", "resolution"});
  AxisSpec a;
  a.min = r.Probability("min");
  a.max = r.Probability("max");
  a.resolution = r.Count("resolution");
  return a;
}

inline State ParseState(const std::string& s) {
  for (State st : kAllStates) {
    if (s == StateName(st)) return st;
  }
  throw ConfigError("initial_state must be one of CC, CD, DC, DD");
}

}  // namespace detail

inline RunConfig ParseRunConfig(const json& root) {
  detail::Reader r(root, "");
  r.RejectUnknown({"c_p", "c_c", "c_p1", "c_c1", "c_p2", "c_c2", "e1", "e2",
                   "pin", "extort", "collector", "simulate", "output"});
  RunConfig c;
  c.game.c_p = r.Number("c_p");
  c.game.c_c = r.Number("c_c");
  c.game.c_p1 = r.Number("c_p1");
  c.game.c_c1 = r.Number("c_c1");
  c.game.c_p2 = r.Number("c_p2");
  c.game.c_c2 = r.Number("c_c2");
  c.game.e1 = r.Probability("e1");
  c.game.e2 = r.Probability("e2");

  if (r.Has("pin")) {
    const auto s = r.Section("pin");
    s.RejectUnknown({"p1", "p4", "resolution"});
    PinSection pin;
    if (s.Has("p1")) pin.p1 = s.Probability("p1");
    if (s.Has("p4")) pin.p4 = s.Probability("p4");
    if (s.Has("resolution")) pin.resolution = s.Count("resolution");
    c.pin = pin;
  }
  if (r.Has("extort")) {
    const auto s = r.Section("extort");
    s.RejectUnknown({"l1", "l2", "chi", "phi", "phi_sign", "trials", "e1_grid",
                     "e2_grid", "chi_probe"});
    ExtortSection x;
    x.l1 = s.Number("l1");
    x.l2 = s.Number("l2");
    x.chi = s.OptNumber("chi");
    x.phi = s.OptNumber("phi");
    x.chi_probe = s.OptNumber("chi_probe");
    if (s.Has("phi_sign")) {
      const std::string sign = s.String("phi_sign");
      if (sign == "positive") {
        x.phi_sign = PhiSign::kPositive;
      } else if (sign == "negative") {
        x.phi_sign = PhiSign::kNegative;
      } else {
        throw ConfigError("extort.phi_sign must be 'positive' or 'negative'");
      }
    }
    if (s.Has("trials")) x.trials = static_cast<int>(s.Count("trials"));
    if (s.Has("e1_grid")) x.e1_grid = detail::ParseAxis(s.Section("e1_grid"));
    if (s.Has("e2_grid")) x.e2_grid = detail::ParseAxis(s.Section("e2_grid"));
    c.extort = x;
  }
  if (r.Has("collector")) {
    const auto s = r.Section("collector");
    s.RejectUnknown({"l1", "l2"});
    c.collector = CollectorSection{s.Number("l1"), s.Number("l2")};
  }
  if (r.Has("simulate")) {
    const auto s = r.Section("simulate");
    s.RejectUnknown({"p", "q", "rounds", "burn_in", "seed", "initial_state"});
    SimulateSection sim;
    const auto p = s.Probabilities("p", 4);
    const auto q = s.Probabilities("q", 2);
    sim.p = {{p[0], p[1], p[2], p[3]}};
    sim.q = {{q[0], q[1]}};
    if (s.Has("rounds")) sim.rounds = s.Count("rounds");
    if (s.Has("burn_in")) sim.burn_in = s.Count("burn_in");
    if (s.Has("seed")) sim.seed = s.Count("seed");
    if (s.Has("initial_state")) {
      sim.initial_state = detail::ParseState(s.String("initial_state"));
    }
    c.simulate = sim;
  }
  if (r.Has("output")) {
    const auto s = r.Section("output");
    s.RejectUnknown({"path", "format"});
    if (s.Has("path")) c.output.path = s.String("path");
    if (s.Has("format")) c.output.format = s.String("format");
  }
  return c;
}

inline RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  return ParseRunConfig(root);
}

}  // namespace nszd::io

#endif  // NSZD_IO_HPP_
