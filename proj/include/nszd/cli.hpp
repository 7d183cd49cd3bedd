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

// Batch command-line front end. Requires CLI11 and nlohmann/json.
//
// Exit codes: 0 ok, 2 configuration error, 3 invalid or degenerate
// parameters, 4 empty result.

#ifndef NSZD_CLI_HPP_
#define NSZD_CLI_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nszd/collector_nszd.hpp"
#include "nszd/extortion.hpp"
#include "nszd/io.hpp"
#include "nszd/markov_engine.hpp"
#include "nszd/payoff_model.hpp"
#include "nszd/pinning.hpp"
#include "nszd/simulator.hpp"

namespace nszd::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInvalid = 3,
  kExitEmpty = 4,
};

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  bool strict_ordering = false;
  bool negative_phi = false;
  int jobs = 1;
};

// What a subcommand produces: the artifact (file contents) and a short
// human-readable summary.
struct CommandOutput {
  std::string artifact;
  std::string summary;
  int code = kExitOk;
};

using io::FormatNumber;
using io::json;

namespace detail {

inline bool Json(const std::string& format) { return format == "json"; }

inline std::string Dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string Interval(double lo, double hi) {
  return "[" + FormatNumber(lo) + ", " + FormatNumber(hi) + "]";
}

inline PhiSign Sign(const io::ExtortSection& x, const Options& opt) {
  return opt.negative_phi ? PhiSign::kNegative : x.phi_sign;
}

inline const io::ExtortSection& RequireExtort(const io::RunConfig& cfg) {
  if (!cfg.extort) throw io::ConfigError("missing key 'extort'");
  return *cfg.extort;
}

}  // namespace detail

inline CommandOutput CmdPayoffs(const io::RunConfig& cfg,
                                const std::string& format, const Options&) {
  const PayoffVectors u = BuildPayoffs(cfg.game);
  const OrderingReport r = ValidateOrdering(cfg.game);
  CommandOutput o;
  if (detail::Json(format)) {
    json j = io::ToJson(u);
    j["params"] = io::ToJson(cfg.game);
    j["ordering"] = io::ToJson(r);
    o.artifact = detail::Dump(j);
  } else {
    o.artifact = io::ToCsv(u);
  }
  std::ostringstream s;
  s << "state  U_P            U_C\n";
  for (State st : kAllStates) {
    s << StateName(st) << "     " << FormatNumber(u.u_p[Index(st)])
      << std::string(15 - std::min<std::size_t>(
                              14, FormatNumber(u.u_p[Index(st)]).size()),
                     ' ')
      << FormatNumber(u.u_c[Index(st)]) << "\n";
  }
  const json flags = io::ToJson(r);
  for (const auto& [key, value] : flags.items()) {
    s << key << ": " << (value.get<bool>() ? "yes" : "no") << "\n";
  }
  o.summary = s.str();
  return o;
}

inline CommandOutput CmdPin(const io::RunConfig& cfg, const std::string& format,
                            const Options&) {
  if (!cfg.pin || !cfg.pin->p1) throw io::ConfigError("missing key 'pin.p1'");
  if (!cfg.pin->p4) throw io::ConfigError("missing key 'pin.p4'");
  const PinningSolution s = SolvePinning(*cfg.pin->p1, *cfg.pin->p4, cfg.game);
  CommandOutput o;
  if (detail::Json(format)) {
    json j = io::ToJson(s);
    if (s.feasible) {
      const auto ds = PinningSensitivityStrategy(s);
      const auto dn = PinningSensitivityNoise(s.p1, s.p4, cfg.game);
      j["sensitivity"] = {{"ds_dp1", ds.ds_dp1},
                          {"ds_dp4", ds.ds_dp4},
                          {"ds_de1", dn.ds_de1},
                          {"ds_de2", dn.ds_de2}};
    }
    o.artifact = detail::Dump(j);
  } else {
    o.artifact = io::ToCsv(s);
  }
  o.summary = "pin: p = (" + FormatNumber(s.p1) + ", " + FormatNumber(s.p2) +
              ", " + FormatNumber(s.p3) + ", " + FormatNumber(s.p4) + ") " +
              std::string(PinningStatusName(s.status)) + "; pinned S_C = " +
              FormatNumber(s.pinned_s_c) + " (A = " + FormatNumber(s.a_const) +
              ", B = " + FormatNumber(s.b_const) + ")\n";
  return o;
}

inline CommandOutput CmdScanPin(const io::RunConfig& cfg,
                                const std::string& format, const Options& opt) {
  const std::size_t resolution = cfg.pin ? cfg.pin->resolution : 101;
  // Surface a degenerate game as an error instead of an all-degenerate grid.
  const PinningConstants k =
      ComputePinningConstants(BuildPayoffs(cfg.game), cfg.game.e2);
  if (std::abs(k.d1) <= kDegenerateDenominator) {
    throw DegenerateError("pinning denominator D1 vanishes for these payoffs");
  }
  const PinningGrid grid = ScanPinningRegion(cfg.game, resolution, opt.jobs);
  CommandOutput o;
  if (detail::Json(format)) {
    json j = io::SummaryJson(grid);
    j["a"] = k.a;
    j["b"] = k.b;
    o.artifact = detail::Dump(j);
  } else {
    o.artifact = io::ToCsv(grid);
  }
  const auto [lo, hi] = grid.FeasibleRange();
  o.summary = "scan-pin: " + std::to_string(grid.FeasibleCount()) + " of " +
              std::to_string(grid.cells.size()) +
              " cells feasible; pinned S_C over feasible cells in " +
              detail::Interval(lo, hi) + " (A = " + FormatNumber(k.a) +
              ", B = " + FormatNumber(k.b) + ")\n";
  if (grid.FeasibleCount() == 0) o.code = kExitEmpty;
  return o;
}

inline CommandOutput CmdExtort(const io::RunConfig& cfg,
                               const std::string& format, const Options& opt) {
  const io::ExtortSection& x = detail::RequireExtort(cfg);
  if (!x.chi) throw io::ConfigError("missing key 'extort.chi'");
  const PhiSign sign = detail::Sign(x, opt);
  ValidateExtortionParams({x.l1, x.l2, *x.chi, 1.0});

  CommandOutput o;
  double phi = 0;
  if (x.phi) {
    phi = *x.phi;
  } else {
    const Interval range = AdmissiblePhiRange(cfg.game, x.l1, x.l2, *x.chi, sign);
    if (range.Empty()) {
      o.summary = "extort: no admissible phi of the requested sign for chi = " +
                  FormatNumber(*x.chi) + "\n";
      o.artifact = detail::Json(format)
                       ? detail::Dump({{"chi", *x.chi}, {"feasible", false}})
                       : "chi,phi,feasible,p1,p2,p3,p4\n" +
                             FormatNumber(*x.chi) + ",nan,0,nan,nan,nan,nan\n";
      o.code = kExitEmpty;
      return o;
    }
    phi = DefaultPhi(cfg.game, x.l1, x.l2, *x.chi, sign);
  }
  const ExtortionParams ext{x.l1, x.l2, *x.chi, phi};
  const ExtortionSolution s = BuildExtortionStrategy(cfg.game, ext);

  std::optional<ExtortionVerification> verification;
  if (s.feasible) {
    std::mt19937_64 rng(opt.seed.value_or(0));
    verification = VerifyExtortionRelation(s, cfg.game, ext, x.trials, rng);
  }
  if (detail::Json(format)) {
    json j = io::ToJson(s);
    j["chi"] = ext.chi;
    j["phi"] = ext.phi;
    j["l1"] = ext.l1;
    j["l2"] = ext.l2;
    j["verification"] =
        verification ? io::ToJson(*verification) : json(nullptr);
    o.artifact = detail::Dump(j);
  } else {
    o.artifact = "chi,phi,feasible,p1,p2,p3,p4\n" + FormatNumber(ext.chi) +
                 "," + FormatNumber(ext.phi) + "," + io::FormatBool(s.feasible);
    for (double pi : s.p.p) o.artifact += "," + FormatNumber(pi);
    o.artifact += "\n";
  }
  o.summary = "extort: chi = " + FormatNumber(ext.chi) +
              ", phi = " + FormatNumber(ext.phi) + ", p = (" +
              FormatNumber(s.p.p[0]) + ", " + FormatNumber(s.p.p[1]) + ", " +
              FormatNumber(s.p.p[2]) + ", " + FormatNumber(s.p.p[3]) + ") " +
              (s.feasible ? "feasible" : "infeasible") +
              "; row-ratio chi bounds " +
              detail::Interval(s.chi_lower, s.chi_upper) + ", exact chi set " +
              detail::Interval(s.exact_chi.lo, s.exact_chi.hi);
  if (verification) {
    o.summary += "; max residual " + FormatNumber(verification->max_residual) +
                 " over " + std::to_string(verification->trials) + " trials";
  }
  o.summary += "\n";
  return o;
}

inline CommandOutput CmdScanExtort(const io::RunConfig& cfg,
                                   const std::string& format,
                                   const Options& opt) {
  const io::ExtortSection& x = detail::RequireExtort(cfg);
  const auto e1 = LinearAxis(x.e1_grid.min, x.e1_grid.max, x.e1_grid.resolution);
  const auto e2 = LinearAxis(x.e2_grid.min, x.e2_grid.max, x.e2_grid.resolution);
  const ExtortionGrid grid =
      ScanExtortionRegion(cfg.game, x.l1, x.l2, e1, e2, detail::Sign(x, opt),
                          x.chi_probe, opt.jobs);
  CommandOutput o;
  if (detail::Json(format)) {
    json j = io::SummaryJson(grid);
    j["l1"] = x.l1;
    j["l2"] = x.l2;
    j["phi_sign"] =
        detail::Sign(x, opt) == PhiSign::kPositive ? "positive" : "negative";
    o.artifact = detail::Dump(j);
  } else {
    o.artifact = io::ToCsv(grid);
  }
  o.summary = "scan-extort: " + std::to_string(grid.FeasibleCount()) + " of " +
              std::to_string(grid.cells.size()) +
              " noise cells admit an extortion factor above 1\n";
  if (grid.FeasibleCount() == 0) o.code = kExitEmpty;
  return o;
}

inline CommandOutput CmdCheckCollector(const io::RunConfig& cfg,
                                       const std::string& format,
                                       const Options&) {
  std::vector<InfeasibilityCertificate> certs{CheckCollectorPinning(cfg.game)};
  std::optional<std::pair<double, double>> baselines;
  if (cfg.collector) {
    baselines = {cfg.collector->l1, cfg.collector->l2};
  } else if (cfg.extort) {
    baselines = {cfg.extort->l1, cfg.extort->l2};
  }
  if (baselines) {
    certs.push_back(
        CheckCollectorExtortion(cfg.game, baselines->first, baselines->second));
  }
  CommandOutput o;
  if (detail::Json(format)) {
    json j = json::array();
    for (const auto& c : certs) j.push_back(io::ToJson(c));
    o.artifact = detail::Dump({{"certificates", j}});
  } else {
    o.artifact = io::ToCsv(certs);
  }
  const bool all = std::all_of(certs.begin(), certs.end(),
                               [](const auto& c) { return c.holds; });
  o.summary = all ? "check-collector: infeasible for collector"
                  : "check-collector: not ruled out";
  for (const auto& c : certs) {
    o.summary += std::string("; ") + std::string(CertificateKindName(c.kind)) +
                 " gap " + FormatNumber(c.gap);
    if (!c.note.empty()) o.summary += " (" + c.note + ")";
  }
  o.summary += "\n";
  return o;
}

inline CommandOutput CmdSimulate(const io::RunConfig& cfg,
                                 const std::string& format, const Options& opt) {
  if (!cfg.simulate) throw io::ConfigError("missing key 'simulate'");
  const io::SimulateSection& s = *cfg.simulate;
  SimConfig sim;
  sim.params = cfg.game;
  sim.p = s.p;
  sim.q = s.q;
  sim.rounds = s.rounds;
  sim.burn_in = s.burn_in;
  sim.seed = opt.seed ? *opt.seed : s.seed.value_or(0);
  sim.initial_state = s.initial_state;

  std::vector<RoundRecord> trace;
  const bool want_trace = !detail::Json(format);
  const SimResult r = PlayRounds(sim, want_trace ? &trace : nullptr);

  std::optional<AnalyticComparison> cmp;
  std::string cmp_error;
  try {
    cmp = CompareToAnalytic(r, s.p, s.q, cfg.game);
  } catch (const NonUniqueStationaryError& e) {
    cmp_error = e.what();
  }

  CommandOutput o;
  if (want_trace) {
    o.artifact = io::TraceCsv(trace);
  } else {
    json j;
    j["seed"] = sim.seed;
    j["rounds"] = sim.rounds;
    j["burn_in"] = sim.burn_in;
    j["result"] = io::ToJson(r);
    j["transition_matrix"] =
        io::ToJson(BuildTransitionMatrix(s.p, s.q, cfg.game));
    j["comparison"] = cmp ? io::ToJson(*cmp) : json(nullptr);
    if (!cmp) j["comparison_error"] = cmp_error;
    o.artifact = detail::Dump(j);
  }
  o.summary = "simulate: " + std::to_string(r.rounds_used) +
              " rounds used; s_p=" + FormatNumber(r.s_p) +
              ", s_c=" + FormatNumber(r.s_c);
  if (cmp) {
    o.summary += "; analytic s_p=" + FormatNumber(cmp->analytic.s_p) +
                 ", s_c=" + FormatNumber(cmp->analytic.s_c) +
                 (cmp->flagged ? "; DISAGREEMENT (|z| > 4)" : "; agrees");
  } else {
    o.summary += "; no analytic comparison (" + cmp_error + ")";
  }
  o.summary += "\n";
  return o;
}

using Command = std::function<CommandOutput(const io::RunConfig&,
                                            const std::string&, const Options&)>;

// Runs one subcommand. The artifact goes to the output path when one is
// configured, with the summary on `out`; otherwise the artifact goes to
// `out` and the summary to `err`.
inline int Execute(const Command& cmd, const Options& opt, std::ostream& out,
                   std::ostream& err) {
  try {
    const io::RunConfig cfg = io::LoadRunConfig(opt.config);
    const std::string format =
        opt.format ? *opt.format : cfg.output.format.value_or("csv");
    if (format != "csv" && format != "json") {
      throw io::ConfigError("format must be 'csv' or 'json'");
    }
    ValidateGameParams(cfg.game);
    if (opt.strict_ordering) {
      const OrderingReport r = ValidateOrdering(cfg.game);
      if (!r.AllHold()) {
        std::string failed;
        const json flags = io::ToJson(r);
        for (const auto& [key, value] : flags.items()) {
          if (key.rfind("provider_data", 0) == 0 ||
              key.rfind("provider_privacy", 0) == 0) {
            continue;
          }
          if (!value.get<bool>()) failed += " " + key;
        }
        throw InvalidParameterError("payoff ordering violated:" + failed);
      }
    }
    const CommandOutput o = cmd(cfg, format, opt);
    const std::optional<std::string> path = opt.out ? opt.out : cfg.output.path;
    if (path) {
      std::ofstream f(*path, std::ios::binary);
      if (!f) throw io::ConfigError("cannot write output file '" + *path + "'");
      f << o.artifact;
      out << o.summary;
    } else {
      out << o.artifact;
      err << o.summary;
    }
    return o.code;
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParameterError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DegenerateError& e) {
    err << "degenerate parameters: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NonUniqueStationaryError& e) {
    err << "degenerate strategies: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

inline int Run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Zero-determinant strategy analysis for the noisy data-trading game"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "JSON run configuration")->required();
  app.add_option("--out", opt.out, "Write the artifact to this path");
  app.add_option("--format", opt.format, "Artifact format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", opt.seed, "Seed for randomized commands");
  app.add_flag("--strict-ordering", opt.strict_ordering,
               "Reject payoffs that violate the ordering assumptions");
  app.add_flag("--negative-phi", opt.negative_phi,
               "Use the phi < 0 branch for extortion commands");
  app.add_option("--jobs", opt.jobs, "Worker threads for scans")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  const std::vector<std::pair<const char*, Command>> commands = {
      {"payoffs", CmdPayoffs},     {"pin", CmdPin},
      {"scan-pin", CmdScanPin},    {"extort", CmdExtort},
      {"scan-extort", CmdScanExtort}, {"check-collector", CmdCheckCollector},
      {"simulate", CmdSimulate},
  };
  const std::vector<std::pair<const char*, const char*>> help = {
      {"payoffs", "Payoff vectors and ordering checks"},
      {"pin", "Solve one pinning strategy"},
      {"scan-pin", "Feasible region of pinning strategies over (p1, p4)"},
      {"extort", "Build and verify one extortionate strategy"},
      {"scan-extort", "Extortion feasibility over the (e1, e2) noise grid"},
      {"check-collector", "Certificates that the collector cannot pin or extort"},
      {"simulate", "Monte-Carlo play compared against the stationary solution"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, description] : help) {
    subs.push_back(app.add_subcommand(name, description));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return Execute(commands[i].second, opt, out, err);
  }
  return kExitConfig;
}

}  // namespace nszd::cli

#endif  // NSZD_CLI_HPP_
