// Command-line front end: loads a scenario (preset or JSON), runs single
// simulations, sweeps, or the offline optimizer, and emits JSON/CSV
// artifacts. See README for the file formats.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linksim/optimizer.hpp"
#include "linksim/presets.hpp"
#include "linksim/scenario_json.hpp"
#include "linksim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct Options {
  std::string preset;
  std::string input;
  std::string output = ".";
  std::vector<std::string> sets;
  bool trace = false;
  int parallel = 1;
  std::string v_grid;  // lo:hi:n, log spaced
  std::string b_grid;  // lo:hi:n, linear
};

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int n = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw std::invalid_argument("grid must be lo:hi:n, got " + text);
  }
  g.lo = std::stod(text.substr(0, c1));
  g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  g.n = std::stoi(text.substr(c2 + 1));
  if (g.n < 1 || !(g.hi >= g.lo) || !(g.lo > 0.0)) {
    throw std::invalid_argument("bad grid range: " + text);
  }
  return g;
}

std::vector<double> log_grid(const GridSpec& g) {
  std::vector<double> v;
  if (g.n == 1) return {g.lo};
  for (int i = 0; i < g.n; ++i) {
    v.push_back(g.lo * std::pow(g.hi / g.lo, static_cast<double>(i) / (g.n - 1)));
  }
  return v;
}

std::vector<double> linear_grid(const GridSpec& g) {
  std::vector<double> v;
  if (g.n == 1) return {g.lo};
  for (int i = 0; i < g.n; ++i) {
    v.push_back(g.lo + (g.hi - g.lo) * i / (g.n - 1));
  }
  return v;
}

// Applies one key=value override. Packet size rebuilds the scenario2 table,
// so it is only legal on that preset.
void apply_set(linksim::ScenarioSpec& spec, const std::string& kv,
               const std::string& preset) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("--set expects key=value, got " + kv);
  }
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  if (key == "V") {
    spec.v = std::stod(value);
  } else if (key == "seed") {
    spec.seed = static_cast<std::uint64_t>(std::stod(value));
  } else if (key == "horizon") {
    spec.horizon = static_cast<std::uint64_t>(std::stod(value));
  } else if (key == "d_av") {
    spec.d_av = std::stod(value);
  } else if (key == "policy") {
    auto p = linksim::policy_from_string(value);
    if (!p) throw std::invalid_argument("unknown policy: " + value);
    spec.policy = *p;
  } else if (key == "b") {
    if (preset != "scenario2") {
      throw std::invalid_argument(
          "--set b=... is only supported for --preset scenario2");
    }
    const auto keep_v = spec.v;
    const auto keep_seed = spec.seed;
    const auto keep_horizon = spec.horizon;
    const auto keep_policy = spec.policy;
    spec = linksim::scenario2_with_packet_bits(std::stod(value));
    spec.v = keep_v;
    spec.seed = keep_seed;
    spec.horizon = keep_horizon;
    spec.policy = keep_policy;
  } else {
    throw std::invalid_argument("unknown --set key: " + key);
  }
}

linksim::ScenarioSpec resolve_spec(const Options& opt) {
  if (opt.preset.empty() == opt.input.empty()) {
    throw std::invalid_argument(
        "exactly one of --preset or --input is required");
  }
  linksim::ScenarioSpec spec =
      opt.preset.empty() ? linksim::load_scenario_file(opt.input)
                         : linksim::load_preset(opt.preset);
  for (const auto& kv : opt.sets) apply_set(spec, kv, opt.preset);
  spec.validate();
  return spec;
}

std::ofstream open_output(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.output);
  const auto path = std::filesystem::path(opt.output) / name;
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot write " + path.string());
  return os;
}

int cmd_run(const Options& opt) {
  const linksim::ScenarioSpec spec = resolve_spec(opt);
  std::vector<linksim::SlotRecord> trace;
  const linksim::RunReport rep =
      linksim::run(spec, opt.trace ? &trace : nullptr);
  {
    auto os = open_output(opt, "report.json");
    os << linksim::report_to_json(rep).dump(2) << '\n';
  }
  if (opt.trace) {
    auto os = open_output(opt, "trace.csv");
    linksim::write_trace_csv(os, trace);
  }
  std::printf("run: policy=%s V=%g slots=%llu p_tot=%.6f u_avg=%.1f",
              linksim::to_string(rep.policy), rep.v,
              static_cast<unsigned long long>(rep.slots), rep.avg.p_tot,
              rep.avg.u_actual);
  if (rep.theory_available) {
    std::printf(" p_av_star=%.6f bound=%.6f", rep.p_av_star, rep.power_bound);
  }
  std::printf("\n");
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  std::vector<linksim::ScenarioSpec> specs;
  if (!opt.input.empty()) {
    const auto doc = linksim::parse_json_file(opt.input);
    if (doc.is_array()) {
      for (const auto& item : doc) {
        specs.push_back(linksim::scenario_from_json(item));
        for (const auto& kv : opt.sets) apply_set(specs.back(), kv, "");
      }
    }
  }
  if (specs.empty()) {
    const linksim::ScenarioSpec base = resolve_spec(opt);
    std::vector<double> b_values;
    if (!opt.b_grid.empty()) {
      b_values = linear_grid(parse_grid(opt.b_grid));
    } else {
      b_values = {base.arrivals.packet_bits()};
    }
    std::vector<double> v_values;
    if (!opt.v_grid.empty()) {
      v_values = log_grid(parse_grid(opt.v_grid));
    } else if (opt.b_grid.empty()) {
      v_values = log_grid({1e3, 1e7, 13});  // default V sweep
    } else {
      v_values = {base.v};
    }
    for (double b : b_values) {
      for (double v : v_values) {
        linksim::ScenarioSpec s = base;
        if (!opt.b_grid.empty()) {
          apply_set(s, "b=" + std::to_string(b), opt.preset);
        }
        s.v = v;
        specs.push_back(std::move(s));
      }
    }
  }
  const auto reports = linksim::sweep(specs, opt.parallel);
  {
    auto os = open_output(opt, "sweep.csv");
    linksim::write_sweep_csv(os, specs, reports);
  }
  std::printf("sweep: %zu runs written to %s/sweep.csv\n", reports.size(),
              opt.output.c_str());
  return kExitOk;
}

int cmd_optimum(const Options& opt) {
  const linksim::ScenarioSpec spec = resolve_spec(opt);
  const linksim::OptimumReport rep =
      spec.d_av ? linksim::distortion_optimum(spec.table, spec.arrivals,
                                              spec.curve, spec.powers,
                                              spec.channel, *spec.d_av)
                : linksim::p_av_star(spec.table, spec.arrivals, spec.curve,
                                     spec.powers, spec.channel);
  {
    auto os = open_output(opt, "optimum.json");
    os << linksim::optimum_to_json(rep).dump(2) << '\n';
  }
  {
    auto os = open_output(opt, "curves.csv");
    linksim::write_curves_csv(os, rep);
  }
  std::printf("optimum: p_av_star=%.6f r_star=%.3f (r_min=%.3f r_max=%.3f)\n",
              rep.p_av_star, rep.r_star, rep.r_min, rep.r_max);
  return kExitOk;
}

int cmd_preset(const Options& opt) {
  if (opt.preset.empty()) {
    throw std::invalid_argument("preset subcommand requires --preset");
  }
  linksim::ScenarioSpec spec = linksim::load_preset(opt.preset);
  for (const auto& kv : opt.sets) apply_set(spec, kv, opt.preset);
  const auto doc = linksim::scenario_to_json(spec);
  auto os = open_output(opt, "scenario.json");
  os << doc.dump(2) << '\n';
  std::printf("preset %s written to %s/scenario.json\n", opt.preset.c_str(),
              opt.output.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slotted-time compression/transmission scheduling simulator"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool with_grids) {
    sub->add_option("--preset", opt.preset,
                    "built-in scenario: scenario1|scenario2|scenario3");
    sub->add_option("--input", opt.input, "scenario JSON file");
    sub->add_option("--output", opt.output, "output directory (default .)");
    sub->add_option("--set", opt.sets,
                    "override key=value (V, seed, horizon, policy, d_av, b)");
    if (with_grids) {
      sub->add_option("--v-grid", opt.v_grid, "V sweep lo:hi:n (log spaced)");
      sub->add_option("--b-grid", opt.b_grid,
                      "packet-size sweep lo:hi:n (linear; scenario2 only)");
      sub->add_option("--parallel", opt.parallel, "max concurrent runs");
    }
  };

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario");
  add_common(run_cmd, false);
  run_cmd->add_flag("--trace", opt.trace, "emit per-slot trace.csv");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "simulate a family of scenarios");
  add_common(sweep_cmd, true);
  CLI::App* opt_cmd =
      app.add_subcommand("optimum", "offline optimum and h*/g* curves");
  add_common(opt_cmd, false);
  CLI::App* preset_cmd =
      app.add_subcommand("preset", "write a preset scenario JSON");
  add_common(preset_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (opt_cmd->parsed()) return cmd_optimum(opt);
    if (preset_cmd->parsed()) return cmd_preset(opt);
    return kExitConfig;
  } catch (const linksim::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
