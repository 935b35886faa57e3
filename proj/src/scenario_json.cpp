#include "linksim/scenario_json.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace linksim {

using nlohmann::json;

namespace {

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json noise_to_json(const NoiseSpec& ns) {
  if (ns.kind == NoiseKind::kDeterministic) {
    return json{{"type", "deterministic"}};
  }
  return json{{"type", "uniform"}, {"half_width", ns.half_width}};
}

NoiseSpec noise_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "deterministic") return NoiseSpec::deterministic();
  if (type == "uniform") {
    return NoiseSpec::uniform(j.at("half_width").get<double>());
  }
  throw std::invalid_argument("unknown noise type: " + type);
}

json noise_grid_to_json(const CompressionTable& t,
                        const NoiseSpec& (CompressionTable::*cell)(int, int)
                            const) {
  // Collapse to a single object when every cell agrees.
  const NoiseSpec& first = (t.*cell)(0, 0);
  bool uniform_grid = true;
  for (int a = 0; a <= t.max_count() && uniform_grid; ++a) {
    for (int k = 0; k < t.num_options(); ++k) {
      const NoiseSpec& ns = (t.*cell)(a, k);
      if (ns.kind != first.kind || ns.half_width != first.half_width) {
        uniform_grid = false;
        break;
      }
    }
  }
  if (uniform_grid) return noise_to_json(first);
  json rows = json::array();
  for (int a = 0; a <= t.max_count(); ++a) {
    json row = json::array();
    for (int k = 0; k < t.num_options(); ++k) {
      row.push_back(noise_to_json((t.*cell)(a, k)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<NoiseSpec>> noise_grid_from_json(const json& j) {
  if (j.is_null()) return {};
  if (j.is_object()) return {{noise_from_json(j)}};
  std::vector<std::vector<NoiseSpec>> grid;
  for (const auto& row : j) {
    grid.emplace_back();
    for (const auto& cell : row) grid.back().push_back(noise_from_json(cell));
  }
  return grid;
}

json curve_to_json(const RatePowerCurve& curve) {
  if (const auto* c = curve.as_two_level()) {
    return json{{"type", "two_level"}, {"p_on", c->p_on},
                {"rate_on", c->rate_on}};
  }
  if (const auto* c = curve.as_log()) {
    return json{{"type", "logarithmic"}, {"alpha", c->alpha},
                {"beta", c->beta}};
  }
  const auto* tbl = curve.as_state_table();
  json states = json::array();
  for (const auto& pts : tbl->points) {
    json nodes = json::array();
    for (const auto& [p, rate] : pts) nodes.push_back(json::array({p, rate}));
    states.push_back(std::move(nodes));
  }
  return json{{"type", "per_state_table"}, {"points", std::move(states)}};
}

RatePowerCurve curve_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "two_level") {
    return RatePowerCurve(TwoLevelCurve{j.at("p_on").get<double>(),
                                        j.at("rate_on").get<double>()});
  }
  if (type == "logarithmic") {
    return RatePowerCurve(LogCurve{j.at("alpha").get<double>(),
                                   j.at("beta").get<double>()});
  }
  if (type == "per_state_table") {
    StateTableCurve tbl;
    for (const auto& state : j.at("points")) {
      tbl.points.emplace_back();
      for (const auto& node : state) {
        tbl.points.back().emplace_back(node.at(0).get<double>(),
                                       node.at(1).get<double>());
      }
    }
    return RatePowerCurve(std::move(tbl));
  }
  throw std::invalid_argument("unknown curve type: " + type);
}

json powers_to_json(const PowerSet& ps) {
  if (ps.is_interval()) {
    return json{{"type", "interval"},
                {"p_max", ps.p_max()},
                {"grid_points", ps.grid_points()}};
  }
  return json{{"type", "discrete"}, {"levels", ps.candidates()}};
}

PowerSet powers_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete") {
    return PowerSet::discrete(j.at("levels").get<std::vector<double>>());
  }
  if (type == "interval") {
    const int grid = j.contains("grid_points")
                         ? j.at("grid_points").get<int>()
                         : PowerSet::kDefaultGridPoints;
    return PowerSet::interval(j.at("p_max").get<double>(), grid);
  }
  throw std::invalid_argument("unknown power set type: " + type);
}

}  // namespace

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["arrivals"] = {{"p_A", spec.arrivals.pmf()},
                   {"b", spec.arrivals.packet_bits()},
                   {"N", spec.arrivals.max_count()}};
  j["channel"] = {{"pi_s", spec.channel.pmf()}};
  if (!spec.channel.names().empty()) {
    j["channel"]["states"] = spec.channel.names();
  }
  j["curve"] = curve_to_json(spec.curve);
  j["power_set"] = powers_to_json(spec.powers);

  json comp;
  comp["K"] = spec.table.num_options() - 1;
  json m = json::array(), phi = json::array(), d = json::array();
  for (int a = 0; a <= spec.table.max_count(); ++a) {
    json mr = json::array(), pr = json::array(), dr = json::array();
    for (int k = 0; k < spec.table.num_options(); ++k) {
      mr.push_back(spec.table.mean_bits(a, k));
      pr.push_back(spec.table.mean_power(a, k));
      dr.push_back(spec.table.mean_distortion(a, k));
    }
    m.push_back(std::move(mr));
    phi.push_back(std::move(pr));
    d.push_back(std::move(dr));
  }
  comp["m"] = std::move(m);
  comp["phi"] = std::move(phi);
  comp["d"] = std::move(d);
  comp["output_noise"] =
      noise_grid_to_json(spec.table, &CompressionTable::bits_noise);
  comp["power_noise"] =
      noise_grid_to_json(spec.table, &CompressionTable::power_noise);
  comp["distortion_noise"] =
      noise_grid_to_json(spec.table, &CompressionTable::distortion_noise);
  j["compression"] = std::move(comp);

  j["V"] = spec.v;
  j["d_av"] = spec.d_av ? json(*spec.d_av) : json(nullptr);
  j["horizon"] = spec.horizon;
  j["seed"] = spec.seed;
  j["policy"] = to_string(spec.policy);
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.contains("schema_version")) {
    throw std::invalid_argument("scenario JSON: missing schema_version");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument("scenario JSON: unsupported schema_version");
  }
  const json& ja = j.at("arrivals");
  ArrivalSpec arrivals(ja.at("p_A").get<std::vector<double>>(),
                       ja.at("b").get<double>());
  if (ja.contains("N") && ja.at("N").get<int>() != arrivals.max_count()) {
    throw std::invalid_argument("scenario JSON: N disagrees with p_A length");
  }
  const json& jc = j.at("channel");
  ChannelSpec channel(jc.at("pi_s").get<std::vector<double>>(),
                      jc.contains("states")
                          ? jc.at("states").get<std::vector<std::string>>()
                          : std::vector<std::string>{});

  const json& jt = j.at("compression");
  CompressionTable table(
      ja.at("b").get<double>(),
      jt.at("m").get<std::vector<std::vector<double>>>(),
      jt.at("phi").get<std::vector<std::vector<double>>>(),
      jt.at("d").get<std::vector<std::vector<double>>>(),
      noise_grid_from_json(jt.contains("output_noise") ? jt.at("output_noise")
                                                       : json(nullptr)),
      noise_grid_from_json(jt.contains("power_noise") ? jt.at("power_noise")
                                                      : json(nullptr)),
      noise_grid_from_json(jt.contains("distortion_noise")
                               ? jt.at("distortion_noise")
                               : json(nullptr)));
  if (jt.contains("K") &&
      jt.at("K").get<int>() != table.num_options() - 1) {
    throw std::invalid_argument("scenario JSON: K disagrees with table width");
  }

  const json& jp = j.at("policy");
  auto policy = policy_from_string(jp.get<std::string>());
  if (!policy) {
    throw std::invalid_argument("scenario JSON: unknown policy " +
                                jp.get<std::string>());
  }

  ScenarioSpec spec{std::move(arrivals),
                    std::move(channel),
                    curve_from_json(j.at("curve")),
                    powers_from_json(j.at("power_set")),
                    std::move(table),
                    j.at("V").get<double>(),
                    j.at("d_av").is_null()
                        ? std::optional<double>{}
                        : std::optional<double>{j.at("d_av").get<double>()},
                    j.at("horizon").get<std::uint64_t>(),
                    j.at("seed").get<std::uint64_t>(),
                    *policy};
  spec.validate();
  return spec;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line/column pair.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte, text.size());
    for (std::size_t i = 0; i + 1 <= stop && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ":" +
                                std::to_string(col) + ": " + e.what());
  }
}

ScenarioSpec load_scenario_file(const std::string& path) {
  return scenario_from_json(parse_json_file(path));
}

json report_to_json(const RunReport& rep) {
  json j;
  j["slots"] = rep.slots;
  j["policy"] = to_string(rep.policy);
  j["V"] = rep.v;
  j["seed"] = rep.seed;
  j["u_thresh"] = rep.u_thresh;
  auto avg = [](const RunAverages& a) {
    return json{{"p_tot", a.p_tot},     {"p_comp", a.p_comp},
                {"p_tran", a.p_tran},   {"u", a.u_actual},
                {"u_eff", a.u_eff},     {"d", a.distortion}};
  };
  j["avg"] = avg(rep.avg);
  j["second_half"] = avg(rep.second_half);
  j["final_u"] = rep.final_u;
  j["final_x"] = rep.final_x;
  j["min_u_eff"] = rep.min_u_eff;
  j["sem_p_tot"] = rep.sem_p_tot;
  j["sem_d"] = rep.sem_distortion;
  j["decision_fingerprint"] = rep.decision_fingerprint;
  j["queue_nonneg_ok"] = rep.queue_nonneg_ok;
  j["output_within_ab_ok"] = rep.output_within_ab_ok;
  j["theory_available"] = rep.theory_available;
  if (rep.theory_available) {
    j["feasibility_warning"] = rep.feasibility_warning;
    j["p_av_star"] = rep.p_av_star;
    j["r_star"] = rep.r_star;
    j["r_min"] = rep.r_min;
    j["r_max"] = rep.r_max;
    j["B"] = rep.b_const;
    j["phi_max"] = rep.phi_max;
    if (rep.c_const) j["C"] = *rep.c_const;
    if (rep.r_d_min) j["r_d_min"] = *rep.r_d_min;
    j["power_bound"] = rep.power_bound;
    j["backlog_bound"] = rep.backlog_bound;
    j["audit_applicable"] = rep.audit_applicable;
    if (rep.audit_applicable) {
      j["audit_power_ok"] = rep.audit_power_ok;
      j["audit_backlog_ok"] = rep.audit_backlog_ok;
      j["audit_distortion_ok"] = rep.audit_distortion_ok;
    }
  }
  return j;
}

json optimum_to_json(const OptimumReport& rep) {
  json j;
  j["r_min"] = rep.r_min;
  j["r_max"] = rep.r_max;
  j["raw_rate"] = rep.raw_rate;
  if (rep.r_d_min) j["r_d_min"] = *rep.r_d_min;
  if (rep.d_av) j["d_av"] = *rep.d_av;
  j["r_star"] = rep.r_star;
  j["p_av_star"] = rep.p_av_star;
  j["h_at_star"] = rep.h_at_star;
  j["g_at_star"] = rep.g_at_star;
  j["feasibility_warning"] = rep.feasibility_warning;
  j["B"] = rep.bounds.b_const;
  j["phi_max"] = rep.bounds.phi_max;
  j["sigma_sq"] = rep.bounds.sigma_sq;
  j["delta_sq"] = rep.bounds.delta_sq;
  if (rep.bounds.c_const) j["C"] = *rep.bounds.c_const;
  j["policy"] = {{"gamma", rep.policy.gamma}};
  json mixes = json::array();
  for (const auto& mix : rep.policy.power_mix) {
    json entries = json::array();
    for (const auto& [p, prob] : mix) {
      entries.push_back(json::array({p, prob}));
    }
    mixes.push_back(std::move(entries));
  }
  j["policy"]["power_mix"] = std::move(mixes);
  return j;
}

void write_trace_csv(std::ostream& os, const std::vector<SlotRecord>& trace) {
  os << "t,a,s,k,p_tran,r_bits,p_comp,d,mu,u_before,u_after,x\n";
  for (const auto& r : trace) {
    os << r.t << ',' << r.a << ',' << r.s << ',' << r.k << ','
       << g17(r.p_tran) << ',' << g17(r.r_bits) << ',' << g17(r.p_comp) << ','
       << g17(r.distortion) << ',' << g17(r.mu) << ',' << g17(r.u_before)
       << ',' << g17(r.u_after) << ',' << g17(r.x) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<ScenarioSpec>& specs,
                     const std::vector<RunReport>& reports) {
  os << "index,policy,V,b,raw_rate,seed,horizon,p_tot,p_comp,p_tran,u_avg,"
        "u_eff_avg,d_avg,u_thresh,p_av_star,power_bound,backlog_bound,"
        "theory_available\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const RunReport& r = reports[i];
    const ScenarioSpec& s = specs[i];
    os << i << ',' << to_string(r.policy) << ',' << g17(r.v) << ','
       << g17(s.arrivals.packet_bits()) << ',' << g17(s.arrivals.raw_rate())
       << ',' << r.seed << ',' << r.slots << ',' << g17(r.avg.p_tot) << ','
       << g17(r.avg.p_comp) << ',' << g17(r.avg.p_tran) << ','
       << g17(r.avg.u_actual) << ',' << g17(r.avg.u_eff) << ','
       << g17(r.avg.distortion) << ',' << g17(r.u_thresh) << ','
       << g17(r.theory_available ? r.p_av_star : 0.0) << ','
       << g17(r.theory_available ? r.power_bound : 0.0) << ','
       << g17(r.theory_available ? r.backlog_bound : 0.0) << ','
       << (r.theory_available ? 1 : 0) << '\n';
  }
}

void write_curves_csv(std::ostream& os, const OptimumReport& rep) {
  os << "r,h_star,g_star,sum\n";
  for (const auto& pt : rep.curve_samples) {
    os << g17(pt.r) << ',' << g17(pt.h) << ',' << g17(pt.g) << ','
       << g17(pt.h + pt.g) << '\n';
  }
}

}  // namespace linksim
