#ifndef LINKSIM_SCENARIO_JSON_HPP
#define LINKSIM_SCENARIO_JSON_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "linksim/domain.hpp"
#include "linksim/optimizer.hpp"
#include "linksim/simulator.hpp"

namespace linksim {

inline constexpr int kSchemaVersion = 1;

// Scenario documents. The schema is documented in the README; field names
// follow the domain types (p_A, b, N, pi_s, m, phi, d, V, d_av, ...).
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

// Parses a scenario file; JSON syntax errors are reported with line/column.
ScenarioSpec load_scenario_file(const std::string& path);
nlohmann::json parse_json_file(const std::string& path);

nlohmann::json report_to_json(const RunReport& rep);
nlohmann::json optimum_to_json(const OptimumReport& rep);

// CSV emitters; all doubles are written with "%.17g" so identical runs
// produce byte-identical rows.
void write_trace_csv(std::ostream& os, const std::vector<SlotRecord>& trace);
void write_sweep_csv(std::ostream& os, const std::vector<ScenarioSpec>& specs,
                     const std::vector<RunReport>& reports);
void write_curves_csv(std::ostream& os, const OptimumReport& rep);

}  // namespace linksim

#endif  // LINKSIM_SCENARIO_JSON_HPP
