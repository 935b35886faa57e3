#ifndef LINKSIM_PRESETS_HPP
#define LINKSIM_PRESETS_HPP

#include <optional>
#include <string>

#include "linksim/domain.hpp"

namespace linksim {

// Built-in experiment presets.
//   scenario1 — static two-level link, binomial arrivals, one expensive
//               compression option; compression never pays off.
//   scenario2 — same link with a larger packet size so compression is needed
//               for stability (packet size is the sweep knob).
//   scenario3 — logarithmic rate-power curve with trace-derived compression
//               ratios; compression saves transmission energy.
ScenarioSpec load_preset(const std::string& id);

// scenario2 with an explicit packet size in [256, 1024].
ScenarioSpec scenario2_with_packet_bits(double b);

bool is_known_preset(const std::string& id);

}  // namespace linksim

#endif  // LINKSIM_PRESETS_HPP
