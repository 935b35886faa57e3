#ifndef LINKSIM_SIMULATOR_HPP
#define LINKSIM_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "linksim/domain.hpp"
#include "linksim/optimizer.hpp"

namespace linksim {

struct SlotRecord {
  std::uint64_t t = 0;
  int a = 0;
  int s = 0;
  int k = 0;
  double p_tran = 0.0;
  double r_bits = 0.0;      // compressor output R
  double p_comp = 0.0;
  double distortion = 0.0;  // D
  double mu = 0.0;          // offered rate C(P_tran, s)
  double u_before = 0.0;    // actual backlog at slot start
  double u_after = 0.0;     // actual backlog after the update
  double x = 0.0;           // virtual distortion queue after the update
};

struct RunAverages {
  double p_tot = 0.0;
  double p_comp = 0.0;
  double p_tran = 0.0;
  double u_actual = 0.0;
  double u_eff = 0.0;
  double distortion = 0.0;
};

struct RunReport {
  std::uint64_t slots = 0;
  PolicyKind policy = PolicyKind::kDynamic;
  double v = 0.0;
  std::uint64_t seed = 0;
  double u_thresh = 0.0;  // place-holder offset applied in this run

  RunAverages avg;
  RunAverages second_half;  // averages over the last horizon/2 slots
  double final_u = 0.0;
  double final_x = 0.0;
  double min_u_eff = 0.0;  // min over slot starts of the effective backlog
  double sem_p_tot = 0.0;  // batch-means standard error
  double sem_distortion = 0.0;
  std::uint64_t decision_fingerprint = 0;  // hash of the (k, P_tran) sequence
  bool queue_nonneg_ok = true;
  bool output_within_ab_ok = true;  // R(t) <= b*A(t) on every slot

  // Offline-optimum audit. power_bound is P* + B/V (P* + C/V in distortion
  // mode); backlog_bound is (B + V(P_max+phi_max)) / (r_max - r_min), with C
  // and r_d_min substituted in distortion mode.
  bool theory_available = false;
  bool feasibility_warning = false;
  double p_av_star = 0.0;
  double r_star = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double b_const = 0.0;
  double phi_max = 0.0;
  std::optional<double> c_const;
  std::optional<double> r_d_min;
  double power_bound = 0.0;
  double backlog_bound = 0.0;
  bool audit_applicable = false;
  bool audit_power_ok = true;
  bool audit_backlog_ok = true;
  bool audit_distortion_ok = true;
};

// Incremental stepper: owns the rng streams and the link state.
class Simulation {
 public:
  explicit Simulation(ScenarioSpec spec, double initial_backlog = 0.0);

  SlotRecord step();                   // samples (a, s) from the streams
  SlotRecord step_with(int a, int s);  // injected environment

  const LinkState& state() const { return state_; }
  const ScenarioSpec& spec() const { return spec_; }
  double u_thresh() const { return state_.u_thresh; }

 private:
  ScenarioSpec spec_;
  LinkState state_;
  RngStream arrivals_rng_, channel_rng_, compression_rng_;
  std::vector<double> khat_power_;  // per state: most efficient power level
  std::vector<double> khat_rate_;   // per state: rate at that power
  std::uint64_t t_ = 0;
};

// Runs the scenario from U(0) = initial_backlog (0 in normal operation;
// nonzero initial backlog exists for the place-holder comparison runs).
// Fills the offline-optimum audit fields when the scenario is feasible.
RunReport run(const ScenarioSpec& spec,
              std::vector<SlotRecord>* trace = nullptr,
              double initial_backlog = 0.0);

// Independent runs, reports in input order. parallelism <= 1 runs inline.
std::vector<RunReport> sweep(const std::vector<ScenarioSpec>& specs,
                             int parallelism = 1);

}  // namespace linksim

#endif  // LINKSIM_SIMULATOR_HPP
