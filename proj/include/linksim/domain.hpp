#ifndef LINKSIM_DOMAIN_HPP
#define LINKSIM_DOMAIN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "linksim/rng.hpp"

namespace linksim {

// ---------------------------------------------------------------------------
// Arrival process: packet count a in {0..N}, each packet is `packet_bits` long.
// ---------------------------------------------------------------------------
class ArrivalSpec {
 public:
  ArrivalSpec(std::vector<double> pmf, double packet_bits);

  static ArrivalSpec binomial(int n, double p, double packet_bits);

  int max_count() const { return static_cast<int>(pmf_.size()) - 1; }  // N
  double packet_bits() const { return packet_bits_; }                  // b
  const std::vector<double>& pmf() const { return pmf_; }

  double mean() const;           // E[A]
  double second_moment() const;  // E[A^2]
  double raw_rate() const { return packet_bits_ * mean(); }  // b*E[A]

  int sample(RngStream& rng) const;

 private:
  std::vector<double> pmf_;
  double packet_bits_;
};

// ---------------------------------------------------------------------------
// Channel state process over a finite state set; states are indices.
// ---------------------------------------------------------------------------
class ChannelSpec {
 public:
  explicit ChannelSpec(std::vector<double> pmf,
                       std::vector<std::string> names = {});

  // Single-state channel (the static case).
  static ChannelSpec single(std::string name = "ON");

  int num_states() const { return static_cast<int>(pmf_.size()); }
  const std::vector<double>& pmf() const { return pmf_; }
  const std::vector<std::string>& names() const { return names_; }

  int sample(RngStream& rng) const;

 private:
  std::vector<double> pmf_;
  std::vector<std::string> names_;  // empty or one per state
};

// ---------------------------------------------------------------------------
// Transmission power domain.
// ---------------------------------------------------------------------------
class PowerSet {
 public:
  static PowerSet discrete(std::vector<double> levels);
  static PowerSet interval(double p_max, int grid_points = kDefaultGridPoints);

  static constexpr int kDefaultGridPoints = 1024;

  bool is_interval() const { return is_interval_; }
  double p_max() const { return candidates_.back(); }
  int grid_points() const { return static_cast<int>(candidates_.size()); }

  // Sorted ascending, always starts at 0 and ends at p_max. For an interval
  // set this is the search grid; the set itself is the full continuum.
  const std::vector<double>& candidates() const { return candidates_; }

  bool contains(double p) const;

 private:
  PowerSet() = default;
  bool is_interval_ = false;
  std::vector<double> candidates_;
};

// ---------------------------------------------------------------------------
// Rate-power curves C(P, s).
// ---------------------------------------------------------------------------

// Step curve: rate_on bits/slot at any power >= p_on, zero below.
struct TwoLevelCurve {
  double p_on = 1.0;
  double rate_on = 0.0;
};

// C(P) = alpha * ln(1 + beta * P), state independent.
struct LogCurve {
  double alpha = 0.0;
  double beta = 0.0;
};

// Per channel state, explicit (power, rate) nodes with linear interpolation.
struct StateTableCurve {
  // points[s] sorted by power, first node must be (0, 0).
  std::vector<std::vector<std::pair<double, double>>> points;
};

class RatePowerCurve {
 public:
  explicit RatePowerCurve(TwoLevelCurve c) : kind_(c) { validate(); }
  explicit RatePowerCurve(LogCurve c) : kind_(c) { validate(); }
  explicit RatePowerCurve(StateTableCurve c) : kind_(std::move(c)) {
    validate();
  }

  // C(P, s). `state` is checked; P is assumed inside the power set
  // (use eval_rate() for the checked entry point).
  double eval(double p, int state) const;

  bool is_logarithmic() const {
    return std::holds_alternative<LogCurve>(kind_);
  }
  const LogCurve* as_log() const { return std::get_if<LogCurve>(&kind_); }
  const TwoLevelCurve* as_two_level() const {
    return std::get_if<TwoLevelCurve>(&kind_);
  }
  const StateTableCurve* as_state_table() const {
    return std::get_if<StateTableCurve>(&kind_);
  }

  // Number of states the curve distinguishes; 0 means state independent.
  int table_states() const;

  // Largest slope of C with respect to P from the origin (beta_max):
  // rate_on/p_on for a two-level curve, alpha*beta for the logarithmic one,
  // and the max secant slope through (0,0) for tabulated curves.
  double max_slope() const;

 private:
  void validate() const;
  std::variant<TwoLevelCurve, LogCurve, StateTableCurve> kind_;
};

// Checked evaluation: domain error on unknown state or P outside [0, P_max].
double eval_rate(const RatePowerCurve& curve, const PowerSet& powers, double p,
                 int state);

// max over states of C(P_max, s).
double mu_max(const RatePowerCurve& curve, const PowerSet& powers,
              const ChannelSpec& channel);

// ---------------------------------------------------------------------------
// Compression model: mean tables plus per-cell output randomness.
// ---------------------------------------------------------------------------
enum class NoiseKind { kDeterministic, kUniformAroundMean };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kDeterministic;
  double half_width = 0.0;  // relative: support is mean*(1 +- half_width)

  static NoiseSpec deterministic() { return {}; }
  static NoiseSpec uniform(double half_width) {
    return {NoiseKind::kUniformAroundMean, half_width};
  }
};

struct CompressionSample {
  double bits = 0.0;        // R
  double power = 0.0;       // P_comp
  double distortion = 0.0;  // D
};

class CompressionTable {
 public:
  // All matrices are (N+1) x (K+1), indexed [a][k]. Row a = 0 is forced to
  // zero output/power/distortion; column k = 0 must be (a*b, 0, 0).
  // Noise grids may be empty (all deterministic), a single broadcast value,
  // or full (N+1) x (K+1).
  CompressionTable(double packet_bits,
                   std::vector<std::vector<double>> mean_bits,
                   std::vector<std::vector<double>> mean_power,
                   std::vector<std::vector<double>> mean_distortion,
                   std::vector<std::vector<NoiseSpec>> bits_noise = {},
                   std::vector<std::vector<NoiseSpec>> power_noise = {},
                   std::vector<std::vector<NoiseSpec>> distortion_noise = {});

  int max_count() const { return static_cast<int>(mean_bits_.size()) - 1; }
  int num_options() const {  // K+1
    return static_cast<int>(mean_bits_.front().size());
  }
  double packet_bits() const { return packet_bits_; }

  double mean_bits(int a, int k) const { return mean_bits_[a][k]; }        // m
  double mean_power(int a, int k) const { return mean_power_[a][k]; }      // phi
  double mean_distortion(int a, int k) const {                             // d
    return mean_distortion_[a][k];
  }
  const NoiseSpec& bits_noise(int a, int k) const { return bits_noise_[a][k]; }
  const NoiseSpec& power_noise(int a, int k) const {
    return power_noise_[a][k];
  }
  const NoiseSpec& distortion_noise(int a, int k) const {
    return distortion_noise_[a][k];
  }

  // max over a >= 1, k of E[D^2 | a, k].
  double delta_sq() const;

  bool all_lossless() const;  // every d(a,k) == 0

 private:
  double packet_bits_;
  std::vector<std::vector<double>> mean_bits_, mean_power_, mean_distortion_;
  std::vector<std::vector<NoiseSpec>> bits_noise_, power_noise_,
      distortion_noise_;
};

// Draws (R, P_comp, D) for the observed arrival count and chosen option.
// k = 0 returns (a*b, 0, 0) exactly; a = 0 returns (0, 0, 0).
CompressionSample sample_compression(const CompressionTable& table, int a,
                                     int k, RngStream& rng);

// Spec-named wrappers over the samplers above.
inline int sample_arrival(const ArrivalSpec& spec, RngStream& rng) {
  return spec.sample(rng);
}
inline int sample_channel(const ChannelSpec& spec, RngStream& rng) {
  return spec.sample(rng);
}

// ---------------------------------------------------------------------------
// Scenario description and per-link state.
// ---------------------------------------------------------------------------
enum class PolicyKind {
  kDynamic,
  kDynamicWithPlaceholder,
  kDynamicDistortion,
  kNoCompression,
  kKhatBaseline,
};

const char* to_string(PolicyKind kind);
std::optional<PolicyKind> policy_from_string(const std::string& s);

struct ScenarioSpec {
  ArrivalSpec arrivals;
  ChannelSpec channel;
  RatePowerCurve curve;
  PowerSet powers;
  CompressionTable table;
  double v = 0.0;                 // tradeoff weight, bits^2 per power unit
  std::optional<double> d_av;     // average distortion budget per slot
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::kDynamic;

  // Cross-field consistency checks; throws std::invalid_argument.
  void validate() const;
};

struct LinkState {
  // We keep the effective (place-holder) backlog as the primary state so
  // that runs with and without the offset execute identical arithmetic.
  double u_eff = 0.0;    // U + U_thresh
  double u_thresh = 0.0;
  double x = 0.0;        // virtual distortion queue

  double actual() const { return u_eff - u_thresh; }
  double effective() const { return u_eff; }
};

}  // namespace linksim

#endif  // LINKSIM_DOMAIN_HPP
