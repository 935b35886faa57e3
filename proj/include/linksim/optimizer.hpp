#ifndef LINKSIM_OPTIMIZER_HPP
#define LINKSIM_OPTIMIZER_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linksim/domain.hpp"

namespace linksim {

// Thrown when the scenario cannot be stabilized (r_min > r_max) or the
// distortion budget cannot be met.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Randomized policy independent of backlog: gamma[a][k] is the probability of
// option k given a arrivals; power_mix[s] lists (power, probability) pairs per
// channel state (at most 3 support points).
struct StationaryPolicy {
  std::vector<std::vector<double>> gamma;
  std::vector<std::vector<std::pair<double, double>>> power_mix;
};

struct CurvePoint {
  double r = 0.0;
  double h = 0.0;
  double g = 0.0;
};

struct BoundConstants {
  double b_const = 0.0;    // (sigma^2 + E[C(P_max,S)^2]) / 2
  double phi_max = 0.0;    // E[max_k phi(A,k)]
  double sigma_sq = 0.0;   // b^2 E[A^2]
  double delta_sq = 0.0;   // max E[D^2]
  std::optional<double> c_const;  // (d_av^2 + delta^2 + sigma^2 + E[C^2]) / 2
};

struct OptimumReport {
  double r_min = 0.0;
  double r_max = 0.0;
  double raw_rate = 0.0;  // b*E[A]
  std::optional<double> r_d_min;
  std::optional<double> d_av;

  double r_star = 0.0;
  double p_av_star = 0.0;
  double h_at_star = 0.0;
  double g_at_star = 0.0;
  bool feasibility_warning = false;  // r_min == r_max (degenerate interval)

  StationaryPolicy policy;
  BoundConstants bounds;
  std::vector<CurvePoint> curve_samples;
};

// E[min_k m(A, k)]: the least average compressor output rate.
double compute_r_min(const CompressionTable& table, const ArrivalSpec& arrivals);

// E[C(P_max, S)]: the largest average transmission rate.
double compute_r_max(const RatePowerCurve& curve, const PowerSet& powers,
                     const ChannelSpec& channel);

struct HStarResult {
  double power = 0.0;
  double avg_bits = 0.0;
  double avg_distortion = 0.0;
  std::vector<std::vector<double>> gamma;
};

// Minimum average compression power over randomized policies with average
// output at most r, for r in [r_min, b*E[A]]. Solved by a parametric
// multiplier sweep over the finite vertex set with adjacent-vertex mixing.
HStarResult h_star(double r, const CompressionTable& table,
                   const ArrivalSpec& arrivals);

struct GStarResult {
  double power = 0.0;
  double avg_rate = 0.0;
  std::vector<std::vector<std::pair<double, double>>> power_mix;
};

// Minimum average transmission power over per-state randomized power choices
// with average rate at least r, for r in [0, r_max]. Static logarithmic
// curves over an interval power set use the exact inverse C^{-1}(r).
GStarResult g_star(double r, const RatePowerCurve& curve,
                   const PowerSet& powers, const ChannelSpec& channel);

// Least average compressor output achievable with average distortion <= d_av.
double compute_r_d_min(const CompressionTable& table,
                       const ArrivalSpec& arrivals, double d_av);

// h* with the additional constraint E[d] <= d_av (partial dual in the
// distortion multiplier, inner sweep as in h_star).
HStarResult h_d_star(double r, const CompressionTable& table,
                     const ArrivalSpec& arrivals, double d_av);

BoundConstants bound_constants(const CompressionTable& table,
                               const ArrivalSpec& arrivals,
                               const RatePowerCurve& curve,
                               const PowerSet& powers,
                               const ChannelSpec& channel,
                               std::optional<double> d_av = std::nullopt);

// Minimize h*(r) + g*(r) over r_min <= r <= min(r_max, b*E[A]).
OptimumReport p_av_star(const CompressionTable& table,
                        const ArrivalSpec& arrivals,
                        const RatePowerCurve& curve, const PowerSet& powers,
                        const ChannelSpec& channel);

// Minimize h_d*(r) + g*(r) over r_d_min <= r <= min(r_max, b*E[A]).
OptimumReport distortion_optimum(const CompressionTable& table,
                                 const ArrivalSpec& arrivals,
                                 const RatePowerCurve& curve,
                                 const PowerSet& powers,
                                 const ChannelSpec& channel, double d_av);

}  // namespace linksim

#endif  // LINKSIM_OPTIMIZER_HPP
