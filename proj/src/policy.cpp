#include "linksim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linksim {

int choose_compression(double u_eff, int a, const CompressionTable& table,
                       double v) {
  int best = 0;
  double best_obj = u_eff * table.mean_bits(a, 0) + v * table.mean_power(a, 0);
  for (int k = 1; k < table.num_options(); ++k) {
    const double obj =
        u_eff * table.mean_bits(a, k) + v * table.mean_power(a, k);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  return best;
}

int choose_compression_distortion(double u_eff, double x, int a,
                                  const CompressionTable& table, double v) {
  int best = 0;
  double best_obj = u_eff * table.mean_bits(a, 0) +
                    x * table.mean_distortion(a, 0) +
                    v * table.mean_power(a, 0);
  for (int k = 1; k < table.num_options(); ++k) {
    const double obj = u_eff * table.mean_bits(a, k) +
                       x * table.mean_distortion(a, k) +
                       v * table.mean_power(a, k);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  return best;
}

double choose_transmission(double u_eff, int state,
                           const RatePowerCurve& curve, const PowerSet& powers,
                           double v) {
  if (const LogCurve* log = curve.as_log(); log && powers.is_interval()) {
    const double p = u_eff * log->alpha / v - 1.0 / log->beta;
    return std::clamp(p, 0.0, powers.p_max());
  }
  double best_p = 0.0;
  double best_obj = 0.0;  // P = 0 always yields objective 0
  for (double p : powers.candidates()) {
    const double obj = u_eff * curve.eval(p, state) - v * p;
    if (obj > best_obj) {
      best_obj = obj;
      best_p = p;
    }
  }
  return best_p;
}

std::vector<double> compression_objectives(double u_eff, double x, int a,
                                           const CompressionTable& table,
                                           double v) {
  std::vector<double> obj(table.num_options());
  for (int k = 0; k < table.num_options(); ++k) {
    obj[k] = u_eff * table.mean_bits(a, k) + x * table.mean_distortion(a, k) +
             v * table.mean_power(a, k);
  }
  return obj;
}

std::vector<double> transmission_objectives(double u_eff, int state,
                                            const RatePowerCurve& curve,
                                            const PowerSet& powers, double v) {
  std::vector<double> obj;
  obj.reserve(powers.candidates().size());
  for (double p : powers.candidates()) {
    obj.push_back(u_eff * curve.eval(p, state) - v * p);
  }
  return obj;
}

Decision decide(double u_eff, double x, int a, int state,
                const CompressionTable& table, const RatePowerCurve& curve,
                const PowerSet& powers, double v, bool use_distortion) {
  Decision d;
  d.k = use_distortion
            ? choose_compression_distortion(u_eff, x, a, table, v)
            : choose_compression(u_eff, a, table, v);
  d.p_tran = choose_transmission(u_eff, state, curve, powers, v);
  d.compression_objectives =
      compression_objectives(u_eff, use_distortion ? x : 0.0, a, table, v);
  return d;
}

double placeholder_threshold_linear_cap(double v, double beta_max,
                                        double mu_max) {
  if (!(beta_max > 0.0) || !(mu_max > 0.0)) {
    throw std::invalid_argument(
        "placeholder_threshold_linear_cap: beta_max and mu_max must be > 0");
  }
  return std::max(0.0, v / beta_max - mu_max);
}

double placeholder_threshold_log(double v, double alpha, double beta,
                                 double p_max) {
  if (!(v > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(p_max > 0.0)) {
    throw std::invalid_argument(
        "placeholder_threshold_log: all arguments must be positive");
  }
  // Transmission is idle below U = V/(alpha*beta) and saturated above
  // V/(alpha*beta) + V*P_max/alpha; the interior critical point sits at
  // U = alpha.
  const double lo = v / (alpha * beta);
  const double hi = lo + v * p_max / alpha;
  if (lo <= alpha && alpha <= hi) {
    return std::max(0.0, alpha - alpha * std::log(alpha * alpha * beta / v));
  }
  const double rate_cap = alpha * std::log1p(beta * p_max);
  return std::max(0.0, std::min(lo, hi - rate_cap));
}

double placeholder_threshold(const ScenarioSpec& spec) {
  if (spec.policy != PolicyKind::kDynamicWithPlaceholder) return 0.0;
  if (const LogCurve* log = spec.curve.as_log()) {
    return placeholder_threshold_log(spec.v, log->alpha, log->beta,
                                     spec.powers.p_max());
  }
  return placeholder_threshold_linear_cap(
      spec.v, spec.curve.max_slope(),
      mu_max(spec.curve, spec.powers, spec.channel));
}

int baseline_khat(int a, const CompressionTable& table, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("baseline_khat: alpha must be positive");
  }
  int best = 0;
  double best_obj = table.mean_power(a, 0) + table.mean_bits(a, 0) / alpha;
  for (int k = 1; k < table.num_options(); ++k) {
    const double obj = table.mean_power(a, k) + table.mean_bits(a, k) / alpha;
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  return best;
}

}  // namespace linksim
