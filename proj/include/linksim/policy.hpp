#ifndef LINKSIM_POLICY_HPP
#define LINKSIM_POLICY_HPP

#include <vector>

#include "linksim/domain.hpp"

namespace linksim {

// Per-slot control decision. `compression_objectives` holds the evaluated
// objective for every option k (filled by the audit helpers below).
struct Decision {
  int k = 0;
  double p_tran = 0.0;
  std::vector<double> compression_objectives;
};

// argmin over k of U_eff*m(a,k) + V*phi(a,k); ties go to the smallest k.
int choose_compression(double u_eff, int a, const CompressionTable& table,
                       double v);

// argmin over k of U_eff*m(a,k) + X*d(a,k) + V*phi(a,k).
int choose_compression_distortion(double u_eff, double x, int a,
                                  const CompressionTable& table, double v);

// argmax over P of U_eff*C(P,s) - V*P. Interval power sets with a logarithmic
// curve use the exact closed form clamp(U_eff*alpha/V - 1/beta, 0, P_max);
// everything else searches the candidate grid. Ties go to the smallest P.
double choose_transmission(double u_eff, int state, const RatePowerCurve& curve,
                           const PowerSet& powers, double v);

// Objective vectors for audit/testing.
std::vector<double> compression_objectives(double u_eff, double x, int a,
                                           const CompressionTable& table,
                                           double v);
std::vector<double> transmission_objectives(double u_eff, int state,
                                            const RatePowerCurve& curve,
                                            const PowerSet& powers, double v);

// Both rules at once, with the per-option compression objectives attached.
Decision decide(double u_eff, double x, int a, int state,
                const CompressionTable& table, const RatePowerCurve& curve,
                const PowerSet& powers, double v, bool use_distortion);

// Place-holder thresholds: the backlog level the transmission rule provably
// never drains below, which is how many fake bits may stand in for real ones.
// Generic linearly-capped curves: max(0, V/beta_max - mu_max).
double placeholder_threshold_linear_cap(double v, double beta_max,
                                        double mu_max);
// Logarithmic curves: the largest threshold, piecewise in V.
double placeholder_threshold_log(double v, double alpha, double beta,
                                 double p_max);
// Dispatch on the scenario's curve; zero unless the placeholder policy is on.
double placeholder_threshold(const ScenarioSpec& spec);

// Myopic per-slot rule: argmin over k of phi(a,k) + m(a,k)/alpha.
// Optimal only under a static channel with a linear rate-power curve and a
// sub-capacity raw rate.
int baseline_khat(int a, const CompressionTable& table, double alpha);

}  // namespace linksim

#endif  // LINKSIM_POLICY_HPP
