#include "linksim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace linksim {

namespace {

constexpr double kRelTol = 1e-9;

// --- compression frontier ---------------------------------------------------
//
// For a fixed distortion multiplier nu, the effective per-cell cost is
// phi(a,k) + nu*d(a,k). Sweeping the rate multiplier lambda over its
// breakpoints yields every vertex of the (E[m], E[cost]) frontier; the LP
// optimum for any rate budget mixes two adjacent vertices.

struct FrontierVertex {
  double avg_bits = 0.0;
  double avg_cost = 0.0;
  double avg_power = 0.0;
  double avg_distortion = 0.0;
  std::vector<int> choice;  // option per arrival count
};

FrontierVertex vertex_at(const CompressionTable& table,
                         const ArrivalSpec& arrivals, double nu,
                         double lambda) {
  const int n = table.max_count();
  const int opts = table.num_options();
  FrontierVertex v;
  v.choice.resize(n + 1, 0);
  for (int a = 0; a <= n; ++a) {
    int best = 0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts; ++k) {
      const double cost =
          table.mean_power(a, k) + nu * table.mean_distortion(a, k);
      const double obj = cost + lambda * table.mean_bits(a, k);
      // Tie-break toward the smaller output so the frontier endpoints at a
      // breakpoint are reached from the high-lambda side; then smallest k.
      bool better = obj < best_obj;
      if (!better && obj == best_obj && k > 0) {
        better = table.mean_bits(a, k) < table.mean_bits(a, best);
      }
      if (better) {
        best_obj = obj;
        best = k;
      }
    }
    v.choice[a] = best;
    const double p = arrivals.pmf()[a];
    v.avg_bits += p * table.mean_bits(a, best);
    v.avg_power += p * table.mean_power(a, best);
    v.avg_distortion += p * table.mean_distortion(a, best);
  }
  v.avg_cost = v.avg_power + nu * v.avg_distortion;
  return v;
}

std::vector<FrontierVertex> compression_frontier(const CompressionTable& table,
                                                 const ArrivalSpec& arrivals,
                                                 double nu) {
  const int n = table.max_count();
  const int opts = table.num_options();
  std::vector<double> breaks;
  for (int a = 0; a <= n; ++a) {
    for (int k1 = 0; k1 < opts; ++k1) {
      for (int k2 = 0; k2 < opts; ++k2) {
        const double dm = table.mean_bits(a, k1) - table.mean_bits(a, k2);
        if (dm <= 0.0) continue;
        const double dc =
            (table.mean_power(a, k2) + nu * table.mean_distortion(a, k2)) -
            (table.mean_power(a, k1) + nu * table.mean_distortion(a, k1));
        const double lambda = dc / dm;
        if (lambda > 0.0 && std::isfinite(lambda)) breaks.push_back(lambda);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> evals;
  evals.push_back(0.0);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    evals.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }
  if (!breaks.empty()) {
    evals.push_back(0.5 * breaks.front());
    evals.push_back(breaks.back() * 2.0 + 1.0);
  }
  std::sort(evals.begin(), evals.end());

  std::vector<FrontierVertex> frontier;
  for (double lambda : evals) {
    frontier.push_back(vertex_at(table, arrivals, nu, lambda));
  }
  std::sort(frontier.begin(), frontier.end(),
            [](const FrontierVertex& a, const FrontierVertex& b) {
              return a.avg_bits > b.avg_bits;
            });
  // Every swept vertex minimizes a linear functional, so all lie on the
  // convex envelope; collapse (near-)equal rates keeping the cheaper one.
  std::vector<FrontierVertex> clean;
  for (auto& v : frontier) {
    if (!clean.empty() &&
        v.avg_bits >= clean.back().avg_bits -
                          kRelTol * (1.0 + std::abs(v.avg_bits))) {
      if (v.avg_cost < clean.back().avg_cost) clean.back() = std::move(v);
      continue;
    }
    clean.push_back(std::move(v));
  }
  return clean;
}

std::vector<std::vector<double>> deterministic_gamma(
    const std::vector<int>& choice, int opts) {
  std::vector<std::vector<double>> gamma(choice.size(),
                                         std::vector<double>(opts, 0.0));
  for (std::size_t a = 0; a < choice.size(); ++a) gamma[a][choice[a]] = 1.0;
  return gamma;
}

HStarResult mix_vertices(const FrontierVertex& hi, const FrontierVertex& lo,
                         double theta, int opts) {
  // theta is the weight on `lo` (the smaller-rate vertex).
  HStarResult out;
  out.power = (1.0 - theta) * hi.avg_power + theta * lo.avg_power;
  out.avg_bits = (1.0 - theta) * hi.avg_bits + theta * lo.avg_bits;
  out.avg_distortion =
      (1.0 - theta) * hi.avg_distortion + theta * lo.avg_distortion;
  out.gamma.assign(hi.choice.size(), std::vector<double>(opts, 0.0));
  for (std::size_t a = 0; a < hi.choice.size(); ++a) {
    out.gamma[a][hi.choice[a]] += 1.0 - theta;
    out.gamma[a][lo.choice[a]] += theta;
  }
  return out;
}

// Rate-constrained minimum of the nu-modified cost; shared by h_star and the
// inner loop of h_d_star. Returns the full result plus the modified cost.
struct InnerResult {
  HStarResult res;
  double cost = 0.0;  // E[phi + nu*d]
};

InnerResult min_cost_at_rate(const CompressionTable& table,
                             const ArrivalSpec& arrivals, double nu,
                             double r) {
  const auto frontier = compression_frontier(table, arrivals, nu);
  const int opts = table.num_options();
  InnerResult out;
  if (r >= frontier.front().avg_bits) {
    const auto& v = frontier.front();
    out.res.power = v.avg_power;
    out.res.avg_bits = v.avg_bits;
    out.res.avg_distortion = v.avg_distortion;
    out.res.gamma = deterministic_gamma(v.choice, opts);
    out.cost = v.avg_cost;
    return out;
  }
  for (std::size_t i = 0; i + 1 < frontier.size(); ++i) {
    const auto& hi = frontier[i];
    const auto& lo = frontier[i + 1];
    if (r <= hi.avg_bits && r >= lo.avg_bits) {
      const double theta = (hi.avg_bits - r) / (hi.avg_bits - lo.avg_bits);
      out.res = mix_vertices(hi, lo, theta, opts);
      out.cost = (1.0 - theta) * hi.avg_cost + theta * lo.avg_cost;
      return out;
    }
  }
  const auto& v = frontier.back();
  out.res.power = v.avg_power;
  out.res.avg_bits = v.avg_bits;
  out.res.avg_distortion = v.avg_distortion;
  out.res.gamma = deterministic_gamma(v.choice, opts);
  out.cost = v.avg_cost;
  return out;
}

// --- transmission frontier ---------------------------------------------------

struct StateHull {
  std::vector<std::pair<double, double>> verts;  // (rate, power), rate asc
};

StateHull state_hull(const RatePowerCurve& curve, const PowerSet& powers,
                     int state) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(powers.candidates().size());
  for (double p : powers.candidates()) {
    pts.emplace_back(curve.eval(p, state), p);
  }
  std::sort(pts.begin(), pts.end());
  // Keep the cheapest power at each rate, then take the lower convex hull of
  // power as a function of rate.
  std::vector<std::pair<double, double>> uniq;
  for (const auto& pt : pts) {
    if (!uniq.empty() && pt.first <= uniq.back().first +
                                         kRelTol * (1.0 + pt.first)) {
      continue;  // same rate, higher or equal power
    }
    uniq.push_back(pt);
  }
  StateHull hull;
  for (const auto& pt : uniq) {
    while (hull.verts.size() >= 2) {
      const auto& a = hull.verts[hull.verts.size() - 2];
      const auto& b = hull.verts.back();
      const double cross = (b.first - a.first) * (pt.second - a.second) -
                           (b.second - a.second) * (pt.first - a.first);
      if (cross <= 0.0) {
        hull.verts.pop_back();
      } else {
        break;
      }
    }
    hull.verts.push_back(pt);
  }
  return hull;
}

struct GFrontier {
  std::vector<StateHull> hulls;
  struct Edge {
    int state = 0;
    int vert = 0;     // edge from vert to vert+1 of hulls[state]
    double slope = 0; // power per rate
  };
  std::vector<Edge> edges;          // sorted by slope
  std::vector<double> knot_r, knot_g;  // cumulative averages, ascending
};

GFrontier g_frontier(const RatePowerCurve& curve, const PowerSet& powers,
                     const ChannelSpec& channel) {
  GFrontier f;
  for (int s = 0; s < channel.num_states(); ++s) {
    f.hulls.push_back(state_hull(curve, powers, s));
    const auto& verts = f.hulls.back().verts;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
      const double dr = verts[i + 1].first - verts[i].first;
      const double dp = verts[i + 1].second - verts[i].second;
      f.edges.push_back({s, static_cast<int>(i), dp / dr});
    }
  }
  std::stable_sort(f.edges.begin(), f.edges.end(),
                   [](const auto& a, const auto& b) { return a.slope < b.slope; });
  double r = 0.0, g = 0.0;
  f.knot_r.push_back(0.0);
  f.knot_g.push_back(0.0);
  for (const auto& e : f.edges) {
    const double pi = channel.pmf()[e.state];
    const auto& verts = f.hulls[e.state].verts;
    r += pi * (verts[e.vert + 1].first - verts[e.vert].first);
    g += pi * (verts[e.vert + 1].second - verts[e.vert].second);
    f.knot_r.push_back(r);
    f.knot_g.push_back(g);
  }
  return f;
}

GStarResult g_from_frontier(const GFrontier& f, const ChannelSpec& channel,
                            double r) {
  GStarResult out;
  const int states = channel.num_states();
  std::vector<int> pos(states, 0);
  out.power_mix.assign(states, {});
  double acc_r = 0.0, acc_g = 0.0;
  std::size_t consumed = 0;
  for (; consumed < f.edges.size(); ++consumed) {
    if (f.knot_r[consumed + 1] >= r) break;
    const auto& e = f.edges[consumed];
    pos[e.state] = e.vert + 1;
    acc_r = f.knot_r[consumed + 1];
    acc_g = f.knot_g[consumed + 1];
  }
  double frac = 0.0;
  if (consumed < f.edges.size() && r > acc_r) {
    const double width = f.knot_r[consumed + 1] - acc_r;
    frac = width > 0.0 ? (r - acc_r) / width : 0.0;
  }
  out.avg_rate = r;
  out.power = acc_g;
  if (consumed < f.edges.size() && frac > 0.0) {
    out.power += frac * (f.knot_g[consumed + 1] - f.knot_g[consumed]);
  }
  for (int s = 0; s < states; ++s) {
    const auto& verts = f.hulls[s].verts;
    if (consumed < f.edges.size() && f.edges[consumed].state == s &&
        frac > 0.0 && frac < 1.0) {
      const int i = f.edges[consumed].vert;
      out.power_mix[s] = {{verts[i].second, 1.0 - frac},
                          {verts[i + 1].second, frac}};
    } else {
      int at = pos[s];
      if (consumed < f.edges.size() && f.edges[consumed].state == s &&
          frac >= 1.0) {
        at = f.edges[consumed].vert + 1;
      }
      out.power_mix[s] = {{verts[at].second, 1.0}};
    }
  }
  return out;
}

// --- scalar minimization ------------------------------------------------------

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Grid scan plus golden refinement; robust to flat or kinked objectives.
// When the minimum is attained on a flat stretch, returns its right edge
// (the least-compression optimizer among equally good rates).
double minimize_on_interval(const std::function<double(double)>& f, double lo,
                            double hi, int grid_points) {
  if (hi <= lo) return lo;
  std::vector<double> fs(grid_points + 1);
  double best_f = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= grid_points; ++i) {
    const double r = lo + (hi - lo) * i / grid_points;
    fs[i] = f(r);
    if (fs[i] < best_f) {
      best_f = fs[i];
      best_i = i;
    }
  }
  const double step = (hi - lo) / grid_points;
  const double ga = std::max(lo, lo + step * (best_i - 1));
  const double gb = std::min(hi, lo + step * (best_i + 1));
  const double refined = golden_min(f, ga, gb, 1e-6);
  const double f_refined = f(refined);
  best_f = std::min(best_f, f_refined);

  const double flat_tol = 1e-9 * (1.0 + std::abs(best_f));
  if (fs[grid_points] <= best_f + flat_tol) return hi;
  double pass = f_refined <= fs[best_i] ? refined : lo + step * best_i;
  for (int i = grid_points; i > best_i; --i) {
    if (fs[i] <= best_f + flat_tol) {
      pass = std::max(pass, lo + step * i);
      break;
    }
  }
  double fail = std::min(hi, pass + step);
  for (int it = 0; it < 60 && fail - pass > 1e-7; ++it) {
    const double mid = 0.5 * (pass + fail);
    if (f(mid) <= best_f + flat_tol) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  return pass;
}

}  // namespace

// --- public entry points -------------------------------------------------------

double compute_r_min(const CompressionTable& table,
                     const ArrivalSpec& arrivals) {
  double r = 0.0;
  for (int a = 0; a <= table.max_count(); ++a) {
    double best = table.mean_bits(a, 0);
    for (int k = 1; k < table.num_options(); ++k) {
      best = std::min(best, table.mean_bits(a, k));
    }
    r += arrivals.pmf()[a] * best;
  }
  return r;
}

double compute_r_max(const RatePowerCurve& curve, const PowerSet& powers,
                     const ChannelSpec& channel) {
  double r = 0.0;
  for (int s = 0; s < channel.num_states(); ++s) {
    r += channel.pmf()[s] * curve.eval(powers.p_max(), s);
  }
  return r;
}

HStarResult h_star(double r, const CompressionTable& table,
                   const ArrivalSpec& arrivals) {
  const double r_min = compute_r_min(table, arrivals);
  const double raw = arrivals.raw_rate();
  const double tol = kRelTol * (1.0 + raw);
  if (r < r_min - tol || r > raw + tol) {
    throw std::domain_error("h_star: r outside [r_min, b*E[A]]");
  }
  return min_cost_at_rate(table, arrivals, 0.0, std::clamp(r, r_min, raw)).res;
}

GStarResult g_star(double r, const RatePowerCurve& curve,
                   const PowerSet& powers, const ChannelSpec& channel) {
  const double r_max = compute_r_max(curve, powers, channel);
  const double tol = kRelTol * (1.0 + r_max);
  if (r < -tol || r > r_max + tol) {
    throw std::domain_error("g_star: r outside [0, r_max]");
  }
  r = std::clamp(r, 0.0, r_max);
  const LogCurve* log = curve.as_log();
  if (log && powers.is_interval() && channel.num_states() == 1) {
    // Strictly increasing concave static curve: g*(r) = C^{-1}(r).
    GStarResult out;
    out.avg_rate = r;
    out.power = std::expm1(r / log->alpha) / log->beta;
    out.power = std::clamp(out.power, 0.0, powers.p_max());
    out.power_mix = {{{out.power, 1.0}}};
    return out;
  }
  return g_from_frontier(g_frontier(curve, powers, channel), channel, r);
}

double compute_r_d_min(const CompressionTable& table,
                       const ArrivalSpec& arrivals, double d_av) {
  if (!(d_av >= 0.0)) {
    throw std::invalid_argument("compute_r_d_min: d_av must be nonnegative");
  }
  // Frontier of (E[d], E[m]) via the distortion multiplier: reuse the sweep
  // with bits and distortion swapped in the roles of cost and rate.
  const int n = table.max_count();
  const int opts = table.num_options();
  std::vector<double> breaks;
  for (int a = 0; a <= n; ++a) {
    for (int k1 = 0; k1 < opts; ++k1) {
      for (int k2 = 0; k2 < opts; ++k2) {
        const double dd =
            table.mean_distortion(a, k1) - table.mean_distortion(a, k2);
        if (dd <= 0.0) continue;
        const double dm = table.mean_bits(a, k2) - table.mean_bits(a, k1);
        const double nu = dm / dd;
        if (nu > 0.0 && std::isfinite(nu)) breaks.push_back(nu);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> evals = {0.0};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    evals.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }
  if (!breaks.empty()) {
    evals.push_back(0.5 * breaks.front());
    evals.push_back(breaks.back() * 2.0 + 1.0);
  }
  std::sort(evals.begin(), evals.end());

  struct DVertex {
    double avg_m = 0.0, avg_d = 0.0;
  };
  std::vector<DVertex> verts;
  for (double nu : evals) {
    DVertex v;
    for (int a = 0; a <= n; ++a) {
      int best = 0;
      double best_obj = std::numeric_limits<double>::infinity();
      for (int k = 0; k < opts; ++k) {
        const double obj =
            table.mean_bits(a, k) + nu * table.mean_distortion(a, k);
        bool better = obj < best_obj;
        if (!better && obj == best_obj && k > 0) {
          better = table.mean_distortion(a, k) < table.mean_distortion(a, best);
        }
        if (better) {
          best_obj = obj;
          best = k;
        }
      }
      v.avg_m += arrivals.pmf()[a] * table.mean_bits(a, best);
      v.avg_d += arrivals.pmf()[a] * table.mean_distortion(a, best);
    }
    verts.push_back(v);
  }
  std::sort(verts.begin(), verts.end(),
            [](const DVertex& a, const DVertex& b) { return a.avg_d > b.avg_d; });
  if (verts.front().avg_d <= d_av) return verts.front().avg_m;  // = r_min
  if (verts.back().avg_d > d_av + kRelTol * (1.0 + d_av)) {
    throw InfeasibleError("distortion constraint cannot be met");
  }
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    if (verts[i].avg_d > d_av && verts[i + 1].avg_d <= d_av) {
      const double span = verts[i].avg_d - verts[i + 1].avg_d;
      const double theta = span > 0.0 ? (verts[i].avg_d - d_av) / span : 1.0;
      return (1.0 - theta) * verts[i].avg_m + theta * verts[i + 1].avg_m;
    }
  }
  return verts.back().avg_m;
}

HStarResult h_d_star(double r, const CompressionTable& table,
                     const ArrivalSpec& arrivals, double d_av) {
  const double r_d_min = compute_r_d_min(table, arrivals, d_av);
  const double raw = arrivals.raw_rate();
  const double tol = kRelTol * (1.0 + raw);
  if (r < r_d_min - tol || r > raw + tol) {
    throw std::domain_error("h_d_star: r outside [r_d_min, b*E[A]]");
  }
  r = std::clamp(r, r_d_min, raw);

  InnerResult base = min_cost_at_rate(table, arrivals, 0.0, r);
  const double d_tol = kRelTol * (1.0 + d_av);
  if (base.res.avg_distortion <= d_av + d_tol) return base.res;

  // Find a multiplier bracket [nu_lo, nu_hi] with D(nu_lo) > d_av >= D(nu_hi).
  double nu_lo = 0.0;
  double nu_hi = 1.0;
  InnerResult hi = min_cost_at_rate(table, arrivals, nu_hi, r);
  int guard = 0;
  while (hi.res.avg_distortion > d_av + d_tol && guard++ < 200) {
    nu_lo = nu_hi;
    nu_hi *= 4.0;
    hi = min_cost_at_rate(table, arrivals, nu_hi, r);
  }
  if (hi.res.avg_distortion > d_av + d_tol) {
    throw InfeasibleError("h_d_star: distortion constraint cannot be met");
  }
  InnerResult lo = min_cost_at_rate(table, arrivals, nu_lo, r);
  for (int it = 0; it < 200 && nu_hi - nu_lo > 1e-14 * (1.0 + nu_hi); ++it) {
    const double nu = 0.5 * (nu_lo + nu_hi);
    InnerResult mid = min_cost_at_rate(table, arrivals, nu, r);
    if (mid.res.avg_distortion > d_av + d_tol) {
      nu_lo = nu;
      lo = std::move(mid);
    } else {
      nu_hi = nu;
      hi = std::move(mid);
    }
  }

  const double span = lo.res.avg_distortion - hi.res.avg_distortion;
  if (!(span > 0.0)) return hi.res;
  const double eta = std::clamp(
      (lo.res.avg_distortion - d_av) / span, 0.0, 1.0);  // weight on hi
  HStarResult out;
  out.power = (1.0 - eta) * lo.res.power + eta * hi.res.power;
  out.avg_bits = (1.0 - eta) * lo.res.avg_bits + eta * hi.res.avg_bits;
  out.avg_distortion =
      (1.0 - eta) * lo.res.avg_distortion + eta * hi.res.avg_distortion;
  const int opts = table.num_options();
  out.gamma.assign(table.max_count() + 1, std::vector<double>(opts, 0.0));
  for (int a = 0; a <= table.max_count(); ++a) {
    for (int k = 0; k < opts; ++k) {
      out.gamma[a][k] =
          (1.0 - eta) * lo.res.gamma[a][k] + eta * hi.res.gamma[a][k];
    }
  }
  return out;
}

BoundConstants bound_constants(const CompressionTable& table,
                               const ArrivalSpec& arrivals,
                               const RatePowerCurve& curve,
                               const PowerSet& powers,
                               const ChannelSpec& channel,
                               std::optional<double> d_av) {
  BoundConstants bc;
  bc.sigma_sq = arrivals.packet_bits() * arrivals.packet_bits() *
                arrivals.second_moment();
  double ec2 = 0.0;
  for (int s = 0; s < channel.num_states(); ++s) {
    const double c = curve.eval(powers.p_max(), s);
    ec2 += channel.pmf()[s] * c * c;
  }
  bc.b_const = 0.5 * (bc.sigma_sq + ec2);
  for (int a = 0; a <= table.max_count(); ++a) {
    double worst = 0.0;
    for (int k = 0; k < table.num_options(); ++k) {
      worst = std::max(worst, table.mean_power(a, k));
    }
    bc.phi_max += arrivals.pmf()[a] * worst;
  }
  bc.delta_sq = table.delta_sq();
  if (d_av.has_value()) {
    bc.c_const =
        0.5 * (*d_av * *d_av + bc.delta_sq + bc.sigma_sq + ec2);
  }
  return bc;
}

namespace {

OptimumReport optimize(const CompressionTable& table,
                       const ArrivalSpec& arrivals,
                       const RatePowerCurve& curve, const PowerSet& powers,
                       const ChannelSpec& channel,
                       std::optional<double> d_av) {
  OptimumReport rep;
  rep.r_min = compute_r_min(table, arrivals);
  rep.r_max = compute_r_max(curve, powers, channel);
  rep.raw_rate = arrivals.raw_rate();
  rep.d_av = d_av;
  rep.bounds = bound_constants(table, arrivals, curve, powers, channel, d_av);

  double r_lo = rep.r_min;
  if (d_av.has_value()) {
    rep.r_d_min = compute_r_d_min(table, arrivals, *d_av);
    r_lo = *rep.r_d_min;
  }
  const double eq_tol = kRelTol * (1.0 + rep.r_max);
  if (r_lo > rep.r_max + eq_tol) {
    throw InfeasibleError(
        d_av ? "r_d_min exceeds r_max" : "r_min exceeds r_max");
  }
  rep.feasibility_warning = r_lo >= rep.r_max - eq_tol;

  const double r_hi = std::min(rep.r_max, rep.raw_rate);
  auto h_of = [&](double r) {
    return d_av ? h_d_star(r, table, arrivals, *d_av)
                : h_star(r, table, arrivals);
  };
  auto f = [&](double r) {
    return h_of(r).power + g_star(r, curve, powers, channel).power;
  };

  double r_star = r_lo;
  if (r_hi > r_lo) {
    r_star = minimize_on_interval(f, r_lo, r_hi, 1000);
  }
  HStarResult h = h_of(r_star);
  GStarResult g = g_star(r_star, curve, powers, channel);
  rep.r_star = r_star;
  rep.h_at_star = h.power;
  rep.g_at_star = g.power;
  rep.p_av_star = h.power + g.power;
  rep.policy.gamma = std::move(h.gamma);
  rep.policy.power_mix = std::move(g.power_mix);

  const int kSamples = 50;
  rep.curve_samples.reserve(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    const double r =
        r_hi > r_lo ? r_lo + (r_hi - r_lo) * i / (kSamples - 1) : r_lo;
    CurvePoint pt;
    pt.r = r;
    pt.h = h_of(r).power;
    pt.g = g_star(r, curve, powers, channel).power;
    rep.curve_samples.push_back(pt);
    if (r_hi <= r_lo) break;
  }
  return rep;
}

}  // namespace

OptimumReport p_av_star(const CompressionTable& table,
                        const ArrivalSpec& arrivals,
                        const RatePowerCurve& curve, const PowerSet& powers,
                        const ChannelSpec& channel) {
  return optimize(table, arrivals, curve, powers, channel, std::nullopt);
}

OptimumReport distortion_optimum(const CompressionTable& table,
                                 const ArrivalSpec& arrivals,
                                 const RatePowerCurve& curve,
                                 const PowerSet& powers,
                                 const ChannelSpec& channel, double d_av) {
  return optimize(table, arrivals, curve, powers, channel, d_av);
}

}  // namespace linksim
