#include "linksim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <stdexcept>

#include "linksim/policy.hpp"

namespace linksim {

namespace {

// The applied threshold is shaved by a microscopic amount so the queue floor
// cannot engage through rounding at the contact point of U - mu*(U). Any
// threshold below the derived value is still never drained past, and the
// slack keeps offset and offset-free runs bit-identical.
constexpr double kThresholdShave = 1e-6;

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void mix(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  }
  void mix_double(double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  }
};

}  // namespace

Simulation::Simulation(ScenarioSpec spec, double initial_backlog)
    : spec_(std::move(spec)),
      arrivals_rng_(spec_.seed, StreamId::kArrivals),
      channel_rng_(spec_.seed, StreamId::kChannel),
      compression_rng_(spec_.seed, StreamId::kCompression) {
  spec_.validate();
  if (!(initial_backlog >= 0.0)) {
    throw std::invalid_argument("Simulation: initial backlog must be >= 0");
  }
  state_.u_thresh =
      std::max(0.0, placeholder_threshold(spec_) - kThresholdShave);
  state_.u_eff = state_.u_thresh + initial_backlog;
  state_.x = 0.0;

  if (spec_.policy == PolicyKind::kKhatBaseline) {
    const int states = spec_.channel.num_states();
    khat_power_.assign(states, 0.0);
    khat_rate_.assign(states, 0.0);
    for (int s = 0; s < states; ++s) {
      double best_eff = 0.0;
      for (double p : spec_.powers.candidates()) {
        if (p <= 0.0) continue;
        const double eff = spec_.curve.eval(p, s) / p;
        if (eff > best_eff) {
          best_eff = eff;
          khat_power_[s] = p;
          khat_rate_[s] = spec_.curve.eval(p, s);
        }
      }
    }
  }
}

SlotRecord Simulation::step() {
  const int a = spec_.arrivals.sample(arrivals_rng_);
  const int s = spec_.channel.sample(channel_rng_);
  return step_with(a, s);
}

SlotRecord Simulation::step_with(int a, int s) {
  SlotRecord rec;
  rec.t = t_++;
  rec.a = a;
  rec.s = s;
  rec.u_before = state_.actual();
  const double u_eff = state_.u_eff;

  switch (spec_.policy) {
    case PolicyKind::kDynamic:
    case PolicyKind::kDynamicWithPlaceholder:
      rec.k = choose_compression(u_eff, a, spec_.table, spec_.v);
      break;
    case PolicyKind::kDynamicDistortion:
      rec.k = choose_compression_distortion(u_eff, state_.x, a, spec_.table,
                                            spec_.v);
      break;
    case PolicyKind::kNoCompression:
      rec.k = 0;
      break;
    case PolicyKind::kKhatBaseline:
      rec.k = baseline_khat(a, spec_.table, spec_.curve.max_slope());
      break;
  }

  const CompressionSample cs =
      sample_compression(spec_.table, a, rec.k, compression_rng_);
  rec.r_bits = cs.bits;
  rec.p_comp = cs.power;
  rec.distortion = cs.distortion;

  if (spec_.policy == PolicyKind::kKhatBaseline) {
    rec.p_tran = u_eff >= khat_rate_[s] ? khat_power_[s] : 0.0;
  } else {
    rec.p_tran =
        choose_transmission(u_eff, s, spec_.curve, spec_.powers, spec_.v);
  }
  rec.mu = spec_.curve.eval(rec.p_tran, s);

  state_.u_eff = std::max(u_eff - rec.mu, state_.u_thresh) + rec.r_bits;
  if (spec_.policy == PolicyKind::kDynamicDistortion) {
    state_.x = std::max(state_.x - *spec_.d_av, 0.0) + rec.distortion;
  }
  rec.u_after = state_.actual();
  rec.x = state_.x;
  return rec;
}

RunReport run(const ScenarioSpec& spec, std::vector<SlotRecord>* trace,
              double initial_backlog) {
  if (spec.horizon < 1) {
    throw std::domain_error("run: horizon must be >= 1");
  }
  Simulation sim(spec, initial_backlog);
  const std::uint64_t horizon = spec.horizon;
  const bool distortion_mode = spec.policy == PolicyKind::kDynamicDistortion;

  RunReport rep;
  rep.slots = horizon;
  rep.policy = spec.policy;
  rep.v = spec.v;
  rep.seed = spec.seed;
  rep.u_thresh = sim.u_thresh();

  KahanSum p_comp, p_tran, p_tot, u_actual, u_eff, dist;
  KahanSum h2_p_comp, h2_p_tran, h2_p_tot, h2_u_actual, h2_u_eff, h2_dist;
  const std::uint64_t half_start = horizon / 2;

  const std::uint64_t n_batches = std::min<std::uint64_t>(100, horizon);
  std::vector<double> batch_p, batch_d;
  batch_p.reserve(n_batches);
  KahanSum cur_batch_p, cur_batch_d;
  std::uint64_t batch_idx = 1, batch_begin = 0;

  Fnv1a fp;
  rep.min_u_eff = sim.state().effective();
  const double b = spec.arrivals.packet_bits();

  if (trace) trace->reserve(trace->size() + horizon);

  for (std::uint64_t t = 0; t < horizon; ++t) {
    const SlotRecord rec = sim.step();
    if (trace) trace->push_back(rec);

    const double slot_power = rec.p_comp + rec.p_tran;
    p_comp.add(rec.p_comp);
    p_tran.add(rec.p_tran);
    p_tot.add(slot_power);
    u_actual.add(rec.u_before);
    u_eff.add(rec.u_before + rep.u_thresh);
    dist.add(rec.distortion);
    if (t >= half_start) {
      h2_p_comp.add(rec.p_comp);
      h2_p_tran.add(rec.p_tran);
      h2_p_tot.add(slot_power);
      h2_u_actual.add(rec.u_before);
      h2_u_eff.add(rec.u_before + rep.u_thresh);
      h2_dist.add(rec.distortion);
    }

    cur_batch_p.add(slot_power);
    cur_batch_d.add(rec.distortion);
    const std::uint64_t batch_end = batch_idx * horizon / n_batches;
    if (t + 1 == batch_end) {
      const double len = static_cast<double>(batch_end - batch_begin);
      batch_p.push_back(cur_batch_p.value() / len);
      batch_d.push_back(cur_batch_d.value() / len);
      cur_batch_p = KahanSum();
      cur_batch_d = KahanSum();
      batch_begin = batch_end;
      ++batch_idx;
    }

    fp.mix(static_cast<std::uint64_t>(rec.k));
    fp.mix_double(rec.p_tran);
    rep.min_u_eff = std::min(rep.min_u_eff, sim.state().effective());
    rep.queue_nonneg_ok =
        rep.queue_nonneg_ok && rec.u_after >= 0.0 && rec.x >= 0.0;
    rep.output_within_ab_ok =
        rep.output_within_ab_ok && rec.r_bits <= b * rec.a + 1e-9;
  }

  const double n = static_cast<double>(horizon);
  rep.avg = {p_tot.value() / n,    p_comp.value() / n, p_tran.value() / n,
             u_actual.value() / n, u_eff.value() / n,  dist.value() / n};
  const double n2 = static_cast<double>(horizon - half_start);
  rep.second_half = {h2_p_tot.value() / n2,    h2_p_comp.value() / n2,
                     h2_p_tran.value() / n2,   h2_u_actual.value() / n2,
                     h2_u_eff.value() / n2,    h2_dist.value() / n2};
  rep.final_u = sim.state().actual();
  rep.final_x = sim.state().x;
  rep.decision_fingerprint = fp.h;

  auto sem_of = [](const std::vector<double>& means) {
    if (means.size() < 2) return 0.0;
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= means.size();
    double ss = 0.0;
    for (double m : means) ss += (m - mu) * (m - mu);
    return std::sqrt(ss / (means.size() * (means.size() - 1.0)));
  };
  rep.sem_p_tot = sem_of(batch_p);
  rep.sem_distortion = sem_of(batch_d);

  try {
    const OptimumReport opt =
        distortion_mode
            ? distortion_optimum(spec.table, spec.arrivals, spec.curve,
                                 spec.powers, spec.channel, *spec.d_av)
            : p_av_star(spec.table, spec.arrivals, spec.curve, spec.powers,
                        spec.channel);
    rep.theory_available = true;
    rep.feasibility_warning = opt.feasibility_warning;
    rep.p_av_star = opt.p_av_star;
    rep.r_star = opt.r_star;
    rep.r_min = opt.r_min;
    rep.r_max = opt.r_max;
    rep.b_const = opt.bounds.b_const;
    rep.phi_max = opt.bounds.phi_max;
    rep.c_const = opt.bounds.c_const;
    rep.r_d_min = opt.r_d_min;
    const double drift_const =
        distortion_mode && opt.bounds.c_const ? *opt.bounds.c_const
                                              : opt.bounds.b_const;
    const double r_floor =
        distortion_mode && opt.r_d_min ? *opt.r_d_min : opt.r_min;
    rep.power_bound = opt.p_av_star + drift_const / spec.v;
    const double denom = opt.r_max - r_floor;
    rep.backlog_bound =
        denom > 0.0 ? (drift_const +
                       spec.v * (spec.powers.p_max() + opt.bounds.phi_max)) /
                          denom
                    : std::numeric_limits<double>::infinity();
  } catch (const InfeasibleError&) {
    rep.theory_available = false;
  }

  rep.audit_applicable =
      rep.theory_available && (spec.policy == PolicyKind::kDynamic ||
                               spec.policy == PolicyKind::kDynamicWithPlaceholder ||
                               spec.policy == PolicyKind::kDynamicDistortion);
  if (rep.audit_applicable) {
    rep.audit_power_ok =
        rep.avg.p_tot <= rep.power_bound + 3.0 * rep.sem_p_tot;
    rep.audit_backlog_ok = rep.avg.u_eff <= rep.backlog_bound * 1.01;
    if (distortion_mode) {
      rep.audit_distortion_ok =
          rep.avg.distortion <= *spec.d_av + 3.0 * rep.sem_distortion;
    }
  }
  return rep;
}

std::vector<RunReport> sweep(const std::vector<ScenarioSpec>& specs,
                             int parallelism) {
  if (specs.empty()) {
    throw std::invalid_argument("sweep: empty spec list");
  }
  std::vector<RunReport> out(specs.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i] = run(specs[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep spec #" + std::to_string(i) + ": " +
                               e.what());
    }
  };
  if (parallelism <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) run_one(i);
    return out;
  }
  std::size_t next = 0;
  while (next < specs.size()) {
    const std::size_t chunk = std::min<std::size_t>(
        parallelism, specs.size() - next);
    std::vector<std::future<void>> futs;
    for (std::size_t j = 0; j < chunk; ++j) {
      futs.push_back(
          std::async(std::launch::async, run_one, next + j));
    }
    for (auto& f : futs) f.get();
    next += chunk;
  }
  return out;
}

}  // namespace linksim
