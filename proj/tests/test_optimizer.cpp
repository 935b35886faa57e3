#include <doctest.h>

#include <cmath>
#include <vector>

#include "linksim/optimizer.hpp"
#include "linksim/presets.hpp"
#include "oracle_lp.hpp"
#include "test_scenarios.hpp"

using namespace linksim;

namespace {

CompressionTable scenario1_means() {
  std::vector<std::vector<double>> m(9), phi(9), d(9);
  for (int a = 0; a <= 8; ++a) {
    m[a] = {a * 256.0, a * 128.0};
    phi[a] = {0.0, a == 0 ? 0.0 : 0.5};
    d[a] = {0.0, 0.0};
  }
  return CompressionTable(256.0, m, phi, d);
}

oracle::Lp compression_lp(const CompressionTable& t, const ArrivalSpec& ar,
                          double r) {
  oracle::Lp lp;
  lp.weight = ar.pmf();
  for (int a = 0; a <= t.max_count(); ++a) {
    lp.obj.emplace_back();
    lp.c1.emplace_back();
    for (int k = 0; k < t.num_options(); ++k) {
      lp.obj.back().push_back(t.mean_power(a, k));
      lp.c1.back().push_back(t.mean_bits(a, k));
    }
  }
  lp.b1 = r;
  return lp;
}

oracle::Lp transmission_lp(const RatePowerCurve& curve, const PowerSet& ps,
                           const ChannelSpec& ch, double r) {
  oracle::Lp lp;
  lp.weight = ch.pmf();
  for (int s = 0; s < ch.num_states(); ++s) {
    lp.obj.emplace_back();
    lp.c1.emplace_back();
    for (double p : ps.candidates()) {
      lp.obj.back().push_back(p);
      lp.c1.back().push_back(-curve.eval(p, s));  // rate >= r
    }
  }
  lp.b1 = -r;
  return lp;
}

}  // namespace

TEST_CASE("r_min") {
  const ArrivalSpec ar = ArrivalSpec::binomial(8, 0.5, 256.0);
  CHECK(compute_r_min(scenario1_means(), ar) == doctest::Approx(512.0));

  // no compression available
  CompressionTable only0(
      256.0, {{0.0}, {256.0}, {512.0}},
      {{0.0}, {0.0}, {0.0}}, {{0.0}, {0.0}, {0.0}});
  ArrivalSpec ar2({0.25, 0.5, 0.25}, 256.0);
  CHECK(compute_r_min(only0, ar2) == doctest::Approx(ar2.raw_rate()));

  // point mass at zero arrivals
  ArrivalSpec none({1.0, 0.0}, 256.0);
  CompressionTable t2(256.0, {{0.0}, {256.0}}, {{0.0}, {0.0}},
                      {{0.0}, {0.0}});
  CHECK(compute_r_min(t2, none) == 0.0);
}

TEST_CASE("r_max") {
  const ScenarioSpec s1 = load_preset("scenario1");
  CHECK(compute_r_max(s1.curve, s1.powers, s1.channel) == 2048.0);

  const ScenarioSpec s3 = load_preset("scenario3");
  CHECK(compute_r_max(s3.curve, s3.powers, s3.channel) ==
        doctest::Approx(1060.0 * std::log(1 + 750.0 / 16)).epsilon(1e-14));

  const RatePowerCurve zero{TwoLevelCurve{1.0, 0.0}};
  CHECK(compute_r_max(zero, PowerSet::discrete({0.0, 1.0}),
                      ChannelSpec::single()) == 0.0);

  // P_max = 0: the only admissible power is idle
  CHECK(compute_r_max(s1.curve, PowerSet::discrete({0.0}),
                      ChannelSpec::single()) == 0.0);
}

TEST_CASE("h_star on the scenario I table") {
  const ArrivalSpec ar = ArrivalSpec::binomial(8, 0.5, 256.0);
  const CompressionTable t = scenario1_means();

  // r = b E[A]: never compress, zero power
  CHECK(h_star(1024.0, t, ar).power == 0.0);

  // r = r_min: compress everything; power is 0.5 * Pr[A >= 1] because the
  // a = 0 row carries no work (0.498046875, confirmed by the oracle below).
  const double h512 = h_star(512.0, t, ar).power;
  CHECK(h512 == doctest::Approx(0.5 * (1.0 - 1.0 / 256)).epsilon(1e-12));

  // r = 768 sits exactly on the compress-when-a>=5 vertex
  // (0.5 * Pr[A >= 5] = 0.181640625).
  const double h768 = h_star(768.0, t, ar).power;
  CHECK(h768 == doctest::Approx(0.5 * 93.0 / 256).epsilon(1e-12));

  for (double r : {512.0, 640.0, 768.0, 900.0, 1024.0}) {
    const double ours = h_star(r, t, ar).power;
    const double brute = oracle::solve_lp(compression_lp(t, ar, r));
    CHECK(std::abs(ours - brute) < 1e-9);
  }

  CHECK_THROWS_AS(h_star(400.0, t, ar), std::domain_error);
  CHECK_THROWS_AS(h_star(1100.0, t, ar), std::domain_error);
}

TEST_CASE("g_star: time sharing on the two-level link") {
  const ScenarioSpec s1 = load_preset("scenario1");
  const GStarResult g = g_star(1024.0, s1.curve, s1.powers, s1.channel);
  CHECK(g.power == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(g.power_mix.size() == 1);
  CHECK(g.power_mix[0].size() <= 3);

  // brute force over the on-probability at 1e-3 resolution
  double best = 1e300;
  for (int i = 0; i <= 1000; ++i) {
    const double on = i / 1000.0;
    if (on * 2048.0 >= 1024.0 - 1e-9) best = std::min(best, on * 1.0);
  }
  CHECK(std::abs(g.power - best) < 1e-3);

  CHECK(g_star(0.0, s1.curve, s1.powers, s1.channel).power == 0.0);
  CHECK_THROWS_AS(g_star(2100.0, s1.curve, s1.powers, s1.channel),
                  std::domain_error);
  CHECK_THROWS_AS(g_star(-1.0, s1.curve, s1.powers, s1.channel),
                  std::domain_error);
}

TEST_CASE("g_star inverts a static concave curve") {
  const ScenarioSpec s3 = load_preset("scenario3");
  for (double r : {100.0, 512.0, 1024.0, 2000.0, 4000.0}) {
    const double g = g_star(r, s3.curve, s3.powers, s3.channel).power;
    const double inv = (std::exp(r / 1060.0) - 1.0) * 16.0;
    CHECK(std::abs(g - inv) <= 1e-6 * inv);
  }
  CHECK(g_star(1024.0, s3.curve, s3.powers, s3.channel).power ==
        doctest::Approx(26.0402).epsilon(1e-4));
}

TEST_CASE("p_av_star on the presets") {
  const ScenarioSpec s1 = load_preset("scenario1");
  const OptimumReport o1 =
      p_av_star(s1.table, s1.arrivals, s1.curve, s1.powers, s1.channel);
  CHECK(std::abs(o1.p_av_star - 0.5) < 1e-9);
  CHECK(std::abs(o1.r_star - 1024.0) < 1e-3);
  CHECK(!o1.feasibility_warning);
  CHECK(o1.p_av_star ==
        doctest::Approx(o1.h_at_star + o1.g_at_star).epsilon(1e-12));

  // raw rate 3400: optimal compression threshold is a >= 3
  const ScenarioSpec s2 = scenario2_with_packet_bits(850.0);
  CHECK(s2.arrivals.raw_rate() == doctest::Approx(3400.0));
  const OptimumReport o2 =
      p_av_star(s2.table, s2.arrivals, s2.curve, s2.powers, s2.channel);
  CHECK(std::abs(o2.p_av_star - 1.310) < 0.005);
  CHECK(o2.r_star == doctest::Approx(1806.25).epsilon(1e-6));

  // raw rate 4096 = 2*mu_max: r_min == r_max, compress everything.
  // Quoted as 1.5; the exact value is 0.5*Pr[A>=1] + 1 with the free a = 0
  // row, and both agree to within the 0.01 audit tolerance.
  const ScenarioSpec s2b = scenario2_with_packet_bits(1024.0);
  const OptimumReport o2b =
      p_av_star(s2b.table, s2b.arrivals, s2b.curve, s2b.powers, s2b.channel);
  CHECK(o2b.feasibility_warning);
  CHECK(std::abs(o2b.p_av_star - 1.5) < 0.01);
  CHECK(o2b.p_av_star ==
        doctest::Approx(1.0 + 0.5 * (1.0 - 1.0 / 256)).epsilon(1e-9));

  // raw rate above 2*mu_max cannot be stabilized
  const ScenarioSpec s2c = scenario2_with_packet_bits(1100.0);
  CHECK_THROWS_AS(
      p_av_star(s2c.table, s2c.arrivals, s2c.curve, s2c.powers, s2c.channel),
      InfeasibleError);
}

TEST_CASE("distortion optimum: inactive and forcing constraints") {
  const ScenarioSpec s1 = load_preset("scenario1");
  // every option lossless: constraint inactive at any budget
  CHECK(s1.table.all_lossless());
  CHECK(compute_r_d_min(s1.table, s1.arrivals, 3.0) ==
        doctest::Approx(compute_r_min(s1.table, s1.arrivals)));
  for (double r : {512.0, 700.0, 1000.0}) {
    CHECK(h_d_star(r, s1.table, s1.arrivals, 3.0).power ==
          doctest::Approx(h_star(r, s1.table, s1.arrivals).power)
              .epsilon(1e-9));
  }

  // d_av = 0 with lossy-only alternatives forces option 0
  ArrivalSpec ar({0.2, 0.5, 0.3}, 100.0);
  CompressionTable lossy(100.0, {{0, 0}, {100, 40}, {200, 80}},
                         {{0, 0}, {0, 0.3}, {0, 0.6}},
                         {{0, 0}, {0, 2.0}, {0, 3.0}});
  CHECK(compute_r_d_min(lossy, ar, 0.0) == doctest::Approx(ar.raw_rate()));
  CHECK(h_d_star(ar.raw_rate(), lossy, ar, 0.0).power ==
        doctest::Approx(0.0));
}

TEST_CASE("distortion optimum matches brute force on a 3-option instance") {
  // Two active arrival values with a lossless and a lossy option.
  ArrivalSpec ar({0.0, 0.4, 0.6}, 200.0);
  CompressionTable t(200.0,
                     {{0, 0, 0}, {200, 120, 60}, {400, 260, 130}},
                     {{0, 0, 0}, {0, 0.4, 0.6}, {0, 0.7, 1.1}},
                     {{0, 0, 0}, {0, 0.0, 2.5}, {0, 0.5, 3.0}});
  const double d_av = 1.0;
  const double r_d = compute_r_d_min(t, ar, d_av);

  // oracle for r_d_min: minimize E[m] subject to E[d] <= d_av
  oracle::Lp lp;
  lp.weight = ar.pmf();
  for (int a = 0; a <= 2; ++a) {
    lp.obj.emplace_back();
    lp.c1.emplace_back();
    for (int k = 0; k < 3; ++k) {
      lp.obj.back().push_back(t.mean_bits(a, k));
      lp.c1.back().push_back(t.mean_distortion(a, k));
    }
  }
  lp.b1 = d_av;
  CHECK(std::abs(r_d - oracle::solve_lp(lp)) < 1e-2);

  for (double r : {r_d, r_d + 40.0, r_d + 100.0, ar.raw_rate()}) {
    oracle::Lp hd = compression_lp(t, ar, r);
    hd.c2 = lp.c1;
    hd.b2 = d_av;
    const double brute = oracle::solve_lp(hd);
    const HStarResult mine = h_d_star(r, t, ar, d_av);
    CHECK(std::abs(mine.power - brute) < 1e-2);
    // the returned policy honors its own constraints
    double em = 0.0, ed = 0.0, ephi = 0.0;
    for (int a = 0; a <= 2; ++a) {
      double row = 0.0;
      for (int k = 0; k < 3; ++k) {
        row += mine.gamma[a][k];
        em += ar.pmf()[a] * mine.gamma[a][k] * t.mean_bits(a, k);
        ed += ar.pmf()[a] * mine.gamma[a][k] * t.mean_distortion(a, k);
        ephi += ar.pmf()[a] * mine.gamma[a][k] * t.mean_power(a, k);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(em <= r + 1e-6);
    CHECK(ed <= d_av + 1e-6);
    CHECK(ephi == doctest::Approx(mine.power).epsilon(1e-9));
  }
}

TEST_CASE("bound constants") {
  const ScenarioSpec s1 = load_preset("scenario1");
  const BoundConstants bc = bound_constants(s1.table, s1.arrivals, s1.curve,
                                            s1.powers, s1.channel);
  CHECK(bc.sigma_sq == doctest::Approx(1179648.0).epsilon(1e-12));
  CHECK(bc.b_const == doctest::Approx(2686976.0).epsilon(1e-12));
  CHECK(bc.phi_max == doctest::Approx(0.5 * (1.0 - 1.0 / 256)).epsilon(1e-12));
  CHECK(!bc.c_const.has_value());

  // zero arrivals and a zero-rate link give B = 0
  ArrivalSpec none({1.0, 0.0}, 256.0);
  CompressionTable t(256.0, {{0.0}, {256.0}}, {{0.0}, {0.0}}, {{0.0}, {0.0}});
  const RatePowerCurve zero{TwoLevelCurve{1.0, 0.0}};
  const BoundConstants bc0 = bound_constants(
      t, none, zero, PowerSet::discrete({0.0, 1.0}), ChannelSpec::single());
  CHECK(bc0.b_const == 0.0);

  const BoundConstants bcd = bound_constants(s1.table, s1.arrivals, s1.curve,
                                             s1.powers, s1.channel, 2.0);
  REQUIRE(bcd.c_const.has_value());
  CHECK(*bcd.c_const ==
        doctest::Approx(0.5 * (4.0 + 0.0 + bc.sigma_sq + 2048.0 * 2048.0)));
}

TEST_CASE("h*/g* structure: monotone, convex, feasible policies") {
  RngStream rng(90210, StreamId::kArrivals);
  int grid_checks = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const ArrivalSpec ar = testgen::random_arrivals(rng, 4);
    const CompressionTable t =
        testgen::random_table(rng, ar, 1 + inst % 2, false);
    auto cp = testgen::random_curve(rng, 1 + inst % 3, ar.raw_rate());
    const ChannelSpec ch =
        inst % 3 == 0 ? ChannelSpec::single()
                      : ChannelSpec(testgen::random_pmf(
                            rng, cp.curve.table_states()));
    if (cp.curve.table_states() != ch.num_states()) continue;

    const double r_min = compute_r_min(t, ar);
    const double r_max = compute_r_max(cp.curve, cp.powers, ch);
    const int pts = 50;
    std::vector<double> h(pts), g(pts);
    for (int i = 0; i < pts; ++i) {
      const double rh = r_min + (ar.raw_rate() - r_min) * i / (pts - 1);
      h[i] = h_star(rh, t, ar).power;
      const double rg = r_max * i / (pts - 1);
      g[i] = g_star(rg, cp.curve, cp.powers, ch).power;
    }
    for (int i = 0; i + 1 < pts; ++i) {
      CHECK(h[i + 1] <= h[i] + 1e-9 * (1.0 + std::abs(h[i])));
      CHECK(g[i + 1] >= g[i] - 1e-9 * (1.0 + std::abs(g[i])));
      ++grid_checks;
    }
    for (int i = 1; i + 1 < pts; ++i) {
      CHECK(h[i] <= 0.5 * (h[i - 1] + h[i + 1]) + 1e-9 * (1.0 + h[i]));
      CHECK(g[i] <= 0.5 * (g[i - 1] + g[i + 1]) + 1e-9 * (1.0 + g[i]));
    }

    // forward-evaluate the h* policy constraints
    for (int i = 0; i < 5; ++i) {
      const double r = r_min + (ar.raw_rate() - r_min) * i / 4;
      const HStarResult res = h_star(r, t, ar);
      double em = 0.0, ephi = 0.0;
      for (int a = 0; a <= ar.max_count(); ++a) {
        double row = 0.0;
        for (int k = 0; k < t.num_options(); ++k) {
          row += res.gamma[a][k];
          em += ar.pmf()[a] * res.gamma[a][k] * t.mean_bits(a, k);
          ephi += ar.pmf()[a] * res.gamma[a][k] * t.mean_power(a, k);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
      }
      CHECK(em <= r + 1e-9 * (1.0 + r));
      CHECK(ephi == doctest::Approx(res.power).epsilon(1e-9));
    }
  }
  CHECK(grid_checks >= 400);
}

TEST_CASE("p_av_star is a global minimum over its own samples") {
  const ScenarioSpec s3 = load_preset("scenario3");
  const OptimumReport rep =
      p_av_star(s3.table, s3.arrivals, s3.curve, s3.powers, s3.channel);
  for (const CurvePoint& pt : rep.curve_samples) {
    CHECK(rep.p_av_star <= pt.h + pt.g + 1e-6);
  }
  CHECK(rep.curve_samples.size() == 50);
}

TEST_CASE("oracle equivalence spot checks") {
  RngStream rng(60601, StreamId::kCompression);
  for (int inst = 0; inst < 6; ++inst) {
    const ArrivalSpec ar = testgen::random_arrivals(rng, 3);
    const CompressionTable t =
        testgen::random_table(rng, ar, 1 + inst % 2, false);
    const double r_min = compute_r_min(t, ar);
    for (double f : {0.0, 0.35, 0.8, 1.0}) {
      const double r = r_min + (ar.raw_rate() - r_min) * f;
      const double mine = h_star(r, t, ar).power;
      const double brute = oracle::solve_lp(compression_lp(t, ar, r));
      CHECK(std::abs(mine - brute) < 1e-2);
    }
    // joint grid double-check for the two-option instances
    if (t.num_options() == 2 && ar.max_count() <= 2) {
      const double r = r_min + (ar.raw_rate() - r_min) * 0.5;
      const double joint = oracle::solve_joint_grid_two_options(
          compression_lp(t, ar, r), 0.01);
      CHECK(std::abs(h_star(r, t, ar).power - joint) < 1e-2);
    }
  }
  for (int inst = 0; inst < 6; ++inst) {
    auto cp = testgen::random_curve(rng, 1 + inst % 3, 500.0);
    const ChannelSpec ch =
        ChannelSpec(testgen::random_pmf(rng, cp.curve.table_states()));
    const double r_max = compute_r_max(cp.curve, cp.powers, ch);
    for (double f : {0.0, 0.4, 0.9}) {
      const double r = r_max * f;
      const double mine = g_star(r, cp.curve, cp.powers, ch).power;
      const double brute =
          oracle::solve_lp(transmission_lp(cp.curve, cp.powers, ch, r));
      CHECK(std::abs(mine - brute) < 1e-2);
    }
  }
}

TEST_CASE("optimum reports satisfy their own invariants on random instances") {
  RngStream rng(424242, StreamId::kArrivals);
  int done = 0;
  while (done < 8) {
    const ArrivalSpec ar = testgen::random_arrivals(rng, 4);
    const CompressionTable t =
        testgen::random_table(rng, ar, 1 + done % 2, done % 2 == 1);
    auto cp = testgen::random_curve(rng, 2, ar.raw_rate());
    const ChannelSpec ch = ChannelSpec(testgen::random_pmf(rng, 2));
    OptimumReport rep;
    try {
      rep = done % 2 == 1
                ? distortion_optimum(t, ar, cp.curve, cp.powers, ch, 1.0)
                : p_av_star(t, ar, cp.curve, cp.powers, ch);
    } catch (const InfeasibleError&) {
      continue;
    }
    const double r_lo = rep.r_d_min ? *rep.r_d_min : rep.r_min;
    CHECK(rep.r_star >= r_lo - 1e-9 * (1 + r_lo));
    CHECK(rep.r_star <=
          std::min(rep.r_max, rep.raw_rate) + 1e-9 * (1 + rep.r_max));
    CHECK(rep.p_av_star ==
          doctest::Approx(rep.h_at_star + rep.g_at_star).epsilon(1e-9));
    // the achieving policy is row-stochastic with <= 3 power support points
    for (const auto& row : rep.policy.gamma) {
      double sum = 0.0;
      for (double gkk : row) {
        CHECK(gkk >= -1e-12);
        sum += gkk;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (const auto& mix : rep.policy.power_mix) {
      CHECK(mix.size() <= 3);
      double p = 0.0;
      for (const auto& [power, prob] : mix) {
        p += prob;
        CHECK(cp.powers.contains(power));
      }
      CHECK(p == doctest::Approx(1.0).epsilon(1e-9));
    }
    ++done;
  }
}

TEST_CASE("g_star at exactly r_max uses the cheapest max-rate powers") {
  RngStream rng(515151, StreamId::kChannel);
  for (int i = 0; i < 5; ++i) {
    auto cp = testgen::random_curve(rng, 1 + i % 3, 300.0);
    const ChannelSpec ch =
        ChannelSpec(testgen::random_pmf(rng, cp.curve.table_states()));
    const double r_max = compute_r_max(cp.curve, cp.powers, ch);
    const GStarResult g = g_star(r_max, cp.curve, cp.powers, ch);
    CHECK(g.power <= cp.powers.p_max() + 1e-12);
    const double brute =
        oracle::solve_lp(transmission_lp(cp.curve, cp.powers, ch, r_max));
    CHECK(std::abs(g.power - brute) < 1e-2);
  }
}

TEST_CASE("degenerate instances") {
  // single-option table: the only stationary rate is b*E[A]
  ArrivalSpec ar({0.5, 0.5}, 100.0);
  CompressionTable only0(100.0, {{0.0}, {100.0}}, {{0.0}, {0.0}},
                         {{0.0}, {0.0}});
  const RatePowerCurve step{TwoLevelCurve{1.0, 200.0}};
  const PowerSet two = PowerSet::discrete({0.0, 1.0});
  const OptimumReport rep =
      p_av_star(only0, ar, step, two, ChannelSpec::single());
  CHECK(rep.r_star == doctest::Approx(50.0));
  CHECK(rep.p_av_star == doctest::Approx(0.25));  // time share 50/200

  // zero-probability channel states contribute nothing
  StateTableCurve tbl;
  tbl.points = {{{0.0, 0.0}, {1.0, 200.0}}, {{0.0, 0.0}, {1.0, 1e6}}};
  const ChannelSpec ch({1.0, 0.0});
  const RatePowerCurve curve{std::move(tbl)};
  CHECK(compute_r_max(curve, two, ch) == doctest::Approx(200.0));
  CHECK(g_star(100.0, curve, two, ch).power == doctest::Approx(0.5));

  // equal-m options collapse the frontier to a single vertex
  CompressionTable equal_m(100.0, {{0.0, 0.0}, {100.0, 100.0}},
                           {{0.0, 0.0}, {0.0, 0.7}}, {{0.0, 0.0}, {0.0, 0.0}});
  CHECK(h_star(100.0, equal_m, ar.pmf()[1] == 0.5
                                   ? ArrivalSpec({0.0, 1.0}, 100.0)
                                   : ar)
            .power == doctest::Approx(0.0));
}
