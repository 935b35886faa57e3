#include "linksim/presets.hpp"

#include <stdexcept>
#include <vector>

namespace linksim {

namespace {

constexpr int kSensors = 8;
constexpr double kArrivalProb = 0.5;
constexpr std::uint64_t kPresetSeed = 12345;

CompressionTable halving_table(double b, NoiseSpec output_noise,
                               NoiseSpec power_noise) {
  // One option that halves the data on average at 0.5 power units.
  std::vector<std::vector<double>> m(kSensors + 1), phi(kSensors + 1),
      d(kSensors + 1);
  for (int a = 0; a <= kSensors; ++a) {
    m[a] = {a * b, a * b / 2.0};
    phi[a] = {0.0, a == 0 ? 0.0 : 0.5};
    d[a] = {0.0, 0.0};
  }
  return CompressionTable(b, m, phi, d, {{output_noise}}, {{power_noise}});
}

ScenarioSpec scenario1() {
  ScenarioSpec spec{
      ArrivalSpec::binomial(kSensors, kArrivalProb, 256.0),
      ChannelSpec::single(),
      RatePowerCurve(TwoLevelCurve{1.0, 2048.0}),
      PowerSet::discrete({0.0, 1.0}),
      halving_table(256.0, NoiseSpec::uniform(0.2), NoiseSpec::uniform(0.1)),
      1e7,           // V
      std::nullopt,  // d_av
      1000000,       // horizon
      kPresetSeed,
      PolicyKind::kDynamic,
  };
  return spec;
}

ScenarioSpec scenario2(double b) {
  if (!(b > 0.0)) {
    throw std::invalid_argument("scenario2: packet size must be positive");
  }
  ScenarioSpec spec{
      ArrivalSpec::binomial(kSensors, kArrivalProb, b),
      ChannelSpec::single(),
      RatePowerCurve(TwoLevelCurve{1.0, 2048.0}),
      PowerSet::discrete({0.0, 1.0}),
      halving_table(b, NoiseSpec::uniform(0.2), NoiseSpec::deterministic()),
      1e7,
      std::nullopt,
      5000000,
      kPresetSeed,
      PolicyKind::kDynamicWithPlaceholder,
  };
  return spec;
}

ScenarioSpec scenario3() {
  const double b = 256.0;
  std::vector<std::vector<double>> m(kSensors + 1), phi(kSensors + 1),
      d(kSensors + 1);
  for (int a = 0; a <= kSensors; ++a) {
    const double ratio = a <= 3 ? 1.1 : 1.5;
    m[a] = {a * b, a * b / ratio};
    phi[a] = {0.0, a == 0 ? 0.0 : (a <= 3 ? 5.0 : 8.0)};
    d[a] = {0.0, 0.0};
  }
  ScenarioSpec spec{
      ArrivalSpec::binomial(kSensors, kArrivalProb, b),
      ChannelSpec::single(),
      RatePowerCurve(LogCurve{1060.0, 1.0 / 16.0}),
      PowerSet::interval(750.0),
      CompressionTable(b, m, phi, d),
      70000.0,
      std::nullopt,
      1000000,
      kPresetSeed,
      PolicyKind::kDynamicWithPlaceholder,
  };
  return spec;
}

}  // namespace

ScenarioSpec load_preset(const std::string& id) {
  if (id == "scenario1") return scenario1();
  if (id == "scenario2") return scenario2(850.0);
  if (id == "scenario3") return scenario3();
  throw std::invalid_argument("unknown preset: " + id);
}

ScenarioSpec scenario2_with_packet_bits(double b) { return scenario2(b); }

bool is_known_preset(const std::string& id) {
  return id == "scenario1" || id == "scenario2" || id == "scenario3";
}

}  // namespace linksim
