#include "linksim/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linksim {

namespace {

constexpr double kProbTol = 1e-12;

void check_pmf(const std::vector<double>& pmf, const char* what) {
  if (pmf.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty distribution");
  }
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol * std::max<double>(1.0, pmf.size())) {
    throw std::invalid_argument(std::string(what) +
                                ": probabilities do not sum to 1");
  }
}

}  // namespace

// --- ArrivalSpec -----------------------------------------------------------

ArrivalSpec::ArrivalSpec(std::vector<double> pmf, double packet_bits)
    : pmf_(std::move(pmf)), packet_bits_(packet_bits) {
  check_pmf(pmf_, "ArrivalSpec");
  if (pmf_.size() < 2) {
    throw std::invalid_argument("ArrivalSpec: N must be >= 1");
  }
  if (!(packet_bits_ > 0.0)) {
    throw std::invalid_argument("ArrivalSpec: packet size must be positive");
  }
}

ArrivalSpec ArrivalSpec::binomial(int n, double p, double packet_bits) {
  if (n < 1 || p < 0.0 || p > 1.0) {
    throw std::invalid_argument("ArrivalSpec::binomial: bad parameters");
  }
  std::vector<double> pmf(n + 1, 0.0);
  // pmf(a) = C(n,a) p^a (1-p)^(n-a), built by the multiplicative recurrence.
  double term = std::pow(1.0 - p, n);
  if (p == 1.0) term = 0.0;
  pmf[0] = term;
  for (int a = 1; a <= n; ++a) {
    if (p == 1.0) {
      pmf[a] = (a == n) ? 1.0 : 0.0;
      continue;
    }
    term *= static_cast<double>(n - a + 1) / a * (p / (1.0 - p));
    pmf[a] = term;
  }
  double sum = 0.0;
  for (double q : pmf) sum += q;
  for (double& q : pmf) q /= sum;
  return ArrivalSpec(std::move(pmf), packet_bits);
}

double ArrivalSpec::mean() const {
  double m = 0.0;
  for (std::size_t a = 0; a < pmf_.size(); ++a) m += pmf_[a] * a;
  return m;
}

double ArrivalSpec::second_moment() const {
  double m2 = 0.0;
  for (std::size_t a = 0; a < pmf_.size(); ++a) {
    m2 += pmf_[a] * static_cast<double>(a) * static_cast<double>(a);
  }
  return m2;
}

int ArrivalSpec::sample(RngStream& rng) const {
  return static_cast<int>(rng.categorical(pmf_));
}

// --- ChannelSpec -----------------------------------------------------------

ChannelSpec::ChannelSpec(std::vector<double> pmf,
                         std::vector<std::string> names)
    : pmf_(std::move(pmf)), names_(std::move(names)) {
  check_pmf(pmf_, "ChannelSpec");
  if (!names_.empty() && names_.size() != pmf_.size()) {
    throw std::invalid_argument("ChannelSpec: name/state count mismatch");
  }
}

ChannelSpec ChannelSpec::single(std::string name) {
  return ChannelSpec({1.0}, {std::move(name)});
}

int ChannelSpec::sample(RngStream& rng) const {
  return static_cast<int>(rng.categorical(pmf_));
}

// --- PowerSet ---------------------------------------------------------------

PowerSet PowerSet::discrete(std::vector<double> levels) {
  if (levels.empty()) {
    throw std::invalid_argument("PowerSet: empty level set");
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.front() != 0.0) {
    throw std::invalid_argument("PowerSet: must contain 0");
  }
  if (!(levels.back() >= 0.0) || !std::isfinite(levels.back())) {
    throw std::invalid_argument("PowerSet: bad maximum power");
  }
  PowerSet ps;
  ps.is_interval_ = false;
  ps.candidates_ = std::move(levels);
  return ps;
}

PowerSet PowerSet::interval(double p_max, int grid_points) {
  if (!(p_max > 0.0) || !std::isfinite(p_max)) {
    throw std::invalid_argument("PowerSet: P_max must be positive");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("PowerSet: need at least 2 grid points");
  }
  PowerSet ps;
  ps.is_interval_ = true;
  ps.candidates_.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    ps.candidates_[i] = p_max * static_cast<double>(i) / (grid_points - 1);
  }
  ps.candidates_.front() = 0.0;
  ps.candidates_.back() = p_max;
  return ps;
}

bool PowerSet::contains(double p) const {
  if (!std::isfinite(p)) return false;
  if (is_interval_) return p >= 0.0 && p <= p_max();
  return std::binary_search(candidates_.begin(), candidates_.end(), p);
}

// --- RatePowerCurve ----------------------------------------------------------

void RatePowerCurve::validate() const {
  if (const auto* c = std::get_if<TwoLevelCurve>(&kind_)) {
    if (!(c->p_on > 0.0) || !(c->rate_on >= 0.0)) {
      throw std::invalid_argument("TwoLevelCurve: bad parameters");
    }
  } else if (const auto* c = std::get_if<LogCurve>(&kind_)) {
    if (!(c->alpha > 0.0) || !(c->beta > 0.0)) {
      throw std::invalid_argument("LogCurve: alpha and beta must be positive");
    }
  } else {
    const auto& tbl = std::get<StateTableCurve>(kind_);
    if (tbl.points.empty()) {
      throw std::invalid_argument("StateTableCurve: no states");
    }
    for (const auto& pts : tbl.points) {
      if (pts.empty() || pts.front().first != 0.0 ||
          pts.front().second != 0.0) {
        throw std::invalid_argument(
            "StateTableCurve: each state needs a leading (0, 0) node");
      }
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].first <= pts[i - 1].first) {
          throw std::invalid_argument(
              "StateTableCurve: powers must be strictly increasing");
        }
        if (pts[i].second < pts[i - 1].second) {
          throw std::invalid_argument(
              "StateTableCurve: rate must be nondecreasing in power");
        }
      }
    }
  }
}

double RatePowerCurve::eval(double p, int state) const {
  if (p <= 0.0) return 0.0;
  if (const auto* c = std::get_if<TwoLevelCurve>(&kind_)) {
    return p >= c->p_on ? c->rate_on : 0.0;
  }
  if (const auto* c = std::get_if<LogCurve>(&kind_)) {
    return c->alpha * std::log1p(c->beta * p);
  }
  const auto& pts = std::get<StateTableCurve>(kind_).points.at(state);
  if (p >= pts.back().first) return pts.back().second;
  auto hi = std::upper_bound(
      pts.begin(), pts.end(), p,
      [](double value, const auto& node) { return value < node.first; });
  auto lo = hi - 1;
  const double span = hi->first - lo->first;
  const double f = (p - lo->first) / span;
  return lo->second + f * (hi->second - lo->second);
}

int RatePowerCurve::table_states() const {
  if (const auto* c = std::get_if<StateTableCurve>(&kind_)) {
    return static_cast<int>(c->points.size());
  }
  return 0;
}

double RatePowerCurve::max_slope() const {
  if (const auto* c = std::get_if<TwoLevelCurve>(&kind_)) {
    return c->rate_on / c->p_on;
  }
  if (const auto* c = std::get_if<LogCurve>(&kind_)) {
    return c->alpha * c->beta;  // derivative at P = 0
  }
  double best = 0.0;
  for (const auto& pts : std::get<StateTableCurve>(kind_).points) {
    for (const auto& [p, rate] : pts) {
      if (p > 0.0) best = std::max(best, rate / p);
    }
  }
  return best;
}

double eval_rate(const RatePowerCurve& curve, const PowerSet& powers, double p,
                 int state) {
  if (state < 0 ||
      (curve.table_states() > 0 && state >= curve.table_states())) {
    throw std::domain_error("eval_rate: unknown channel state");
  }
  if (!(p >= 0.0) || p > powers.p_max() * (1.0 + 1e-12)) {
    throw std::domain_error("eval_rate: power outside [0, P_max]");
  }
  return curve.eval(p, state);
}

double mu_max(const RatePowerCurve& curve, const PowerSet& powers,
              const ChannelSpec& channel) {
  double best = 0.0;
  for (int s = 0; s < channel.num_states(); ++s) {
    best = std::max(best, curve.eval(powers.p_max(), s));
  }
  return best;
}

// --- CompressionTable --------------------------------------------------------

namespace {

std::vector<std::vector<NoiseSpec>> expand_noise(
    std::vector<std::vector<NoiseSpec>> grid, std::size_t rows,
    std::size_t cols, const char* what) {
  if (grid.empty()) {
    return std::vector<std::vector<NoiseSpec>>(
        rows, std::vector<NoiseSpec>(cols, NoiseSpec::deterministic()));
  }
  if (grid.size() == 1 && grid[0].size() == 1) {
    return std::vector<std::vector<NoiseSpec>>(
        rows, std::vector<NoiseSpec>(cols, grid[0][0]));
  }
  if (grid.size() != rows) {
    throw std::invalid_argument(std::string(what) + ": bad noise grid shape");
  }
  for (auto& row : grid) {
    if (row.size() != cols) {
      throw std::invalid_argument(std::string(what) +
                                  ": bad noise grid shape");
    }
  }
  return grid;
}

void check_rect(const std::vector<std::vector<double>>& g, std::size_t rows,
                std::size_t cols, const char* what) {
  if (g.size() != rows) {
    throw std::invalid_argument(std::string(what) + ": bad table shape");
  }
  for (const auto& row : g) {
    if (row.size() != cols) {
      throw std::invalid_argument(std::string(what) + ": ragged table");
    }
    for (double x : row) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument(std::string(what) +
                                    ": entries must be nonnegative");
      }
    }
  }
}

}  // namespace

CompressionTable::CompressionTable(
    double packet_bits, std::vector<std::vector<double>> mean_bits,
    std::vector<std::vector<double>> mean_power,
    std::vector<std::vector<double>> mean_distortion,
    std::vector<std::vector<NoiseSpec>> bits_noise,
    std::vector<std::vector<NoiseSpec>> power_noise,
    std::vector<std::vector<NoiseSpec>> distortion_noise)
    : packet_bits_(packet_bits),
      mean_bits_(std::move(mean_bits)),
      mean_power_(std::move(mean_power)),
      mean_distortion_(std::move(mean_distortion)) {
  if (!(packet_bits_ > 0.0)) {
    throw std::invalid_argument("CompressionTable: packet size must be > 0");
  }
  if (mean_bits_.empty() || mean_bits_.front().empty()) {
    throw std::invalid_argument("CompressionTable: empty table");
  }
  const std::size_t rows = mean_bits_.size();
  const std::size_t cols = mean_bits_.front().size();
  check_rect(mean_bits_, rows, cols, "CompressionTable m");
  check_rect(mean_power_, rows, cols, "CompressionTable phi");
  check_rect(mean_distortion_, rows, cols, "CompressionTable d");

  bits_noise_ = expand_noise(std::move(bits_noise), rows, cols, "output");
  power_noise_ = expand_noise(std::move(power_noise), rows, cols, "power");
  distortion_noise_ =
      expand_noise(std::move(distortion_noise), rows, cols, "distortion");

  // Nothing to compress: row a = 0 carries no data, power or distortion.
  for (std::size_t k = 0; k < cols; ++k) {
    mean_bits_[0][k] = 0.0;
    mean_power_[0][k] = 0.0;
    mean_distortion_[0][k] = 0.0;
  }

  const double tol = 1e-9 * packet_bits_;
  for (std::size_t a = 0; a < rows; ++a) {
    const double ab = packet_bits_ * static_cast<double>(a);
    if (std::abs(mean_bits_[a][0] - ab) > tol || mean_power_[a][0] != 0.0 ||
        mean_distortion_[a][0] != 0.0) {
      throw std::invalid_argument(
          "CompressionTable: option 0 must be (a*b, 0, 0)");
    }
    mean_bits_[a][0] = ab;
    for (std::size_t k = 0; k < cols; ++k) {
      if (mean_bits_[a][k] > ab + tol) {
        throw std::invalid_argument(
            "CompressionTable: compression may not expand the data");
      }
      for (const auto* grid :
           {&bits_noise_, &power_noise_, &distortion_noise_}) {
        const NoiseSpec& ns = (*grid)[a][k];
        if (ns.kind == NoiseKind::kUniformAroundMean &&
            (ns.half_width < 0.0 || ns.half_width > 1.0)) {
          throw std::invalid_argument(
              "CompressionTable: relative half-width must be in [0, 1]");
        }
      }
      // Keep the output support within [0, a*b].
      const NoiseSpec& bn = bits_noise_[a][k];
      if (k > 0 && bn.kind == NoiseKind::kUniformAroundMean &&
          mean_bits_[a][k] * (1.0 + bn.half_width) > ab + tol) {
        throw std::invalid_argument(
            "CompressionTable: output noise support exceeds a*b");
      }
    }
  }
}

double CompressionTable::delta_sq() const {
  double worst = 0.0;
  for (int a = 1; a <= max_count(); ++a) {
    for (int k = 0; k < num_options(); ++k) {
      const double d = mean_distortion_[a][k];
      const NoiseSpec& ns = distortion_noise_[a][k];
      double m2 = d * d;
      if (ns.kind == NoiseKind::kUniformAroundMean) {
        m2 += d * d * ns.half_width * ns.half_width / 3.0;
      }
      worst = std::max(worst, m2);
    }
  }
  return worst;
}

bool CompressionTable::all_lossless() const {
  for (const auto& row : mean_distortion_) {
    for (double d : row) {
      if (d != 0.0) return false;
    }
  }
  return true;
}

CompressionSample sample_compression(const CompressionTable& table, int a,
                                     int k, RngStream& rng) {
  if (a < 0 || a > table.max_count() || k < 0 || k >= table.num_options()) {
    throw std::domain_error("sample_compression: index out of range");
  }
  if (a == 0) return {0.0, 0.0, 0.0};
  if (k == 0) {
    return {table.packet_bits() * static_cast<double>(a), 0.0, 0.0};
  }
  auto draw = [&](double mean, const NoiseSpec& ns) {
    if (mean == 0.0 || ns.kind == NoiseKind::kDeterministic) return mean;
    return rng.uniform(mean * (1.0 - ns.half_width),
                       mean * (1.0 + ns.half_width));
  };
  CompressionSample out;
  out.bits = draw(table.mean_bits(a, k), table.bits_noise(a, k));
  out.power = draw(table.mean_power(a, k), table.power_noise(a, k));
  out.distortion = draw(table.mean_distortion(a, k), table.distortion_noise(a, k));
  return out;
}

// --- PolicyKind / ScenarioSpec ----------------------------------------------

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kDynamic:
      return "dynamic";
    case PolicyKind::kDynamicWithPlaceholder:
      return "dynamic_placeholder";
    case PolicyKind::kDynamicDistortion:
      return "dynamic_distortion";
    case PolicyKind::kNoCompression:
      return "no_compression";
    case PolicyKind::kKhatBaseline:
      return "khat_baseline";
  }
  return "unknown";
}

std::optional<PolicyKind> policy_from_string(const std::string& s) {
  if (s == "dynamic") return PolicyKind::kDynamic;
  if (s == "dynamic_placeholder") return PolicyKind::kDynamicWithPlaceholder;
  if (s == "dynamic_distortion") return PolicyKind::kDynamicDistortion;
  if (s == "no_compression") return PolicyKind::kNoCompression;
  if (s == "khat_baseline") return PolicyKind::kKhatBaseline;
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  if (!(v > 0.0)) {
    throw std::invalid_argument("ScenarioSpec: V must be positive");
  }
  if (horizon < 1) {
    throw std::invalid_argument("ScenarioSpec: horizon must be >= 1");
  }
  if (table.max_count() != arrivals.max_count()) {
    throw std::invalid_argument(
        "ScenarioSpec: compression table rows must match N+1");
  }
  if (std::abs(table.packet_bits() - arrivals.packet_bits()) >
      1e-9 * arrivals.packet_bits()) {
    throw std::invalid_argument(
        "ScenarioSpec: packet size differs between arrivals and table");
  }
  if (curve.table_states() > 0 &&
      curve.table_states() != channel.num_states()) {
    throw std::invalid_argument(
        "ScenarioSpec: curve state count must match channel");
  }
  if (policy == PolicyKind::kDynamicDistortion && !d_av.has_value()) {
    throw std::invalid_argument(
        "ScenarioSpec: distortion policy requires d_av");
  }
  if (d_av.has_value() && !(*d_av >= 0.0)) {
    throw std::invalid_argument("ScenarioSpec: d_av must be nonnegative");
  }
}

}  // namespace linksim
