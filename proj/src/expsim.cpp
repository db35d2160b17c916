#include "steerkit/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "steerkit/errors.hpp"
#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << v << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

void check_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " = " << v << " must be finite and nonnegative";
    throw DomainError(os.str());
  }
}

std::uint64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> d(mean);
  return d(rng);
}

Matrix2c projector(const Vec3& u, int outcome_idx) {
  const auto& s = pauli::xyz();
  const double a = outcome_value(outcome_idx);
  Matrix2c p = Matrix2c::Identity();
  for (int i = 0; i < 3; ++i) p += a * u(i) * s[i];
  return p / 2.0;
}

}  // namespace

void SourceConfig::validate() const {
  check_unit(mix_weight, "mix_weight");
  check_unit(singlet_visibility, "singlet_visibility");
  check_unit(eps_a, "eps_a");
  check_unit(eps_b, "eps_b");
  check_nonneg(pair_rate, "pair_rate");
  check_nonneg(integration_time, "integration_time");
  check_nonneg(dark_rate_a, "dark_rate_a");
  check_nonneg(dark_rate_b, "dark_rate_b");
}

DensityMatrix4 mix_sources(double w, double visibility) {
  check_unit(w, "mix weight");
  check_unit(visibility, "singlet visibility");
  Matrix4c decohered = Matrix4c::Zero();
  decohered(kHV, kHV) = 0.5;
  decohered(kVH, kVH) = 0.5;
  const Matrix4c singlet = visibility * singlet_state().matrix() + (1.0 - visibility) * decohered;
  return DensityMatrix4(w * singlet + (1.0 - w) * Matrix4c::Identity() / 4.0);
}

const PairCounts* CountTable::find(std::size_t i, std::size_t j) const {
  for (const auto& p : pairs)
    if (p.setting_a == i && p.setting_b == j) return &p;
  return nullptr;
}

std::array<std::array<double, 2>, 2> joint_probabilities(const DensityMatrix4& rho, const Vec3& u,
                                                         const Vec3& w) {
  std::array<std::array<double, 2>, 2> p{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      p[a][b] = std::max(0.0, (rho.matrix() * kron(projector(u, a), projector(w, b))).trace().real());
  return p;
}

CountTable simulate_counts(const DensityMatrix4& rho, const MeasurementSet& settings_a,
                           const MeasurementSet& settings_b, const SourceConfig& cfg,
                           PairSelection selection) {
  cfg.validate();
  CountTable table;
  table.settings_a = settings_a.dirs();
  table.settings_b = settings_b.dirs();
  table.config = cfg;
  table.seed = cfg.seed;

  for (std::size_t i = 0; i < settings_a.size(); ++i)
    for (std::size_t j = 0; j < settings_b.size(); ++j) {
      if (selection == PairSelection::Matched && i != j) continue;
      PairCounts pc;
      pc.setting_a = i;
      pc.setting_b = j;
      table.pairs.push_back(pc);
    }

  const double t = cfg.integration_time;
  const double emitted = cfg.pair_rate * t;
  parallel_for(table.pairs.size(), [&](std::size_t idx) {
    PairCounts& pc = table.pairs[idx];
    std::mt19937_64 rng(sub_seed(cfg.seed, pc.setting_a * 1000003ull + pc.setting_b));
    const auto p = joint_probabilities(rho, settings_a[pc.setting_a], settings_b[pc.setting_b]);
    std::array<double, 2> pa{p[0][0] + p[0][1], p[1][0] + p[1][1]};
    std::array<double, 2> pb{p[0][0] + p[1][0], p[0][1] + p[1][1]};

    std::array<std::uint64_t, 2> real_a{}, real_b{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::uint64_t c = poisson(rng, emitted * cfg.eps_a * cfg.eps_b * p[a][b]);
        pc.coinc[a][b] = c;
        real_a[a] += c;
        real_b[b] += c;
      }
    for (int a = 0; a < 2; ++a)
      real_a[a] += poisson(rng, emitted * cfg.eps_a * (1.0 - cfg.eps_b) * pa[a]);
    for (int b = 0; b < 2; ++b)
      real_b[b] += poisson(rng, emitted * (1.0 - cfg.eps_a) * cfg.eps_b * pb[b]);

    for (int a = 0; a < 2; ++a) pc.singles_a[a] = real_a[a] + poisson(rng, cfg.dark_rate_a * t);
    for (int b = 0; b < 2; ++b) pc.singles_b[b] = real_b[b] + poisson(rng, cfg.dark_rate_b * t);

    // Accidentals: a dark count in one detector inside the gate of a real
    // detection on the other side.
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double rate_a = cfg.pair_rate * cfg.eps_a * pa[a];
        const double rate_b = cfg.pair_rate * cfg.eps_b * pb[b];
        const double acc = t * SourceConfig::kGateWindow *
                           (cfg.dark_rate_a * rate_b + cfg.dark_rate_b * rate_a);
        pc.coinc[a][b] += poisson(rng, acc);
      }
  });
  return table;
}

HeraldingEstimate heralding_efficiency(const CountTable& counts) {
  double coinc = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& p : counts.pairs) {
    coinc += static_cast<double>(p.coincidences());
    sa += static_cast<double>(p.singles_a[0] + p.singles_a[1]);
    sb += static_cast<double>(p.singles_b[0] + p.singles_b[1]);
  }
  if (sa <= 0.0 || sb <= 0.0)
    throw InsufficientDataError("heralding efficiency needs nonzero singles in both arms");
  HeraldingEstimate h;
  h.eps_a = coinc / sb;
  h.eps_b = coinc / sa;
  h.sd_eps_a = std::sqrt(std::max(0.0, h.eps_a * (1.0 - h.eps_a)) / sb);
  h.sd_eps_b = std::sqrt(std::max(0.0, h.eps_b * (1.0 - h.eps_b)) / sa);
  return h;
}

SteeringData steering_data(const CountTable& counts, bool flip_announcement) {
  const std::size_t n = std::min(counts.settings_a.size(), counts.settings_b.size());
  SteeringData data;
  data.settings.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PairCounts* pc = counts.find(k, k);
    if (!pc) {
      std::ostringstream os;
      os << "no counts for matched setting pair " << k;
      throw InsufficientDataError(os.str());
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int announced = flip_announcement ? 1 - a : a;
        data.settings[k].n[announced][b] += pc->coinc[a][b];
      }
  }
  return data;
}

SteeringData simulate_cheating(const SteeringBoundResult& strategy, const MeasurementSet& settings,
                               std::uint64_t trials_per_setting, std::uint64_t seed,
                               std::vector<double>* answer_rates) {
  const std::size_t n = settings.size();
  SteeringData data;
  data.settings.resize(n);
  if (answer_rates) answer_rates->assign(n, 0.0);
  double total_w = 0.0;
  for (const auto& s : strategy.support) total_w += s.weight;

  for (std::size_t k = 0; k < n; ++k) {
    std::mt19937_64 rng(sub_seed(seed, k));
    std::uint64_t remaining = trials_per_setting;
    double remaining_w = total_w;
    std::uint64_t answered = 0;
    for (const auto& s : strategy.support) {
      // Sequential binomials give a multinomial split of the trials.
      const double pw = remaining_w > 0 ? std::min(1.0, s.weight / remaining_w) : 0.0;
      std::binomial_distribution<std::uint64_t> pick(remaining, pw);
      const std::uint64_t m = pick(rng);
      remaining -= m;
      remaining_w -= s.weight;
      if (!s.answered[k] || m == 0) continue;
      answered += m;
      const double proj = settings[k].dot(s.hidden_direction);
      const int announced = proj >= 0 ? 0 : 1;
      const double agree = (1.0 + std::abs(proj)) / 2.0;
      std::binomial_distribution<std::uint64_t> same(m, std::min(1.0, agree));
      const std::uint64_t ns = same(rng);
      data.settings[k].n[announced][announced] += ns;
      data.settings[k].n[announced][1 - announced] += m - ns;
    }
    if (answer_rates)
      (*answer_rates)[k] = static_cast<double>(answered) / static_cast<double>(trials_per_setting);
  }
  return data;
}

}  // namespace steerkit
