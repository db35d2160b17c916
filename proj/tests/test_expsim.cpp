#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "steerkit/errors.hpp"
#include "steerkit/expsim.hpp"
#include "steerkit/parallel.hpp"

using namespace steerkit;

namespace {

bool same_counts(const CountTable& x, const CountTable& y) {
  if (x.pairs.size() != y.pairs.size()) return false;
  for (std::size_t i = 0; i < x.pairs.size(); ++i) {
    const auto& p = x.pairs[i];
    const auto& q = y.pairs[i];
    if (p.setting_a != q.setting_a || p.setting_b != q.setting_b || p.coinc != q.coinc ||
        p.singles_a != q.singles_a || p.singles_b != q.singles_b)
      return false;
  }
  return true;
}

SourceConfig config(double rate, double t, double ea, double eb, std::uint64_t seed) {
  SourceConfig c;
  c.pair_rate = rate;
  c.integration_time = t;
  c.eps_a = ea;
  c.eps_b = eb;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("mix_sources limits") {
  CHECK((mix_sources(1.0, 1.0).matrix() - singlet_state().matrix()).cwiseAbs().maxCoeff() < 1e-15);
  for (double v : {0.0, 0.5, 1.0})
    CHECK((mix_sources(0.0, v).matrix() - Matrix4c::Identity() / 4.0).cwiseAbs().maxCoeff() < 1e-15);
  const WernerMatch m = closest_werner(mix_sources(0.95, 1.0));
  CHECK(std::abs(m.mu - 0.95) < 1e-6);
  CHECK(m.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(mix_sources(1.1, 1.0), DomainError);
  CHECK_THROWS_AS(mix_sources(0.5, -0.1), DomainError);
}

TEST_CASE("joint probabilities follow the Born rule") {
  const auto p = joint_probabilities(werner_state(0.5), Vec3::UnitZ(), Vec3::UnitZ());
  CHECK(p[0][0] == doctest::Approx(0.125));
  CHECK(p[1][1] == doctest::Approx(0.125));
  CHECK(p[0][1] == doctest::Approx(0.375));
  CHECK(p[1][0] == doctest::Approx(0.375));
}

TEST_CASE("singlet at unit efficiency never gives equal outcomes") {
  const MeasurementSet s6 = platonic_settings(6);
  const CountTable t = simulate_counts(singlet_state(), s6, s6, config(1e5, 1.0, 1.0, 1.0, 3),
                                       PairSelection::Matched);
  REQUIRE(t.pairs.size() == 6);
  for (const auto& p : t.pairs) {
    CHECK(p.coinc[0][0] == 0);
    CHECK(p.coinc[1][1] == 0);
    CHECK(p.coincidences() > 0);
  }
}

TEST_CASE("no detection on Bob's side") {
  const MeasurementSet s3 = platonic_settings(3);
  const CountTable t = simulate_counts(werner_state(0.7), s3, s3, config(1e5, 1.0, 0.5, 0.0, 4));
  CHECK(t.pairs.size() == 9);
  for (const auto& p : t.pairs) {
    CHECK(p.coincidences() == 0);
    CHECK(p.singles_b[0] + p.singles_b[1] == 0);
    CHECK(p.singles_a[0] + p.singles_a[1] > 0);
  }
  CHECK_THROWS_AS(heralding_efficiency(t), InsufficientDataError);
}

TEST_CASE("Werner z/z frequencies") {
  const MeasurementSet z({Vec3::UnitZ()});
  const CountTable t = simulate_counts(werner_state(0.5), z, z, config(1e6, 1.0, 1.0, 1.0, 5));
  const auto& p = t.pairs.at(0);
  const double n = static_cast<double>(p.coincidences());
  const double expect[2][2] = {{0.125, 0.375}, {0.375, 0.125}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double f = p.coinc[a][b] / n;
      CHECK(std::abs(f - expect[a][b]) < 5 * std::sqrt(expect[a][b] * (1 - expect[a][b]) / n));
    }
}

TEST_CASE("heralding efficiency arithmetic") {
  CountTable t;
  PairCounts p;
  p.coinc = {{{10, 5}, {5, 10}}};
  p.singles_a = {50, 50};
  p.singles_b = {60, 40};
  t.pairs.push_back(p);
  const HeraldingEstimate h = heralding_efficiency(t);
  CHECK(h.eps_a == doctest::Approx(0.30));
  CHECK(h.eps_b == doctest::Approx(0.30));
  CHECK(h.sd_eps_a == doctest::Approx(std::sqrt(0.3 * 0.7 / 100)));
}

TEST_CASE("heralding efficiency recovers the configured values") {
  const MeasurementSet s6 = platonic_settings(6);
  const CountTable t = simulate_counts(werner_state(0.9), s6, s6, config(1e6, 1.0, 0.31, 0.05, 6),
                                       PairSelection::Matched);
  const HeraldingEstimate h = heralding_efficiency(t);
  CHECK(std::abs(h.eps_a - 0.31) < 5 * h.sd_eps_a);
  CHECK(std::abs(h.eps_b - 0.05) < 5 * h.sd_eps_b);

  const CountTable sym = simulate_counts(werner_state(0.9), s6, s6, config(1e6, 1.0, 0.2, 0.2, 7),
                                         PairSelection::Matched);
  const HeraldingEstimate hs = heralding_efficiency(sym);
  CHECK(std::abs(hs.eps_a - hs.eps_b) < 5 * std::hypot(hs.sd_eps_a, hs.sd_eps_b));
}

TEST_CASE("dark counts add singles and accidentals") {
  const MeasurementSet z({Vec3::UnitZ()});
  SourceConfig c = config(1e5, 10.0, 0.1, 0.1, 8);
  c.dark_rate_a = 1e4;
  c.dark_rate_b = 1e4;
  const CountTable dark = simulate_counts(maximally_mixed_state(), z, z, c);
  c.dark_rate_a = c.dark_rate_b = 0.0;
  const CountTable clean = simulate_counts(maximally_mixed_state(), z, z, c);
  const auto& d = dark.pairs[0];
  const auto& k = clean.pairs[0];
  const double sa = static_cast<double>(d.singles_a[0] + d.singles_a[1]) -
                    static_cast<double>(k.singles_a[0] + k.singles_a[1]);
  // Two detectors per side at 1e4 Hz for 10 s.
  CHECK(std::abs(sa - 2e5) < 6 * std::sqrt(2e5 + 2e5));
  // Expected accidentals: 4 pairs * t * window * (dark * rate_b + dark * rate_a).
  const double acc = 4 * 10.0 * 3e-9 * (1e4 * 1e5 * 0.1 * 0.5 * 2);
  const double extra = static_cast<double>(d.coincidences()) - static_cast<double>(k.coincidences());
  CHECK(std::abs(extra - acc) < 6 * std::sqrt(2.0 * k.coincidences() + acc));
}

TEST_CASE("doubling integration time doubles the expected counts") {
  const MeasurementSet z({Vec3::UnitZ()});
  double sum1 = 0.0, sum2 = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    sum1 += simulate_counts(werner_state(0.5), z, z, config(1e4, 1.0, 0.5, 0.5, seed))
                .pairs[0].coinc[0][1];
    sum2 += simulate_counts(werner_state(0.5), z, z, config(1e4, 2.0, 0.5, 0.5, seed + 1000))
                .pairs[0].coinc[0][1];
  }
  // Poisson sums: variance equals the mean.
  CHECK(std::abs(sum2 - 2 * sum1) < 3 * std::sqrt(sum2 + 4 * sum1));
}

TEST_CASE("simulation is reproducible across runs and thread counts") {
  const MeasurementSet s6 = platonic_settings(6);
  const SourceConfig c = config(1e6, 0.5, 0.3, 0.1, 12345);
  setenv("STEERKIT_THREADS", "1", 1);
  CHECK(thread_count() == 1);
  const CountTable one = simulate_counts(werner_state(0.8), s6, s6, c);
  setenv("STEERKIT_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  const CountTable four = simulate_counts(werner_state(0.8), s6, s6, c);
  unsetenv("STEERKIT_THREADS");
  const CountTable again = simulate_counts(werner_state(0.8), s6, s6, c);
  CHECK(same_counts(one, four));
  CHECK(same_counts(one, again));

  SourceConfig other = c;
  other.seed = 54321;
  CHECK_FALSE(same_counts(one, simulate_counts(werner_state(0.8), s6, s6, other)));
}

TEST_CASE("honest steering data from the mixed source") {
  const MeasurementSet s6 = platonic_settings(6);
  SourceConfig c = config(1e6, 0.0, 0.3, 2.52e-3, 77);
  c.integration_time = 1e5 / (c.pair_rate * c.eps_a * c.eps_b);
  const CountTable t = simulate_counts(mix_sources(0.951, 1.0), s6, s6, c, PairSelection::Matched);
  const SteeringEstimate e = steering_parameter(steering_data(t));
  CHECK(std::abs(e.S - 0.951) <= 5 * e.delta_S_stat);
  CHECK(t.pairs[0].coincidences() > 90000);

  CountTable missing = t;
  missing.pairs.pop_back();
  CHECK_THROWS_AS(steering_data(missing), InsufficientDataError);
}

TEST_CASE("configuration validation") {
  SourceConfig c;
  c.eps_a = 1.5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SourceConfig{};
  c.integration_time = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SourceConfig{};
  c.dark_rate_b = std::nan("");
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("sub seeds are distinct and deterministic") {
  CHECK(sub_seed(1, 0) == sub_seed(1, 0));
  CHECK(sub_seed(1, 0) != sub_seed(1, 1));
  CHECK(sub_seed(1, 0) != sub_seed(2, 0));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw DomainError("boom");
                  }),
                  DomainError);
}
