#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

#include "steerkit/errors.hpp"
#include "steerkit/tomo.hpp"

using namespace steerkit;

namespace {

CountTable tomo_counts(const DensityMatrix4& rho, double pairs_per_setting, std::uint64_t seed) {
  SourceConfig c;
  c.pair_rate = pairs_per_setting;
  c.integration_time = 1.0;
  c.seed = seed;
  return simulate_counts(rho, tomography_axes(), tomography_axes(), c);
}

// Frobenius-nearest state by bisection on the simplex shift (independent of
// the sort-based projection in the library).
Matrix4c bisection_projection(const Matrix4c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  const Eigen::Vector4d l = es.eigenvalues();
  double lo = l.minCoeff() - 1.0, hi = l.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::max(0.0, l(i) - mid);
    (s > 1.0 ? lo : hi) = mid;
  }
  Eigen::Vector4d p;
  for (int i = 0; i < 4; ++i) p(i) = std::max(0.0, l(i) - 0.5 * (lo + hi));
  return es.eigenvectors() * p.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("exact frequencies reconstruct the state") {
  std::mt19937_64 rng(41);
  CHECK((reconstruct(ideal_frequencies(werner_state(0.6))).matrix() - werner_state(0.6).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix4 rho = random_state(rng);
    CHECK((reconstruct(ideal_frequencies(rho)).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Poisson tomography at high statistics") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DensityMatrix4 est = reconstruct(tomo_counts(werner_state(0.6), 1e6, seed));
    CHECK(fidelity(est, werner_state(0.6)) >= 0.999);
  }
}

TEST_CASE("projection yields a state and matches the bisection oracle") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int rep = 0; rep < 200; ++rep) {
    Matrix4c h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = cplx(g(rng), g(rng));
    h = (h + h.adjoint()).eval() / 2.0;
    h += (1.0 - h.trace().real()) / 4.0 * Matrix4c::Identity();
    const Matrix4c p = project_to_states(h);
    CHECK_NOTHROW(DensityMatrix4{p});
    CHECK(std::abs(p.trace().real() - 1.0) < 1e-12);
    CHECK((p - bisection_projection(h)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // Physical input is left unchanged.
  const Matrix4c w = werner_state(0.3).matrix();
  CHECK((project_to_states(w) - w).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tomography input checks") {
  CountTable t = tomo_counts(werner_state(0.5), 1e4, 3);
  CountTable missing = t;
  missing.pairs.erase(missing.pairs.begin() + 4);
  CHECK_THROWS_AS(reconstruct(missing), InsufficientDataError);

  CountTable empty = t;
  empty.pairs[2].coinc = {};
  CHECK_THROWS_AS(reconstruct(empty), InsufficientDataError);

  CountTable wrong = t;
  wrong.settings_a = platonic_settings(6).dirs();
  CHECK_THROWS_AS(reconstruct(wrong), ValidationError);
}

TEST_CASE("Monte Carlo summary") {
  const CountTable t = tomo_counts(werner_state(0.9), 2e4, 9);
  const McSummary c = mc_uncertainty(t, "const", [](const CountTable&) { return 0.5; });
  CHECK(c.sd == 0.0);
  CHECK(c.mean == 0.5);
  CHECK(c.n_samples == kDefaultMcSamples);

  const McSummary a = mc_uncertainty(t, "mu", named_estimator("mu"), 50, 17);
  const McSummary b = mc_uncertainty(t, "mu", named_estimator("mu"), 50, 17);
  CHECK(a.mean == b.mean);
  CHECK(a.sd == b.sd);
  CHECK(a.seed == 17);
  CHECK(std::abs(a.mean - 0.9) < 0.02);

  CHECK_THROWS_AS(mc_uncertainty(t, "mu", named_estimator("mu"), 1), DomainError);
  CHECK_THROWS_AS(named_estimator("nope"), ValidationError);
}

TEST_CASE("Monte Carlo failure policy") {
  const CountTable t = tomo_counts(werner_state(0.9), 1e3, 10);
  std::atomic<int> calls{0};
  const Estimator flaky = [&](const CountTable&) -> double {
    if (++calls % 10 == 0) throw InsufficientDataError("flaky");
    return 1.0;
  };
  CHECK_THROWS_AS(mc_uncertainty(t, "flaky", flaky, 100, 1), InsufficientDataError);

  std::atomic<int> calls2{0};
  const Estimator rare = [&](const CountTable&) -> double {
    if (++calls2 % 50 == 0) throw InsufficientDataError("rare");
    return 1.0;
  };
  const McSummary ok = mc_uncertainty(t, "rare", rare, 100, 1);
  CHECK(ok.n_failed == 2);
  CHECK(ok.n_samples == 98);
}

TEST_CASE("Monte Carlo spread shrinks with statistics") {
  // Per-seed ratios of sd(mu) at N and 2N counts, averaged over 20 seeds.
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const McSummary lo = mc_uncertainty(tomo_counts(werner_state(0.8), 5e3, seed), "mu",
                                        named_estimator("mu"), 100, seed);
    const McSummary hi = mc_uncertainty(tomo_counts(werner_state(0.8), 1e4, seed + 100), "mu",
                                        named_estimator("mu"), 100, seed);
    ratio_sum += lo.sd / hi.sd;
  }
  const double ratio = ratio_sum / 20.0;
  CHECK(ratio >= 1.2);
  CHECK(ratio <= 1.7);
}

TEST_CASE("named estimators") {
  for (const auto& n : estimator_names()) CHECK_NOTHROW(named_estimator(n));
  SourceConfig c;
  c.pair_rate = 1e6;
  c.integration_time = 1.0;
  c.eps_a = 0.5;
  c.eps_b = 0.01;
  c.seed = 5;
  const CountTable t = simulate_counts(werner_state(0.7), tomography_axes(), tomography_axes(), c);
  CHECK(std::abs(named_estimator("mu")(t) - 0.7) < 0.02);
  CHECK(named_estimator("fidelity")(t) > 0.99);
  CHECK(std::abs(named_estimator("npovm")(t) - (0.7 + 1.5 * 0.01)) < 0.02);
  CHECK(std::abs(named_estimator("S")(t) - 0.7) < 0.05);
}
