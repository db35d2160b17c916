#include "steerkit/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/parallel.hpp"

namespace steerkit {

MeasurementSet tomography_axes() { return platonic_settings(3); }

TomoFrequencies ideal_frequencies(const DensityMatrix4& rho) {
  const auto axes = tomography_axes();
  TomoFrequencies f;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto p = joint_probabilities(rho, axes[i], axes[j]);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) f.p[i][j][a][b] = p[a][b];
    }
  return f;
}

namespace {

void check_axes(const std::vector<Vec3>& dirs, const char* side) {
  if (dirs.empty()) return;  // index convention only
  const auto axes = tomography_axes();
  if (dirs.size() != 3) {
    std::ostringstream os;
    os << "tomography needs 3 settings for " << side << ", table has " << dirs.size();
    throw ValidationError(os.str());
  }
  for (std::size_t k = 0; k < 3; ++k)
    if ((dirs[k] - axes[k]).norm() > 1e-12) {
      std::ostringstream os;
      os << side << " setting " << k << " is not the expected tomography axis";
      throw ValidationError(os.str());
    }
}

}  // namespace

TomoFrequencies tomo_frequencies(const CountTable& counts) {
  check_axes(counts.settings_a, "alice");
  check_axes(counts.settings_b, "bob");
  TomoFrequencies f;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const PairCounts* pc = counts.find(i, j);
      if (!pc) {
        std::ostringstream os;
        os << "tomography table is missing setting pair (" << i << ", " << j << ")";
        throw InsufficientDataError(os.str());
      }
      const double tot = static_cast<double>(pc->coincidences());
      if (tot <= 0.0) {
        std::ostringstream os;
        os << "setting pair (" << i << ", " << j << ") has no coincidences";
        throw InsufficientDataError(os.str());
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) f.p[i][j][a][b] = static_cast<double>(pc->coinc[a][b]) / tot;
    }
  return f;
}

Matrix4c linear_inversion(const TomoFrequencies& f) {
  Vec3 a = Vec3::Zero(), b = Vec3::Zero();
  Mat3 t = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto& p = f.p[i][j];
      t(i, j) = p[0][0] - p[0][1] - p[1][0] + p[1][1];
      // Each marginal is seen by three axis pairs; average them.
      a(i) += (p[0][0] + p[0][1] - p[1][0] - p[1][1]) / 3.0;
      b(j) += (p[0][0] + p[1][0] - p[0][1] - p[1][1]) / 3.0;
    }
  return bloch_reassemble(a, b, t);
}

Matrix4c project_to_states(const Matrix4c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es((h + h.adjoint()) / 2.0);
  const Eigen::Vector4d lam = es.eigenvalues();

  std::array<double, 4> u{lam(0), lam(1), lam(2), lam(3)};
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (int j = 0; j < 4; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / (j + 1);
    if (u[j] - t > 0) theta = t;
  }
  const Eigen::Vector4d proj = (lam.array() - theta).cwiseMax(0.0);
  Matrix4c out = es.eigenvectors() * proj.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return (out + out.adjoint()) / 2.0;
}

DensityMatrix4 reconstruct(const TomoFrequencies& f) {
  return DensityMatrix4(project_to_states(linear_inversion(f)));
}

DensityMatrix4 reconstruct(const CountTable& counts) { return reconstruct(tomo_frequencies(counts)); }

CountTable poisson_resample(const CountTable& counts, std::mt19937_64& rng) {
  auto draw = [&](std::uint64_t observed) -> std::uint64_t {
    if (observed == 0) return 0;
    std::poisson_distribution<std::uint64_t> d(static_cast<double>(observed));
    return d(rng);
  };
  CountTable out = counts;
  for (auto& p : out.pairs) {
    for (auto& row : p.coinc)
      for (auto& c : row) c = draw(c);
    for (auto& s : p.singles_a) s = draw(s);
    for (auto& s : p.singles_b) s = draw(s);
  }
  return out;
}

McSummary mc_uncertainty(const CountTable& counts, const std::string& name,
                         const Estimator& estimator, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw DomainError("Monte Carlo needs at least 2 samples");
  std::vector<std::optional<double>> values(n_samples);
  std::vector<std::string> errors(n_samples);
  parallel_for(n_samples, [&](std::size_t s) {
    std::mt19937_64 rng(sub_seed(seed, s));
    try {
      const double v = estimator(poisson_resample(counts, rng));
      if (std::isfinite(v)) values[s] = v;
      else errors[s] = "non-finite estimate";
    } catch (const Error& e) {
      errors[s] = e.what();
    }
  });

  McSummary sum;
  sum.estimator = name;
  sum.seed = seed;
  std::vector<double> ok;
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (values[s]) ok.push_back(*values[s]);
  }
  sum.n_samples = ok.size();
  sum.n_failed = n_samples - ok.size();
  if (static_cast<double>(sum.n_failed) > kMaxFailedFraction * static_cast<double>(n_samples) ||
      ok.size() < 2) {
    std::string first;
    for (const auto& e : errors)
      if (!e.empty()) {
        first = e;
        break;
      }
    std::ostringstream os;
    os << "Monte Carlo estimator '" << name << "' failed on " << sum.n_failed << " of "
       << n_samples << " samples (first error: " << first << ")";
    throw InsufficientDataError(os.str());
  }

  // Two-pass mean/variance in index order.
  double mean = 0.0;
  for (double v : ok) mean += v;
  mean /= static_cast<double>(ok.size());
  double ss = 0.0;
  for (double v : ok) ss += (v - mean) * (v - mean);
  sum.mean = mean;
  sum.sd = std::sqrt(ss / static_cast<double>(ok.size() - 1));
  return sum;
}

const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names{"mu", "fidelity", "npovm", "S"};
  return names;
}

Estimator named_estimator(const std::string& name) {
  if (name == "mu")
    return [](const CountTable& c) { return closest_werner(reconstruct(c)).mu; };
  if (name == "fidelity")
    return [](const CountTable& c) { return closest_werner(reconstruct(c)).fidelity; };
  if (name == "npovm")
    return [](const CountTable& c) {
      const double eps_b = heralding_efficiency(c).eps_b;
      const BlochForm bf = canonical_form(bloch_decompose(reconstruct(c)));
      return n_povm(bf, eps_b, Party::Bob).n_value;
    };
  if (name == "S")
    return [](const CountTable& c) { return steering_parameter(steering_data(c)).S; };
  std::ostringstream os;
  os << "unknown estimator '" << name << "' (expected mu, fidelity, npovm or S)";
  throw ValidationError(os.str());
}

}  // namespace steerkit
