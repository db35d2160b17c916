#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "steerkit/expsim.hpp"
#include "steerkit/qstate.hpp"

namespace steerkit {

// Local tomography axes x, y, z (setting indices 0, 1, 2 on both sides).
MeasurementSet tomography_axes();

/// Normalized outcome frequencies for the 9 axis pairs: p[i][j][a][b] with
/// i, j in {x, y, z} and outcome index 0 -> +1, 1 -> -1.
struct TomoFrequencies {
  std::array<std::array<std::array<std::array<double, 2>, 2>, 3>, 3> p{};
};

TomoFrequencies ideal_frequencies(const DensityMatrix4& rho);

// Coincidence frequencies of a 3 x 3 axis table. Throws InsufficientDataError
// when a pair is missing or empty, ValidationError when the recorded
// settings are not the x, y, z axes.
TomoFrequencies tomo_frequencies(const CountTable& counts);

// Hermitian unit-trace estimate from Pauli correlators (may be unphysical).
Matrix4c linear_inversion(const TomoFrequencies& f);

// Frobenius-nearest positive semidefinite unit-trace matrix: eigenvalues are
// projected onto the probability simplex (shifted, then clipped at zero).
Matrix4c project_to_states(const Matrix4c& h);

DensityMatrix4 reconstruct(const TomoFrequencies& f);
DensityMatrix4 reconstruct(const CountTable& counts);

struct McSummary {
  std::string estimator;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n_samples = 0;  // successful samples
  std::size_t n_failed = 0;
  std::uint64_t seed = 0;
};

using Estimator = std::function<double(const CountTable&)>;

inline constexpr std::size_t kDefaultMcSamples = 200;
inline constexpr double kMaxFailedFraction = 0.05;

// Every count redrawn as Poisson with the observed count as mean.
CountTable poisson_resample(const CountTable& counts, std::mt19937_64& rng);

/// Parametric bootstrap: n_samples Poisson redraws of the table, each
/// pushed through the estimator; returns the sample mean and standard
/// deviation. Samples whose estimator throws are counted as failed, and
/// more than 5% failures aborts with InsufficientDataError.
McSummary mc_uncertainty(const CountTable& counts, const std::string& name,
                         const Estimator& estimator, std::size_t n_samples = kDefaultMcSamples,
                         std::uint64_t seed = 1);

// Estimators by name: "mu" and "fidelity" (closest Werner state of the
// reconstruction), "npovm" (POVM criterion for Bob steering Alice at the
// table's Klyshko eps_B), "S" (steering parameter of the matched pairs).
Estimator named_estimator(const std::string& name);
const std::vector<std::string>& estimator_names();

}  // namespace steerkit
