#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "steerkit/qstate.hpp"

namespace steerkit {

/// n measurement axes on the Bloch sphere. Unit norm (1e-12) and pairwise
/// non-parallel (|u_i.u_j| < 1 - 1e-9) are checked on construction.
class MeasurementSet {
 public:
  explicit MeasurementSet(std::vector<Vec3> dirs);

  std::size_t size() const { return dirs_.size(); }
  const Vec3& operator[](std::size_t k) const { return dirs_[k]; }
  const std::vector<Vec3>& dirs() const { return dirs_; }

 private:
  std::vector<Vec3> dirs_;
};

// Axes through opposite vertices of a platonic solid (n = 3 octahedron,
// 4 cube, 6 icosahedron, 10 dodecahedron); n = 2 is the x/z pair.
MeasurementSet platonic_settings(int n);

// Outcome index convention: 0 -> +1, 1 -> -1.
inline int outcome_index(int outcome) { return outcome > 0 ? 0 : 1; }
inline int outcome_value(int index) { return index == 0 ? 1 : -1; }

/// Coincidences between the announced outcome a_k and the trusted party's
/// outcome for one setting, indexed [a][b] by outcome_index.
struct SettingCounts {
  std::array<std::array<std::uint64_t, 2>, 2> n{};

  std::uint64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
  // <a_k sigma_k> estimated from conditional frequencies.
  double correlator() const;
};

struct SteeringData {
  std::vector<SettingCounts> settings;
};

struct SteeringEstimate {
  double S;
  double delta_S_stat;
  std::vector<double> correlators;
};

// S = (1/n) sum_k <a_k sigma_k>, binomial errors combined in quadrature.
SteeringEstimate steering_parameter(const SteeringData& data);

struct CheatingStrategy {
  std::vector<bool> answered;  // settings on which an outcome is announced
  Vec3 hidden_direction;       // Bloch vector of the pure state sent
  double weight;
};

struct SteeringBoundResult {
  double bound;
  std::vector<CheatingStrategy> support;  // nonzero-weight pure strategies
};

/// Largest post-selected S reachable by a party holding no entanglement
/// that announces on every setting with probability exactly eps.
///
/// Linear program over mixtures of pure strategies (answer subset, hidden
/// direction). For a fixed subset the best direction is available in
/// closed form (the longest signed sum of the answered axes), so the
/// strategy set is finite and the LP is exact.
SteeringBoundResult steering_bound_detail(const MeasurementSet& settings, double eps);
double steering_bound(const MeasurementSet& settings, double eps);

struct LhsCheck {
  bool feasible;
  double residual;         // phase-one L1 residual of the assemblage equations
  std::size_t grid;
  std::size_t support = 0;  // hidden-state strategies with nonzero weight
};

/// Tries to reproduce the assemblage that `measuring` party's projective
/// measurements along `settings` create on the other side, from pure hidden
/// states on a Fibonacci grid with deterministic responses. Feasible means
/// an LHS model exists for these settings; infeasible only means none was
/// found at this grid resolution.
LhsCheck lhs_grid_check(const BlochForm& state, const MeasurementSet& settings, std::size_t grid,
                        Party measuring = Party::Alice);

}  // namespace steerkit
