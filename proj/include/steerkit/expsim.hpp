#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "steerkit/qstate.hpp"
#include "steerkit/steering.hpp"

namespace steerkit {

/// Photon-pair source with a lossy channel and gated detectors.
struct SourceConfig {
  double mix_weight = 1.0;          // pump fraction sent to the singlet source
  double singlet_visibility = 1.0;  // 1 = ideal singlet output
  double pair_rate = 1e6;           // pairs per second
  double integration_time = 1.0;    // seconds per setting pair
  double eps_a = 1.0;
  double eps_b = 1.0;
  double dark_rate_a = 0.0;  // per detector, counts per second
  double dark_rate_b = 0.0;
  std::uint64_t seed = 1;

  static constexpr double kGateWindow = 3e-9;  // seconds

  void validate() const;
};

// w rho_singlet(v) + (1 - w) I4/4 with
// rho_singlet(v) = v |Psi-><Psi-| + (1 - v)(|HV><HV| + |VH><VH|)/2.
DensityMatrix4 mix_sources(double w, double visibility);

/// Counts for one measurement period with Alice on setting_a and Bob on
/// setting_b. Outcome index 0 -> +1, 1 -> -1.
struct PairCounts {
  std::size_t setting_a = 0;
  std::size_t setting_b = 0;
  std::array<std::array<std::uint64_t, 2>, 2> coinc{};  // [a][b]
  std::array<std::uint64_t, 2> singles_a{};
  std::array<std::uint64_t, 2> singles_b{};

  std::uint64_t coincidences() const {
    return coinc[0][0] + coinc[0][1] + coinc[1][0] + coinc[1][1];
  }
};

struct CountTable {
  std::vector<Vec3> settings_a;
  std::vector<Vec3> settings_b;
  std::vector<PairCounts> pairs;
  std::optional<SourceConfig> config;
  std::uint64_t seed = 0;

  const PairCounts* find(std::size_t i, std::size_t j) const;
};

enum class PairSelection { All, Matched };

// Born-rule P(a, b) for projective measurements along u (Alice) and w (Bob).
std::array<std::array<double, 2>, 2> joint_probabilities(const DensityMatrix4& rho, const Vec3& u,
                                                         const Vec3& w);

/// Poisson count simulation. Each arm is thinned independently by its
/// heralding efficiency; dark counts add Poisson singles, and accidental
/// coincidences arise when a dark count falls in the gate window of a real
/// detection on the other side. Every setting pair draws from its own
/// sub-seed, so the table is reproducible for a fixed seed.
CountTable simulate_counts(const DensityMatrix4& rho, const MeasurementSet& settings_a,
                           const MeasurementSet& settings_b, const SourceConfig& cfg,
                           PairSelection selection = PairSelection::All);

struct HeraldingEstimate {
  double eps_a;
  double eps_b;
  double sd_eps_a;
  double sd_eps_b;
};

// Klyshko efficiencies: coincidences over the other arm's singles.
HeraldingEstimate heralding_efficiency(const CountTable& counts);

// Steering data from matched setting pairs (k, k). With flip, the announced
// outcome is the negation of Alice's result (honest strategy for
// anticorrelated states).
SteeringData steering_data(const CountTable& counts, bool flip_announcement = true);

// Data produced by a party running a cheating strategy mixture: on each
// trial a pure strategy is drawn, the hidden state is sent and an outcome
// sign(u_k.r) is announced only on answered settings.
SteeringData simulate_cheating(const SteeringBoundResult& strategy, const MeasurementSet& settings,
                               std::uint64_t trials_per_setting, std::uint64_t seed,
                               std::vector<double>* answer_rates = nullptr);

}  // namespace steerkit
