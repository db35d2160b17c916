#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "steerkit/criteria.hpp"
#include "steerkit/expsim.hpp"
#include "steerkit/io.hpp"
#include "steerkit/steering.hpp"
#include "steerkit/tomo.hpp"

namespace steerkit {

/// One operating point of the one-way steering experiment.
///
/// The source is either the mixed Werner source (mix_weight, visibility)
/// or a state file. Count scales are expected coincidences: per steering
/// setting, and per tomography axis pair. Integration times are derived
/// from them and the pair rate.
struct Scenario {
  std::string name = "scenario";
  double mix_weight = 1.0;
  double visibility = 1.0;
  std::optional<std::string> state_file;
  double eps_a = 0.3;
  double eps_b = 2.52e-3;
  int n_settings = 6;
  double steer_coincidences = 1e5;
  double tomo_coincidences = 5e4;
  double pair_rate = 1e6;
  double dark_rate_a = 0.0;
  double dark_rate_b = 0.0;
  std::uint64_t seed = 1;
  std::size_t n_samples = kDefaultMcSamples;
  double sd_threshold = 3.0;
};

Scenario scenario_from_json(const io::json& j);
io::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

// Source state of a scenario; relative state files resolve against base_dir.
DensityMatrix4 scenario_state(const Scenario& s, const std::filesystem::path& base_dir = {});

SourceConfig steering_config(const Scenario& s);
SourceConfig tomography_config(const Scenario& s);

struct PipelineResult {
  OneWayVerdict verdict;
  SteeringEstimate steering;
  HeraldingEstimate steer_herald;
  HeraldingEstimate tomo_herald;
  McSummary n_mc;
  DensityMatrix4 rho_hat;
  CountTable steer_counts;
  CountTable tomo_counts;
};

/// Full analysis of one scenario: simulate the n-setting steering test
/// (Alice -> Bob, honest announcements) and the tomography run, then
/// combine the steering margin with the POVM nonsteerability margin for
/// Bob -> Alice, whose uncertainty comes from Monte Carlo over the
/// tomography counts.
PipelineResult run_pipeline(const Scenario& s, const DensityMatrix4& source);

}  // namespace steerkit
