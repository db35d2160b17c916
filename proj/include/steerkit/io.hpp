#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerkit/criteria.hpp"
#include "steerkit/expsim.hpp"
#include "steerkit/steering.hpp"
#include "steerkit/tomo.hpp"

namespace steerkit::io {

using nlohmann::json;

inline constexpr const char* kBasisGuard = "HH,HV,VH,VV";
inline constexpr const char* kCountsHeader = "setting_a,setting_b,a,b,count";
inline constexpr const char* kSteeringHeader = "setting,a,b,count";
inline constexpr const char* kEnsembleHeader = "b_dot_x,t_norm,is_argmax";

// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// State files: {"basis": "HH,HV,VH,VV", "matrix": 4x4 of {"re", "im"}}.
json state_to_json(const DensityMatrix4& rho);
DensityMatrix4 state_from_json(const json& j);
void write_state(const std::filesystem::path& path, const DensityMatrix4& rho);
DensityMatrix4 read_state(const std::filesystem::path& path);

json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const json& j);
json bloch_to_json(const BlochForm& bf);
json settings_to_json(const MeasurementSet& s);
MeasurementSet settings_from_json(const json& j);

json report_to_json(const NonsteerReport& r);
json verdict_to_json(const OneWayVerdict& v);
json mc_to_json(const McSummary& s);
json config_to_json(const SourceConfig& c);
SourceConfig config_from_json(const json& j);

/// Count tables as CSV rows "setting_a,setting_b,a,b,count". Coincidences
/// use a, b in {1, -1}; singles rows put 0 in the other party's column
/// (a,0 for Alice singles, 0,b for Bob singles). Settings, seed and source
/// configuration go to a JSON sidecar next to the CSV.
std::string counts_to_csv(const CountTable& t);
CountTable counts_from_csv(const std::string& text);
json counts_sidecar(const CountTable& t);
void apply_sidecar(CountTable& t, const json& j);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);
void write_counts(const std::filesystem::path& csv, const CountTable& t);
CountTable read_counts(const std::filesystem::path& csv);  // sidecar optional

std::string steering_to_csv(const SteeringData& d);
SteeringData steering_from_csv(const std::string& text);

std::string ensemble_to_csv(const Ensemble& e);
// Scatter of the ensemble with the bound curve q = 1 - (1-3e)|p| - (3e/2)(1+p^2).
std::string ensemble_to_svg(const Ensemble& e);

}  // namespace steerkit::io
