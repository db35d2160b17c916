// steerkit command-line interface.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/expsim.hpp"
#include "steerkit/io.hpp"
#include "steerkit/pipeline.hpp"
#include "steerkit/qstate.hpp"
#include "steerkit/steering.hpp"
#include "steerkit/tomo.hpp"

namespace fs = std::filesystem;
using namespace steerkit;
using io::json;

namespace {

// JSON goes to a file (atomically) when a path is given, else to stdout.
void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else io::write_file_atomic(out, text);
}

Party parse_party(const std::string& s) { return s == "alice" ? Party::Alice : Party::Bob; }

BlochForm canonical_of(const DensityMatrix4& rho) { return canonical_form(bloch_decompose(rho)); }

json bound_json(const MeasurementSet& settings, double eps_a) {
  const SteeringBoundResult r = steering_bound_detail(settings, eps_a);
  json support = json::array();
  for (const auto& s : r.support) {
    json answered = json::array();
    for (bool b : s.answered) answered.push_back(b);
    support.push_back({{"answered", answered},
                       {"hidden_direction", io::vec_to_json(s.hidden_direction)},
                       {"weight", s.weight}});
  }
  return {{"n", settings.size()}, {"eps_a", eps_a}, {"bound", r.bound}, {"support", support}};
}

// Accepts either a full count table or a steering table (setting,a,b,count).
struct SteeringInput {
  SteeringData data;
  std::optional<HeraldingEstimate> herald;
  std::size_t n_settings = 0;
  std::vector<Vec3> settings;
};

SteeringInput load_steering_input(const fs::path& path) {
  const std::string text = io::read_file(path);
  const std::string first = text.substr(0, text.find('\n'));
  SteeringInput in;
  if (first.rfind(io::kSteeringHeader, 0) == 0 && first.size() <= std::string(io::kSteeringHeader).size() + 1) {
    in.data = io::steering_from_csv(text);
  } else {
    const CountTable t = io::read_counts(path);
    in.data = steering_data(t);
    in.herald = heralding_efficiency(t);
    in.settings = t.settings_a;
  }
  in.n_settings = in.data.settings.size();
  return in;
}

MeasurementSet settings_for(const SteeringInput& in) {
  if (!in.settings.empty()) return MeasurementSet(in.settings);
  return platonic_settings(static_cast<int>(in.n_settings));
}

fs::path base_dir_of(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path{}; }

json pipeline_json(const Scenario& s, const PipelineResult& r) {
  const WernerMatch wm = closest_werner(r.rho_hat);
  return {{"scenario", s.name},
          {"verdict", io::verdict_to_json(r.verdict)},
          {"heralding",
           {{"eps_a", r.steer_herald.eps_a},
            {"sd_eps_a", r.steer_herald.sd_eps_a},
            {"eps_b", r.tomo_herald.eps_b},
            {"sd_eps_b", r.tomo_herald.sd_eps_b}}},
          {"monte_carlo", io::mc_to_json(r.n_mc)},
          {"closest_werner", {{"mu", wm.mu}, {"fidelity", wm.fidelity}}}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void figure3(const fs::path& dir, const fs::path& out_dir) {
  if (!fs::is_directory(dir)) throw ValidationError("scenario set is not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InsufficientDataError("no scenario files in " + dir.string());

  std::ostringstream steer, nonsteer;
  steer << "scenario,eps_a,S,delta_S,bound,sd_margin\n";
  nonsteer << "scenario,mu,eps_b,N,delta_N,sd_margin,conclusive\n";
  int n_settings = 0;
  for (const auto& f : files) {
    const Scenario s = load_scenario(f);
    n_settings = s.n_settings;
    const PipelineResult r = run_pipeline(s, scenario_state(s, base_dir_of(f)));
    const auto& v = r.verdict;
    steer << s.name << "," << fmt(r.steer_herald.eps_a) << "," << fmt(v.steer_ab.S) << ","
          << fmt(v.steer_ab.delta_S) << "," << fmt(v.steer_ab.bound) << ","
          << fmt(v.steer_ab.sd_margin) << "\n";
    nonsteer << s.name << "," << fmt(closest_werner(r.rho_hat).mu) << "," << fmt(r.tomo_herald.eps_b)
             << "," << fmt(v.nonsteer_ba.n_value) << "," << fmt(v.delta_N) << ","
             << fmt(v.nonsteer_ba.margin_sd.value_or(0.0)) << "," << (v.conclusive ? 1 : 0) << "\n";
  }

  // Bound curve for the settings of the last scenario.
  std::ostringstream curve;
  curve << "eps_a,bound\n";
  const MeasurementSet settings = platonic_settings(n_settings);
  for (int i = 1; i <= 100; ++i) {
    const double e = i / 100.0;
    curve << fmt(e) << "," << fmt(steering_bound(settings, e)) << "\n";
  }

  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "figure3_steering.csv", steer.str());
  io::write_file_atomic(out_dir / "figure3_nonsteer.csv", nonsteer.str());
  io::write_file_atomic(out_dir / "figure3_bound.csv", curve.str());
}

int fail(const Error& e) {
  json j = {{"error", e.kind_name()}, {"message", e.what()}, {"exit_code", e.exit_code()}};
  std::cerr << j.dump() << "\n";
  return e.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steerkit: one-way EPR steering analysis toolkit"};
  app.require_subcommand(1);
  std::string out;

  auto* werner = app.add_subcommand("werner", "Write a Werner state");
  double mu = 0.0;
  werner->add_option("--mu", mu, "Singlet weight in [0, 1]")->required();
  werner->add_option("-o,--output", out, "State file (default stdout)");

  std::string state_path, state_b;
  auto* decompose = app.add_subcommand("decompose", "Bloch vectors and correlation matrix");
  decompose->add_option("state", state_path)->required();
  auto* canonical = app.add_subcommand("canonical", "Canonical (diagonal T) local frame");
  canonical->add_option("state", state_path)->required();
  auto* fid = app.add_subcommand("fidelity", "Uhlmann fidelity of two states");
  fid->add_option("a", state_path)->required();
  fid->add_option("b", state_b)->required();
  auto* closest = app.add_subcommand("closest-werner", "Closest Werner state by fidelity");
  closest->add_option("state", state_path)->required();

  auto* check = app.add_subcommand("check-nonsteer", "Sufficient nonsteerability condition");
  double eps = 0.0;
  std::string variant = "povm", party = "bob";
  check->add_option("state", state_path)->required();
  check->add_option("--eps", eps, "Heralding efficiency of the steering party")->required();
  check->add_option("--variant", variant)->check(CLI::IsMember({"povm", "pvm"}));
  check->add_option("--party", party, "Steering party")->check(CLI::IsMember({"alice", "bob"}));

  auto* bound = app.add_subcommand("bound", "Cheating bound on the steering parameter");
  int n_settings = 6;
  std::optional<double> eps_a;
  bound->add_option("--n", n_settings, "Number of settings (2, 3, 4, 6, 10)");
  bound->add_option("--eps-a", eps_a, "Announcement probability")->required();

  auto* steer = app.add_subcommand("steer-test", "Steering parameter against the bound");
  std::string counts_path;
  steer->add_option("counts", counts_path)->required();
  steer->add_option("--eps-a", eps_a, "Heralding efficiency (default: Klyshko estimate)");

  auto* simulate = app.add_subcommand("simulate", "Simulate detector counts for a scenario");
  std::string scenario_path, kind = "tomography";
  simulate->add_option("--scenario", scenario_path)->required();
  simulate->add_option("--kind", kind, "tomography (3x3 axes) or steering (matched settings)")
      ->check(CLI::IsMember({"tomography", "steering"}));
  simulate->add_option("-o,--output", out)->required();

  auto* tomo = app.add_subcommand("tomo", "Reconstruct a state from tomography counts");
  tomo->add_option("counts", counts_path)->required();
  tomo->add_option("-o,--output", out, "State file (default stdout)");

  auto* mc = app.add_subcommand("mc", "Monte Carlo uncertainty of an estimator");
  std::string estimator;
  std::size_t samples = kDefaultMcSamples;
  std::uint64_t seed = 1;
  mc->add_option("counts", counts_path)->required();
  mc->add_option("--estimator", estimator)->required()->check(CLI::IsMember(estimator_names()));
  mc->add_option("--samples", samples);
  mc->add_option("--seed", seed);

  auto* verdict = app.add_subcommand("verdict", "Full one-way steering pipeline");
  verdict->add_option("--scenario", scenario_path)->required();
  verdict->add_option("-o,--output", out);

  auto* fig3 = app.add_subcommand("figure3", "Steering and nonsteerability panels");
  std::string set_dir, out_dir = ".";
  fig3->add_option("--scenario-set", set_dir)->required();
  fig3->add_option("-o,--output-dir", out_dir);

  auto* figs2 = app.add_subcommand("figure-s2", "Ensemble scatter with the bound curve");
  std::size_t dirs = 625;
  std::string prefix = "figure_s2";
  figs2->add_option("state", state_path)->required();
  figs2->add_option("--eps", eps)->required();
  figs2->add_option("--dirs", dirs);
  figs2->add_option("-o,--output", prefix, "Output prefix for .csv and .svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(ValidationError(e.what()));
  }

  try {
    if (*werner) {
      const DensityMatrix4 rho = werner_state(mu);
      if (out.empty()) std::cout << io::state_to_json(rho).dump(2) << "\n";
      else io::write_state(out, rho);
    } else if (*decompose) {
      emit(io::bloch_to_json(bloch_decompose(io::read_state(state_path))), "");
    } else if (*canonical) {
      emit(io::bloch_to_json(canonical_of(io::read_state(state_path))), "");
    } else if (*fid) {
      emit({{"fidelity", fidelity(io::read_state(state_path), io::read_state(state_b))}}, "");
    } else if (*closest) {
      const WernerMatch m = closest_werner(io::read_state(state_path));
      emit({{"mu", m.mu}, {"fidelity", m.fidelity}}, "");
    } else if (*check) {
      const BlochForm bf = canonical_of(io::read_state(state_path));
      const NonsteerReport r = variant == "povm" ? n_povm(bf, eps, parse_party(party))
                                                 : n_restricted_pvm(bf, eps, parse_party(party));
      emit(io::report_to_json(r), "");
    } else if (*bound) {
      emit(bound_json(platonic_settings(n_settings), *eps_a), "");
    } else if (*steer) {
      const SteeringInput in = load_steering_input(counts_path);
      const SteeringEstimate e = steering_parameter(in.data);
      if (!eps_a && !in.herald)
        throw InsufficientDataError("no singles in the input: pass --eps-a");
      const double ea = eps_a ? *eps_a : in.herald->eps_a;
      const double b = steering_bound(settings_for(in), ea);
      json j = {{"S", e.S},
                {"delta_S", e.delta_S_stat},
                {"correlators", e.correlators},
                {"eps_a", ea},
                {"bound", b},
                {"sd_margin", e.delta_S_stat > 0 ? (e.S - b) / e.delta_S_stat : 0.0},
                {"steering_demonstrated", e.S > b}};
      emit(j, "");
    } else if (*simulate) {
      const Scenario s = load_scenario(scenario_path);
      const DensityMatrix4 rho = scenario_state(s, base_dir_of(scenario_path));
      if (kind == "steering") {
        const MeasurementSet settings = platonic_settings(s.n_settings);
        io::write_counts(out, simulate_counts(rho, settings, settings, steering_config(s),
                                              PairSelection::Matched));
      } else {
        io::write_counts(out, simulate_counts(rho, tomography_axes(), tomography_axes(),
                                              tomography_config(s)));
      }
    } else if (*tomo) {
      const DensityMatrix4 rho = reconstruct(io::read_counts(counts_path));
      if (out.empty()) std::cout << io::state_to_json(rho).dump(2) << "\n";
      else io::write_state(out, rho);
    } else if (*mc) {
      const CountTable t = io::read_counts(counts_path);
      emit(io::mc_to_json(mc_uncertainty(t, estimator, named_estimator(estimator), samples, seed)), "");
    } else if (*verdict) {
      const Scenario s = load_scenario(scenario_path);
      const PipelineResult r = run_pipeline(s, scenario_state(s, base_dir_of(scenario_path)));
      emit(pipeline_json(s, r), out);
    } else if (*fig3) {
      figure3(set_dir, out_dir);
    } else if (*figs2) {
      const Ensemble e = ensemble_points(canonical_of(io::read_state(state_path)), dirs, eps);
      io::write_file_atomic(prefix + ".csv", io::ensemble_to_csv(e));
      io::write_file_atomic(prefix + ".svg", io::ensemble_to_svg(e));
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const json::exception& e) {
    return fail(ValidationError(e.what()));
  } catch (const std::exception& e) {
    return fail(Error(ErrorKind::Internal, e.what()));
  }
  return 0;
}
