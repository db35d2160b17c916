#include "steerkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "steerkit/errors.hpp"

namespace steerkit::io {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw ValidationError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw ValidationError("cannot move " + tmp.string() + " to " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> csv_lines(const std::string& text, const char* header) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty() || lines.front() != header)
    throw ValidationError(std::string("CSV header must be exactly '") + header + "'");
  lines.erase(lines.begin());
  return lines;
}

long long parse_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("not an integer: '" + s + "'");
  }
}

std::uint64_t parse_count(const std::string& s) {
  const long long v = parse_int(s);
  if (v < 0) throw ValidationError("negative count: " + s);
  return static_cast<std::uint64_t>(v);
}

int parse_outcome(const std::string& s, bool allow_zero) {
  const long long v = parse_int(s);
  if (v == 1 || v == -1 || (allow_zero && v == 0)) return static_cast<int>(v);
  throw ValidationError("outcome must be 1 or -1, got " + s);
}

// Ensemble coordinates: 12 significant digits, roundoff-level values as 0.
std::string fmt(double v) {
  if (std::abs(v) < 1e-13) v = 0.0;
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

json state_to_json(const DensityMatrix4& rho) {
  json m = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back({{"re", rho(i, j).real()}, {"im", rho(i, j).imag()}});
    m.push_back(row);
  }
  return {{"basis", kBasisGuard}, {"matrix", m}};
}

DensityMatrix4 state_from_json(const json& j) {
  if (get_field<std::string>(j, "basis") != kBasisGuard)
    throw ValidationError(std::string("state basis guard must be \"") + kBasisGuard + "\"");
  const json& m = j.at("matrix");
  if (!m.is_array() || m.size() != 4) throw ValidationError("state matrix must have 4 rows");
  Matrix4c out;
  for (int i = 0; i < 4; ++i) {
    if (!m[i].is_array() || m[i].size() != 4) throw ValidationError("state matrix rows must have 4 entries");
    for (int k = 0; k < 4; ++k)
      out(i, k) = cplx(get_field<double>(m[i][k], "re"), get_field<double>(m[i][k], "im"));
  }
  return DensityMatrix4(out);
}

void write_state(const fs::path& path, const DensityMatrix4& rho) {
  write_file_atomic(path, state_to_json(rho).dump(2) + "\n");
}

DensityMatrix4 read_state(const fs::path& path) {
  return state_from_json(parse_json(read_file(path), path.string()));
}

json vec_to_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-vector");
  try {
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad 3-vector: ") + e.what());
  }
}

namespace {

json mat_to_json(const Mat3& m) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) out.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return out;
}

}  // namespace

json bloch_to_json(const BlochForm& bf) {
  return {{"a", vec_to_json(bf.a)},         {"b", vec_to_json(bf.b)},
          {"T", mat_to_json(bf.T)},         {"canonical", bf.canonical},
          {"rot_a", mat_to_json(bf.rot_a)}, {"rot_b", mat_to_json(bf.rot_b)}};
}

json settings_to_json(const MeasurementSet& s) {
  json out = json::array();
  for (const auto& d : s.dirs()) out.push_back(vec_to_json(d));
  return out;
}

MeasurementSet settings_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("settings must be an array of 3-vectors");
  std::vector<Vec3> dirs;
  for (const auto& v : j) dirs.push_back(vec_from_json(v));
  return MeasurementSet(std::move(dirs));
}

json report_to_json(const NonsteerReport& r) {
  json j = {{"n_value", r.n_value},
            {"argmax_x", vec_to_json(r.argmax_x)},
            {"epsilon", r.epsilon},
            {"variant", variant_name(r.variant)},
            {"steering_party", party_name(r.steering_party)},
            {"verdict", r.nonsteerable() ? "nonsteerable" : "inconclusive"}};
  j["margin_sd"] = r.margin_sd ? json(*r.margin_sd) : json(nullptr);
  return j;
}

json verdict_to_json(const OneWayVerdict& v) {
  json ns = report_to_json(v.nonsteer_ba);
  ns["delta_N"] = v.delta_N;
  return {{"steer_ab",
           {{"S", v.steer_ab.S},
            {"bound", v.steer_ab.bound},
            {"delta_S", v.steer_ab.delta_S},
            {"sd_margin", v.steer_ab.sd_margin}}},
          {"nonsteer_ba", ns},
          {"conclusive", v.conclusive},
          {"sd_threshold", v.sd_threshold}};
}

json mc_to_json(const McSummary& s) {
  return {{"estimator", s.estimator}, {"mean", s.mean},
          {"sd", s.sd},               {"n_samples", s.n_samples},
          {"n_failed", s.n_failed},   {"seed", s.seed},
          {"failure_policy", "abort if more than 5% of samples fail"}};
}

json config_to_json(const SourceConfig& c) {
  return {{"mix_weight", c.mix_weight},   {"singlet_visibility", c.singlet_visibility},
          {"pair_rate", c.pair_rate},     {"integration_time", c.integration_time},
          {"eps_a", c.eps_a},             {"eps_b", c.eps_b},
          {"dark_rate_a", c.dark_rate_a}, {"dark_rate_b", c.dark_rate_b},
          {"seed", c.seed},               {"gate_window", SourceConfig::kGateWindow}};
}

SourceConfig config_from_json(const json& j) {
  SourceConfig c;
  c.mix_weight = j.value("mix_weight", c.mix_weight);
  c.singlet_visibility = j.value("singlet_visibility", c.singlet_visibility);
  c.pair_rate = j.value("pair_rate", c.pair_rate);
  c.integration_time = j.value("integration_time", c.integration_time);
  c.eps_a = j.value("eps_a", c.eps_a);
  c.eps_b = j.value("eps_b", c.eps_b);
  c.dark_rate_a = j.value("dark_rate_a", c.dark_rate_a);
  c.dark_rate_b = j.value("dark_rate_b", c.dark_rate_b);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

std::string counts_to_csv(const CountTable& t) {
  std::ostringstream os;
  os << kCountsHeader << "\n";
  for (const auto& p : t.pairs) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        os << p.setting_a << "," << p.setting_b << "," << outcome_value(a) << ","
           << outcome_value(b) << "," << p.coinc[a][b] << "\n";
    for (int a = 0; a < 2; ++a)
      os << p.setting_a << "," << p.setting_b << "," << outcome_value(a) << ",0,"
         << p.singles_a[a] << "\n";
    for (int b = 0; b < 2; ++b)
      os << p.setting_a << "," << p.setting_b << ",0," << outcome_value(b) << ","
         << p.singles_b[b] << "\n";
  }
  return os.str();
}

CountTable counts_from_csv(const std::string& text) {
  CountTable t;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (const auto& line : csv_lines(text, kCountsHeader)) {
    const auto f = split(line, ',');
    if (f.size() != 5) throw ValidationError("count row needs 5 fields: " + line);
    const long long i = parse_int(f[0]), j = parse_int(f[1]);
    if (i < 0 || j < 0) throw ValidationError("negative setting index: " + line);
    const int a = parse_outcome(f[2], true), b = parse_outcome(f[3], true);
    const std::uint64_t n = parse_count(f[4]);
    const auto key = std::make_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    auto it = index.find(key);
    if (it == index.end()) {
      PairCounts pc;
      pc.setting_a = key.first;
      pc.setting_b = key.second;
      t.pairs.push_back(pc);
      it = index.emplace(key, t.pairs.size() - 1).first;
    }
    PairCounts& pc = t.pairs[it->second];
    if (a != 0 && b != 0) pc.coinc[outcome_index(a)][outcome_index(b)] += n;
    else if (a != 0) pc.singles_a[outcome_index(a)] += n;
    else if (b != 0) pc.singles_b[outcome_index(b)] += n;
    else throw ValidationError("row has no outcome on either side: " + line);
  }
  return t;
}

json counts_sidecar(const CountTable& t) {
  json sa = json::array(), sb = json::array();
  for (const auto& v : t.settings_a) sa.push_back(vec_to_json(v));
  for (const auto& v : t.settings_b) sb.push_back(vec_to_json(v));
  json j = {{"settings_a", sa}, {"settings_b", sb}, {"seed", t.seed}};
  j["config"] = t.config ? config_to_json(*t.config) : json(nullptr);
  return j;
}

void apply_sidecar(CountTable& t, const json& j) {
  t.settings_a.clear();
  t.settings_b.clear();
  for (const auto& v : j.value("settings_a", json::array())) t.settings_a.push_back(vec_from_json(v));
  for (const auto& v : j.value("settings_b", json::array())) t.settings_b.push_back(vec_from_json(v));
  t.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config") && !j["config"].is_null()) t.config = config_from_json(j["config"]);
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p += ".meta.json";
  return p;
}

void write_counts(const fs::path& csv, const CountTable& t) {
  write_file_atomic(csv, counts_to_csv(t));
  write_file_atomic(sidecar_path(csv), counts_sidecar(t).dump(2) + "\n");
}

CountTable read_counts(const fs::path& csv) {
  CountTable t = counts_from_csv(read_file(csv));
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) apply_sidecar(t, parse_json(read_file(side), side.string()));
  return t;
}

std::string steering_to_csv(const SteeringData& d) {
  std::ostringstream os;
  os << kSteeringHeader << "\n";
  for (std::size_t k = 0; k < d.settings.size(); ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        os << k << "," << outcome_value(a) << "," << outcome_value(b) << ","
           << d.settings[k].n[a][b] << "\n";
  return os.str();
}

SteeringData steering_from_csv(const std::string& text) {
  SteeringData d;
  for (const auto& line : csv_lines(text, kSteeringHeader)) {
    const auto f = split(line, ',');
    if (f.size() != 4) throw ValidationError("steering row needs 4 fields: " + line);
    const long long k = parse_int(f[0]);
    if (k < 0 || k > 1000) throw ValidationError("bad setting index: " + line);
    const auto ks = static_cast<std::size_t>(k);
    if (d.settings.size() <= ks) d.settings.resize(ks + 1);
    d.settings[ks].n[outcome_index(parse_outcome(f[1], false))]
                    [outcome_index(parse_outcome(f[2], false))] += parse_count(f[3]);
  }
  return d;
}

std::string ensemble_to_csv(const Ensemble& e) {
  std::ostringstream os;
  os << kEnsembleHeader << "\n";
  for (const auto& p : e.points) os << fmt(p.b_dot_x) << "," << fmt(p.t_norm) << ",0\n";
  os << fmt(e.argmax.b_dot_x) << "," << fmt(e.argmax.t_norm) << ",1\n";
  return os.str();
}

std::string ensemble_to_svg(const Ensemble& e) {
  const double w = 480, h = 360, pad = 40;
  double pmax = std::abs(e.argmax.b_dot_x);
  for (const auto& p : e.points) pmax = std::max(pmax, std::abs(p.b_dot_x));
  pmax = std::min(1.0, std::max(0.05, 1.25 * pmax));
  const double qmin = 0.0, qmax = 1.05;
  auto sx = [&](double q) { return pad + (q - qmin) / (qmax - qmin) * (w - 2 * pad); };
  auto sy = [&](double p) { return h - pad - (p + pmax) / (2 * pmax) * (h - 2 * pad); };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << sx(qmin) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(qmax) << "\" y2=\""
     << sy(0) << "\" stroke=\"#bbb\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\">||T x||</text>\n";
  os << "<text x=\"4\" y=\"" << h / 2 << "\" font-size=\"12\">b.x</text>\n";

  const double k = 3.0 * e.epsilon;
  os << "<polyline fill=\"none\" stroke=\"purple\" stroke-width=\"1.5\" points=\"";
  for (int i = 0; i <= 200; ++i) {
    const double p = -pmax + 2 * pmax * i / 200.0;
    const double q = 1.0 - (1.0 - k) * std::abs(p) - (k / 2.0) * (1.0 + p * p);
    os << sx(q) << "," << sy(p) << " ";
  }
  os << "\"/>\n";
  for (const auto& p : e.points)
    os << "<circle cx=\"" << sx(p.t_norm) << "\" cy=\"" << sy(p.b_dot_x)
       << "\" r=\"1.5\" fill=\"green\"/>\n";
  os << "<circle cx=\"" << sx(e.argmax.t_norm) << "\" cy=\"" << sy(e.argmax.b_dot_x)
     << "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace steerkit::io
