#include "steerkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "steerkit/errors.hpp"
#include "steerkit/lp.hpp"
#include "steerkit/sphere.hpp"

namespace steerkit {

MeasurementSet::MeasurementSet(std::vector<Vec3> dirs) : dirs_(std::move(dirs)) {
  if (dirs_.empty()) throw ValidationError("measurement set is empty");
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    if (std::abs(dirs_[i].norm() - 1.0) > 1e-12)
      throw ValidationError("measurement direction is not a unit vector");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(dirs_[i].dot(dirs_[j])) >= 1.0 - 1e-9)
        throw ValidationError("measurement directions are parallel or antiparallel");
  }
}

MeasurementSet platonic_settings(int n) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> d;
  switch (n) {
    case 2:
      d = {Vec3::UnitX(), Vec3::UnitZ()};
      break;
    case 3:
      d = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
      break;
    case 4:
      d = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
      break;
    case 6:
      d = {{0, 1, phi}, {0, 1, -phi}, {1, phi, 0}, {1, -phi, 0}, {phi, 0, 1}, {-phi, 0, 1}};
      break;
    case 10:
      d = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {-1, 1, 1},
           {0, 1 / phi, phi}, {0, 1 / phi, -phi},
           {1 / phi, phi, 0}, {1 / phi, -phi, 0},
           {phi, 0, 1 / phi}, {-phi, 0, 1 / phi}};
      break;
    default: {
      std::ostringstream os;
      os << "no platonic measurement preset with n = " << n << " (use 2, 3, 4, 6 or 10)";
      throw DomainError(os.str());
    }
  }
  for (Vec3& v : d) v.normalize();
  return MeasurementSet(std::move(d));
}

double SettingCounts::correlator() const {
  const double tot = static_cast<double>(total());
  const double same = static_cast<double>(n[0][0] + n[1][1]);
  const double diff = static_cast<double>(n[0][1] + n[1][0]);
  return (same - diff) / tot;
}

SteeringEstimate steering_parameter(const SteeringData& data) {
  if (data.settings.empty()) throw InsufficientDataError("steering data has no settings");
  SteeringEstimate est{0.0, 0.0, {}};
  double var = 0.0;
  for (std::size_t k = 0; k < data.settings.size(); ++k) {
    const auto& c = data.settings[k];
    if (c.total() == 0) {
      std::ostringstream os;
      os << "setting " << k << " has no coincidences";
      throw InsufficientDataError(os.str());
    }
    const double e = c.correlator();
    est.correlators.push_back(e);
    est.S += e;
    // E = 2p - 1 with p binomial: var(E) = (1 - E^2)/N.
    var += (1.0 - e * e) / static_cast<double>(c.total());
  }
  const double n = static_cast<double>(data.settings.size());
  est.S /= n;
  est.delta_S_stat = std::sqrt(var) / n;
  return est;
}

namespace {

struct SubsetBest {
  double length;
  Vec3 direction;
};

// max over sign patterns of || sum_{k in mask} s_k u_k ||; the first sign
// is fixed since the overall sign does not matter.
SubsetBest best_direction(const MeasurementSet& s, std::uint32_t mask) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (mask & (1u << k)) idx.push_back(k);
  SubsetBest best{0.0, Vec3::UnitZ()};
  if (idx.empty()) return best;
  const std::uint32_t patterns = 1u << (idx.size() - 1);
  for (std::uint32_t p = 0; p < patterns; ++p) {
    Vec3 sum = s[idx[0]];
    for (std::size_t t = 1; t < idx.size(); ++t)
      sum += ((p >> (t - 1)) & 1u ? -1.0 : 1.0) * s[idx[t]];
    const double len = sum.norm();
    if (len > best.length + 1e-15) best = {len, sum / len};
  }
  return best;
}

}  // namespace

SteeringBoundResult steering_bound_detail(const MeasurementSet& settings, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << "announcement probability " << eps << " must lie in (0, 1]";
    throw DomainError(os.str());
  }
  const std::size_t n = settings.size();
  if (n > 16) throw DomainError("steering bound supports at most 16 settings");
  const auto rows = static_cast<Eigen::Index>(n + 1);

  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(rows, eps);
  rhs(0) = 1.0;
  LinearProgram lp(rhs);

  std::vector<SubsetBest> subset;
  const std::uint32_t masks = 1u << n;
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    const SubsetBest best = best_direction(settings, mask);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(rows);
    col(0) = 1.0;
    double gain = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) {
        col(static_cast<Eigen::Index>(k + 1)) = 1.0;
        gain += std::abs(settings[k].dot(best.direction));
      }
    lp.add_column(col, -gain / (static_cast<double>(n) * eps));
    subset.push_back(best);
  }

  const LpSolution sol = lp.minimize();
  if (sol.status != LpStatus::Optimal) throw SolverError("cheating-strategy LP did not solve");

  SteeringBoundResult res{-sol.objective, {}};
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    const double w = sol.x(mask);
    if (w <= 1e-12) continue;
    CheatingStrategy st;
    st.answered.resize(n);
    for (std::size_t k = 0; k < n; ++k) st.answered[k] = (mask >> k) & 1u;
    st.hidden_direction = subset[mask].direction;
    st.weight = w;
    res.support.push_back(std::move(st));
  }
  res.bound = std::min(res.bound, 1.0);
  return res;
}

double steering_bound(const MeasurementSet& settings, double eps) {
  return steering_bound_detail(settings, eps).bound;
}

LhsCheck lhs_grid_check(const BlochForm& state, const MeasurementSet& settings, std::size_t grid,
                        Party measuring) {
  if (grid < 100) throw DomainError("LHS grid needs at least 100 hidden states");
  const std::size_t n = settings.size();
  const Vec3& v_meas = state.bloch(measuring);
  const Vec3& v_trusted = state.bloch(other(measuring));
  // Conditional vector on the trusted side for a measurement along u.
  const Mat3 m = measuring == Party::Alice ? Mat3(state.T.transpose()) : state.T;

  // sigma_{a|k} = (t I + m.sigma)/2 enters through its (t, m) components.
  // Outcomes of one setting sum to the trusted marginal, so only the +1
  // outcome gets rows (k, c) per setting, plus one block (n, c) for the
  // marginal itself; the remaining rows would be linearly dependent.
  const auto rows = static_cast<Eigen::Index>((n + 1) * 4);
  Eigen::VectorXd rhs(rows);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Index base = static_cast<Eigen::Index>(k * 4);
    rhs(base) = 0.5 * (1.0 + settings[k].dot(v_meas));
    rhs.segment<3>(base + 1) = 0.5 * (v_trusted + m * settings[k]);
  }
  const Eigen::Index marg = static_cast<Eigen::Index>(n * 4);
  rhs(marg) = 1.0;
  rhs.segment<3>(marg + 1) = v_trusted;

  const std::vector<Vec3> hidden = fibonacci_sphere(grid);
  auto make_column = [&](const Vec3& r, const std::vector<int>& outcomes) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(rows);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k < n && outcomes[k] != 0) continue;
      const Eigen::Index base = static_cast<Eigen::Index>(k * 4);
      col(base) = 1.0;
      col.segment<3>(base + 1) = r;
    }
    return col;
  };

  // Best deterministic response per hidden state is separable over settings.
  LinearProgram::Pricer pricer = [&](const Eigen::VectorXd& y, bool) {
    struct Cand {
      double score;
      std::size_t idx;
      std::vector<int> outcomes;
    };
    std::vector<Cand> cands;
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      const Vec3& r = hidden[h];
      double score = y(marg) + y.segment<3>(marg + 1).dot(r);
      std::vector<int> outcomes(n, 1);
      for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Index base = static_cast<Eigen::Index>(k * 4);
        const double s = y(base) + y.segment<3>(base + 1).dot(r);
        if (s > 0.0) {
          score += s;
          outcomes[k] = 0;
        }
      }
      if (score > 1e-10) cands.push_back({score, h, std::move(outcomes)});
    }
    const std::size_t take = std::min<std::size_t>(cands.size(), 8);
    std::partial_sort(cands.begin(), cands.begin() + take, cands.end(),
                      [](const Cand& l, const Cand& r) {
                        return l.score != r.score ? l.score > r.score : l.idx < r.idx;
                      });
    std::vector<LpColumn> out;
    for (std::size_t i = 0; i < take; ++i)
      out.push_back({make_column(hidden[cands[i].idx], cands[i].outcomes), 0.0});
    return out;
  };

  LinearProgram lp(rhs);
  lp.set_feasibility_only(true);
  lp.set_feasibility_tolerance(1e-8);
  const LpSolution sol = lp.minimize(pricer);

  LhsCheck res{sol.status == LpStatus::Optimal, sol.infeasibility, grid, 0};
  for (Eigen::Index j = 0; j < sol.x.size(); ++j)
    if (sol.x(j) > 1e-12) ++res.support;
  return res;
}

}  // namespace steerkit
