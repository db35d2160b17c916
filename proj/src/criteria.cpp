#include "steerkit/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steerkit/errors.hpp"

namespace steerkit {

const char* variant_name(CriterionVariant v) {
  return v == CriterionVariant::POVM ? "povm" : "restricted_pvm";
}

BlochObjective nonsteer_objective(const BlochForm& bf, double eps, Party steering) {
  // M x must be the trusted side's conditional vector for a measurement
  // along x on the steering side.
  const Mat3 m = steering == Party::Bob ? bf.T : Mat3(bf.T.transpose());
  return BlochObjective{bf.bloch(steering), m, 1.0 - eps, eps / 2.0};
}

namespace {

void require_canonical(const BlochForm& bf) {
  if (!bf.canonical || !is_canonical_shape(bf.T, 1e-10))
    throw ContractError("nonsteerability criterion requires a canonical BlochForm");
}

NonsteerReport evaluate(const BlochForm& bf, double eps_pvm, Party steering,
                        const SphereMaxOptions& opts) {
  const SphereMax m = maximize_on_sphere(nonsteer_objective(bf, eps_pvm, steering), opts);
  NonsteerReport r;
  r.n_value = m.value;
  r.argmax_x = m.x.normalized();
  r.steering_party = steering;
  return r;
}

}  // namespace

NonsteerReport n_restricted_pvm(const BlochForm& bf, double eps, Party steering,
                                const SphereMaxOptions& opts) {
  require_canonical(bf);
  if (!(eps >= 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << "heralding efficiency " << eps << " outside [0, 1]";
    throw DomainError(os.str());
  }
  NonsteerReport r = evaluate(bf, eps, steering, opts);
  r.epsilon = eps;
  r.variant = CriterionVariant::RestrictedPVM;
  return r;
}

NonsteerReport n_povm(const BlochForm& bf, double eps, Party steering,
                      const SphereMaxOptions& opts) {
  require_canonical(bf);
  if (!(eps >= 0.0)) {
    std::ostringstream os;
    os << "heralding efficiency " << eps << " is negative";
    throw DomainError(os.str());
  }
  if (eps > 1.0 / 3.0) {
    std::ostringstream os;
    os << "POVM nonsteerability condition is only derived for eps <= 1/3 (got " << eps << ")";
    throw OutOfRegimeError(os.str());
  }
  NonsteerReport r = evaluate(bf, std::min(1.0, 3.0 * eps), steering, opts);
  r.epsilon = eps;
  r.variant = CriterionVariant::POVM;
  return r;
}

MatrixXc povm_noise_construct(const MatrixXc& rho, const MatrixXc& sigma_a, int d) {
  if (d < 2) throw DomainError("noise construction needs local dimension d >= 2");
  if (sigma_a.rows() != d || sigma_a.cols() != d)
    throw ValidationError("sigma_A must be a d x d matrix");
  if (rho.rows() != rho.cols() || rho.rows() % d != 0)
    throw ValidationError("rho must be square with dimension divisible by d");
  const int db = static_cast<int>(rho.rows()) / d;
  const MatrixXc rho_b = partial_trace_first(rho, d, db);
  const double w = 1.0 / d;
  return w * rho + (1.0 - w) * kron(sigma_a, rho_b);
}

Ensemble ensemble_points(const BlochForm& bf, std::size_t n_dirs, double eps, Party steering) {
  if (n_dirs < 1) throw DomainError("ensemble needs at least one direction");
  const NonsteerReport rep = n_povm(bf, eps, steering);
  const BlochObjective f = nonsteer_objective(bf, 3.0 * eps, steering);

  Ensemble e;
  e.points.reserve(n_dirs);
  for (const Vec3& x : fibonacci_sphere(n_dirs))
    e.points.push_back({f.v.dot(x), (f.M * x).norm()});
  e.argmax_x = rep.argmax_x;
  e.argmax = {f.v.dot(rep.argmax_x), (f.M * rep.argmax_x).norm()};
  e.n_value = rep.n_value;
  e.epsilon = eps;
  return e;
}

OneWayVerdict one_way_verdict(SteeringSummary steer, NonsteerReport nonsteer, double delta_N,
                              double sd_threshold) {
  if (!(steer.delta_S > 0.0) || !(delta_N > 0.0))
    throw DomainError("verdict needs strictly positive uncertainties");
  steer.sd_margin = (steer.S - steer.bound) / steer.delta_S;
  nonsteer.margin_sd = (1.0 - nonsteer.n_value) / delta_N;
  const bool conclusive =
      steer.sd_margin >= sd_threshold && *nonsteer.margin_sd >= sd_threshold;
  return OneWayVerdict{steer, nonsteer, delta_N, conclusive, sd_threshold};
}

}  // namespace steerkit
