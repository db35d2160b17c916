#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "steerkit/qstate.hpp"
#include "steerkit/sphere.hpp"

namespace steerkit {

enum class CriterionVariant { RestrictedPVM, POVM };

const char* variant_name(CriterionVariant v);

/// Left-hand side of a sufficient nonsteerability condition and where the
/// maximum over measurement directions is attained.
struct NonsteerReport {
  double n_value = 0.0;
  Vec3 argmax_x = Vec3::UnitZ();
  double epsilon = 0.0;
  CriterionVariant variant = CriterionVariant::POVM;
  Party steering_party = Party::Bob;
  std::optional<double> margin_sd;

  // The condition certifies nonsteerability when n_value <= 1.
  bool nonsteerable() const { return n_value <= 1.0; }
};

// Objective for a lossy steering party with heralding efficiency `eps`
// (restricted-PVM form; the POVM form is the same with eps -> 3 eps).
BlochObjective nonsteer_objective(const BlochForm& bf, double eps, Party steering);

/// max_x (1 - eps)|v.x| + (eps/2)(1 + (v.x)^2) + ||T x||, where v is the
/// steering party's Bloch vector in the canonical frame.
///
/// Throws ContractError for a non-canonical frame and DomainError for eps
/// outside [0, 1].
NonsteerReport n_restricted_pvm(const BlochForm& bf, double eps, Party steering = Party::Bob,
                                const SphereMaxOptions& opts = {});

/// Condition valid for arbitrary POVMs of the steering party:
/// max_x (1 - 3 eps)|v.x| + (3 eps/2)(1 + (v.x)^2) + ||T x|| <= 1.
///
/// Only defined for 0 <= eps <= 1/3; larger eps raises OutOfRegimeError.
NonsteerReport n_povm(const BlochForm& bf, double eps, Party steering = Party::Bob,
                      const SphereMaxOptions& opts = {});

/// (1/d) rho + ((d-1)/d) sigma_a (x) Tr_A[rho] for rho on C^d (x) C^dB.
MatrixXc povm_noise_construct(const MatrixXc& rho, const MatrixXc& sigma_a, int d);

struct EnsemblePoint {
  double b_dot_x;
  double t_norm;
};

struct Ensemble {
  std::vector<EnsemblePoint> points;  // one per Fibonacci direction
  EnsemblePoint argmax;               // at the true maximizer of the POVM objective
  Vec3 argmax_x;
  double n_value;
  double epsilon;
};

// (v.x, ||T x||) for n_dirs quasi-uniform directions; the bound curve is
// (1 - 3 eps)|p| + (3 eps/2)(1 + p^2) + q = 1.
Ensemble ensemble_points(const BlochForm& bf, std::size_t n_dirs, double eps,
                         Party steering = Party::Bob);

struct SteeringSummary {
  double S;
  double bound;
  double delta_S;
  double sd_margin = 0.0;
};

struct OneWayVerdict {
  SteeringSummary steer_ab;
  NonsteerReport nonsteer_ba;
  double delta_N;
  bool conclusive;
  double sd_threshold;
};

/// Combines a steering test in one direction with the nonsteerability
/// condition in the other. Margins are (S - bound)/dS and (1 - N)/dN.
OneWayVerdict one_way_verdict(SteeringSummary steer, NonsteerReport nonsteer, double delta_N,
                              double sd_threshold = 3.0);

}  // namespace steerkit
