#pragma once

#include <cstddef>
#include <vector>

#include "steerkit/qstate.hpp"

namespace steerkit {

// Quasi-uniform points on the unit sphere. z runs linearly from +1 to -1
// (both poles included) with golden-angle azimuth steps; n = 1 gives +z.
std::vector<Vec3> fibonacci_sphere(std::size_t n);

/// f(x) = lin |v.x| + quad (1 + (v.x)^2) + ||M x||  on unit vectors x.
///
/// This is the family of nonsteerability objectives: lin = 1 - eps (or
/// 1 - 3 eps), quad = eps / 2 (or 3 eps / 2), v the steering party's Bloch
/// vector and M the correlation matrix oriented so that M x is the other
/// party's conditional Bloch vector component.
struct BlochObjective {
  Vec3 v;
  Mat3 M;
  double lin;
  double quad;

  double value(const Vec3& x) const;
  // Ambient-space gradient; the |v.x| and ||Mx|| kinks use one-sided values.
  Vec3 gradient(const Vec3& x) const;
};

struct SphereMaxOptions {
  std::size_t grid_points = 8192;
  std::size_t candidates = 32;
  int max_iterations = 200;
};

struct SphereMax {
  Vec3 x;
  double value;
};

/// Global maximum of a BlochObjective over the unit sphere.
///
/// Coarse Fibonacci grid, the best `candidates` points plus the analytic
/// special directions (+-v, right singular vectors of M) are refined by
/// damped Newton / gradient ascent in the tangent plane. The |v.x| = 0 great
/// circle, where the objective has a kink, is solved exactly as a 2x2
/// eigenproblem. Deterministic for fixed options.
SphereMax maximize_on_sphere(const BlochObjective& f, const SphereMaxOptions& opts = {});

// Local ascent from a starting point; exposed for tests.
SphereMax refine_on_sphere(const BlochObjective& f, Vec3 x, int max_iterations = 200);

}  // namespace steerkit
