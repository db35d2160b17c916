#include "steerkit/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace steerkit {

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  if (n == 0) return pts;
  if (n == 1) {
    pts.emplace_back(0.0, 0.0, 1.0);
    return pts;
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

double BlochObjective::value(const Vec3& x) const {
  const double p = v.dot(x);
  return lin * std::abs(p) + quad * (1.0 + p * p) + (M * x).norm();
}

Vec3 BlochObjective::gradient(const Vec3& x) const {
  const double p = v.dot(x);
  const double sgn = p > 0 ? 1.0 : (p < 0 ? -1.0 : 0.0);
  Vec3 g = (lin * sgn + 2.0 * quad * p) * v;
  const Vec3 mx = M * x;
  const double n = mx.norm();
  if (n > 0) g += M.transpose() * mx / n;
  return g;
}

namespace {

// Orthonormal pair spanning the plane orthogonal to x.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& x) {
  Vec3 helper = std::abs(x(0)) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 t1 = (helper - helper.dot(x) * x).normalized();
  Vec3 t2 = x.cross(t1);
  return {t1, t2};
}

// Exact maximum of f on the great circle v.x = 0: there f = quad + ||M x||
// and ||M x||^2 is a quadratic form in the circle coordinates.
SphereMax kink_circle_max(const BlochObjective& f) {
  const double vn = f.v.norm();
  if (vn == 0.0) return {Vec3::UnitZ(), f.value(Vec3::UnitZ())};
  auto [e1, e2] = tangent_basis(f.v / vn);
  Eigen::Matrix<double, 3, 2> e;
  e.col(0) = e1;
  e.col(1) = e2;
  const Eigen::Matrix2d p = e.transpose() * f.M.transpose() * f.M * e;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p);
  const Eigen::Vector2d c = es.eigenvectors().col(1);
  Vec3 x = (e * c).normalized();
  return {x, f.value(x)};
}

}  // namespace

SphereMax refine_on_sphere(const BlochObjective& f, Vec3 x, int max_iterations) {
  x.normalize();
  double fx = f.value(x);
  const double h = 1e-6;

  for (int it = 0; it < max_iterations; ++it) {
    auto [t1, t2] = tangent_basis(x);
    const Vec3 g = f.gradient(x);
    const Eigen::Vector2d g2(g.dot(t1), g.dot(t2));
    if (g2.norm() < 1e-13) break;

    // Finite-difference Hessian of the tangential gradient.
    Eigen::Matrix2d hess;
    const std::array<Vec3, 2> dirs{t1, t2};
    for (int k = 0; k < 2; ++k) {
      const Vec3 xp = (x + h * dirs[k]).normalized();
      const Vec3 xm = (x - h * dirs[k]).normalized();
      const Vec3 gp = f.gradient(xp), gm = f.gradient(xm);
      hess(0, k) = (gp.dot(t1) - gm.dot(t1)) / (2 * h);
      hess(1, k) = (gp.dot(t2) - gm.dot(t2)) / (2 * h);
    }
    // Curvature of the sphere itself: the projected second derivative
    // carries a -(g.x) I term.
    hess = 0.5 * (hess + hess.transpose()) - g.dot(x) * Eigen::Matrix2d::Identity();

    Eigen::Vector2d step;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    if (es.eigenvalues().maxCoeff() < -1e-12) {
      step = -hess.ldlt().solve(g2);
    } else {
      step = g2;
    }
    if (step.norm() > 0.5) step *= 0.5 / step.norm();

    bool improved = false;
    for (double s = 1.0; s > 1e-14; s *= 0.5) {
      const Vec3 cand = (x + s * (step(0) * t1 + step(1) * t2)).normalized();
      const double fc = f.value(cand);
      if (fc > fx) {
        improved = fc - fx > 1e-17;
        x = cand;
        fx = fc;
        break;
      }
    }
    if (!improved) break;
  }
  return {x, fx};
}

SphereMax maximize_on_sphere(const BlochObjective& f, const SphereMaxOptions& opts) {
  const auto grid = fibonacci_sphere(opts.grid_points);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f.value(grid[i]);

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(opts.candidates, order.size());
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t l, std::size_t r) {
                      return vals[l] != vals[r] ? vals[l] > vals[r] : l < r;
                    });

  std::vector<Vec3> starts;
  for (std::size_t k = 0; k < keep; ++k) starts.push_back(grid[order[k]]);
  if (f.v.norm() > 0) starts.push_back(f.v.normalized());
  Eigen::SelfAdjointEigenSolver<Mat3> es(f.M.transpose() * f.M);
  for (int k = 0; k < 3; ++k) starts.push_back(es.eigenvectors().col(k));

  const SphereMax circle = kink_circle_max(f);
  SphereMax best = circle;
  starts.push_back(circle.x);

  for (const Vec3& s : starts) {
    const SphereMax r = refine_on_sphere(f, s, opts.max_iterations);
    if (r.value > best.value) best = r;
  }
  return best;
}

}  // namespace steerkit
