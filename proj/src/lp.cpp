#include "steerkit/lp.hpp"

#include <cmath>
#include <limits>

#include "steerkit/errors.hpp"

namespace steerkit {

namespace {

constexpr double kPriceTol = 1e-10;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateBeforeBland = 50;

// Artificial variables live in the basis as negative ids.
bool is_artificial(int id) { return id < 0; }
int artificial_row(int id) { return -id - 1; }

}  // namespace

LinearProgram::LinearProgram(Eigen::VectorXd rhs) : rhs_(std::move(rhs)) {
  const auto m = rhs_.size();
  row_sign_ = Eigen::VectorXd::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (rhs_(i) < 0) {
      row_sign_(i) = -1.0;
      rhs_(i) = -rhs_(i);
    }
  basis_.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis_[static_cast<std::size_t>(i)] = -static_cast<int>(i) - 1;
  binv_ = Eigen::MatrixXd::Identity(m, m);
  xb_ = rhs_;
}

std::size_t LinearProgram::add_column(const Eigen::VectorXd& coeffs, double cost) {
  if (coeffs.size() != rhs_.size()) throw SolverError("LP column has the wrong number of rows");
  cols_.push_back({coeffs.cwiseProduct(row_sign_), cost});
  in_basis_.push_back(0);
  return cols_.size() - 1;
}

Eigen::VectorXd LinearProgram::column(int j) const {
  if (is_artificial(j)) return Eigen::VectorXd::Unit(rhs_.size(), artificial_row(j));
  return cols_[static_cast<std::size_t>(j)].a;
}

double LinearProgram::phase_cost(int j, bool phase_one) const {
  if (is_artificial(j)) return phase_one ? 1.0 : 0.0;
  return phase_one ? 0.0 : cols_[static_cast<std::size_t>(j)].cost;
}

void LinearProgram::refactor() {
  const auto m = rhs_.size();
  Eigen::MatrixXd b(m, m);
  for (Eigen::Index i = 0; i < m; ++i) b.col(i) = column(basis_[static_cast<std::size_t>(i)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible()) throw SolverError("simplex basis became singular");
  binv_ = lu.inverse();
  xb_ = binv_ * rhs_;
  for (Eigen::Index i = 0; i < m; ++i)
    if (xb_(i) < 0 && xb_(i) > -1e-12) xb_(i) = 0.0;
  since_refactor_ = 0;
}

void LinearProgram::pivot(int entering, int r, const Eigen::VectorXd& w) {
  const double wr = w(r);
  const double theta = xb_(r) / wr;
  xb_ -= theta * w;
  xb_(r) = theta;
  const Eigen::RowVectorXd pivot_row = binv_.row(r) / wr;
  for (Eigen::Index i = 0; i < binv_.rows(); ++i)
    if (i != r) binv_.row(i) -= w(i) * pivot_row;
  binv_.row(r) = pivot_row;

  const int leaving = basis_[static_cast<std::size_t>(r)];
  if (!is_artificial(leaving)) in_basis_[static_cast<std::size_t>(leaving)] = 0;
  basis_[static_cast<std::size_t>(r)] = entering;
  in_basis_[static_cast<std::size_t>(entering)] = 1;
  if (++since_refactor_ >= kRefactorEvery) refactor();
}

bool LinearProgram::iterate(bool phase_one, const Pricer& pricer, int max_iterations,
                            LpSolution& sol) {
  const auto m = rhs_.size();
  int degenerate_run = 0;
  while (sol.iterations < max_iterations) {
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i) cb(i) = phase_cost(basis_[static_cast<std::size_t>(i)], phase_one);
    const Eigen::VectorXd y = binv_.transpose() * cb;

    const bool bland = degenerate_run >= kDegenerateBeforeBland;
    int entering = -1;
    double best = -kPriceTol;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (in_basis_[j]) continue;
      const double d = phase_cost(static_cast<int>(j), phase_one) - y.dot(cols_[j].a);
      if (d < best) {
        best = d;
        entering = static_cast<int>(j);
        if (bland) break;
      }
    }

    if (entering < 0 && pricer) {
      // Duals back in the caller's row orientation.
      const Eigen::VectorXd y_user = y.cwiseProduct(row_sign_);
      const std::size_t before = cols_.size();
      for (const LpColumn& c : pricer(y_user, phase_one)) add_column(c.coeffs, c.cost);
      for (std::size_t j = before; j < cols_.size(); ++j) {
        const double d = phase_cost(static_cast<int>(j), phase_one) - y.dot(cols_[j].a);
        if (d < best) {
          best = d;
          entering = static_cast<int>(j);
        }
      }
    }
    if (entering < 0) {
      sol.duals = y.cwiseProduct(row_sign_);
      return true;
    }

    const Eigen::VectorXd w = binv_ * cols_[static_cast<std::size_t>(entering)].a;
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const int id = basis_[static_cast<std::size_t>(i)];
      double r;
      if (w(i) > kPivotTol) {
        r = std::max(0.0, xb_(i)) / w(i);
      } else if (!phase_one && is_artificial(id) && std::abs(w(i)) > kPivotTol) {
        // Zero-level artificial left on a row: must not move off zero.
        r = 0.0;
      } else {
        continue;
      }
      bool better = r < ratio - 1e-14;
      if (!better && r <= ratio + 1e-14 && leave >= 0) {
        // Ties: artificials leave first; under Bland the smallest id leaves.
        const int cur = basis_[static_cast<std::size_t>(leave)];
        if (is_artificial(id) != is_artificial(cur)) better = is_artificial(id);
        else if (bland) better = id < cur;
      }
      if (leave < 0 || better) {
        ratio = r;
        leave = static_cast<int>(i);
      }
    }
    if (leave < 0) return false;  // unbounded direction
    degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
    pivot(entering, leave, w);
    ++sol.iterations;
  }
  throw SolverError("simplex iteration limit reached");
}

void LinearProgram::drive_out_artificials() {
  const auto m = rhs_.size();
  for (Eigen::Index r = 0; r < m; ++r) {
    if (!is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
    const Eigen::RowVectorXd row = binv_.row(r);
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (in_basis_[j]) continue;
      if (std::abs(row.dot(cols_[j].a)) > 1e-9) {
        pivot(static_cast<int>(j), static_cast<int>(r), binv_ * cols_[j].a);
        break;
      }
    }
  }
}

LpSolution LinearProgram::minimize(const Pricer& pricer, int max_iterations) {
  LpSolution sol;
  refactor();

  iterate(true, pricer, max_iterations, sol);
  double infeas = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (is_artificial(basis_[i])) infeas += std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
  sol.infeasibility = infeas;

  auto collect = [&] {
    sol.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (!is_artificial(basis_[i]))
        sol.x(basis_[i]) = std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
    sol.objective = 0.0;
    for (std::size_t j = 0; j < cols_.size(); ++j) sol.objective += cols_[j].cost * sol.x(static_cast<Eigen::Index>(j));
  };

  if (infeas > feas_tol_) {
    sol.status = LpStatus::Infeasible;
    collect();
    return sol;
  }
  if (feasibility_only_) {
    sol.status = LpStatus::Optimal;
    collect();
    return sol;
  }

  drive_out_artificials();
  refactor();
  const bool bounded = iterate(false, pricer, max_iterations, sol);
  sol.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
  collect();
  return sol;
}

}  // namespace steerkit
