#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace steerkit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpColumn {
  Eigen::VectorXd coeffs;
  double cost = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;      // one entry per structural column
  Eigen::VectorXd duals;  // row prices y with reduced cost c_j - y.a_j
  double infeasibility = 0.0;  // phase-one optimum: L1 norm of the residual b - A x
  int iterations = 0;
};

/// Dense revised simplex for  min c.x  s.t.  A x = b, x >= 0.
///
/// Sized for few rows (tens) and many columns. Columns can be supplied up
/// front or generated on demand: when no pool column prices out, the
/// optional pricer is called with the current duals and may return new
/// columns. Phase one minimizes the sum of artificial variables, so the
/// residual of an infeasible system is reported rather than discarded.
class LinearProgram {
 public:
  // Receives duals and whether phase one is running (structural costs are
  // then zero). Returns columns to add; an empty result means "none improve".
  using Pricer = std::function<std::vector<LpColumn>(const Eigen::VectorXd& duals, bool phase_one)>;

  explicit LinearProgram(Eigen::VectorXd rhs);

  std::size_t add_column(const Eigen::VectorXd& coeffs, double cost);
  std::size_t rows() const { return static_cast<std::size_t>(rhs_.size()); }
  std::size_t columns() const { return cols_.size(); }

  // Stop after phase one (pure feasibility problems).
  void set_feasibility_only(bool v) { feasibility_only_ = v; }
  void set_feasibility_tolerance(double tol) { feas_tol_ = tol; }

  LpSolution minimize(const Pricer& pricer = {}, int max_iterations = 200000);

 private:
  struct Col {
    Eigen::VectorXd a;  // row signs already applied
    double cost;
  };

  Eigen::VectorXd column(int j) const;  // j >= n: artificial e_(j - n)
  double phase_cost(int j, bool phase_one) const;
  void refactor();
  bool iterate(bool phase_one, const Pricer& pricer, int max_iterations, LpSolution& sol);
  void pivot(int entering, int leave_row, const Eigen::VectorXd& w);
  void drive_out_artificials();

  Eigen::VectorXd rhs_;
  Eigen::VectorXd row_sign_;
  std::vector<Col> cols_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int since_refactor_ = 0;
  bool feasibility_only_ = false;
  double feas_tol_ = 1e-9;
};

}  // namespace steerkit
