// SPDX-License-Identifier: Apache-2.0
//
// Log-barrier interior-point solver for small smooth convex programs
//
//   maximize   c^T z
//   subject to g_i(z) <= 0,  lower <= z <= upper,
//
// with damped Newton centering and a phase-1 slack problem when the start
// point is not strictly feasible. Dense linear algebra; meant for tens of
// variables, not thousands.

#ifndef MAEE_CONVEX_SOLVER_HPP
#define MAEE_CONVEX_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace maee {

struct SmoothConstraint {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// Empty means the constraint is affine.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::string name;
};

/// a^T z + b <= 0
SmoothConstraint linear_constraint(Eigen::VectorXd a, double b, std::string name = {});

struct SmoothProgram {
  int num_vars{};
  Eigen::VectorXd objective;  // maximize objective^T z
  std::vector<SmoothConstraint> constraints;
  Eigen::VectorXd lower;  // -inf allowed
  Eigen::VectorXd upper;  // +inf allowed

  explicit SmoothProgram(int n = 0);
  void add(SmoothConstraint c) { constraints.push_back(std::move(c)); }
  double max_violation(const Eigen::VectorXd& z) const;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible };

struct SolveOptions {
  double feas_tol{1e-8};
  double kkt_tol{1e-7};
  int max_iter{500};
  double barrier_factor{10.0};
  double initial_weight{1.0};
};

struct SolveReport {
  Eigen::VectorXd point;
  double objective{};
  double kkt_residual{};
  double feasibility_violation{};
  int iterations{};
  SolveStatus status{SolveStatus::Infeasible};
  /// Best feasible objective after each barrier stage.
  std::vector<double> stage_objectives;
};

/// Throws Error(BadStart) when start lies outside the box.
SolveReport solve(const SmoothProgram& prog, const Eigen::VectorXd& start, const SolveOptions& options = {});

/// Largest relative mismatch between analytic and central-difference
/// constraint gradients at point, normalized by max(1, |analytic|).
double check_gradients(const SmoothProgram& prog, const Eigen::VectorXd& point, double h);

}  // namespace maee

#endif  // MAEE_CONVEX_SOLVER_HPP
