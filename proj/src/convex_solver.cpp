// SPDX-License-Identifier: Apache-2.0
#include "maee/convex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maee/error.hpp"

namespace maee {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SmoothConstraint linear_constraint(VectorXd a, double b, std::string name) {
  SmoothConstraint c;
  c.value = [a, b](const VectorXd& z) { return a.dot(z) + b; };
  c.gradient = [a](const VectorXd&) { return a; };
  c.name = std::move(name);
  return c;
}

SmoothProgram::SmoothProgram(int n)
    : num_vars(n),
      objective(VectorXd::Zero(n)),
      lower(VectorXd::Constant(n, -std::numeric_limits<double>::infinity())),
      upper(VectorXd::Constant(n, std::numeric_limits<double>::infinity())) {}

double SmoothProgram::max_violation(const VectorXd& z) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) v = std::max(v, c.value(z));
  return v;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Barrier function t * (-c^T z) - sum log(-g_i(z)) - sum log(box slack).
class BarrierModel {
 public:
  explicit BarrierModel(const SmoothProgram& prog) : prog_(prog) {
    num_terms_ = static_cast<int>(prog.constraints.size());
    for (int i = 0; i < prog.num_vars; ++i) {
      if (std::isfinite(prog.lower[i])) ++num_terms_;
      if (std::isfinite(prog.upper[i])) ++num_terms_;
    }
  }

  int num_terms() const { return num_terms_; }

  bool inside(const VectorXd& z) const {
    for (int i = 0; i < prog_.num_vars; ++i)
      if (!(z[i] > prog_.lower[i] && z[i] < prog_.upper[i])) return false;
    return true;
  }

  /// Returns +inf outside the strict interior.
  double value(const VectorXd& z, double t) const {
    if (!inside(z)) return kInf;
    double phi = -t * prog_.objective.dot(z);
    for (const auto& c : prog_.constraints) {
      const double g = c.value(z);
      if (!(g < 0)) return kInf;
      phi -= std::log(-g);
    }
    for (int i = 0; i < prog_.num_vars; ++i) {
      if (std::isfinite(prog_.lower[i])) phi -= std::log(z[i] - prog_.lower[i]);
      if (std::isfinite(prog_.upper[i])) phi -= std::log(prog_.upper[i] - z[i]);
    }
    return phi;
  }

  void derivatives(const VectorXd& z, double t, VectorXd& grad, MatrixXd& hess) const {
    const int n = prog_.num_vars;
    grad = -t * prog_.objective;
    hess.setZero(n, n);
    for (const auto& c : prog_.constraints) {
      const double g = c.value(z);
      const VectorXd dg = c.gradient(z);
      grad += dg / (-g);
      hess.noalias() += (dg / g) * (dg / g).transpose();
      if (c.hessian) hess += c.hessian(z) / (-g);
    }
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(prog_.lower[i])) {
        const double d = z[i] - prog_.lower[i];
        grad[i] -= 1.0 / d;
        hess(i, i) += 1.0 / (d * d);
      }
      if (std::isfinite(prog_.upper[i])) {
        const double d = prog_.upper[i] - z[i];
        grad[i] += 1.0 / d;
        hess(i, i) += 1.0 / (d * d);
      }
    }
  }

  /// Largest step along dz keeping a fraction of the distance to the box.
  double max_box_step(const VectorXd& z, const VectorXd& dz) const {
    double step = 1.0;
    for (int i = 0; i < prog_.num_vars; ++i) {
      if (dz[i] < 0 && std::isfinite(prog_.lower[i])) step = std::min(step, 0.99 * (z[i] - prog_.lower[i]) / -dz[i]);
      if (dz[i] > 0 && std::isfinite(prog_.upper[i])) step = std::min(step, 0.99 * (prog_.upper[i] - z[i]) / dz[i]);
    }
    return step;
  }

 private:
  const SmoothProgram& prog_;
  int num_terms_{};
};

VectorXd newton_direction(const MatrixXd& hess, const VectorXd& grad) {
  const double scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    MatrixXd h = hess;
    if (reg > 0) h.diagonal().array() += reg;
    Eigen::LDLT<MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success) {
      VectorXd dz = ldlt.solve(-grad);
      if (dz.allFinite() && grad.dot(dz) < 0) return dz;
    }
    reg = reg == 0.0 ? 1e-12 * scale : reg * 100.0;
  }
  return -grad / scale;
}

struct CenteringResult {
  int iterations{};
  bool centered{};
  bool stopped_early{};
  double stationarity{};
};

// Damped Newton on the barrier function at fixed weight t. `stop` is checked
// after every accepted step and ends the run when it returns true.
template <typename Stop>
CenteringResult center(const BarrierModel& model, VectorXd& z, double t, int budget, Stop&& stop) {
  CenteringResult r;
  VectorXd grad;
  MatrixXd hess;
  double phi = model.value(z, t);
  int stalls = 0;
  while (r.iterations < budget) {
    model.derivatives(z, t, grad, hess);
    r.stationarity = grad.cwiseAbs().maxCoeff() / t;
    const VectorXd dz = newton_direction(hess, grad);
    const double decrement = -grad.dot(dz);
    if (decrement / 2 <= 1e-10) {
      r.centered = true;
      break;
    }
    ++r.iterations;
    const double phi_before = phi;
    double step = model.max_box_step(z, dz);
    const double slack = 1e-14 * (1.0 + std::abs(phi));
    bool accepted = false;
    while (step > 1e-14) {
      const VectorXd trial = z + step * dz;
      const double phi_trial = model.value(trial, t);
      if (std::isfinite(phi_trial) && phi_trial <= phi - 0.01 * step * decrement + slack) {
        z = trial;
        phi = phi_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No progress representable in double precision; treat as centered.
      r.centered = decrement < 1e-6;
      break;
    }
    stalls = phi_before - phi <= 1e-13 * (1.0 + std::abs(phi)) ? stalls + 1 : 0;
    if (stalls >= 3) {
      r.centered = true;
      break;
    }
    if (stop(z)) {
      r.stopped_early = true;
      break;
    }
  }
  return r;
}

VectorXd interiorize(const SmoothProgram& prog, const VectorXd& start) {
  VectorXd z = start;
  for (int i = 0; i < prog.num_vars; ++i) {
    const double lo = prog.lower[i];
    const double hi = prog.upper[i];
    if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "empty box for variable " + std::to_string(i));
    const bool fl = std::isfinite(lo);
    const bool fh = std::isfinite(hi);
    const double margin = (fl && fh) ? 1e-3 * (hi - lo) : 1e-6 * std::max(1.0, std::abs(fl ? lo : hi));
    if (fl && z[i] < lo + margin) z[i] = fh ? std::min(lo + margin, (lo + hi) / 2) : lo + margin;
    if (fh && z[i] > hi - margin) z[i] = fl ? std::max(hi - margin, (lo + hi) / 2) : hi - margin;
  }
  return z;
}

}  // namespace

SolveReport solve(const SmoothProgram& prog, const VectorXd& start, const SolveOptions& options) {
  const int n = prog.num_vars;
  if (start.size() != n || prog.objective.size() != n || prog.lower.size() != n || prog.upper.size() != n)
    throw Error(ErrorCode::InvalidArgument, "program/start dimensions disagree");
  for (int i = 0; i < n; ++i)
    if (!(start[i] >= prog.lower[i] && start[i] <= prog.upper[i]))
      throw Error(ErrorCode::BadStart, "start violates the box at variable " + std::to_string(i));

  SolveReport report;
  const double start_violation = prog.constraints.empty() ? 0.0 : std::max(0.0, prog.max_violation(start));
  const bool start_feasible = start_violation <= options.feas_tol;
  double best_objective = start_feasible ? prog.objective.dot(start) : -kInf;

  VectorXd z = interiorize(prog, start);
  int budget = options.max_iter;

  // Phase 1: minimize s subject to g_i(z) <= s until the point is strictly inside.
  const double depth = 1e-4;
  double worst = prog.constraints.empty() ? -kInf : prog.max_violation(z);
  if (!(worst < 0)) {
    const double s0 = worst + 1.0 + 0.1 * std::abs(worst);
    SmoothProgram aux(n + 1);
    aux.objective[n] = -1.0;
    aux.lower.head(n) = prog.lower;
    aux.upper.head(n) = prog.upper;
    // The slack problem has no objective pull on free variables, so bound them
    // to keep the barrier bounded below.
    for (int i = 0; i < n; ++i) {
      const double reach = 1e3 * std::max(1.0, std::abs(z[i]));
      if (!std::isfinite(aux.lower[i])) aux.lower[i] = z[i] - reach;
      if (!std::isfinite(aux.upper[i])) aux.upper[i] = z[i] + reach;
    }
    aux.lower[n] = -std::max(1.0, std::abs(s0));
    for (const auto& c : prog.constraints) {
      SmoothConstraint shifted;
      shifted.value = [&c, n](const VectorXd& y) { return c.value(y.head(n)) - y[n]; };
      shifted.gradient = [&c, n](const VectorXd& y) {
        VectorXd g(n + 1);
        g.head(n) = c.gradient(y.head(n));
        g[n] = -1.0;
        return g;
      };
      if (c.hessian)
        shifted.hessian = [&c, n](const VectorXd& y) {
          MatrixXd h = MatrixXd::Zero(n + 1, n + 1);
          h.topLeftCorner(n, n) = c.hessian(y.head(n));
          return h;
        };
      aux.add(std::move(shifted));
    }
    BarrierModel model(aux);
    VectorXd y(n + 1);
    y.head(n) = z;
    y[n] = s0;
    double t = options.initial_weight;
    auto deep_enough = [&](const VectorXd& v) { return prog.max_violation(v.head(n)) < -depth; };
    while (budget > 0) {
      const CenteringResult c = center(model, y, t, budget, deep_enough);
      budget -= c.iterations;
      report.iterations += c.iterations;
      // Any strictly feasible point ends phase 1; a lower bound on the slack
      // above feas_tol proves infeasibility.
      const double gap = model.num_terms() / t;
      if (c.stopped_early || prog.max_violation(y.head(n)) < 0 || y[n] - gap > options.feas_tol ||
          gap <= 1e-2 * options.feas_tol || (!c.centered && c.iterations == 0))
        break;
      t *= options.barrier_factor;
    }
    z = y.head(n);
    worst = prog.max_violation(z);
    if (!(worst < 0)) {
      const bool feasible_point = worst <= options.feas_tol;
      if (start_feasible && (!feasible_point || best_objective >= prog.objective.dot(z))) {
        report.point = start;
        report.objective = best_objective;
        report.feasibility_violation = start_violation;
        report.status = SolveStatus::MaxIter;
      } else {
        report.point = z;
        report.objective = prog.objective.dot(z);
        report.feasibility_violation = std::max(0.0, worst);
        report.status = feasible_point ? SolveStatus::MaxIter : SolveStatus::Infeasible;
      }
      report.kkt_residual = kInf;
      return report;
    }
  }

  // Phase 2: follow the central path.
  BarrierModel model(prog);
  double t = options.initial_weight;
  report.status = SolveStatus::MaxIter;
  report.kkt_residual = kInf;
  VectorXd best_point = z;
  best_objective = std::max(best_objective, prog.objective.dot(z));
  bool best_is_start = start_feasible && prog.objective.dot(start) >= prog.objective.dot(z);
  if (!best_is_start) best_point = z;
  while (budget > 0) {
    const CenteringResult c = center(model, z, t, budget, [](const VectorXd&) { return false; });
    budget -= c.iterations;
    report.iterations += c.iterations;
    const double objective = prog.objective.dot(z);
    if (objective >= best_objective) {
      best_objective = objective;
      best_point = z;
      best_is_start = false;
    }
    report.stage_objectives.push_back(best_objective);
    const double gap = model.num_terms() / t;
    report.kkt_residual = gap;
    if (c.centered && gap <= options.kkt_tol) {
      report.status = SolveStatus::Optimal;
      break;
    }
    t *= options.barrier_factor;
  }

  report.point = best_is_start ? start : best_point;
  report.objective = prog.objective.dot(report.point);
  report.feasibility_violation =
      prog.constraints.empty() ? 0.0 : std::max(0.0, prog.max_violation(report.point));
  return report;
}

double check_gradients(const SmoothProgram& prog, const VectorXd& point, double h) {
  double worst = 0.0;
  for (const auto& c : prog.constraints) {
    const VectorXd g = c.gradient(point);
    for (int i = 0; i < prog.num_vars; ++i) {
      VectorXd up = point;
      VectorXd dn = point;
      up[i] += h;
      dn[i] -= h;
      const double fd = (c.value(up) - c.value(dn)) / (up[i] - dn[i]);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  return worst;
}

}  // namespace maee
