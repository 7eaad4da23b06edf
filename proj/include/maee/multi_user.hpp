// SPDX-License-Identifier: Apache-2.0
//
// Multi-user max-min energy efficiency: MMSE combining, Dinkelbach updates,
// and the alternating transmit-power / antenna-position convex subproblems.

#ifndef MAEE_MULTI_USER_HPP
#define MAEE_MULTI_USER_HPP

#include <span>
#include <vector>

#include "maee/channel.hpp"
#include "maee/convex_solver.hpp"
#include "maee/energy_model.hpp"

namespace maee {

/// W = (H P H^H + sigma^2 I)^{-1} H.
MatrixXcd mmse_combining(const MatrixXcd& channels, std::span<const double> powers, double noise_power);

/// Rescales every column so that interference plus noise after combining
/// equals e^log_level. SINR is unchanged; log_level becomes the varpi local point.
void normalize_combining(MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
                         double noise_power, double log_level);

struct SolveState {
  MatrixXcd combining;
  VectorXd powers;
  VectorXd positions;
  VectorXd dinkelbach;
  VectorXd mu;
  VectorXd varpi;
  double xi1{};
  double xi2{};
  double objective{};

  int num_users() const { return static_cast<int>(powers.size()); }
};

/// Energy efficiency of every user at the state's (W, p, x).
VectorXd dinkelbach_alpha_multi(const SolveState& state, const SystemScenario& scenario,
                                std::span<const Channel> channels);

/// |w_k^H h_j|^2 for all (k, j); row k is the receiver, column j the transmitter.
MatrixXd link_gains(const MatrixXcd& combining, const MatrixXcd& channels);

/// Sets mu and varpi from e^mu = total received power + noise and
/// e^varpi = interference + noise at the current (W, p, x).
void rebuild_slacks(SolveState& state, const SystemScenario& scenario, std::span<const Channel> channels);

/// MMSE combining (normalized), Dinkelbach variables and slacks at (p, x).
void refresh_state(SolveState& state, const SystemScenario& scenario, std::span<const Channel> channels);

/// p = P_max / 2, x = x0, with W, alpha and slacks computed at that point.
SolveState initial_state(const SystemScenario& scenario, std::span<const Channel> channels);

/// Variable layout shared by both subproblems.
struct SubproblemLayout {
  int num_users{};
  bool position{};  // false: (q, mu, varpi, objective); true adds xi1, xi2

  int first(int k) const { return k; }  // q_k = p_k / P_max or u_k = x_k / lambda
  int mu(int k) const { return num_users + k; }
  int varpi(int k) const { return 2 * num_users + k; }
  int objective() const { return 3 * num_users; }
  int xi1() const { return 3 * num_users + 1; }
  int xi2() const { return 3 * num_users + 2; }
  int size() const { return position ? 3 * num_users + 3 : 3 * num_users + 1; }
};

struct Subproblem {
  SmoothProgram program;
  SubproblemLayout layout;
  Eigen::VectorXd start;
};

/// Power step at fixed (W, x, alpha): powers scaled by P_max, with the
/// interference slack linearized around the state's varpi.
Subproblem build_power_subproblem(const SolveState& state, const SystemScenario& scenario,
                                  std::span<const Channel> channels);

// Received-power term h_jk(x_j) = f_j(x_j)^H M_jk f_j(x_j) with
// M_jk = G_j w_k w_k^H G_j^H p_j, expanded over the AoDs of user j.
MatrixXcd received_power_form(const Channel& transmitter, const VectorXcd& combiner, double power);
double h_jk_value(const MatrixXcd& m, const VectorXd& aod, double x, double wavelength);
double h_jk_derivative(const MatrixXcd& m, const VectorXd& aod, double x, double wavelength);
double curvature_bound(const MatrixXcd& m, const VectorXd& aod, double wavelength);

struct SurrogatePair {
  double lower;
  double upper;
};

/// Quadratic minorant / majorant of h around x_local using the curvature bound.
SurrogatePair surrogate_bounds(const PhaseExpansion<double>& h, double x_local, double x);
SurrogatePair surrogate_bounds(const MatrixXcd& m, const VectorXd& aod, double x_local, double x, double wavelength);

/// Upper bound of xi * mu tight at (xi_local, mu_local).
double product_upper_bound(double xi, double mu, double xi_local, double mu_local);
/// Lower bound of xi * varpi tight at (xi_local, varpi_local); arguments must be positive.
double product_lower_bound(double xi, double varpi, double xi_local, double varpi_local);

struct SurrogateData {
  int num_users{};
  std::vector<PhaseExpansion<double>> terms;  // index j * K + k
  const PhaseExpansion<double>& at(int j, int k) const {
    return terms[static_cast<std::size_t>(j * num_users + k)];
  }
};

SurrogateData build_surrogates(const SolveState& state, std::span<const Channel> channels);

enum class PositionObjective {
  EnergyEfficiency,  // max-min EE surrogate
  Throughput,        // max-min (T - xi1)(mu - varpi), energy ignored
  Sinr,              // max-min (mu - varpi)
};

/// Position step at fixed (W, p, alpha). Local points are the state's
/// positions, mu, varpi and xi1. Throws DegenerateLocalPoint when xi1 or any
/// varpi is not positive.
Subproblem build_position_subproblem(const SolveState& state, const SystemScenario& scenario,
                                     std::span<const Channel> channels,
                                     PositionObjective goal = PositionObjective::EnergyEfficiency);

struct Algorithm2Options {
  double tolerance{1e-6};
  int max_outer{50};
  bool optimize_powers{true};
  bool optimize_positions{true};
  /// Positions are projected to multiples of this step after convergence; 0 disables.
  double snap_step{0.0};
  /// Floor for the delay slack local point; the bilinear surrogate needs it positive.
  double min_delay_slack{1e-6};
  /// Candidate positions per user for the coarse search that picks the first
  /// SCA local point; 0 starts every user at its initial position.
  int initial_grid{20};
  SolveOptions solver{};
};

struct Algorithm2Result {
  SolveState state;
  BlockMetrics metrics;
  /// True min-EE of every accepted outer iterate, starting with the first feasible state.
  std::vector<double> min_ee_trace;
  /// Subproblem objective after each outer iteration.
  std::vector<double> objective_trace;
  int iterations{};
  bool converged{};
};

/// Alternating optimization. Each power or position update is kept only if
/// the recomputed true min-EE does not drop and all throughput floors hold.
/// Throws Infeasible when no power setting at the initial positions meets
/// the throughput floors.
Algorithm2Result algorithm2(const SystemScenario& scenario, std::span<const Channel> channels,
                            const Algorithm2Options& options = {});

/// Same loop starting from a caller-provided state (powers and positions are used).
Algorithm2Result algorithm2(const SystemScenario& scenario, std::span<const Channel> channels, SolveState start,
                            const Algorithm2Options& options);

/// Coordinate search over `points` evenly spaced positions per user (plus the
/// initial position) at the state's powers, keeping the candidate with the
/// best true min-EE. Two sweeps over the users.
SolveState initial_position_search(const SystemScenario& scenario, std::span<const Channel> channels,
                                   SolveState start, int points);

/// Position-only alternation at fixed powers maximizing the min-SINR or
/// min-throughput surrogate; returns the final state (W refreshed).
SolveState optimize_positions_for(const SystemScenario& scenario, std::span<const Channel> channels,
                                  SolveState start, PositionObjective goal, const Algorithm2Options& options);

}  // namespace maee

#endif  // MAEE_MULTI_USER_HPP
