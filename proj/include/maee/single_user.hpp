// SPDX-License-Identifier: Apache-2.0
//
// Single-user energy-efficiency maximization: Dinkelbach power control at a
// fixed antenna position, a 1D sweep over sub-region centres, and the
// analytic bound obtained when no movement cost is paid.

#ifndef MAEE_SINGLE_USER_HPP
#define MAEE_SINGLE_USER_HPP

#include <vector>

#include "maee/channel.hpp"
#include "maee/energy_model.hpp"

namespace maee {

struct GridSpec {
  int num_subregions{};
  std::vector<double> centers;
};

/// Midpoints of S equal sub-regions of [0, region_length].
GridSpec make_grid(double region_length, int num_subregions);

/// S = round(100 A / lambda), i.e. sub-regions of length lambda/100.
int default_num_subregions(double region_length, double wavelength);

/// Quantities held fixed while the transmit power is optimized at one position.
struct DinkelbachConstants {
  double comm_time;        // T - |x - x0| / v
  double motor_energy;     // E_bar |x - x0|, plus any circuit energy
  double comm_efficiency;  // eta_c
  double noise_power;      // sigma^2
};

/// T~ log2(1 + p g / sigma^2) - alpha p T~ / eta_c - alpha Xi.
double dinkelbach_objective(double power, double alpha, double gain, const DinkelbachConstants& c);

/// Ratio of throughput to energy at this power; the energy efficiency itself.
double dinkelbach_alpha(double power, double gain, const DinkelbachConstants& c);

/// Stationary point of the parametric objective, clipped at zero.
double unconstrained_power(double alpha, double gain, double comm_efficiency, double noise_power);

/// Smallest power meeting the throughput floor; throws InfeasibleThroughput above max_power.
double power_threshold(double min_throughput, double comm_time, double gain, double noise_power,
                       double max_power);

double clamp_power(double unconstrained, double threshold, double max_power);

struct DinkelbachStep {
  double alpha;      // parameter used to compute this step's power
  double power;
  double objective;  // parametric value at (alpha, power)
  double energy_efficiency;
};

struct PowerSolution {
  double power{};
  double alpha{};  // final Dinkelbach parameter == energy efficiency at power
  std::vector<DinkelbachStep> trace;
  bool converged{};
};

struct PowerProblem {
  double gain;
  DinkelbachConstants constants;
  double min_throughput;
  double max_power;
};

inline constexpr int kMaxDinkelbachIterations = 100;

PowerSolution optimize_power(const PowerProblem& problem, double tolerance,
                             int max_iterations = kMaxDinkelbachIterations);

/// Single-user (user 0 of the scenario) power optimization at position x.
PowerSolution optimize_power(double x, const Channel& chan, const SystemScenario& scenario, double tolerance);

/// Parameters of the power problem at position x for the given channel gain.
PowerProblem power_problem_at(double x, double gain, const SystemScenario& scenario);

/// Energy efficiency of user 0 with combining w = h, evaluated from first principles.
double single_user_ee(double x, double power, const Channel& chan, const SystemScenario& scenario);

struct SingleUserSolution {
  double position{};
  double power{};
  double energy_efficiency{};
  int grid_index{-1};
  std::vector<DinkelbachStep> dinkelbach_trace;
  bool converged{};
};

/// Best (position, power) over the grid centres. Centres whose throughput
/// floor cannot be met at P_max are skipped; equal efficiencies prefer the
/// centre closest to the initial position.
SingleUserSolution exhaustive_search(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid,
                                     double tolerance);
SingleUserSolution exhaustive_search(const Channel& chan, const SystemScenario& scenario, int num_subregions,
                                     double tolerance);

/// Same search on a channel whose virtual AoDs are snapped to the resolution-Q
/// grid; the returned efficiency is re-evaluated on the true channel.
struct QuantizedSolution {
  SingleUserSolution planned;  // solution computed on the quantized channel
  double true_energy_efficiency{};
  bool feasible{};  // throughput floor met on the true channel
};
QuantizedSolution quantized_search(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid,
                                   int resolution, double tolerance);

/// Bound (eta_c / p) log2(1 + p max_x g(x) / sigma^2) with the maximum taken over the grid.
double ee_upper_bound(const Channel& chan, const SystemScenario& scenario, double power, const GridSpec& grid);

/// Grid centre with the largest channel gain (ties go to the centre nearest x0).
int argmax_gain(const Channel& chan, const GridSpec& grid, double initial_position);

}  // namespace maee

#endif  // MAEE_SINGLE_USER_HPP
