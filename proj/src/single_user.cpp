// SPDX-License-Identifier: Apache-2.0
#include "maee/single_user.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace maee {

GridSpec make_grid(double region_length, int num_subregions) {
  if (num_subregions < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sub-region");
  if (!(region_length > 0)) throw Error(ErrorCode::InvalidArgument, "region length must be positive");
  GridSpec g;
  g.num_subregions = num_subregions;
  g.centers.resize(static_cast<std::size_t>(num_subregions));
  const double width = region_length / num_subregions;
  for (int s = 0; s < num_subregions; ++s) g.centers[static_cast<std::size_t>(s)] = (s + 0.5) * width;
  return g;
}

int default_num_subregions(double region_length, double wavelength) {
  return std::max(1, static_cast<int>(std::lround(100.0 * region_length / wavelength)));
}

double dinkelbach_objective(double power, double alpha, double gain, const DinkelbachConstants& c) {
  if (!(c.comm_time > 0)) throw Error(ErrorCode::BlockExhausted, "no communication time left");
  return c.comm_time * std::log2(1.0 + power * gain / c.noise_power) -
         alpha * power * c.comm_time / c.comm_efficiency - alpha * c.motor_energy;
}

double dinkelbach_alpha(double power, double gain, const DinkelbachConstants& c) {
  const double energy = c.motor_energy + power * c.comm_time / c.comm_efficiency;
  if (!(energy > 0)) throw Error(ErrorCode::ZeroEnergy, "no energy spent, efficiency undefined");
  return c.comm_time * std::log2(1.0 + power * gain / c.noise_power) / energy;
}

double unconstrained_power(double alpha, double gain, double comm_efficiency, double noise_power) {
  if (gain == 0.0) throw Error(ErrorCode::ZeroGain, "channel gain is zero");
  if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "Dinkelbach parameter must be positive");
  return std::max(0.0, comm_efficiency / (alpha * std::numbers::ln2) - noise_power / gain);
}

double power_threshold(double min_throughput, double comm_time, double gain, double noise_power,
                       double max_power) {
  if (gain == 0.0) throw Error(ErrorCode::ZeroGain, "channel gain is zero");
  if (!(comm_time > 0)) throw Error(ErrorCode::BlockExhausted, "no communication time left");
  const double p = noise_power * std::expm1(min_throughput / comm_time * std::numbers::ln2) / gain;
  if (p > max_power)
    throw Error(ErrorCode::InfeasibleThroughput,
                "throughput floor needs " + std::to_string(p) + " W > P_max " + std::to_string(max_power));
  return p;
}

double clamp_power(double unconstrained, double threshold, double max_power) {
  if (unconstrained < threshold) return threshold;
  if (unconstrained > max_power) return max_power;
  return unconstrained;
}

PowerSolution optimize_power(const PowerProblem& pb, double tolerance, int max_iterations) {
  const auto& c = pb.constants;
  const double p_th = power_threshold(pb.min_throughput, c.comm_time, pb.gain, c.noise_power, pb.max_power);

  PowerSolution sol;
  double p = clamp_power(pb.max_power / 2, p_th, pb.max_power);
  double alpha = dinkelbach_alpha(p, pb.gain, c);
  sol.trace.push_back({alpha, p, dinkelbach_objective(p, alpha, pb.gain, c), alpha});

  for (int i = 0; i < max_iterations; ++i) {
    const double p_next = clamp_power(unconstrained_power(alpha, pb.gain, c.comm_efficiency, c.noise_power), p_th,
                                      pb.max_power);
    const double objective = dinkelbach_objective(p_next, alpha, pb.gain, c);
    const double alpha_next = dinkelbach_alpha(p_next, pb.gain, c);
    sol.trace.push_back({alpha, p_next, objective, alpha_next});
    const double increase = alpha_next - alpha;
    if (increase >= 0) {
      p = p_next;
      alpha = alpha_next;
    }
    if (increase < tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.power = p;
  sol.alpha = alpha;
  return sol;
}

PowerProblem power_problem_at(double x, double gain, const SystemScenario& scenario) {
  const UserEnergyProfile& u = scenario.users.at(0);
  PowerProblem pb;
  pb.gain = gain;
  pb.constants.comm_time = scenario.block_duration - movement_delay(u, x);
  pb.constants.motor_energy = motor_energy(u, x) + u.circuit_energy;
  pb.constants.comm_efficiency = u.comm_efficiency;
  pb.constants.noise_power = scenario.noise_power;
  pb.min_throughput = scenario.min_throughput.at(0);
  pb.max_power = scenario.max_power.at(0);
  return pb;
}

PowerSolution optimize_power(double x, const Channel& chan, const SystemScenario& scenario, double tolerance) {
  return optimize_power(power_problem_at(x, channel_gain(chan, x), scenario), tolerance);
}

double single_user_ee(double x, double power, const Channel& chan, const SystemScenario& scenario) {
  const double pos[] = {x};
  const double pw[] = {power};
  const MatrixXcd h = channel_vector(chan, x);
  return block_metrics(scenario, std::span<const Channel>(&chan, 1), pos, pw, h).energy_efficiency[0];
}

SingleUserSolution exhaustive_search(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid,
                                     double tolerance) {
  const double x0 = scenario.users.at(0).initial_position;
  SingleUserSolution best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < grid.centers.size(); ++s) {
    const double x = grid.centers[s];
    PowerSolution ps;
    try {
      ps = optimize_power(x, chan, scenario, tolerance);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InfeasibleThroughput || e.code() == ErrorCode::BlockExhausted ||
          e.code() == ErrorCode::ZeroGain)
        continue;
      throw;
    }
    const double dist = std::abs(x - x0);
    const double ee = ps.alpha;
    const double tie = 1e-12 * std::abs(best.energy_efficiency);
    const bool better = best.grid_index < 0 || ee > best.energy_efficiency + tie ||
                        (ee >= best.energy_efficiency - tie && dist < best_dist);
    if (better) {
      best.position = x;
      best.power = ps.power;
      best.energy_efficiency = ee;
      best.grid_index = static_cast<int>(s);
      best.dinkelbach_trace = std::move(ps.trace);
      best.converged = ps.converged;
      best_dist = dist;
    }
  }
  if (best.grid_index < 0) throw Error(ErrorCode::Infeasible, "no sub-region meets the throughput floor");
  return best;
}

SingleUserSolution exhaustive_search(const Channel& chan, const SystemScenario& scenario, int num_subregions,
                                     double tolerance) {
  return exhaustive_search(chan, scenario, make_grid(scenario.users.at(0).region_length, num_subregions), tolerance);
}

QuantizedSolution quantized_search(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid,
                                   int resolution, double tolerance) {
  const Channel quantized = chan.with_geometry(quantize_geometry(chan.geometry(), resolution));
  QuantizedSolution out;
  out.planned = exhaustive_search(quantized, scenario, grid, tolerance);
  const double pos[] = {out.planned.position};
  const double pw[] = {out.planned.power};
  const MatrixXcd h = channel_vector(chan, out.planned.position);
  const BlockMetrics m = block_metrics(scenario, std::span<const Channel>(&chan, 1), pos, pw, h);
  out.true_energy_efficiency = m.energy_efficiency[0];
  out.feasible = m.feasible();
  return out;
}

int argmax_gain(const Channel& chan, const GridSpec& grid, double initial_position) {
  int best = -1;
  double best_gain = -1.0;
  for (std::size_t s = 0; s < grid.centers.size(); ++s) {
    const double x = grid.centers[s];
    const double g = channel_gain(chan, x);
    const double tie = 1e-12 * best_gain;
    if (best < 0 || g > best_gain + tie ||
        (g >= best_gain - tie &&
         std::abs(x - initial_position) < std::abs(grid.centers[static_cast<std::size_t>(best)] - initial_position))) {
      best = static_cast<int>(s);
      best_gain = g;
    }
  }
  return best;
}

double ee_upper_bound(const Channel& chan, const SystemScenario& scenario, double power, const GridSpec& grid) {
  if (!(power > 0)) throw Error(ErrorCode::InvalidArgument, "upper bound needs a positive power");
  const UserEnergyProfile& u = scenario.users.at(0);
  const int s = argmax_gain(chan, grid, u.initial_position);
  const double g = channel_gain(chan, grid.centers[static_cast<std::size_t>(s)]);
  return u.comm_efficiency / power * std::log2(1.0 + power * g / scenario.noise_power);
}

}  // namespace maee
