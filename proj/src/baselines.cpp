// SPDX-License-Identifier: Apache-2.0
#include "maee/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace maee {

namespace {

std::span<const double> as_span(const VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

GridSpec grid_for(const SystemScenario& scenario, const SchemeOptions& options) {
  const double a = scenario.users.at(0).region_length;
  const int s = options.num_subregions > 0 ? options.num_subregions
                                           : default_num_subregions(a, scenario.channel.wavelength);
  return make_grid(a, s);
}

SchemeOutcome single_user_outcome(const SystemScenario& scenario, const Channel& chan, double x,
                                  const PowerSolution& ps) {
  SchemeOutcome out;
  out.positions = VectorXd::Constant(1, x);
  out.powers = VectorXd::Constant(1, ps.power);
  out.metrics = block_metrics(scenario, std::span<const Channel>(&chan, 1), as_span(out.positions),
                              as_span(out.powers), channel_vector(chan, x));
  out.iterations = static_cast<int>(ps.trace.size()) - 1;
  out.converged = ps.converged;
  return out;
}

SchemeOutcome single_user_at(const SystemScenario& scenario, const Channel& chan, double x,
                             const SchemeOptions& options) {
  return single_user_outcome(scenario, chan, x, optimize_power(x, chan, scenario, options.power_tolerance));
}

SchemeOutcome multi_user_outcome(Algorithm2Result r) {
  SchemeOutcome out;
  out.positions = std::move(r.state.positions);
  out.powers = std::move(r.state.powers);
  out.metrics = std::move(r.metrics);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.min_ee_trace = std::move(r.min_ee_trace);
  return out;
}

// Positions tuned for a communication-only goal at full power, then powers
// re-optimized for energy efficiency with those positions held fixed.
SchemeOutcome multi_user_goal(const SystemScenario& scenario, std::span<const Channel> channels,
                              PositionObjective goal, const SchemeOptions& options) {
  SolveState s = initial_state(scenario, channels);
  for (int k = 0; k < s.num_users(); ++k) s.powers[k] = scenario.max_power[static_cast<std::size_t>(k)];
  s = optimize_positions_for(scenario, channels, std::move(s), goal, options.multi_user);
  for (int k = 0; k < s.num_users(); ++k) s.powers[k] = scenario.max_power[static_cast<std::size_t>(k)] / 2;
  Algorithm2Options fixed = options.multi_user;
  fixed.optimize_positions = false;
  return multi_user_outcome(algorithm2(scenario, channels, std::move(s), fixed));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

Scheme parse_scheme(std::string_view token) {
  const std::string t = lower(token);
  if (t == "proposed") return {SchemeKind::Proposed};
  if (t == "fpa") return {SchemeKind::Fpa};
  if (t == "maxsnr" || t == "max_snr") return {SchemeKind::MaxSnr};
  if (t == "maxthroughput" || t == "max_throughput") return {SchemeKind::MaxThroughput};
  if (t.starts_with("quantized")) {
    Scheme s{SchemeKind::Quantized};
    const std::string_view rest = std::string_view(t).substr(9);
    if (rest.empty()) return s;
    if (rest.front() == ':') {
      const auto* first = rest.data() + 1;
      const auto* last = rest.data() + rest.size();
      const auto [ptr, ec] = std::from_chars(first, last, s.resolution);
      if (ec == std::errc{} && ptr == last && s.resolution >= 1) return s;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown scheme '" + std::string(token) + "'");
}

std::string scheme_name(const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::Proposed: return "Proposed";
    case SchemeKind::Quantized: return "Quantized(" + std::to_string(scheme.resolution) + ")";
    case SchemeKind::MaxThroughput: return "MaxThroughput";
    case SchemeKind::MaxSnr: return "MaxSNR";
    case SchemeKind::Fpa: return "FPA";
  }
  return "Unknown";
}

int argmax_throughput(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid) {
  const UserEnergyProfile& u = scenario.users.at(0);
  int best = -1;
  double best_value = 0.0;
  for (std::size_t s = 0; s < grid.centers.size(); ++s) {
    const double x = grid.centers[s];
    const double comm_time = scenario.block_duration - movement_delay(u, x);
    if (!(comm_time > 0)) continue;
    const double value =
        comm_time * std::log2(1.0 + scenario.max_power.at(0) * channel_gain(chan, x) / scenario.noise_power);
    const double tie = 1e-12 * best_value;
    if (best < 0 || value > best_value + tie ||
        (value >= best_value - tie &&
         std::abs(x - u.initial_position) <
             std::abs(grid.centers[static_cast<std::size_t>(best)] - u.initial_position))) {
      best = static_cast<int>(s);
      best_value = value;
    }
  }
  if (best < 0) throw Error(ErrorCode::BlockExhausted, "every grid point exhausts the block");
  return best;
}

SchemeOutcome baseline_fpa(const SystemScenario& scenario, std::span<const Channel> channels,
                           const SchemeOptions& options) {
  scenario.validate();
  if (scenario.num_users() == 1)
    return single_user_at(scenario, channels[0], scenario.users[0].initial_position, options);
  Algorithm2Options fixed = options.multi_user;
  fixed.optimize_positions = false;
  return multi_user_outcome(algorithm2(scenario, channels, fixed));
}

SchemeOutcome baseline_max_snr(const SystemScenario& scenario, std::span<const Channel> channels,
                               const SchemeOptions& options) {
  scenario.validate();
  if (scenario.num_users() == 1) {
    const GridSpec grid = grid_for(scenario, options);
    const int s = argmax_gain(channels[0], grid, scenario.users[0].initial_position);
    return single_user_at(scenario, channels[0], grid.centers[static_cast<std::size_t>(s)], options);
  }
  return multi_user_goal(scenario, channels, PositionObjective::Sinr, options);
}

SchemeOutcome baseline_max_throughput(const SystemScenario& scenario, std::span<const Channel> channels,
                                      const SchemeOptions& options) {
  scenario.validate();
  if (scenario.num_users() == 1) {
    const GridSpec grid = grid_for(scenario, options);
    const int s = argmax_throughput(channels[0], scenario, grid);
    return single_user_at(scenario, channels[0], grid.centers[static_cast<std::size_t>(s)], options);
  }
  return multi_user_goal(scenario, channels, PositionObjective::Throughput, options);
}

SchemeOutcome proposed(const SystemScenario& scenario, std::span<const Channel> channels,
                       const SchemeOptions& options) {
  scenario.validate();
  if (scenario.num_users() == 1) {
    const SingleUserSolution sol =
        exhaustive_search(channels[0], scenario, grid_for(scenario, options), options.power_tolerance);
    PowerSolution ps;
    ps.power = sol.power;
    ps.alpha = sol.energy_efficiency;
    ps.trace = sol.dinkelbach_trace;
    ps.converged = sol.converged;
    return single_user_outcome(scenario, channels[0], sol.position, ps);
  }
  return multi_user_outcome(algorithm2(scenario, channels, options.multi_user));
}

SchemeOutcome quantized(const SystemScenario& scenario, std::span<const Channel> channels, int resolution,
                        const SchemeOptions& options) {
  scenario.validate();
  if (scenario.num_users() == 1) {
    const QuantizedSolution q =
        quantized_search(channels[0], scenario, grid_for(scenario, options), resolution, options.power_tolerance);
    PowerSolution ps;
    ps.power = q.planned.power;
    ps.trace = q.planned.dinkelbach_trace;
    ps.converged = q.planned.converged;
    return single_user_outcome(scenario, channels[0], q.planned.position, ps);
  }
  std::vector<Channel> approx;
  approx.reserve(channels.size());
  for (const Channel& c : channels) approx.push_back(c.with_geometry(quantize_geometry(c.geometry(), resolution)));
  SchemeOutcome out = multi_user_outcome(algorithm2(scenario, approx, options.multi_user));
  // The plan is executed on the true channels with MMSE combining recomputed there.
  SolveState s;
  s.positions = out.positions;
  s.powers = out.powers;
  refresh_state(s, scenario, channels);
  out.metrics = block_metrics(scenario, channels, as_span(s.positions), as_span(s.powers), s.combining);
  out.min_ee_trace.clear();
  return out;
}

SchemeOutcome run_scheme(const Scheme& scheme, const SystemScenario& scenario, std::span<const Channel> channels,
                         const SchemeOptions& options) {
  if (static_cast<int>(channels.size()) != scenario.num_users())
    throw Error(ErrorCode::InvalidArgument, "one channel per user required");
  switch (scheme.kind) {
    case SchemeKind::Proposed: return proposed(scenario, channels, options);
    case SchemeKind::Quantized: return quantized(scenario, channels, scheme.resolution, options);
    case SchemeKind::MaxThroughput: return baseline_max_throughput(scenario, channels, options);
    case SchemeKind::MaxSnr: return baseline_max_snr(scenario, channels, options);
    case SchemeKind::Fpa: return baseline_fpa(scenario, channels, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheme");
}

}  // namespace maee
