// SPDX-License-Identifier: Apache-2.0
//
// The proposed schemes and the comparison baselines behind one call. K = 1
// uses the single-user grid search; K > 1 uses the alternating optimizer.

#ifndef MAEE_BASELINES_HPP
#define MAEE_BASELINES_HPP

#include <span>
#include <string>
#include <string_view>

#include "maee/multi_user.hpp"
#include "maee/single_user.hpp"

namespace maee {

enum class SchemeKind { Proposed, Quantized, MaxThroughput, MaxSnr, Fpa };

struct Scheme {
  SchemeKind kind{SchemeKind::Proposed};
  int resolution{10};  // AoD quantization, Quantized only
};

/// "proposed", "quantized", "quantized:15", "maxthroughput", "maxsnr", "fpa"
/// (case-insensitive). Throws ConfigError on anything else.
Scheme parse_scheme(std::string_view token);
std::string scheme_name(const Scheme& scheme);

struct SchemeOptions {
  int num_subregions{0};     // K = 1 grid; 0 picks 100 A / lambda
  double power_tolerance{1e-6};
  Algorithm2Options multi_user{};
};

struct SchemeOutcome {
  VectorXd positions;
  VectorXd powers;
  BlockMetrics metrics;  // evaluated on the true channels
  int iterations{};
  bool converged{};
  std::vector<double> min_ee_trace;  // K > 1 only
};

/// Throws Infeasible (or InfeasibleThroughput for K = 1) when the scheme finds
/// no operating point meeting the throughput floors.
SchemeOutcome run_scheme(const Scheme& scheme, const SystemScenario& scenario, std::span<const Channel> channels,
                         const SchemeOptions& options = {});

SchemeOutcome baseline_fpa(const SystemScenario& scenario, std::span<const Channel> channels,
                           const SchemeOptions& options = {});
SchemeOutcome baseline_max_snr(const SystemScenario& scenario, std::span<const Channel> channels,
                               const SchemeOptions& options = {});
SchemeOutcome baseline_max_throughput(const SystemScenario& scenario, std::span<const Channel> channels,
                                      const SchemeOptions& options = {});
SchemeOutcome proposed(const SystemScenario& scenario, std::span<const Channel> channels,
                       const SchemeOptions& options = {});
SchemeOutcome quantized(const SystemScenario& scenario, std::span<const Channel> channels, int resolution,
                        const SchemeOptions& options = {});

/// Single-user grid point maximizing (T - delay) log2(1 + P_max g / sigma^2);
/// ties go to the point nearest the initial position.
int argmax_throughput(const Channel& chan, const SystemScenario& scenario, const GridSpec& grid);

}  // namespace maee

#endif  // MAEE_BASELINES_HPP
