// SPDX-License-Identifier: Apache-2.0
//
// Glue between library types and the oracle's plain representation, plus
// random instance generators shared by unit and acceptance tests.

#ifndef MAEE_TESTS_SUPPORT_HPP
#define MAEE_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "maee/energy_model.hpp"
#include "oracles/oracles.hpp"

namespace maee::testing {

inline oracle::Link to_link(const Channel& c) {
  oracle::Link link;
  link.wavelength = c.wavelength();
  link.aod.assign(c.virtual_aod().data(), c.virtual_aod().data() + c.virtual_aod().size());
  link.g.assign(static_cast<std::size_t>(c.num_paths()), {});
  for (Eigen::Index l = 0; l < c.num_paths(); ++l)
    for (Eigen::Index n = 0; n < c.num_bs_antennas(); ++n)
      link.g[static_cast<std::size_t>(l)].push_back(c.path_response()(l, n));
  return link;
}

inline std::vector<oracle::Link> to_links(std::span<const Channel> cs) {
  std::vector<oracle::Link> out;
  for (const Channel& c : cs) out.push_back(to_link(c));
  return out;
}

inline oracle::UserParams to_params(const SystemScenario& s, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const UserEnergyProfile& u = s.users[ku];
  return {u.initial_position, u.region_length, u.energy_rate, u.speed, u.comm_efficiency, s.max_power[ku],
          s.min_throughput[ku]};
}

inline std::vector<oracle::UserParams> to_params(const SystemScenario& s) {
  std::vector<oracle::UserParams> out;
  for (int k = 0; k < s.num_users(); ++k) out.push_back(to_params(s, k));
  return out;
}

inline oracle::Block to_block(const SystemScenario& s) { return {s.block_duration, s.noise_power}; }

/// Unit-variance path coefficients with uniform virtual AoDs in [-1, 1].
inline Channel random_channel(std::mt19937_64& rng, int paths, int antennas, double wavelength = 0.01) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrixX<double> g(paths, antennas);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = {n(rng), n(rng)};
  VectorX<double> aod(paths);
  for (int l = 0; l < paths; ++l) aod[l] = u(rng);
  return Channel(std::move(g), PathGeometry<double>::from_virtual_aod(aod), wavelength);
}

/// Single-user scenario with randomized energy parameters around the defaults.
inline SystemScenario random_single_user(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemScenario s = SystemScenario::table_defaults(1);
  s.users[0].energy_rate = 0.05 + 0.5 * u(rng);
  s.users[0].speed = 0.02 + 0.1 * u(rng);
  s.users[0].initial_position = s.users[0].region_length * u(rng);
  s.block_duration = 1.0 + 3.0 * u(rng);
  s.min_throughput[0] = 0.8 * u(rng);
  return s;
}

}  // namespace maee::testing

#endif  // MAEE_TESTS_SUPPORT_HPP
