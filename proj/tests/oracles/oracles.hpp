// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests. Written from the model definitions
// with plain loops over std::complex and no calls into the library.

#ifndef MAEE_TESTS_ORACLES_HPP
#define MAEE_TESTS_ORACLES_HPP

#include <complex>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

struct Link {
  // g[l][n]: coefficient of path l at BS antenna n
  std::vector<std::vector<cd>> g;
  std::vector<double> aod;
  double wavelength{};
};

/// h_n(x) = sum_l conj(g[l][n]) exp(j 2 pi x aod_l / lambda)
std::vector<cd> channel(const Link& link, double x);
double gain(const Link& link, double x);

/// p |w^H h(x)|^2 and its first two x-derivatives.
struct Received {
  double value, first, second;
};
Received received_power(const Link& link, const std::vector<cd>& w, double p, double x);

/// Smallest chi > 0 with gain(x) == gain(x + chi) for the AoD set, found by
/// scanning multiples of the base period candidates; 0 if none up to limit.
double two_path_period(double aod_a, double aod_b, double wavelength);

struct UserParams {
  double x0, region, energy_rate, speed, eta, p_max, r_min;
};

struct Block {
  double T, sigma2;
};

/// Energy efficiency of every user with MMSE-optimal SINR at (x, p):
///   SINR_k = p_k h_k^H (sum_{j != k} p_j h_j h_j^H + sigma^2 I)^{-1} h_k.
/// `throughput` receives the per-user bits/Hz when non-null.
std::vector<double> mmse_energy_efficiency(const std::vector<Link>& links, const std::vector<UserParams>& users,
                                           const Block& block, const std::vector<double>& x,
                                           const std::vector<double>& p, std::vector<double>* throughput = nullptr);

/// Single user, combining matched to the channel.
double single_user_ee(const Link& link, const UserParams& u, const Block& block, double x, double p);

/// Best feasible power on an n-point grid over (0, p_max] at fixed x; returns
/// {power, ee}; power < 0 when no grid point meets the throughput floor.
std::pair<double, double> power_grid_search(const Link& link, const UserParams& u, const Block& block, double x,
                                            int points);

/// Exhaustive max-min EE over position grids (inclusive ends of [0, A]) and
/// power grids (k P_max / (m - 1), k = 1..m-1). Returns -1 when nothing is feasible.
double brute_force_max_min_ee(const std::vector<Link>& links, const std::vector<UserParams>& users,
                              const Block& block, int position_points, int power_points);

}  // namespace oracle

#endif  // MAEE_TESTS_ORACLES_HPP
