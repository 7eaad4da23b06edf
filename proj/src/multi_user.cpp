// SPDX-License-Identifier: Apache-2.0
#include "maee/multi_user.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maee {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kMinDelaySlack = 1e-6;
constexpr double kInterferenceLevel = 1.0;

std::span<const double> as_span(const VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

MatrixXcd channels_at(std::span<const Channel> channels, const VectorXd& positions) {
  return channel_matrix<double>(channels, as_span(positions));
}

void check_sizes(const SolveState& state, const SystemScenario& scenario, std::span<const Channel> channels) {
  const auto k = static_cast<Eigen::Index>(scenario.users.size());
  if (static_cast<Eigen::Index>(channels.size()) != k || state.powers.size() != k || state.positions.size() != k)
    throw Error(ErrorCode::InvalidArgument, "state, scenario and channels disagree on the number of users");
}

}  // namespace

MatrixXcd mmse_combining(const MatrixXcd& channels, std::span<const double> powers, double noise_power) {
  if (static_cast<Eigen::Index>(powers.size()) != channels.cols())
    throw Error(ErrorCode::InvalidArgument, "one power per channel column required");
  if (!(noise_power > 0)) throw Error(ErrorCode::InvalidArgument, "noise power must be positive");
  const Eigen::Index n = channels.rows();
  MatrixXcd cov = noise_power * MatrixXcd::Identity(n, n);
  for (Eigen::Index j = 0; j < channels.cols(); ++j)
    cov.noalias() += powers[static_cast<std::size_t>(j)] * channels.col(j) * channels.col(j).adjoint();
  return cov.ldlt().solve(channels);
}

void normalize_combining(MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
                         double noise_power, double log_level) {
  const MatrixXd a = link_gains(combining, channels);
  for (Eigen::Index k = 0; k < combining.cols(); ++k) {
    double floor = combining.col(k).squaredNorm() * noise_power;
    if (floor == 0.0) throw Error(ErrorCode::ZeroCombiner, "cannot normalize a zero combining vector");
    for (Eigen::Index j = 0; j < combining.cols(); ++j)
      if (j != k) floor += a(k, j) * powers[static_cast<std::size_t>(j)];
    combining.col(k) *= std::sqrt(std::exp(log_level) / floor);
  }
}

MatrixXd link_gains(const MatrixXcd& combining, const MatrixXcd& channels) {
  return (combining.adjoint() * channels).cwiseAbs2();
}

VectorXd dinkelbach_alpha_multi(const SolveState& state, const SystemScenario& scenario,
                                std::span<const Channel> channels) {
  check_sizes(state, scenario, channels);
  const BlockMetrics m =
      block_metrics(scenario, channels, as_span(state.positions), as_span(state.powers), state.combining);
  for (std::size_t k = 0; k < m.zero_energy.size(); ++k)
    if (m.zero_energy[k]) throw Error(ErrorCode::ZeroEnergy, "user " + std::to_string(k) + " spends no energy");
  return m.energy_efficiency;
}

void rebuild_slacks(SolveState& state, const SystemScenario& scenario, std::span<const Channel> channels) {
  check_sizes(state, scenario, channels);
  const int k_users = state.num_users();
  const MatrixXd a = link_gains(state.combining, channels_at(channels, state.positions));
  state.mu.resize(k_users);
  state.varpi.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double noise = state.combining.col(k).squaredNorm() * scenario.noise_power;
    double interference = noise;
    for (int j = 0; j < k_users; ++j)
      if (j != k) interference += a(k, j) * state.powers[j];
    state.varpi[k] = std::log(interference);
    state.mu[k] = std::log(interference + a(k, k) * state.powers[k]);
  }
}

void refresh_state(SolveState& state, const SystemScenario& scenario, std::span<const Channel> channels) {
  check_sizes(state, scenario, channels);
  const MatrixXcd h = channels_at(channels, state.positions);
  state.combining = mmse_combining(h, as_span(state.powers), scenario.noise_power);
  normalize_combining(state.combining, h, as_span(state.powers), scenario.noise_power, kInterferenceLevel);
  state.dinkelbach = dinkelbach_alpha_multi(state, scenario, channels);
  rebuild_slacks(state, scenario, channels);
}

SolveState initial_state(const SystemScenario& scenario, std::span<const Channel> channels) {
  scenario.validate();
  const int k_users = scenario.num_users();
  SolveState s;
  s.powers.resize(k_users);
  s.positions.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    s.powers[k] = scenario.max_power[static_cast<std::size_t>(k)] / 2;
    s.positions[k] = scenario.users[static_cast<std::size_t>(k)].initial_position;
  }
  refresh_state(s, scenario, channels);
  const double delay = max_movement_delay(scenario, as_span(s.positions));
  s.xi1 = std::max(kMinDelaySlack, delay);
  s.xi2 = -delay;
  return s;
}

Subproblem build_power_subproblem(const SolveState& state, const SystemScenario& scenario,
                                  std::span<const Channel> channels) {
  check_sizes(state, scenario, channels);
  const int k_users = state.num_users();
  const double comm_time = scenario.block_duration - max_movement_delay(scenario, as_span(state.positions));
  if (!(comm_time > 0)) throw Error(ErrorCode::BlockExhausted, "movement delay consumes the whole block");
  const MatrixXd a = link_gains(state.combining, channels_at(channels, state.positions));

  Subproblem sub{SmoothProgram(3 * k_users + 1), SubproblemLayout{k_users, false}, {}};
  const SubproblemLayout& lay = sub.layout;
  SmoothProgram& prog = sub.program;
  prog.objective[lay.objective()] = 1.0;
  sub.start = Eigen::VectorXd::Zero(lay.size());

  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const UserEnergyProfile& u = scenario.users[ku];
    const double p_max = scenario.max_power[ku];
    const double noise = state.combining.col(k).squaredNorm() * scenario.noise_power;
    const double motor = u.energy_rate * std::abs(state.positions[k] - u.initial_position) + u.circuit_energy;
    const double alpha = state.dinkelbach[k];
    const double mu0 = state.mu[k];
    const double varpi0 = state.varpi[k];

    // c_j = |w_k^H h_j|^2 P_max_j, so received power = sum_j c_j q_j.
    Eigen::VectorXd c(k_users);
    for (int j = 0; j < k_users; ++j) c[j] = a(k, j) * scenario.max_power[static_cast<std::size_t>(j)];
    const double interference_max = c.sum() - c[k] + noise;

    prog.lower[lay.first(k)] = 0.0;
    prog.upper[lay.first(k)] = 1.0;
    prog.lower[lay.mu(k)] = std::min(0.5, mu0 - 1.0);
    prog.upper[lay.mu(k)] = std::max(mu0, std::log(c.sum() + noise)) + 1.0;
    prog.lower[lay.varpi(k)] = std::min(0.5, varpi0 - 1.0);
    prog.upper[lay.varpi(k)] = std::max(varpi0, std::log(interference_max)) + 2.0;

    // Throughput floor: R ln2 - T(mu - varpi) <= 0.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(lay.size());
    g[lay.mu(k)] = -comm_time;
    g[lay.varpi(k)] = comm_time;
    prog.add(linear_constraint(g, scenario.min_throughput[ku] * kLn2, "throughput"));

    // Dinkelbach epigraph: objective <= T log2 e^(mu - varpi) - alpha T p / eta - alpha Xi.
    g.setZero();
    g[lay.objective()] = 1.0;
    g[lay.mu(k)] = -comm_time / kLn2;
    g[lay.varpi(k)] = comm_time / kLn2;
    g[lay.first(k)] = alpha * comm_time * p_max / u.comm_efficiency;
    prog.add(linear_constraint(g, alpha * motor, "efficiency"));

    // e^mu <= sum_j c_j q_j + noise, scaled by e^mu0.
    {
      const double scale = std::exp(mu0);
      const int n = lay.size();
      const int im = lay.mu(k);
      SmoothConstraint s;
      s.value = [c, noise, scale, im](const Eigen::VectorXd& z) {
        return (std::exp(z[im]) - c.dot(z.head(c.size())) - noise) / scale;
      };
      s.gradient = [c, scale, im, n](const Eigen::VectorXd& z) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        d.head(c.size()) = -c / scale;
        d[im] = std::exp(z[im]) / scale;
        return d;
      };
      s.hessian = [scale, im, n](const Eigen::VectorXd& z) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        h(im, im) = std::exp(z[im]) / scale;
        return h;
      };
      s.name = "received power";
      prog.add(std::move(s));
    }

    // Interference + noise <= e^varpi0 (1 + varpi - varpi0), scaled by e^varpi0.
    g.setZero();
    const double ev = std::exp(varpi0);
    for (int j = 0; j < k_users; ++j)
      if (j != k) g[lay.first(j)] = c[j] / ev;
    g[lay.varpi(k)] = -1.0;
    prog.add(linear_constraint(g, noise / ev - 1.0 + varpi0, "interference"));

    sub.start[lay.first(k)] = std::clamp(state.powers[k] / p_max, 0.0, 1.0);
    sub.start[lay.mu(k)] = mu0;
    sub.start[lay.varpi(k)] = varpi0;
    const double margin = comm_time * (mu0 - varpi0) / kLn2 - alpha * comm_time * state.powers[k] / u.comm_efficiency -
                          alpha * motor;
    worst_margin = std::min(worst_margin, margin);
  }
  sub.start[lay.objective()] = worst_margin;
  return sub;
}

MatrixXcd received_power_form(const Channel& transmitter, const VectorXcd& combiner, double power) {
  const VectorXcd v = transmitter.path_response() * combiner;
  return power * v * v.adjoint();
}

double h_jk_value(const MatrixXcd& m, const VectorXd& aod, double x, double wavelength) {
  return expand_hermitian_form<double>(m, aod, wavelength).value(x);
}

double h_jk_derivative(const MatrixXcd& m, const VectorXd& aod, double x, double wavelength) {
  return expand_hermitian_form<double>(m, aod, wavelength).derivative(x);
}

double curvature_bound(const MatrixXcd& m, const VectorXd& aod, double wavelength) {
  return expand_hermitian_form<double>(m, aod, wavelength).curvature_bound();
}

SurrogatePair surrogate_bounds(const PhaseExpansion<double>& h, double x_local, double x) {
  const double d = x - x_local;
  const double linear = h.value(x_local) + h.derivative(x_local) * d;
  const double quad = 0.5 * h.curvature_bound() * d * d;
  return {linear - quad, linear + quad};
}

SurrogatePair surrogate_bounds(const MatrixXcd& m, const VectorXd& aod, double x_local, double x,
                               double wavelength) {
  return surrogate_bounds(expand_hermitian_form<double>(m, aod, wavelength), x_local, x);
}

double product_upper_bound(double xi, double mu, double xi_local, double mu_local) {
  return 0.5 * (mu_local / xi_local * xi * xi + xi_local / mu_local * mu * mu);
}

double product_lower_bound(double xi, double varpi, double xi_local, double varpi_local) {
  return (1.0 + std::log(xi) + std::log(varpi) - std::log(xi_local) - std::log(varpi_local)) * xi_local *
         varpi_local;
}

SurrogateData build_surrogates(const SolveState& state, std::span<const Channel> channels) {
  const int k_users = state.num_users();
  SurrogateData data;
  data.num_users = k_users;
  data.terms.reserve(static_cast<std::size_t>(k_users * k_users));
  for (int j = 0; j < k_users; ++j) {
    const Channel& cj = channels[static_cast<std::size_t>(j)];
    for (int k = 0; k < k_users; ++k) {
      const MatrixXcd m = received_power_form(cj, state.combining.col(k), state.powers[j]);
      data.terms.push_back(expand_hermitian_form<double>(m, cj.virtual_aod(), cj.wavelength()));
    }
  }
  return data;
}

Subproblem build_position_subproblem(const SolveState& state, const SystemScenario& scenario,
                                     std::span<const Channel> channels, PositionObjective goal) {
  check_sizes(state, scenario, channels);
  const int k_users = state.num_users();
  const double xi_local = state.xi1;
  if (!(xi_local > 0)) throw Error(ErrorCode::DegenerateLocalPoint, "delay slack local point must be positive");
  for (int k = 0; k < k_users; ++k)
    if (!(state.varpi[k] > 0) || !(state.mu[k] > 0))
      throw Error(ErrorCode::DegenerateLocalPoint, "log-domain slack local points must be positive");

  const double block = scenario.block_duration;
  const SurrogateData sur = build_surrogates(state, channels);

  Subproblem sub{SmoothProgram(3 * k_users + 3), SubproblemLayout{k_users, true}, {}};
  const SubproblemLayout& lay = sub.layout;
  SmoothProgram& prog = sub.program;
  const int n = lay.size();
  const int ix1 = lay.xi1();
  const int ix2 = lay.xi2();
  prog.objective[lay.objective()] = 1.0;
  sub.start = Eigen::VectorXd::Zero(n);

  double max_reach = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const UserEnergyProfile& u = scenario.users[static_cast<std::size_t>(k)];
    max_reach = std::max(max_reach, u.region_length / u.speed);
  }
  prog.lower[ix1] = 1e-12;
  prog.upper[ix1] = block;
  prog.lower[ix2] = -(max_reach + block);
  prog.upper[ix2] = block;

  const double delay = max_movement_delay(scenario, as_span(state.positions));
  sub.start[ix1] = std::max(xi_local, delay);
  sub.start[ix2] = -delay;

  // Per-user quantities in scaled position u = x / lambda.
  std::vector<double> lam(static_cast<std::size_t>(k_users));
  for (int j = 0; j < k_users; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    lam[ju] = channels[ju].wavelength();
    const UserEnergyProfile& u = scenario.users[ju];
    prog.lower[lay.first(j)] = 0.0;
    prog.upper[lay.first(j)] = u.region_length / lam[ju];
    sub.start[lay.first(j)] = std::clamp(state.positions[j] / lam[ju], 0.0, u.region_length / lam[ju]);

    // |x_j - x0_j| / v_j <= xi1 and xi2 <= -|x_j - x0_j| / v_j.
    for (const double sign : {1.0, -1.0}) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
      g[lay.first(j)] = sign * lam[ju] / u.speed;
      g[ix1] = -1.0;
      prog.add(linear_constraint(g, -sign * u.initial_position / u.speed, "delay upper"));
      g.setZero();
      g[ix2] = 1.0;
      g[lay.first(j)] = -sign * lam[ju] / u.speed;
      prog.add(linear_constraint(g, sign * u.initial_position / u.speed, "delay lower"));
    }
  }

  // Local quadratic models of h_jk in u: value, slope and curvature.
  struct Quad {
    double value, slope, curvature, u_local;
  };
  std::vector<Quad> quad(static_cast<std::size_t>(k_users * k_users));
  for (int j = 0; j < k_users; ++j) {
    const double l = lam[static_cast<std::size_t>(j)];
    for (int k = 0; k < k_users; ++k) {
      const PhaseExpansion<double>& h = sur.at(j, k);
      const double xj = state.positions[j];
      quad[static_cast<std::size_t>(j * k_users + k)] = {h.value(xj), l * h.derivative(xj),
                                                         l * l * h.curvature_bound(), xj / l};
    }
  }

  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const UserEnergyProfile& u = scenario.users[ku];
    const double noise = state.combining.col(k).squaredNorm() * scenario.noise_power;
    const double mu0 = state.mu[k];
    const double varpi0 = state.varpi[k];
    const int im = lay.mu(k);
    const int iv = lay.varpi(k);
    const int io = lay.objective();

    double reach = noise;
    for (int j = 0; j < k_users; ++j) {
      const PhaseExpansion<double>& h = sur.at(j, k);
      double peak = h.constant_term;
      for (const auto& t : h.cross_terms) peak += 2 * t.magnitude;
      reach += peak;
    }
    prog.lower[im] = std::min(0.5, mu0 - 1.0);
    prog.upper[im] = std::max(mu0, std::log(reach)) + 1.0;
    prog.lower[iv] = std::min(0.5, 0.5 * varpi0);
    prog.upper[iv] = std::max(varpi0, std::log(reach)) + 2.0;
    sub.start[im] = mu0;
    sub.start[iv] = varpi0;

    // Concave lower bound of (T - xi1)(mu - varpi), natural-log units.
    const double a_xi = mu0 / xi_local;
    const double a_mu = xi_local / mu0;
    const double pw = xi_local * varpi0;
    const double log_ref = std::log(xi_local) + std::log(varpi0);
    auto rate_lb = [=](const Eigen::VectorXd& z) {
      const double x1 = z[ix1];
      const double m = z[im];
      const double w = z[iv];
      return block * (m - w) - 0.5 * (a_xi * x1 * x1 + a_mu * m * m) + (1.0 + std::log(x1) + std::log(w) - log_ref) * pw;
    };
    auto rate_lb_grad = [=](const Eigen::VectorXd& z) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d[ix1] = -a_xi * z[ix1] + pw / z[ix1];
      d[im] = block - a_mu * z[im];
      d[iv] = -block + pw / z[iv];
      return d;
    };
    // Hessian of the negated bound (positive semidefinite).
    auto rate_lb_neg_hess = [=](const Eigen::VectorXd& z) {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
      h(ix1, ix1) = a_xi + pw / (z[ix1] * z[ix1]);
      h(im, im) = a_mu;
      h(iv, iv) = pw / (z[iv] * z[iv]);
      return h;
    };

    const double r_th = scenario.min_throughput[ku];
    if (r_th > 0) {
      SmoothConstraint s;
      s.value = [=](const Eigen::VectorXd& z) { return r_th * kLn2 - rate_lb(z); };
      s.gradient = [=](const Eigen::VectorXd& z) { return Eigen::VectorXd(-rate_lb_grad(z)); };
      s.hessian = rate_lb_neg_hess;
      s.name = "throughput";
      prog.add(std::move(s));
    }

    const double start_rate = rate_lb(sub.start);
    switch (goal) {
      case PositionObjective::EnergyEfficiency: {
        const double alpha = state.dinkelbach[k];
        const double c_xi1 = alpha * u.energy_rate * u.speed * kLn2;
        const double c_comm = alpha * state.powers[k] / u.comm_efficiency * kLn2;
        const double c_fixed = alpha * u.circuit_energy * kLn2;
        SmoothConstraint s;
        s.value = [=](const Eigen::VectorXd& z) {
          return z[io] * kLn2 - rate_lb(z) + c_xi1 * z[ix1] + c_comm * (block - z[ix2]) + c_fixed;
        };
        s.gradient = [=](const Eigen::VectorXd& z) {
          Eigen::VectorXd d = -rate_lb_grad(z);
          d[io] += kLn2;
          d[ix1] += c_xi1;
          d[ix2] -= c_comm;
          return d;
        };
        s.hessian = rate_lb_neg_hess;
        s.name = "efficiency";
        prog.add(std::move(s));
        const double energy = c_xi1 * sub.start[ix1] + c_comm * (block - sub.start[ix2]) + c_fixed;
        worst_margin = std::min(worst_margin, (start_rate - energy) / kLn2);
        break;
      }
      case PositionObjective::Throughput: {
        SmoothConstraint s;
        s.value = [=](const Eigen::VectorXd& z) { return z[io] * kLn2 - rate_lb(z); };
        s.gradient = [=](const Eigen::VectorXd& z) {
          Eigen::VectorXd d = -rate_lb_grad(z);
          d[io] += kLn2;
          return d;
        };
        s.hessian = rate_lb_neg_hess;
        s.name = "throughput objective";
        prog.add(std::move(s));
        worst_margin = std::min(worst_margin, start_rate / kLn2);
        break;
      }
      case PositionObjective::Sinr: {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        g[io] = 1.0;
        g[im] = -1.0;
        g[iv] = 1.0;
        prog.add(linear_constraint(g, 0.0, "sinr objective"));
        worst_margin = std::min(worst_margin, mu0 - varpi0);
        break;
      }
    }

    // e^mu <= sum_j h_jk^lb(u_j) + noise, scaled by e^mu0.
    {
      std::vector<Quad> q(static_cast<std::size_t>(k_users));
      for (int j = 0; j < k_users; ++j) q[static_cast<std::size_t>(j)] = quad[static_cast<std::size_t>(j * k_users + k)];
      const double scale = std::exp(mu0);
      SmoothConstraint s;
      s.value = [=](const Eigen::VectorXd& z) {
        double lb = noise;
        for (int j = 0; j < k_users; ++j) {
          const Quad& t = q[static_cast<std::size_t>(j)];
          const double d = z[j] - t.u_local;
          lb += t.value + t.slope * d - 0.5 * t.curvature * d * d;
        }
        return (std::exp(z[im]) - lb) / scale;
      };
      s.gradient = [=](const Eigen::VectorXd& z) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < k_users; ++j) {
          const Quad& t = q[static_cast<std::size_t>(j)];
          g[j] = -(t.slope - t.curvature * (z[j] - t.u_local)) / scale;
        }
        g[im] = std::exp(z[im]) / scale;
        return g;
      };
      s.hessian = [=](const Eigen::VectorXd& z) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < k_users; ++j) h(j, j) = q[static_cast<std::size_t>(j)].curvature / scale;
        h(im, im) = std::exp(z[im]) / scale;
        return h;
      };
      s.name = "received power";
      prog.add(std::move(s));
    }

    // sum_{j != k} h_jk^ub(u_j) + noise <= e^varpi0 (1 + varpi - varpi0), scaled by e^varpi0.
    {
      std::vector<Quad> q(static_cast<std::size_t>(k_users));
      for (int j = 0; j < k_users; ++j) q[static_cast<std::size_t>(j)] = quad[static_cast<std::size_t>(j * k_users + k)];
      const double scale = std::exp(varpi0);
      SmoothConstraint s;
      s.value = [=](const Eigen::VectorXd& z) {
        double ub = noise;
        for (int j = 0; j < k_users; ++j) {
          if (j == k) continue;
          const Quad& t = q[static_cast<std::size_t>(j)];
          const double d = z[j] - t.u_local;
          ub += t.value + t.slope * d + 0.5 * t.curvature * d * d;
        }
        return ub / scale - (1.0 + z[iv] - varpi0);
      };
      s.gradient = [=](const Eigen::VectorXd& z) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < k_users; ++j) {
          if (j == k) continue;
          const Quad& t = q[static_cast<std::size_t>(j)];
          g[j] = (t.slope + t.curvature * (z[j] - t.u_local)) / scale;
        }
        g[iv] = -1.0;
        return g;
      };
      if (k_users > 1)
        s.hessian = [=](const Eigen::VectorXd&) {
          Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
          for (int j = 0; j < k_users; ++j)
            if (j != k) h(j, j) = q[static_cast<std::size_t>(j)].curvature / scale;
          return h;
        };
      s.name = "interference";
      prog.add(std::move(s));
    }
  }
  sub.start[lay.objective()] = worst_margin;
  return sub;
}

namespace {

struct Candidate {
  SolveState state;
  BlockMetrics metrics;
  bool valid{};
};

Candidate evaluate(SolveState s, const SystemScenario& scenario, std::span<const Channel> channels) {
  Candidate c;
  try {
    refresh_state(s, scenario, channels);
    c.metrics = block_metrics(scenario, channels, as_span(s.positions), as_span(s.powers), s.combining);
    c.valid = true;
  } catch (const Error&) {
    c.valid = false;
  }
  c.state = std::move(s);
  return c;
}

void clamp_positions(VectorXd& x, const SystemScenario& scenario) {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    x[k] = std::clamp(x[k], 0.0, scenario.users[static_cast<std::size_t>(k)].region_length);
}

void set_delay_slacks(SolveState& s, const SystemScenario& scenario, double floor = kMinDelaySlack) {
  const double delay = max_movement_delay(scenario, as_span(s.positions));
  s.xi1 = std::max(floor, delay);
  s.xi2 = -delay;
}

VectorXd positions_from(const Subproblem& sub, const SolveReport& rep, std::span<const Channel> channels,
                        const SystemScenario& scenario) {
  VectorXd x(sub.layout.num_users);
  for (int k = 0; k < sub.layout.num_users; ++k)
    x[k] = rep.point[sub.layout.first(k)] * channels[static_cast<std::size_t>(k)].wavelength();
  clamp_positions(x, scenario);
  return x;
}

double goal_metric(const BlockMetrics& m, PositionObjective goal) {
  switch (goal) {
    case PositionObjective::Sinr:
      return m.sinr.minCoeff();
    case PositionObjective::Throughput:
      return m.throughput.minCoeff();
    case PositionObjective::EnergyEfficiency:
      break;
  }
  return m.min_energy_efficiency();
}

}  // namespace

constexpr int kPowerLadder = 14;
constexpr int kMaxSweeps = 10;

SolveState initial_position_search(const SystemScenario& scenario, std::span<const Channel> channels,
                                   SolveState start, int points) {
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "position search needs at least one point");
  Candidate cur = evaluate(std::move(start), scenario, channels);
  if (!cur.valid) throw Error(ErrorCode::InvalidArgument, "starting state cannot be evaluated");
  // Infeasible states are ranked by the total throughput missing below the floors.
  auto shortfall = [&](const BlockMetrics& m) {
    double total = 0;
    for (std::size_t k = 0; k < scenario.min_throughput.size(); ++k)
      total += std::max(0.0, scenario.min_throughput[k] - m.throughput[static_cast<Eigen::Index>(k)]);
    return total;
  };
  auto better = [&](const BlockMetrics& a, const BlockMetrics& b) {
    if (a.feasible() != b.feasible()) return a.feasible();
    if (!a.feasible()) return shortfall(a) < shortfall(b);
    return a.min_energy_efficiency() > b.min_energy_efficiency();
  };
  // Sweeps repeat while they still improve, capped so large K stays cheap.
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool improved = false;
    for (int k = 0; k < cur.state.num_users(); ++k) {
      const UserEnergyProfile& u = scenario.users[static_cast<std::size_t>(k)];
      std::vector<double> spots{u.initial_position, 0.0, u.region_length};
      for (int s = 0; s < points; ++s) spots.push_back((s + 0.5) * u.region_length / points);
      // A new spot is often only worth it at a different power, so each one
      // is tried with the current power and a halving ladder from P_max.
      const double p_max = scenario.max_power[static_cast<std::size_t>(k)];
      const SolveState base = cur.state;
      for (const double x : spots) {
        for (int j = -1; j < kPowerLadder; ++j) {
          const double p = j < 0 ? base.powers[k] : std::ldexp(p_max, -j);
          if (x == cur.state.positions[k] && p == cur.state.powers[k]) continue;
          SolveState next = cur.state;
          next.positions[k] = x;
          next.powers[k] = p;
          Candidate cand = evaluate(std::move(next), scenario, channels);
          if (cand.valid && better(cand.metrics, cur.metrics)) {
            cur = std::move(cand);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return std::move(cur.state);
}

Algorithm2Result algorithm2(const SystemScenario& scenario, std::span<const Channel> channels,
                            const Algorithm2Options& options) {
  SolveState start = initial_state(scenario, channels);
  if (options.initial_grid > 0 && options.optimize_positions && options.optimize_powers) {
    // Powers tuned at the initial positions give the search a realistic
    // balance between movement and transmit energy.
    Algorithm2Options fixed = options;
    fixed.optimize_positions = false;
    try {
      start = algorithm2(scenario, channels, std::move(start), fixed).state;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible) throw;
      // No power setting works at the initial positions; search at full power.
      start = initial_state(scenario, channels);
      for (int k = 0; k < start.num_users(); ++k) start.powers[k] = scenario.max_power[static_cast<std::size_t>(k)];
    }
    start = initial_position_search(scenario, channels, std::move(start), options.initial_grid);
  }
  return algorithm2(scenario, channels, std::move(start), options);
}

Algorithm2Result algorithm2(const SystemScenario& scenario, std::span<const Channel> channels, SolveState start,
                            const Algorithm2Options& options) {
  scenario.validate();
  Candidate cur = evaluate(std::move(start), scenario, channels);
  if (!cur.valid) throw Error(ErrorCode::InvalidArgument, "starting state cannot be evaluated");
  set_delay_slacks(cur.state, scenario, options.min_delay_slack);

  Algorithm2Result res;
  bool feasible = cur.metrics.feasible();
  double current = cur.metrics.min_energy_efficiency();
  if (feasible) res.min_ee_trace.push_back(current);

  auto accept = [&](Candidate& cand) {
    if (!cand.valid || !cand.metrics.feasible()) return false;
    const double value = cand.metrics.min_energy_efficiency();
    if (feasible && !(value >= current)) return false;
    cur = std::move(cand);
    feasible = true;
    current = value;
    return true;
  };

  for (int it = 0; it < options.max_outer; ++it) {
    if (options.optimize_powers) {
      const Subproblem sub = build_power_subproblem(cur.state, scenario, channels);
      const SolveReport rep = solve(sub.program, sub.start, options.solver);
      if (rep.status == SolveStatus::Infeasible) {
        if (!feasible) throw Error(ErrorCode::Infeasible, "no transmit powers meet every throughput floor");
      } else {
        SolveState next = cur.state;
        for (int k = 0; k < next.num_users(); ++k) {
          const double p_max = scenario.max_power[static_cast<std::size_t>(k)];
          next.powers[k] = std::clamp(rep.point[sub.layout.first(k)], 0.0, 1.0) * p_max;
        }
        next.objective = rep.objective;
        Candidate cand = evaluate(std::move(next), scenario, channels);
        accept(cand);
      }
    }
    if (options.optimize_positions && feasible) {
      set_delay_slacks(cur.state, scenario, options.min_delay_slack);
      const Subproblem sub = build_position_subproblem(cur.state, scenario, channels);
      const SolveReport rep = solve(sub.program, sub.start, options.solver);
      if (rep.status != SolveStatus::Infeasible) {
        SolveState next = cur.state;
        next.positions = positions_from(sub, rep, channels, scenario);
        next.objective = rep.objective;
        Candidate cand = evaluate(std::move(next), scenario, channels);
        if (cand.valid) {
          cand.state.xi1 = std::max(options.min_delay_slack, rep.point[sub.layout.xi1()]);
          cand.state.xi2 = rep.point[sub.layout.xi2()];
        }
        accept(cand);
      }
    }
    set_delay_slacks(cur.state, scenario, options.min_delay_slack);
    res.iterations = it + 1;
    if (!feasible) continue;
    res.objective_trace.push_back(cur.state.objective);
    res.min_ee_trace.push_back(current);
    const std::size_t n = res.min_ee_trace.size();
    if (n >= 2 && res.min_ee_trace[n - 1] - res.min_ee_trace[n - 2] < options.tolerance) {
      res.converged = true;
      break;
    }
  }

  if (options.snap_step > 0) {
    SolveState snapped = cur.state;
    for (int k = 0; k < snapped.num_users(); ++k)
      snapped.positions[k] = std::round(snapped.positions[k] / options.snap_step) * options.snap_step;
    clamp_positions(snapped.positions, scenario);
    Candidate cand = evaluate(std::move(snapped), scenario, channels);
    if (cand.valid) {
      set_delay_slacks(cand.state, scenario);
      cur = std::move(cand);
    }
  }

  res.state = std::move(cur.state);
  res.metrics = std::move(cur.metrics);
  return res;
}

SolveState optimize_positions_for(const SystemScenario& scenario, std::span<const Channel> channels,
                                  SolveState start, PositionObjective goal, const Algorithm2Options& options) {
  scenario.validate();
  Candidate cur = evaluate(std::move(start), scenario, channels);
  if (!cur.valid) throw Error(ErrorCode::InvalidArgument, "starting state cannot be evaluated");
  double current = goal_metric(cur.metrics, goal);
  bool feasible = cur.metrics.feasible();
  for (int it = 0; it < options.max_outer; ++it) {
    set_delay_slacks(cur.state, scenario, options.min_delay_slack);
    const Subproblem sub = build_position_subproblem(cur.state, scenario, channels, goal);
    const SolveReport rep = solve(sub.program, sub.start, options.solver);
    if (rep.status == SolveStatus::Infeasible) break;
    SolveState next = cur.state;
    next.positions = positions_from(sub, rep, channels, scenario);
    Candidate cand = evaluate(std::move(next), scenario, channels);
    if (!cand.valid || (feasible && !cand.metrics.feasible())) break;
    const double value = goal_metric(cand.metrics, goal);
    if (!(value >= current) && feasible == cand.metrics.feasible()) break;
    const double gain = value - current;
    cur = std::move(cand);
    current = value;
    feasible = cur.metrics.feasible();
    if (gain < options.tolerance) break;
  }
  set_delay_slacks(cur.state, scenario, options.min_delay_slack);
  return std::move(cur.state);
}

}  // namespace maee
