// SPDX-License-Identifier: Apache-2.0
//
// Field-response channel model for a single movable antenna on a line segment.
// A user's channel to an N-antenna base station is h(x) = G^H f(x), where G is
// the L x N path-response matrix and f(x) holds one unit phasor per path.

#ifndef MAEE_CHANNEL_HPP
#define MAEE_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maee/error.hpp"

namespace maee {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using CVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar virtual_aod(Scalar elevation, Scalar azimuth) {
  return std::sin(elevation) * std::cos(azimuth);
}

template <typename Scalar>
struct PathGeometry {
  VectorX<Scalar> elevation;
  VectorX<Scalar> azimuth;
  VectorX<Scalar> virtual_aod;

  static PathGeometry from_angles(const VectorX<Scalar>& elevation, const VectorX<Scalar>& azimuth) {
    if (elevation.size() != azimuth.size())
      throw Error(ErrorCode::InvalidArgument, "elevation/azimuth length mismatch");
    PathGeometry g{elevation, azimuth, VectorX<Scalar>(elevation.size())};
    for (Eigen::Index l = 0; l < elevation.size(); ++l)
      g.virtual_aod[l] = maee::virtual_aod(elevation[l], azimuth[l]);
    return g;
  }

  /// Angles are reconstructed as (asin(aod), 0) so the invariant aod = sin(el)cos(az) holds.
  static PathGeometry from_virtual_aod(const VectorX<Scalar>& aod) {
    for (Eigen::Index l = 0; l < aod.size(); ++l) {
      if (!(aod[l] >= Scalar(-1) && aod[l] <= Scalar(1)))
        throw Error(ErrorCode::InvalidArgument, "virtual AoD outside [-1, 1]");
    }
    PathGeometry g{VectorX<Scalar>(aod.size()), VectorX<Scalar>::Zero(aod.size()), aod};
    for (Eigen::Index l = 0; l < aod.size(); ++l) g.elevation[l] = std::asin(aod[l]);
    return g;
  }

  Eigen::Index size() const { return virtual_aod.size(); }
};

template <typename Scalar>
class ChannelRealization {
 public:
  ChannelRealization(CMatrixX<Scalar> path_response, PathGeometry<Scalar> geometry, Scalar wavelength)
      : path_response_(std::move(path_response)), geometry_(std::move(geometry)), wavelength_(wavelength) {
    if (path_response_.rows() < 1 || path_response_.cols() < 1)
      throw Error(ErrorCode::InvalidArgument, "path response must have at least one path and one BS antenna");
    if (geometry_.size() != path_response_.rows())
      throw Error(ErrorCode::InvalidArgument, "geometry has " + std::to_string(geometry_.size()) +
                                                  " paths, path response has " +
                                                  std::to_string(path_response_.rows()));
    if (!(wavelength_ > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "wavelength must be positive");
  }

  const CMatrixX<Scalar>& path_response() const { return path_response_; }
  const PathGeometry<Scalar>& geometry() const { return geometry_; }
  const VectorX<Scalar>& virtual_aod() const { return geometry_.virtual_aod; }
  Scalar wavelength() const { return wavelength_; }
  Eigen::Index num_paths() const { return path_response_.rows(); }
  Eigen::Index num_bs_antennas() const { return path_response_.cols(); }

  /// Same propagation coefficients seen through different path angles.
  ChannelRealization with_geometry(PathGeometry<Scalar> geometry) const {
    return ChannelRealization(path_response_, std::move(geometry), wavelength_);
  }

 private:
  CMatrixX<Scalar> path_response_;
  PathGeometry<Scalar> geometry_;
  Scalar wavelength_;
};

template <typename Scalar>
CVectorX<Scalar> field_response(Scalar x, const VectorX<Scalar>& aod, Scalar wavelength) {
  if (!(wavelength > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "wavelength must be positive");
  const Scalar k = Scalar(2) * std::numbers::pi_v<Scalar> / wavelength;
  CVectorX<Scalar> f(aod.size());
  for (Eigen::Index l = 0; l < aod.size(); ++l) f[l] = std::polar(Scalar(1), k * x * aod[l]);
  return f;
}

template <typename Scalar>
CVectorX<Scalar> field_response(Scalar x, const PathGeometry<Scalar>& geometry, Scalar wavelength) {
  return field_response(x, geometry.virtual_aod, wavelength);
}

template <typename Scalar>
CVectorX<Scalar> channel_vector(const ChannelRealization<Scalar>& chan, Scalar x) {
  return chan.path_response().adjoint() * field_response(x, chan.virtual_aod(), chan.wavelength());
}

template <typename Scalar>
Scalar channel_gain(const ChannelRealization<Scalar>& chan, Scalar x) {
  return channel_vector(chan, x).squaredNorm();
}

/// Channel matrix H = [h_1 ... h_K] for users at the given positions.
template <typename Scalar>
CMatrixX<Scalar> channel_matrix(std::span<const ChannelRealization<Scalar>> channels,
                                std::span<const Scalar> positions) {
  if (channels.size() != positions.size())
    throw Error(ErrorCode::InvalidArgument, "one position per channel required");
  if (channels.empty()) throw Error(ErrorCode::InvalidArgument, "no channels");
  const Eigen::Index n = channels.front().num_bs_antennas();
  CMatrixX<Scalar> h(n, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].num_bs_antennas() != n)
      throw Error(ErrorCode::InvalidArgument, "users disagree on BS antenna count");
    h.col(static_cast<Eigen::Index>(k)) = channel_vector(channels[k], positions[k]);
  }
  return h;
}

template <typename Scalar>
struct CrossTerm {
  int a;  // 0-based path indices, a < b
  int b;
  Scalar magnitude;  // |R_ab|
  Scalar phase;      // arg R_ab
  Scalar aod_diff;   // aod_b - aod_a
};

/// Closed form of the Hermitian form f(x)^H R f(x):
///   trace(R) + sum_{a<b} 2 |R_ab| cos(2 pi x aod_ab / lambda + arg R_ab).
/// With R = G G^H this is the channel gain; with R = G w w^H G^H p it is one
/// received-power term of a multi-user link.
template <typename Scalar>
struct PhaseExpansion {
  Scalar constant_term{};
  std::vector<CrossTerm<Scalar>> cross_terms;
  Scalar wavelength{1};

  Scalar wavenumber() const { return Scalar(2) * std::numbers::pi_v<Scalar> / wavelength; }

  Scalar value(Scalar x) const {
    const Scalar k = wavenumber();
    Scalar v = constant_term;
    for (const auto& t : cross_terms) v += Scalar(2) * t.magnitude * std::cos(k * x * t.aod_diff + t.phase);
    return v;
  }

  Scalar derivative(Scalar x) const {
    const Scalar k = wavenumber();
    Scalar d{};
    for (const auto& t : cross_terms) d -= Scalar(2) * t.magnitude * k * t.aod_diff * std::sin(k * x * t.aod_diff + t.phase);
    return d;
  }

  Scalar second_derivative(Scalar x) const {
    const Scalar k = wavenumber();
    Scalar d{};
    for (const auto& t : cross_terms)
      d -= Scalar(2) * t.magnitude * k * k * t.aod_diff * t.aod_diff * std::cos(k * x * t.aod_diff + t.phase);
    return d;
  }

  /// sum 8 pi^2 |R_ab| aod_ab^2 / lambda^2, a global bound on |second_derivative|.
  Scalar curvature_bound() const {
    const Scalar k = wavenumber();
    Scalar e{};
    for (const auto& t : cross_terms) e += Scalar(2) * t.magnitude * k * k * t.aod_diff * t.aod_diff;
    return e;
  }
};

template <typename Scalar>
PhaseExpansion<Scalar> expand_hermitian_form(const CMatrixX<Scalar>& r, const VectorX<Scalar>& aod, Scalar wavelength) {
  if (r.rows() != r.cols() || r.rows() != aod.size())
    throw Error(ErrorCode::InvalidArgument, "Hermitian form and AoD sizes disagree");
  PhaseExpansion<Scalar> e;
  e.wavelength = wavelength;
  e.constant_term = r.diagonal().real().sum();
  const int l = static_cast<int>(r.rows());
  e.cross_terms.reserve(static_cast<std::size_t>(l * (l - 1) / 2));
  for (int a = 0; a < l; ++a) {
    for (int b = a + 1; b < l; ++b) {
      const std::complex<Scalar> m = r(a, b);
      e.cross_terms.push_back({a, b, std::abs(m), std::arg(m), aod[b] - aod[a]});
    }
  }
  return e;
}

template <typename Scalar>
using GainExpansion = PhaseExpansion<Scalar>;

template <typename Scalar>
GainExpansion<Scalar> gain_expansion(const ChannelRealization<Scalar>& chan) {
  const CMatrixX<Scalar>& g = chan.path_response();
  return expand_hermitian_form<Scalar>(g * g.adjoint(), chan.virtual_aod(), chan.wavelength());
}

template <typename Scalar>
Scalar two_path_period(const ChannelRealization<Scalar>& chan) {
  if (chan.num_paths() != 2) throw Error(ErrorCode::InvalidArgument, "two-path period needs exactly two paths");
  const Scalar diff = std::abs(chan.virtual_aod()[1] - chan.virtual_aod()[0]);
  if (diff == Scalar(0)) throw Error(ErrorCode::DegeneratePaths, "coincident virtual AoDs");
  return chan.wavelength() / diff;
}

/// Grid value -1 + (2q - 1)/Q for 1 <= q <= Q.
template <typename Scalar>
Scalar quantized_aod_value(int q, int resolution) {
  return Scalar(-1) + Scalar(2 * q - 1) / Scalar(resolution);
}

/// Index of the nearest quantized AoD.
template <typename Scalar>
int quantize_aod_index(Scalar aod, int resolution) {
  if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "quantization resolution must be >= 1");
  const Scalar q = std::round((aod + Scalar(1)) * Scalar(resolution) / Scalar(2) + Scalar(0.5));
  return std::clamp(static_cast<int>(q), 1, resolution);
}

template <typename Scalar>
PathGeometry<Scalar> quantize_geometry(const PathGeometry<Scalar>& g, int resolution) {
  VectorX<Scalar> aod(g.size());
  for (Eigen::Index l = 0; l < g.size(); ++l)
    aod[l] = quantized_aod_value<Scalar>(quantize_aod_index(g.virtual_aod[l], resolution), resolution);
  return PathGeometry<Scalar>::from_virtual_aod(aod);
}

/// Minimum period Q lambda / (2c) of the gain when every AoD sits on the
/// resolution-Q grid; c is the gcd of the consecutive index gaps.
template <typename Scalar>
Scalar quantized_period(std::span<const int> q_indices, int resolution, Scalar wavelength) {
  if (q_indices.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two quantized AoDs");
  if (!(wavelength > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "wavelength must be positive");
  int c = 0;
  for (std::size_t i = 0; i < q_indices.size(); ++i) {
    if (q_indices[i] < 1 || q_indices[i] > resolution)
      throw Error(ErrorCode::InvalidArgument, "quantized index outside [1, Q]");
    if (i == 0) continue;
    const int gap = q_indices[i] - q_indices[i - 1];
    if (gap < 0) throw Error(ErrorCode::InvalidArgument, "quantized indices must be sorted");
    if (gap > 0) c = std::gcd(c, gap);
  }
  if (c == 0) throw Error(ErrorCode::DegeneratePaths, "all quantized AoDs coincide");
  return Scalar(resolution) * wavelength / (Scalar(2) * Scalar(c));
}

template <typename Scalar>
struct ChannelParams {
  Scalar reference_path_loss{Scalar(1e-4)};  // rho_0, linear
  Scalar distance{Scalar(50)};
  Scalar path_loss_exponent{Scalar(2.8)};
  int num_paths{10};
  int num_bs_antennas{16};
  Scalar wavelength{Scalar(0.01)};

  Scalar entry_variance() const {
    return reference_path_loss * std::pow(distance, -path_loss_exponent) / Scalar(num_paths);
  }
};

/// Draws one user: CN(0, rho0 d^-tau / L) path responses, elevation and
/// azimuth i.i.d. uniform on [0, pi].
template <typename Scalar, typename Rng>
ChannelRealization<Scalar> sample_channel(const ChannelParams<Scalar>& params, Rng& rng) {
  if (params.num_paths < 1 || params.num_bs_antennas < 1)
    throw Error(ErrorCode::InvalidArgument, "need at least one path and one BS antenna");
  std::uniform_real_distribution<Scalar> angle(Scalar(0), std::numbers::pi_v<Scalar>);
  std::normal_distribution<Scalar> gauss(Scalar(0), std::sqrt(params.entry_variance() / Scalar(2)));
  const int l = params.num_paths;
  VectorX<Scalar> el(l), az(l);
  for (int i = 0; i < l; ++i) {
    el[i] = angle(rng);
    az[i] = angle(rng);
  }
  CMatrixX<Scalar> g(l, params.num_bs_antennas);
  for (int i = 0; i < l; ++i)
    for (int n = 0; n < params.num_bs_antennas; ++n) {
      const Scalar re = gauss(rng);
      const Scalar im = gauss(rng);
      g(i, n) = {re, im};
    }
  return ChannelRealization<Scalar>(std::move(g), PathGeometry<Scalar>::from_angles(el, az), params.wavelength);
}

/// All users of one trial, drawn in user-index order from a single generator.
template <typename Scalar>
std::vector<ChannelRealization<Scalar>> sample_channels(const ChannelParams<Scalar>& params, int num_users,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ChannelRealization<Scalar>> out;
  out.reserve(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) out.push_back(sample_channel(params, rng));
  return out;
}

template <typename Scalar>
ChannelRealization<Scalar> sample_channel(const ChannelParams<Scalar>& params, int user_index, std::uint64_t seed) {
  if (user_index < 0) throw Error(ErrorCode::InvalidArgument, "negative user index");
  return sample_channels(params, user_index + 1, seed).back();
}

using Channel = ChannelRealization<double>;

}  // namespace maee

#endif  // MAEE_CHANNEL_HPP
